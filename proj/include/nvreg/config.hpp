#pragma once
// INI-style run configuration with SI unit suffixes, plus the CSV trace
// format shared by the CLI and its tests.

#include <string>
#include <tuple>
#include <vector>

#include "nvreg/sequences.hpp"
#include "nvreg/spincore.hpp"

namespace nvreg {

// Accepted value forms: plain numbers, numbers with a unit suffix
// (GHz MHz kHz Hz | s ms us ns | T mT uT G | m mm um nm pm), and
// comma vectors "x,y,z [unit]".
class Config {
public:
    static Config load(const std::string& path);
    static Config parse(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    const std::string& get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;

    double number(const std::string& section, const std::string& key) const;
    double quantity(const std::string& section, const std::string& key) const;
    double quantity_or(const std::string& section, const std::string& key,
                       double fallback) const;
    Vec3 vector3(const std::string& section, const std::string& key) const;
    bool flag(const std::string& section, const std::string& key, bool fallback) const;

    // insertion-ordered (section, key, value) triples, for output echoes
    const std::vector<std::tuple<std::string, std::string, std::string>>& items() const {
        return items_;
    }

private:
    std::vector<std::tuple<std::string, std::string, std::string>> items_;
};

// "value unit" -> SI double; bare numbers pass through
double parse_quantity(const std::string& text);

void write_trace_csv(std::ostream& out, const SignalTrace& trace,
                     const std::vector<std::string>& header_comments);
SignalTrace load_trace_csv(const std::string& path);

}  // namespace nvreg
