#include "nvreg/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nvreg/errors.hpp"
#include "nvreg/util.hpp"

namespace nvreg {

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": bad section");
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        cfg.items_.emplace_back(section, key, value);
    }
    return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
    for (const auto& [s, k, v] : items_)
        if (s == section && k == key) return true;
    return false;
}

const std::string& Config::get(const std::string& section, const std::string& key) const {
    for (const auto& [s, k, v] : items_)
        if (s == section && k == key) return v;
    throw ConfigError("config: missing [" + section + "] " + key);
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double parse_quantity(const std::string& text) {
    static const std::vector<std::pair<std::string, double>> units{
        {"GHz", 1e9}, {"MHz", 1e6}, {"kHz", 1e3}, {"Hz", 1.0},  //
        {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9},                //
        {"mT", 1e-3}, {"uT", 1e-6}, {"mm", 1e-3}, {"um", 1e-6},  //
        {"nm", 1e-9}, {"pm", 1e-12}, {"G", 1e-4},                //
        {"s", 1.0},   {"T", 1.0},   {"m", 1.0}};
    std::string s = trim(text);
    size_t tail = s.size();
    while (tail > 0 && (std::isalpha(static_cast<unsigned char>(s[tail - 1])))) --tail;
    std::string unit = s.substr(tail);
    std::string num = trim(s.substr(0, tail));
    double scale = 1.0;
    if (!unit.empty()) {
        auto it = std::find_if(units.begin(), units.end(),
                               [&](const auto& u) { return u.first == unit; });
        if (it == units.end()) throw ConfigError("unknown unit '" + unit + "' in '" + text + "'");
        scale = it->second;
    }
    if (num.empty()) throw ConfigError("bad quantity '" + text + "'");
    char* end = nullptr;
    double v = std::strtod(num.c_str(), &end);
    if (end != num.c_str() + num.size()) throw ConfigError("bad quantity '" + text + "'");
    return v * scale;
}

double Config::number(const std::string& section, const std::string& key) const {
    const std::string& s = get(section, key);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw ConfigError("config [" + section + "] " + key + ": bad number '" + s + "'");
    return v;
}

double Config::quantity(const std::string& section, const std::string& key) const {
    try {
        return parse_quantity(get(section, key));
    } catch (const ConfigError& e) {
        throw ConfigError("config [" + section + "] " + key + ": " + e.what());
    }
}

double Config::quantity_or(const std::string& section, const std::string& key,
                           double fallback) const {
    return has(section, key) ? quantity(section, key) : fallback;
}

Vec3 Config::vector3(const std::string& section, const std::string& key) const {
    std::string s = trim(get(section, key));
    // optional trailing unit applies to every component
    double scale = 1.0;
    size_t sp = s.find_last_of(" \t");
    if (sp != std::string::npos && s.find(',', sp) == std::string::npos) {
        scale = parse_quantity("1" + trim(s.substr(sp)));
        s = trim(s.substr(0, sp));
    }
    auto parts = split(s, ',');
    if (parts.size() != 3)
        throw ConfigError("config [" + section + "] " + key + ": expected x,y,z [unit]");
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
        std::string p = trim(parts[i]);
        char* end = nullptr;
        v[i] = std::strtod(p.c_str(), &end) * scale;
        if (p.empty() || end != p.c_str() + p.size())
            throw ConfigError("config [" + section + "] " + key + ": bad component '" + p + "'");
    }
    return v;
}

bool Config::flag(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    std::string v = get(section, key);
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config [" + section + "] " + key + ": bad flag '" + v + "'");
}

void write_trace_csv(std::ostream& out, const SignalTrace& trace,
                     const std::vector<std::string>& header_comments) {
    for (const auto& line : header_comments) out << "# " << line << "\n";
    for (const auto& [k, v] : trace.metadata) out << "# " << k << " = " << v << "\n";
    out << "abscissa,value\n";
    char buf[80];
    for (size_t i = 0; i < trace.abscissa.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", trace.abscissa[i], trace.values[i]);
        out << buf;
    }
}

SignalTrace load_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace '" + path + "'");
    SignalTrace trace;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        std::string s = trim(line);
        if (s.empty()) continue;
        if (s[0] == '#') {
            auto eq = s.find('=');
            if (eq != std::string::npos)
                trace.metadata.emplace_back(trim(s.substr(1, eq - 1)), trim(s.substr(eq + 1)));
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            if (s != "abscissa,value")
                throw ConfigError("trace '" + path + "': unexpected header '" + s + "'");
            continue;
        }
        auto parts = split(s, ',');
        if (parts.size() != 2) throw ConfigError("trace '" + path + "': bad row '" + s + "'");
        trace.abscissa.push_back(std::stod(parts[0]));
        trace.values.push_back(std::stod(parts[1]));
    }
    return trace;
}

}  // namespace nvreg
