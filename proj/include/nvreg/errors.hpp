#pragma once
#include <stdexcept>
#include <string>

namespace nvreg {

// eigenlevel has no dominant product-basis component, or an unlabeled level was queried
struct LabelingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    int line, col;
    ParseError(int line_, int col_, const std::string& what_)
        : std::runtime_error("line " + std::to_string(line_) + ":" + std::to_string(col_) +
                             ": " + what_),
          line(line_), col(col_) {}
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// optimizer failed to converge from every start
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nvreg
