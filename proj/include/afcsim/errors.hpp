#ifndef AFCSIM_ERRORS_HPP
#define AFCSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace afcsim {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid parameters, domain violations, broken invariants.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Malformed input files; carries a 1-based line number when known.
struct ParseError : Error {
    ParseError(const std::string& msg, long line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_number(line) {}
    long line_number;
};

// Numerical failures: non-convergence, loss of positivity, divergent series.
struct NumericalError : Error {
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// Filesystem failures.
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace afcsim

#endif
