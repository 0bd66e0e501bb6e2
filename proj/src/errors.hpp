#pragma once

#include <stdexcept>
#include <string>

namespace qpma {

// Scenario/report text could not be parsed. Carries the 1-based line number
// when the failure is tied to a specific line (0 otherwise).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message
                                  : std::move(message)),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// A domain invariant or precondition was violated. The message names the
// violated invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& message)
        : std::runtime_error(message) {}
};

// A size guard was exceeded (dense dimension, enumeration count, ...).
class GuardError : public std::runtime_error {
public:
    explicit GuardError(const std::string& message)
        : std::runtime_error(message) {}
};

} // namespace qpma
