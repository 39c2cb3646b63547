#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace roperc {

/// Invalid input or a violated precondition. Maps to CLI exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Graph file syntax or validation failure, tagged with a 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace roperc
