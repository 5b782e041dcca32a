#pragma once

#include <stdexcept>
#include <string>

namespace explic {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SyntaxError : Error {
    std::size_t line, col;
    SyntaxError(const std::string& msg, std::size_t line_, std::size_t col_)
        : Error("syntax error at " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
          line(line_), col(col_) {}
};

struct ValidationError : Error {
    using Error::Error;
};

// complement state cap, deadline, node table exhaustion
struct ResourceError : Error {
    using Error::Error;
};

}  // namespace explic
