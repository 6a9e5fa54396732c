#pragma once

#include <stdexcept>
#include <string>

namespace lineart {

enum class ErrorKind {
    parameter,   // a knob or argument outside its contract
    input,       // unreadable or degenerate input data
    validation,  // an artifact failed schema or hash checks
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

}  // namespace lineart
