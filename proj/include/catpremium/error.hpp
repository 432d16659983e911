#pragma once

#include <stdexcept>
#include <string>

namespace catpremium {

/// Broad failure categories. The CLI maps these onto exit codes.
enum class ErrorKind {
    config,      // bad parameters or missing configuration keys
    io,          // unreadable or unwritable files
    data,        // malformed or insufficient input data
    infeasible,  // an optimization problem has no admissible solution
    numeric,     // solver stalled or produced unusable values
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

}  // namespace catpremium
