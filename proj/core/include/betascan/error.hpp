#pragma once

#include <stdexcept>
#include <string>

namespace betascan {

// Thrown when an exact-enumeration path would exceed its size budget.
// Exact oracles never fall back to approximations; they refuse instead.
class capacity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when a requested signal strength would need tanh(A) >= 1, i.e. the
// requested boundary point is unreachable at the given (n, lambda).
class saturation_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// File I/O failure; the message always names the offending path.
class io_error : public std::runtime_error {
public:
    io_error(const std::string& path, const std::string& what)
        : std::runtime_error(what + " (path: " + path + ")"), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

} // namespace betascan
