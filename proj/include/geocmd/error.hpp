#pragma once

#include <stdexcept>
#include <string>

namespace geocmd {

// Base for every error raised by the library. code() is a stable,
// machine-readable identifier ("ArityMismatch", "AuthError", ...) that the
// CLI and the Python bindings surface verbatim.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace geocmd
