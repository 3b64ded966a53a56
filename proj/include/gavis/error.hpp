#pragma once

#include <stdexcept>
#include <string>

namespace gavis {

// Base of every error raised by the library. `code()` is a short stable
// identifier (e.g. "NotInvertible") that the service and CLI surface verbatim.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace gavis
