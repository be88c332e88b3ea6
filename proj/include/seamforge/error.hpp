#pragma once

#include <stdexcept>
#include <string>

namespace seamforge {

/// Failure categories surfaced to callers (and mapped to C API status codes).
enum class ErrorCode {
    InvalidArgument,
    InvalidParameter,
    EmptyInput,
    InsufficientPoints,
    DegenerateNeighborhood,
    DegenerateSystem,
    DegenerateFrame,
    NoOverlap,
    ParseError,
    DataError,
    InvalidPose,
    EmptyView,
    AmbiguousRotation,
    IoError,
    Internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace seamforge
