#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rankzip {

enum class ErrorCode {
    InvalidArgument,
    Io,
    // remote prediction
    RemoteUnavailable,
    VocabMismatch,
    ProtocolError,
    // decoding
    CorruptStream,
    LengthMismatch,
    // container
    NotAContainer,
    Truncated,
    UnsupportedVersion,
    InvalidHeader,
    // metrics
    DivisionByZero,
    NoOverlap,
    DegenerateCurve,
    InvalidReading,
    EmptyInput,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace rankzip
