#pragma once

#include <stdexcept>
#include <string>

namespace scma_ura {

enum class ErrorCode {
    EmptyMatrix,
    NonRegular,
    DuplicateColumn,
    MalformedInput,
    UnknownName,
    DimensionMismatch,
    InconsistentPattern,
    InvalidIndex,
    UnsupportedDv,
    EmptyFrame,
    TooLarge,
    InvalidConfig,
};

inline const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::NonRegular: return "NonRegular";
    case ErrorCode::DuplicateColumn: return "DuplicateColumn";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InconsistentPattern: return "InconsistentPattern";
    case ErrorCode::InvalidIndex: return "InvalidIndex";
    case ErrorCode::UnsupportedDv: return "UnsupportedDv";
    case ErrorCode::EmptyFrame: return "EmptyFrame";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

/// Every failure in the library is reported through this type; `code()`
/// lets callers (the CLI in particular) map failures onto exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace scma_ura
