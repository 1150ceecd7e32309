#ifndef RISKBENCH_ERROR_HPP
#define RISKBENCH_ERROR_HPP

#include <stdexcept>
#include <string>

namespace riskbench {

enum class ErrorKind {
    DimensionMismatch,
    AllZero,
    NoConvergence,
    DomainError,
    EmptyInput,
    EmptyCluster,
    TooLarge,
    EmptyNet,
    EmptyPool,
    Underdetermined,
    SampleTooLarge,
    ParseError,
    InconsistentWidth,
    ChecksumMismatch,
    NetworkError,
    IoError,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and tests)
/// can branch on the category without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::AllZero: return "AllZero";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::EmptyCluster: return "EmptyCluster";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::EmptyNet: return "EmptyNet";
        case ErrorKind::EmptyPool: return "EmptyPool";
        case ErrorKind::Underdetermined: return "Underdetermined";
        case ErrorKind::SampleTooLarge: return "SampleTooLarge";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::InconsistentWidth: return "InconsistentWidth";
        case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
        case ErrorKind::NetworkError: return "NetworkError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace riskbench

#endif  // RISKBENCH_ERROR_HPP
