#pragma once

#include <stdexcept>
#include <string>

namespace fdsdr {

enum class ErrorKind {
    InvalidInput,
    Singularity,
    DegenerateProjection,
    DegenerateSample,
    NonPsdKernel,
    OptimizationFailure,
    Parse,
    Config,
};

inline const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidInput: return "invalid-input";
        case ErrorKind::Singularity: return "singularity";
        case ErrorKind::DegenerateProjection: return "degenerate-projection";
        case ErrorKind::DegenerateSample: return "degenerate-sample";
        case ErrorKind::NonPsdKernel: return "non-psd-kernel";
        case ErrorKind::OptimizationFailure: return "optimization-failure";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Config: return "config";
    }
    return "unknown";
}

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

namespace detail {

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw Error(kind, what);
}

}  // namespace detail

}  // namespace fdsdr
