#pragma once

#include <stdexcept>
#include <string>

namespace heattrack {

enum class ErrorKind {
    InvalidSignal,
    InvalidGrid,
    GridTooCoarse,
    IncompatibleGrid,
    SingularJet,
    InvalidOrder,
    OrderCap,
    OutOfRange,
    OutOfDomain,
    DivergentSeries,
    IncompatibleTarget,
    InvalidInput,
    Stability,
    InsufficientSupport,
    Config,
    Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` lets callers (the CLI in
/// particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace heattrack
