#include "heattrack/error.hpp"

namespace heattrack {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidSignal: return "invalid-signal";
        case ErrorKind::InvalidGrid: return "invalid-grid";
        case ErrorKind::GridTooCoarse: return "grid-too-coarse";
        case ErrorKind::IncompatibleGrid: return "incompatible-grid";
        case ErrorKind::SingularJet: return "singular-jet";
        case ErrorKind::InvalidOrder: return "invalid-order";
        case ErrorKind::OrderCap: return "order-cap";
        case ErrorKind::OutOfRange: return "out-of-range";
        case ErrorKind::OutOfDomain: return "out-of-domain";
        case ErrorKind::DivergentSeries: return "divergent-series";
        case ErrorKind::IncompatibleTarget: return "incompatible-target";
        case ErrorKind::InvalidInput: return "invalid-input";
        case ErrorKind::Stability: return "stability";
        case ErrorKind::InsufficientSupport: return "insufficient-support";
        case ErrorKind::Config: return "config";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

}  // namespace heattrack
