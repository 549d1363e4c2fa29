#include "nfsim/error.hpp"

namespace nfsim {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::Capacity: return "capacity";
        case ErrorKind::DimensionMismatch: return "dimension-mismatch";
        case ErrorKind::HistoryUnderrun: return "history-underrun";
        case ErrorKind::NonMonotoneTime: return "non-monotone-time";
        case ErrorKind::NoConvergence: return "no-convergence";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::UnknownPreset: return "unknown-preset";
        case ErrorKind::Config: return "config";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

}  // namespace nfsim
