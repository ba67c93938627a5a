#include "rigidity/errors.hpp"

namespace rigidity {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Trapped: return "Trapped";
    case ErrorKind::TangentExit: return "TangentExit";
    case ErrorKind::NonPositive: return "NonPositive";
    case ErrorKind::OutOfClass: return "OutOfClass";
    case ErrorKind::IdentityViolation: return "IdentityViolation";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace rigidity
