#include "recollide/core.hpp"

namespace recollide {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoBoundStates: return "NoBoundStates";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::EnergyBelowAsymptote: return "EnergyBelowAsymptote";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NoReturn: return "NoReturn";
    case ErrorCode::ZeroField: return "ZeroField";
    case ErrorCode::TravelTooShort: return "TravelTooShort";
    case ErrorCode::ClosedChannel: return "ClosedChannel";
    case ErrorCode::SliceOutOfRange: return "SliceOutOfRange";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Convergence: return "ConvergenceError";
  }
  return "Error";
}

}  // namespace recollide
