#include "weldfcs/errors.hpp"

namespace weldfcs {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::BoxTooSmall: return "BoxTooSmall";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::QOnUnitCircle: return "QOnUnitCircle";
    case ErrorCode::TruncationTooCoarse: return "TruncationTooCoarse";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::DerivativeUnresolved: return "DerivativeUnresolved";
    case ErrorCode::SupportClipped: return "SupportClipped";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::SeriesInfeasible: return "SeriesInfeasible";
    case ErrorCode::DeltaBetaZero: return "DeltaBetaZero";
    case ErrorCode::PoleHit: return "PoleHit";
  }
  return "Unknown";
}

}  // namespace weldfcs
