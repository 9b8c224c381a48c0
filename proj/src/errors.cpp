#include "safeadapt/errors.hpp"

namespace safeadapt {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHurwitz: return "NotHurwitz";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::PointOutsideSet: return "PointOutsideSet";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    case ErrorCode::UnsupportedDegree: return "UnsupportedDegree";
    case ErrorCode::NonOrthonormalBasis: return "NonOrthonormalBasis";
    case ErrorCode::SingularLambdaHat: return "SingularLambdaHat";
    case ErrorCode::ReferenceUnsafe: return "ReferenceUnsafe";
    case ErrorCode::InfeasibleAtSingularGradient: return "InfeasibleAtSingularGradient";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::SimulationAborted: return "SimulationAborted";
  }
  return "Unknown";
}

}  // namespace safeadapt
