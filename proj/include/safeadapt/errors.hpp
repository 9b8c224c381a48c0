#pragma once

#include <stdexcept>
#include <string>

namespace safeadapt {

enum class ErrorCode {
  NotHurwitz,
  Infeasible,
  OutOfDomain,
  NonFiniteState,
  NotConverged,
  PointOutsideSet,
  Unbounded,
  EmptyInterior,
  UnsupportedDegree,
  NonOrthonormalBasis,
  SingularLambdaHat,
  ReferenceUnsafe,
  InfeasibleAtSingularGradient,
  IllConditioned,
  InvalidScenario,
  SimulationAborted,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace safeadapt
