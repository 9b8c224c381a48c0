#pragma once

#include "safeadapt/sim.hpp"

#include <optional>
#include <string>
#include <vector>

namespace safeadapt {

struct RunSpec {
  Scenario scenario;
  Method method = Method::Ideal;
  bool smid = false;
  std::uint64_t seed = 0;
};

struct RunResult {
  std::optional<Trace> trace;
  std::string error;  // empty on success
  double wall_seconds = 0.0;
};

// Independent runs with no shared mutable state; result i belongs to spec i.
std::vector<RunResult> run_batch(const std::vector<RunSpec>& specs);
std::vector<RunResult> run_batch_serial(const std::vector<RunSpec>& specs);

}  // namespace safeadapt
