#include "safeadapt/batch.hpp"

#include <chrono>
#include <exception>

namespace safeadapt {

namespace {

RunResult run_one(const RunSpec& spec) {
  RunResult out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    out.trace = run(spec.scenario, spec.method, spec.smid, spec.seed);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace

std::vector<RunResult> run_batch_serial(const std::vector<RunSpec>& specs) {
  std::vector<RunResult> out(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) out[i] = run_one(specs[i]);
  return out;
}

std::vector<RunResult> run_batch(const std::vector<RunSpec>& specs) {
  std::vector<RunResult> out(specs.size());
  const long n = static_cast<long>(specs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) out[i] = run_one(specs[i]);
  return out;
}

}  // namespace safeadapt
