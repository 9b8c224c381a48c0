#pragma once

#include "safeadapt/sim.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace safeadapt {

// Exit codes.
constexpr int kExitOk = 0;
constexpr int kExitBadArgs = 1;
constexpr int kExitAborted = 2;
constexpr int kExitCheckFailed = 3;

struct RunReport {
  std::string scenario;
  std::string method;
  bool smid = false;
  std::uint64_t seed = 0;
  double min_h = 0.0;
  double final_tracking_error = 0.0;
  double beta_zero_time = -1.0;     // ebsf only
  double final_delta_ebsb = -1.0;   // ebsb only
  double jitter = 0.0;
  double wall_seconds = 0.0;
  std::string trace_path, report_path;
};

// Metrics only look at the rows, so a trace read back from CSV gives the same report.
RunReport make_report(const Trace& trace);
std::string report_to_json(const RunReport& r);

int cmd_simulate(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_compare(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_check(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Dispatches on the first argument (simulate, compare, check).
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace safeadapt
