#include "safeadapt/cli.hpp"

#include "safeadapt/batch.hpp"
#include "safeadapt/errors.hpp"
#include "safeadapt/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace safeadapt {

RunReport make_report(const Trace& trace) {
  RunReport r;
  r.method = to_string(trace.method);
  r.smid = trace.smid;
  r.seed = trace.seed;
  r.min_h = min_h(trace);
  r.final_tracking_error = final_tracking_error(trace);
  r.jitter = jitter_metric(trace);
  if (!trace.rows.empty()) {
    if (!std::isnan(trace.rows.back().beta_ebsf)) r.beta_zero_time = beta_zero_time(trace);
    if (!std::isnan(trace.rows.back().delta_ebsb)) r.final_delta_ebsb = trace.rows.back().delta_ebsb;
  }
  return r;
}

std::string report_to_json(const RunReport& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["method"] = r.method;
  j["smid"] = r.smid;
  j["seed"] = r.seed;
  j["min_h"] = r.min_h;
  j["final_tracking_error"] = r.final_tracking_error;
  j["beta_zero_time"] = r.beta_zero_time;
  j["final_delta_ebsb"] = r.final_delta_ebsb;
  j["jitter"] = r.jitter;
  j["wall_seconds"] = r.wall_seconds;
  j["trace_path"] = r.trace_path;
  j["report_path"] = r.report_path;
  return j.dump(2);
}

namespace {

struct CommonFlags {
  std::string scenario = "default_p2";
  std::uint64_t seed = 0;
  std::string out = ".";
  double horizon = -1.0;
  double rate = -1.0;
  bool smid = false;
};

void add_common(CLI::App& app, CommonFlags& f) {
  app.add_option("--scenario", f.scenario, "builtin name (default_p1, default_p2) or JSON file");
  app.add_option("--seed", f.seed, "RNG seed");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--horizon", f.horizon, "override horizon [s]");
  app.add_option("--rate", f.rate, "override control rate [Hz]");
  app.add_flag("--smid", f.smid, "enable set-membership identification");
}

Scenario scenario_from_flags(const CommonFlags& f) {
  Scenario s = load_scenario(f.scenario);
  if (f.horizon > 0.0) s.horizon = f.horizon;
  if (f.rate > 0.0) s.control_rate = f.rate;
  return s;
}

// CLI11 consumes arguments from the back.
int parse(CLI::App& app, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return -1;
  } catch (const CLI::ParseError& e) {
    err << "error[BadArguments]: " << e.what() << '\n';
    return kExitBadArgs;
  }
  return kExitOk;
}

std::string run_stem(const Scenario& s, Method m, bool smid) {
  return s.name + "_" + to_string(m) + (smid ? "_smid" : "");
}

int report_error(const Error& e, std::ostream& err) {
  err << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
  return e.code() == ErrorCode::SimulationAborted ? kExitAborted : kExitBadArgs;
}

}  // namespace

int cmd_simulate(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"run one closed-loop simulation", "simulate"};
  CommonFlags f;
  std::string method;
  add_common(app, f);
  app.add_option("--method", method, "ideal, ebsb, ebsf, acbf or racbf")->required();
  if (int rc = parse(app, args, out, err); rc != kExitOk) return rc < 0 ? kExitOk : rc;
  try {
    const Scenario s = scenario_from_flags(f);
    const Method m = parse_method(method);
    if (m == Method::Ebsb && s.problem != Problem::P1) {
      err << "error[InvalidScenario]: ebsb needs a known input gain; scenario '" << s.name << "' is problem p2\n";
      return kExitBadArgs;
    }
    const Benchmark b = build_benchmark(s);
    for (const auto& a : b.adjustments) err << "note: " << a << '\n';
    const auto t0 = std::chrono::steady_clock::now();
    const Trace trace = run(b, m, f.smid, f.seed);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::filesystem::create_directories(f.out);
    RunReport rep = make_report(trace);
    rep.scenario = s.name;
    rep.wall_seconds = wall;
    const std::filesystem::path dir(f.out);
    rep.trace_path = (dir / (run_stem(s, m, f.smid) + ".csv")).string();
    rep.report_path = (dir / (run_stem(s, m, f.smid) + ".json")).string();
    write_trace_csv(rep.trace_path, trace);
    const std::string text = report_to_json(rep);
    write_file_atomic(rep.report_path, text + "\n");
    out << text << '\n';
    return kExitOk;
  } catch (const Error& e) {
    return report_error(e, err);
  } catch (const std::exception& e) {
    err << "error[Io]: " << e.what() << '\n';
    return kExitBadArgs;
  }
}

int cmd_compare(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"compare the governors applicable to a scenario", "compare"};
  CommonFlags f;
  add_common(app, f);
  if (int rc = parse(app, args, out, err); rc != kExitOk) return rc < 0 ? kExitOk : rc;
  Scenario s;
  try {
    s = scenario_from_flags(f);
    build_benchmark(s);
  } catch (const Error& e) {
    return report_error(e, err);
  }
  std::vector<Method> methods{Method::Ideal, Method::Acbf, Method::Racbf};
  if (s.problem == Problem::P1) methods.push_back(Method::Ebsb);
  methods.push_back(Method::Ebsf);
  std::vector<RunSpec> specs;
  for (bool smid : f.smid ? std::vector<bool>{false, true} : std::vector<bool>{false})
    for (Method m : methods) specs.push_back({s, m, smid, f.seed});
  const std::vector<RunResult> results = run_batch(specs);

  std::ostringstream csv;
  csv << std::setprecision(10);
  csv << "method,smid,status,min_h,final_tracking_error,jitter,beta_zero_time,final_delta_ebsb,wall_seconds\n";
  bool any_failed = false;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const RunResult& r = results[i];
    csv << to_string(specs[i].method) << ',' << (specs[i].smid ? 1 : 0) << ',';
    if (!r.trace) {
      any_failed = true;
      err << "error[SimulationAborted]: " << r.error << '\n';
      csv << "aborted,,,,,,\n";
      continue;
    }
    const RunReport rep = make_report(*r.trace);
    csv << "ok," << rep.min_h << ',' << rep.final_tracking_error << ',' << rep.jitter << ',' << rep.beta_zero_time
        << ',' << rep.final_delta_ebsb << ',' << r.wall_seconds << '\n';
  }
  try {
    std::filesystem::create_directories(f.out);
    write_file_atomic((std::filesystem::path(f.out) / ("compare_" + s.name + ".csv")).string(), csv.str());
  } catch (const std::exception& e) {
    err << "error[Io]: " << e.what() << '\n';
    return kExitBadArgs;
  }
  out << csv.str();
  return any_failed ? kExitAborted : kExitOk;
}

int cmd_check(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"report assumption checks for a scenario", "check"};
  std::string scenario = "default_p2";
  app.add_option("--scenario", scenario, "builtin name or JSON file");
  if (int rc = parse(app, args, out, err); rc != kExitOk) return rc < 0 ? kExitOk : rc;
  Scenario s;
  try {
    s = load_scenario(scenario);
  } catch (const Error& e) {
    return report_error(e, err);
  }
  const AssumptionReport rep = check_scenario(s);
  for (const auto& c : rep.checks)
    out << std::left << std::setw(20) << c.name << std::setw(14) << to_string(c.status)
        << (c.sampled ? "sampled " : "exact   ") << c.detail << '\n';
  return rep.ok() ? kExitOk : kExitCheckFailed;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const std::string usage = "usage: safeadapt <simulate|compare|check> [options]\n";
  if (args.empty()) {
    err << usage;
    return kExitBadArgs;
  }
  const std::vector<std::string> rest(args.begin() + 1, args.end());
  if (args[0] == "simulate") return cmd_simulate(rest, out, err);
  if (args[0] == "compare") return cmd_compare(rest, out, err);
  if (args[0] == "check") return cmd_check(rest, out, err);
  if (args[0] == "--help" || args[0] == "-h") {
    out << usage;
    return kExitOk;
  }
  err << "error[BadArguments]: unknown command '" << args[0] << "'\n" << usage;
  return kExitBadArgs;
}

}  // namespace safeadapt
