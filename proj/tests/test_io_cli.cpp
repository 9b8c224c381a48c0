#include "safeadapt/cli.hpp"
#include "safeadapt/errors.hpp"
#include "safeadapt/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace safeadapt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& tag) {
  std::random_device rd;
  const fs::path p = fs::temp_directory_path() / ("safeadapt_" + tag + "_" + std::to_string(rd()));
  fs::create_directories(p);
  return p;
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int rc = cli_main(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

void same_double(double a, double b) {
  if (std::isnan(a)) EXPECT_TRUE(std::isnan(b));
  else EXPECT_EQ(a, b);
}

}  // namespace

TEST(Io, ScenarioJsonRoundTrip) {
  Scenario s = default_p1();
  s.name = "rt";
  s.x0 << 0.1, -0.2, 0.3, 0.0;
  s.hold = HoldMode::Reference;
  s.smid_measurement = SmidMeasurement::Plant;
  s.K = (Mat(2, 4) << -1, 0, -2, 0, 0, -1, 0, -2).finished();
  s.delta = 0.02;
  const Scenario r = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(r.name, "rt");
  EXPECT_EQ(r.problem, Problem::P1);
  EXPECT_EQ(r.x0, s.x0);
  EXPECT_EQ(r.hold, HoldMode::Reference);
  EXPECT_EQ(r.smid_measurement, SmidMeasurement::Plant);
  ASSERT_TRUE(r.K.has_value());
  EXPECT_EQ(*r.K, *s.K);
  EXPECT_EQ(r.delta, 0.02);
  EXPECT_EQ(scenario_to_json(r), scenario_to_json(s));
}

TEST(Io, ScenarioDefaultsAndErrors) {
  const Scenario s = scenario_from_json(R"({"problem": "p1", "horizon": 4})");
  EXPECT_EQ(s.problem, Problem::P1);
  EXPECT_EQ(s.horizon, 4.0);
  EXPECT_EQ(s.gamma_theta, Scenario{}.gamma_theta);
  EXPECT_THROW(scenario_from_json("{not json"), Error);
  EXPECT_THROW(scenario_from_json(R"({"problem": "p3"})"), Error);
  EXPECT_THROW(build_benchmark(scenario_from_json(R"({"x0": [1, 2]})")), Error);
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), Error);
  EXPECT_EQ(load_scenario("default_p1").problem, Problem::P1);
}

TEST(Io, TraceCsvRoundTrip) {
  Scenario s = default_p2();
  s.horizon = 1.0;
  const Trace t = run(s, Method::Ebsf, true, 5);
  std::stringstream ss;
  write_trace_csv(ss, t);
  const std::string header = ss.str().substr(0, ss.str().find('\n'));
  EXPECT_EQ(header, trace_csv_header(t));
  EXPECT_EQ(header.rfind("t,x_0,x_1,x_2,x_3,x_m_0", 0), 0u);
  const Trace r = read_trace_csv(ss);
  ASSERT_EQ(r.rows.size(), t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(r.rows[i].t, t.rows[i].t);
    EXPECT_EQ(r.rows[i].x, t.rows[i].x);
    EXPECT_EQ(r.rows[i].r_s, t.rows[i].r_s);
    EXPECT_EQ(r.rows[i].lambda_hi, t.rows[i].lambda_hi);
    same_double(r.rows[i].delta_ebsb, t.rows[i].delta_ebsb);
    same_double(r.rows[i].beta_ebsf, t.rows[i].beta_ebsf);
    EXPECT_EQ(r.rows[i].V, t.rows[i].V);
  }
}

TEST(Cli, SimulateWritesReproducibleReport) {
  const fs::path dir = scratch("sim");
  std::string out, err;
  ASSERT_EQ(cli({"simulate", "--scenario", "default_p1", "--method", "ebsb", "--out", dir.string(), "--horizon", "3"},
                &out, &err),
            kExitOk)
      << err;
  const fs::path csv = dir / "default_p1_ebsb.csv";
  const fs::path json = dir / "default_p1_ebsb.json";
  ASSERT_TRUE(fs::exists(csv));
  ASSERT_TRUE(fs::exists(json));
  // the report is recomputable from the CSV alone
  Trace back = read_trace_csv_file(csv.string());
  back.method = Method::Ebsb;
  back.smid = false;
  const RunReport rep = make_report(back);
  std::ostringstream rs;
  rs << std::ifstream(json).rdbuf();
  const std::string text = rs.str();
  auto field = [&](const std::string& key) {
    const auto p = text.find("\"" + key + "\":");
    EXPECT_NE(p, std::string::npos) << key;
    return std::stod(text.substr(p + key.size() + 3));
  };
  EXPECT_EQ(field("min_h"), rep.min_h);
  EXPECT_EQ(field("final_tracking_error"), rep.final_tracking_error);
  EXPECT_EQ(field("jitter"), rep.jitter);
  EXPECT_EQ(field("final_delta_ebsb"), rep.final_delta_ebsb);
  EXPECT_EQ(field("beta_zero_time"), -1.0);
  EXPECT_FALSE(fs::exists(dir / "default_p1_ebsb.json.tmp"));
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("codes");
  std::string out, err;
  EXPECT_EQ(cli({"simulate", "--method", "mpc", "--out", dir.string()}, &out, &err), kExitBadArgs);
  EXPECT_NE(err.find("InvalidScenario"), std::string::npos);
  EXPECT_EQ(cli({"simulate", "--scenario", "default_p2", "--method", "ebsb", "--out", dir.string()}, &out, &err),
            kExitBadArgs);
  EXPECT_NE(err.find("known input gain"), std::string::npos);
  EXPECT_EQ(cli({"simulate"}, &out, &err), kExitBadArgs);
  EXPECT_EQ(cli({"simulate", "--method", "ideal", "--bogus"}, &out, &err), kExitBadArgs);
  EXPECT_EQ(cli({"frobnicate"}, &out, &err), kExitBadArgs);
  EXPECT_EQ(cli({}, &out, &err), kExitBadArgs);
  EXPECT_EQ(cli({"check", "--scenario", "default_p1"}, &out, &err), kExitOk);
  EXPECT_NE(out.find("assumption3a"), std::string::npos);
  EXPECT_NE(out.find("sampled"), std::string::npos);

  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"problem": "p2", "k_hat0": 40.0})";
  EXPECT_EQ(cli({"check", "--scenario", bad.string()}, &out, &err), kExitCheckFailed);
  EXPECT_NE(out.find("assumption6_theta"), std::string::npos);
  EXPECT_NE(out.find("assumption6_theta   fail"), std::string::npos);

  // a stiff gain blows up the fixed-step integrator
  const fs::path abort = dir / "abort.json";
  std::ofstream(abort) << R"({"problem": "p2", "lqr_state_weight": 1e12, "horizon": 1})";
  EXPECT_EQ(cli({"simulate", "--scenario", abort.string(), "--method", "ideal", "--out", dir.string()}, &out, &err),
            kExitAborted);
  EXPECT_NE(err.find("SimulationAborted"), std::string::npos);
  EXPECT_NE(err.find("NonFiniteState"), std::string::npos);
  EXPECT_EQ(cli({"compare", "--scenario", abort.string(), "--out", dir.string()}, &out, &err), kExitAborted);
  EXPECT_NE(out.find("aborted"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, CompareRowCounts) {
  const fs::path dir = scratch("cmp");
  std::string out, err;
  ASSERT_EQ(cli({"compare", "--scenario", "default_p1", "--horizon", "1", "--out", dir.string()}, &out, &err), kExitOk)
      << err;
  auto lines = [](const std::string& s) { return std::count(s.begin(), s.end(), '\n'); };
  EXPECT_EQ(lines(out), 1 + 5);
  ASSERT_EQ(cli({"compare", "--scenario", "default_p2", "--horizon", "1", "--out", dir.string()}, &out, &err), kExitOk);
  EXPECT_EQ(lines(out), 1 + 4);
  EXPECT_EQ(out.find("\nebsb,"), std::string::npos);
  ASSERT_EQ(cli({"compare", "--scenario", "default_p2", "--horizon", "1", "--smid", "--out", dir.string()}, &out, &err),
            kExitOk);
  EXPECT_EQ(lines(out), 1 + 8);
  EXPECT_TRUE(fs::exists(dir / "compare_default_p2.csv"));
  fs::remove_all(dir);
}
