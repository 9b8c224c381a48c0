#pragma once

#include "safeadapt/adapt_core.hpp"
#include "safeadapt/barrier.hpp"
#include "safeadapt/baselines.hpp"
#include "safeadapt/convex_sets.hpp"
#include "safeadapt/ebsb.hpp"
#include "safeadapt/ebsf.hpp"
#include "safeadapt/smid.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace safeadapt {

enum class Problem { P1, P2 };
enum class Method { Ideal, Ebsb, Ebsf, Acbf, Racbf };
// Input: u and r_s held over the period. Reference: only r_s held, the control
// law is evaluated continuously inside the integrator.
enum class HoldMode { Input, Reference };
// Proxy: y = Phi zeta* + Gaussian noise. Plant: Euler differencing of the
// integrated state.
enum class SmidMeasurement { Proxy, Plant };

const char* to_string(Problem p);
const char* to_string(Method m);
Method parse_method(const std::string& s);

struct TrajectorySpec {
  Eigen::Vector2d start{0.0, -0.1};
  Eigen::Vector2d goal{1.8, 0.0};
  double t_start = 0.0;
  double duration = 8.0;
};

struct Scenario {
  std::string name = "custom";
  Problem problem = Problem::P2;

  double m_true = 1.1, k_true = 1.0, b_true = 0.9;
  double k_hat0 = 2.0, b_hat0 = 0.5, m_hat0 = 2.0;
  double k_lo = 0.0, k_hi = 3.0, b_lo = 0.0, b_hi = 2.0, m_lo = 0.5, m_hi = 2.5;

  Eigen::Vector2d pillar_center{2.0, 0.0};
  double pillar_radius = 0.5;

  Vec x0 = (Vec(4) << 0.0, -0.1, 0.0, 0.0).finished();
  Vec xm0 = (Vec(4) << 0.0, -0.1, 0.0, 0.0).finished();
  TrajectorySpec trajectory;

  double horizon = 20.0;
  double control_rate = 100.0;
  int substeps = 10;
  HoldMode hold = HoldMode::Input;

  double gamma_theta = 3.0, gamma_lambda = 3.0;
  double gamma_theta_s = 10.0, gamma_lambda_s = 10.0;

  double alpha_1 = 2.0, alpha_r = 2.0, delta = 0.01;
  double ebsf_gauge_kappa = 1.0;

  std::optional<Mat> K;
  double lqr_state_weight = 1.0, lqr_input_weight = 1.0;
  double lyapunov_q = 5.0;

  double smid_period = 0.5;
  double smid_confidence = 0.05;
  double smid_sigma_scale = 0.1;  // sigma = scale * dt
  SmidMeasurement smid_measurement = SmidMeasurement::Proxy;

  // Start the estimates at the true parameters.
  bool exact_initial_params = false;
  bool auto_adjust_initial = true;
};

Scenario default_p1();
Scenario default_p2();

struct Benchmark {
  Scenario scenario;
  Plant plant;
  RefModel ref;
  Mat P;
  BarrierFn h;
  HocbfChain chain_m;  // drift Am
  HocbfChain chain_p;  // drift A
  WMatrices w;
  ConvexParamSet Theta0;
  std::optional<ConvexParamSet> L0;
  Vec theta_hat0, lambda_hat0;
  Vec x0, xm0;
  double dt = 0.01;
  std::vector<std::string> adjustments;
};

Regressor benchmark_regressor();

Benchmark build_benchmark(const Scenario& s);

struct DesiredState {
  Vec p, pd, pdd;
};

DesiredState desired_trajectory(const TrajectorySpec& spec, double t);

struct TraceRow {
  double t = 0.0;
  Vec x, x_m, u, r_star, r_s;
  double h_x = 0.0, h_xm = 0.0, hr_x = 0.0;
  double delta_ebsb = 0.0, beta_ebsf = 0.0;
  Vec theta_hat, lambda_hat;
  double V = 0.0;
  Vec theta_lo, theta_hi, lambda_lo, lambda_hi;
  double jitter = 0.0;  // ||r_s(k) - r_s(k-1)|| / dt
};

struct ResetEvent {
  double t = 0.0;
  double V_before = 0.0, V_after = 0.0;
  bool fell_back = false;
};

struct Trace {
  Method method = Method::Ideal;
  Problem problem = Problem::P2;
  bool smid = false;
  std::uint64_t seed = 0;
  double dt = 0.01;
  std::vector<TraceRow> rows;
  std::vector<ResetEvent> resets;
  // Extremal diagnostics collected at control instants.
  double min_probe_He = std::numeric_limits<double>::infinity();
  double min_probe_Hm = std::numeric_limits<double>::infinity();
  double min_constraint_slack = std::numeric_limits<double>::infinity();
  double min_h_substep = std::numeric_limits<double>::infinity();
  double error_bound = 0.0;
  bool truth_always_inside = true;
};

Trace run(const Benchmark& bench, Method method, bool smid, std::uint64_t seed);
Trace run(const Scenario& s, Method method, bool smid, std::uint64_t seed);

double jitter_metric(const Trace& trace);
double min_h(const Trace& trace);
double final_tracking_error(const Trace& trace);
// First time after which beta stays at zero; negative if it never settles.
double beta_zero_time(const Trace& trace);

AssumptionReport check_scenario(const Scenario& s);

}  // namespace safeadapt
