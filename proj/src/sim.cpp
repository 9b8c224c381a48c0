#include "safeadapt/sim.hpp"

#include "safeadapt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace safeadapt {

const char* to_string(Problem p) { return p == Problem::P1 ? "p1" : "p2"; }

const char* to_string(Method m) {
  switch (m) {
    case Method::Ideal: return "ideal";
    case Method::Ebsb: return "ebsb";
    case Method::Ebsf: return "ebsf";
    case Method::Acbf: return "acbf";
    case Method::Racbf: return "racbf";
  }
  return "unknown";
}

Method parse_method(const std::string& s) {
  for (Method m : {Method::Ideal, Method::Ebsb, Method::Ebsf, Method::Acbf, Method::Racbf})
    if (s == to_string(m)) return m;
  throw Error(ErrorCode::InvalidScenario, "unknown method '" + s + "'");
}

Scenario default_p1() {
  Scenario s;
  s.name = "default_p1";
  s.problem = Problem::P1;
  return s;
}

Scenario default_p2() {
  Scenario s;
  s.name = "default_p2";
  s.problem = Problem::P2;
  return s;
}

Regressor benchmark_regressor() {
  return [](const Vec& x) {
    Mat F(2, 2);
    const double px = x(0), py = x(1), vx = x(2), vy = x(3);
    const double r2 = px * px + py * py;
    const double s = r2 < 1e-9 ? 0.0 : (px * vx + py * vy) / r2;
    F << px, px * s, py, py * s;
    return F;
  };
}

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidScenario, field + ": " + what);
}

void validate(const Scenario& s) {
  require(s.pillar_radius > 0.0, "pillar_radius", "must be positive");
  require(s.control_rate > 0.0, "control_rate", "must be positive");
  require(s.horizon > 0.0, "horizon", "must be positive");
  require(s.substeps >= 1, "substeps", "must be at least 1");
  require(s.m_true > 0.0 && s.m_hat0 > 0.0, "m_true", "masses must be positive");
  require(s.k_lo < s.k_hi, "k_lo", "must be below k_hi");
  require(s.b_lo < s.b_hi, "b_lo", "must be below b_hi");
  require(s.m_lo > 0.0 && s.m_lo < s.m_hi, "m_lo", "must be positive and below m_hi");
  require(s.x0.size() == 4 && s.xm0.size() == 4, "x0", "states have 4 entries");
  require(s.x0.allFinite() && s.xm0.allFinite(), "x0", "must be finite");
  require(s.gamma_theta > 0 && s.gamma_lambda > 0 && s.gamma_theta_s > 0 && s.gamma_lambda_s > 0, "gamma_theta",
          "adaptation gains must be positive");
  require(s.alpha_1 > 0 && s.alpha_r > 0, "alpha_1", "class-K gains must be positive");
  require(s.delta > 0, "delta", "must be positive");
  require(s.smid_period > 0, "smid_period", "must be positive");
  require(s.smid_confidence > 0 && s.smid_confidence < 1, "smid_confidence", "must lie in (0, 1)");
  require(s.smid_sigma_scale > 0, "smid_sigma_scale", "must be positive");
  require(s.trajectory.duration > 0, "trajectory.duration", "must be positive");
  require(s.lqr_state_weight > 0 && s.lqr_input_weight > 0 && s.lyapunov_q > 0, "lqr_state_weight",
          "weights must be positive");
  const double steps = s.horizon * s.control_rate;
  require(std::abs(steps - std::round(steps)) < 1e-9, "horizon", "horizon * control_rate must be an integer");
}

Benchmark assemble(const Scenario& s) {
  validate(s);
  Benchmark b;
  b.scenario = s;
  b.dt = 1.0 / s.control_rate;
  const Mat I2 = Mat::Identity(2, 2);
  b.plant.A = Mat::Zero(4, 4);
  b.plant.A.topRightCorner(2, 2) = I2;
  b.plant.B = Mat::Zero(4, 2);
  b.plant.B.bottomRows(2) = I2;
  b.plant.F = benchmark_regressor();
  b.plant.theta_star = (Vec(2) << s.k_true / s.m_true, s.b_true / s.m_true).finished();
  b.plant.lambda_star = Vec::Constant(2, 1.0 / s.m_true);
  validate_plant(b.plant);

  Mat K;
  if (s.K) {
    K = *s.K;
    require(K.rows() == 2 && K.cols() == 4, "K", "must be 2x4");
  } else {
    K = lqr_gain(b.plant.A, b.plant.B, s.lqr_state_weight * Mat::Identity(4, 4), s.lqr_input_weight * I2);
  }
  try {
    b.ref = make_ref_model(b.plant, K);
  } catch (const Error&) {
    throw Error(ErrorCode::InvalidScenario, "K: A + B K is not Hurwitz");
  }
  b.P = solve_lyapunov(b.ref.Am, s.lyapunov_q * Mat::Identity(4, 4));

  b.h = pillar_barrier(s.pillar_center, s.pillar_radius, 4);
  const std::vector<double> alphas{s.alpha_1, s.alpha_r};
  b.chain_m = make_chain(b.h, b.ref.Am, alphas, 2);
  b.chain_p = make_chain(b.h, b.plant.A, alphas, 2);
  std::vector<Vec> basis{Vec::Unit(4, 0), Vec::Unit(4, 1)};
  b.w = build_w_matrices(basis, b.h.kappa, alphas, b.ref.Am, 2);

  if (s.problem == Problem::P2) {
    b.Theta0 = ConvexParamSet::box((Vec(2) << s.k_lo / s.m_hi, s.b_lo / s.m_hi).finished(),
                                   (Vec(2) << s.k_hi / s.m_lo, s.b_hi / s.m_lo).finished());
    b.L0 = ConvexParamSet::box(Vec::Constant(2, 1.0 / s.m_hi), Vec::Constant(2, 1.0 / s.m_lo));
    b.theta_hat0 = (Vec(2) << s.k_hat0 / s.m_hat0, s.b_hat0 / s.m_hat0).finished();
    b.lambda_hat0 = Vec::Constant(2, 1.0 / s.m_hat0);
  } else {
    b.Theta0 = ConvexParamSet::box((Vec(2) << s.k_lo / s.m_true, s.b_lo / s.m_true).finished(),
                                   (Vec(2) << s.k_hi / s.m_true, s.b_hi / s.m_true).finished());
    b.theta_hat0 = (Vec(2) << s.k_hat0 / s.m_true, s.b_hat0 / s.m_true).finished();
    b.lambda_hat0 = b.plant.lambda_star;
  }
  if (s.exact_initial_params) {
    b.theta_hat0 = b.plant.theta_star;
    b.lambda_hat0 = b.plant.lambda_star;
  }
  b.x0 = s.x0;
  b.xm0 = s.xm0;
  return b;
}

EbsbConfig ebsb_config(const Benchmark& b, const ConvexParamSet& Theta) {
  return {b.scenario.alpha_r, b.scenario.delta, b.chain_m, b.w, Theta};
}

EbsfConfig ebsf_config(const Benchmark& b, const ConvexParamSet& Theta, const std::optional<ConvexParamSet>& L) {
  return {b.scenario.alpha_r, b.scenario.delta, b.chain_p, linear_gauge(b.scenario.ebsf_gauge_kappa), Theta, L};
}

// Exact initial-condition checks used for auto adjustment.
AssumptionReport exact_initial_checks(const Benchmark& b) {
  AssumptionReport rep;
  if (b.scenario.problem == Problem::P1) {
    rep = check_assumption3(ebsb_config(b, b.Theta0), b.x0, b.xm0, b.theta_hat0);
  } else {
    const ChainEval ev = chain_eval(b.chain_p, b.x0);
    std::ostringstream os;
    os << "h_1(x0)=" << ev.values[0] << " h_2(x0)=" << ev.values[1];
    rep.checks.push_back({"assumption7", ev.values[0] >= 0.0 && ev.values[1] >= 0.0 ? CheckStatus::Pass
                                                                                      : CheckStatus::Fail,
                          false, os.str(), b.x0});
    rep.checks.push_back({"assumption6_theta", b.Theta0.contains(b.theta_hat0) ? CheckStatus::Pass : CheckStatus::Fail,
                          false, "theta_hat(0) membership in Theta", b.theta_hat0});
    rep.checks.push_back({"assumption6_lambda", b.L0->contains(b.lambda_hat0) ? CheckStatus::Pass : CheckStatus::Fail,
                          false, "lambda_hat(0) membership in L", b.lambda_hat0});
  }
  return rep;
}

bool estimate_checks_fail(const AssumptionReport& rep) {
  for (const auto& c : rep.checks)
    if (c.status == CheckStatus::Fail &&
        (c.name == "assumption3d" || c.name == "assumption6_theta" || c.name == "assumption6_lambda"))
      return true;
  return false;
}

void auto_adjust(Benchmark& b) {
  const Eigen::Vector2d c = b.scenario.pillar_center;
  for (int it = 0; it < 50; ++it) {
    const AssumptionReport rep = exact_initial_checks(b);
    if (rep.ok() || estimate_checks_fail(rep)) return;
    Eigen::Vector2d dir = b.x0.head<2>() - c;
    if (dir.norm() < 1e-12) dir = Eigen::Vector2d(-1.0, 0.0);
    dir.normalize();
    const Eigen::Vector2d shift = 0.1 * b.scenario.pillar_radius * dir;
    b.x0.head<2>() += shift;
    b.xm0.head<2>() += shift;
    std::ostringstream os;
    os << "shifted initial position by (" << shift(0) << ", " << shift(1) << ") to satisfy initial-condition checks";
    b.adjustments.push_back(os.str());
  }
}

}  // namespace

Benchmark build_benchmark(const Scenario& s) {
  Benchmark b = assemble(s);
  require(b.h.value(b.x0) > 0.0 || s.auto_adjust_initial, "x0", "must lie outside the pillar");
  if (s.auto_adjust_initial) auto_adjust(b);
  const AssumptionReport rep = exact_initial_checks(b);
  for (const auto& c : rep.checks)
    if (!c.sampled && c.status == CheckStatus::Fail) require(false, c.name, c.detail);
  return b;
}

DesiredState desired_trajectory(const TrajectorySpec& spec, double t) {
  const double tau = std::clamp((t - spec.t_start) / spec.duration, 0.0, 1.0);
  const bool moving = tau > 0.0 && tau < 1.0;
  const double s = tau * tau * tau * (10.0 - 15.0 * tau + 6.0 * tau * tau);
  const double ds = moving ? 30.0 * tau * tau * (1.0 - tau) * (1.0 - tau) / spec.duration : 0.0;
  const double dds = moving ? 60.0 * tau * (1.0 - tau) * (1.0 - 2.0 * tau) / (spec.duration * spec.duration) : 0.0;
  const Vec d = spec.goal - spec.start;
  DesiredState out;
  out.p = spec.start + s * d;
  out.pd = ds * d;
  out.pdd = dds * d;
  return out;
}

namespace {

struct Layout {
  int n, p, m;
  int x() const { return 0; }
  int xm() const { return n; }
  int th() const { return 2 * n; }
  int lh() const { return 2 * n + p; }
  int ths() const { return 2 * n + p + m; }
  int lhs() const { return 2 * n + 2 * p + m; }
  int size() const { return 2 * n + 2 * p + 2 * m; }
};

class Runner {
 public:
  Runner(const Benchmark& b, Method method, bool smid, std::uint64_t seed)
      : b_(b), s_(b.scenario), method_(method), smid_(smid), rng_(seed),
        lay_{b.plant.n(), b.plant.p(), b.plant.m()}, Theta_(b.Theta0), L_(b.L0) {
    trace_.method = method;
    trace_.problem = s_.problem;
    trace_.smid = smid;
    trace_.seed = seed;
    trace_.dt = b.dt;
    if (method == Method::Ebsb && s_.problem != Problem::P1)
      throw Error(ErrorCode::InvalidScenario, "ebsb requires a known input gain (problem p1)");
  }

  Trace run() {
    const int N = static_cast<int>(std::llround(s_.horizon * s_.control_rate));
    const int per_update = std::max(1, static_cast<int>(std::llround(s_.smid_period * s_.control_rate)));
    Vec S = initial_state();
    if (smid_) init_smid();
    init_baselines(S);
    {
      std::optional<LambdaPrior> lp;
      if (L_) lp = LambdaPrior{b_.lambda_hat0, *L_, s_.gamma_lambda};
      trace_.error_bound = error_bound(b_.x0 - b_.xm0, b_.theta_hat0, Theta_, s_.gamma_theta, lp, b_.P);
    }
    Vec prev_rs;
    for (int k = 0; k <= N; ++k) {
      const double t = k * b_.dt;
      try {
        if (smid_ && k > 0 && k % per_update == 0) set_update(S, t);
        const Step st = control(S, t);
        record(S, st, t, prev_rs);
        prev_rs = st.r_s;
        if (k == N) break;
        const Vec x_k = S.segment(lay_.x(), lay_.n);
        integrate(S, st);
        if (smid_) measure(x_k, S.segment(lay_.x(), lay_.n), st.u);
      } catch (const Error& e) {
        std::ostringstream os;
        os << "t=" << t << " method=" << to_string(method_) << " x=[" << S.segment(lay_.x(), lay_.n).transpose()
           << "] " << e.what();
        throw Error(ErrorCode::SimulationAborted, os.str());
      }
    }
    return std::move(trace_);
  }

 private:
  struct Step {
    Vec r_star, r_s, u;
    double delta = std::numeric_limits<double>::quiet_NaN();
    double beta = std::numeric_limits<double>::quiet_NaN();
  };

  bool adaptive() const { return method_ != Method::Ideal; }
  bool has_aux() const { return method_ == Method::Acbf || method_ == Method::Racbf; }

  Vec initial_state() {
    Vec S = Vec::Zero(lay_.size());
    S.segment(lay_.x(), lay_.n) = b_.x0;
    S.segment(lay_.xm(), lay_.n) = b_.xm0;
    const Vec th0 = adaptive() ? b_.theta_hat0 : b_.plant.theta_star;
    const Vec lh0 = adaptive() ? b_.lambda_hat0 : b_.plant.lambda_star;
    S.segment(lay_.th(), lay_.p) = th0;
    S.segment(lay_.lh(), lay_.m) = lh0;
    S.segment(lay_.ths(), lay_.p) = th0;
    S.segment(lay_.lhs(), lay_.m) = lh0;
    return S;
  }

  void init_smid() {
    const double c = s_.smid_confidence;
    if (L_) {
      Vec z0(lay_.p + lay_.m), lo(lay_.p + lay_.m), hi(lay_.p + lay_.m);
      z0 << b_.theta_hat0, b_.lambda_hat0;
      lo << Theta_.lo(), L_->lo();
      hi << Theta_.hi(), L_->hi();
      belief_ = init_belief(z0, ConvexParamSet::box(lo, hi), c);
    } else {
      belief_ = init_belief(b_.theta_hat0, Theta_, c);
    }
    const double sigma = s_.smid_sigma_scale * b_.dt;
    Sigma_ = sigma * sigma * Mat::Identity(lay_.m, lay_.m);
  }

  void init_baselines(const Vec& S) {
    if (!has_aux()) return;
    cbf_.chain = b_.chain_p;
    cbf_.alpha_r = s_.alpha_r;
    cbf_.gamma_theta_s = s_.gamma_theta_s;
    cbf_.gamma_lambda_s = s_.gamma_lambda_s;
    cbf_.Theta = Theta_;
    cbf_.L = L_;
    cbf_.Delta = method_ == Method::Acbf ? delta_acbf_bound(cbf_, aux(S)) : delta_racbf_bound(cbf_);
  }

  // The aCBF buffer keeps its initial value; shrinking it invalidates the
  // composite certificate built at t = 0.
  void refresh_baselines() {
    if (!has_aux()) return;
    cbf_.Theta = Theta_;
    cbf_.L = L_;
    if (method_ == Method::Racbf) cbf_.Delta = delta_racbf_bound(cbf_);
  }

  AuxEstimates aux(const Vec& S) const {
    return {S.segment(lay_.ths(), lay_.p), S.segment(lay_.lhs(), lay_.m)};
  }

  AdaptiveState adaptive_state(const Vec& S, double t) const {
    return {S.segment(lay_.x(), lay_.n), S.segment(lay_.xm(), lay_.n), S.segment(lay_.th(), lay_.p),
            S.segment(lay_.lh(), lay_.m), t};
  }

  Vec control_law(const AdaptiveState& st, const Mat& Fx, const Vec& r_s) const {
    if (!adaptive()) return (b_.ref.K * st.x + r_s + Fx * b_.plant.theta_star).cwiseQuotient(b_.plant.lambda_star);
    return control_p2(st, b_.ref, Fx, r_s);
  }

  Step control(const Vec& S, double t) {
    const AdaptiveState st = adaptive_state(S, t);
    const Mat Fx = b_.plant.F(st.x);
    const DesiredState d = desired_trajectory(s_.trajectory, t);
    Step out;
    out.r_star = ideal_feedforward(b_.ref.K, d.p, d.pd, d.pdd);
    switch (method_) {
      case Method::Ideal: {
        const GovernorStep g = ideal_reference(b_.chain_m, s_.alpha_r, s_.delta, b_.ref, out.r_star, st.x);
        out.r_s = g.r_s;
        track_slack(g.constraint.normal.dot(g.r_s) - g.constraint.offset);
        break;
      }
      case Method::Ebsb: {
        const EbsbConfig cfg = ebsb_config(b_, Theta_);
        const GovernorStep g = ebsb_reference(cfg, b_.ref, out.r_star, st.x, st.x_m, st.theta_hat, Fx);
        out.r_s = g.r_s;
        out.delta = g.delta;
        track_slack(g.constraint.normal.dot(g.r_s) - g.constraint.offset);
        const EbsbProbes pr = ebsb_probes(cfg, st.x, st.x_m);
        for (double v : pr.H_e) trace_.min_probe_He = std::min(trace_.min_probe_He, v);
        for (double v : pr.H_m) trace_.min_probe_Hm = std::min(trace_.min_probe_Hm, v);
        break;
      }
      case Method::Ebsf: {
        const EbsfConfig cfg = ebsf_config(b_, Theta_, L_);
        const EbsfStep g = ebsf_reference(cfg, b_.ref, out.r_star, st.x, st.x - st.x_m, st.theta_hat,
                                          st.lambda_hat, Fx);
        out.r_s = g.r_s;
        out.beta = g.beta;
        const Vec z = g.r_s.cwiseQuotient(st.lambda_hat);
        for (const auto& c : g.constraints) track_slack(c.normal.dot(z) - c.offset);
        break;
      }
      case Method::Acbf:
      case Method::Racbf: {
        const GovernorStep g = method_ == Method::Acbf
                                   ? acbf_reference(cbf_, b_.ref, st.x, st.theta_hat, st.lambda_hat, aux(S),
                                                    out.r_star, Fx)
                                   : racbf_reference(cbf_, b_.ref, st.x, st.theta_hat, st.lambda_hat, aux(S),
                                                     out.r_star, Fx);
        out.r_s = g.r_s;
        track_slack(g.constraint.normal.dot(g.r_s) - g.constraint.offset);
        break;
      }
    }
    out.u = control_law(st, Fx, out.r_s);
    return out;
  }

  void track_slack(double v) { trace_.min_constraint_slack = std::min(trace_.min_constraint_slack, v); }

  Vec project_estimates(Vec S) const {
    S.segment(lay_.th(), lay_.p) = ortho_project(Theta_, S.segment(lay_.th(), lay_.p));
    S.segment(lay_.ths(), lay_.p) = ortho_project(Theta_, S.segment(lay_.ths(), lay_.p));
    if (L_) {
      S.segment(lay_.lh(), lay_.m) = ortho_project(*L_, S.segment(lay_.lh(), lay_.m));
      S.segment(lay_.lhs(), lay_.m) = ortho_project(*L_, S.segment(lay_.lhs(), lay_.m));
    }
    return S;
  }

  Vec derivative(const Vec& S_raw, const Step& step) const {
    const Vec S = adaptive() ? project_estimates(S_raw) : S_raw;
    const AdaptiveState st = adaptive_state(S, 0.0);
    const Mat Fx = b_.plant.F(st.x);
    const Vec u = s_.hold == HoldMode::Input ? step.u : control_law(st, Fx, step.r_s);
    Vec dS = Vec::Zero(lay_.size());
    dS.segment(lay_.x(), lay_.n) = b_.plant.dynamics(st.x, u);
    dS.segment(lay_.xm(), lay_.n) = b_.ref.dynamics(st.x_m, step.r_s);
    if (!adaptive()) return dS;
    const Vec e = st.x - st.x_m;
    if (L_) {
      const Rates r = theta_lambda_rates(st, Fx, b_.plant.B, e, u, b_.P, s_.gamma_theta, s_.gamma_lambda, Theta_, *L_);
      dS.segment(lay_.th(), lay_.p) = r.theta;
      dS.segment(lay_.lh(), lay_.m) = r.lambda;
    } else {
      dS.segment(lay_.th(), lay_.p) = theta_rate(st, Fx, b_.plant.B, e, b_.P, s_.gamma_theta, Theta_);
    }
    if (has_aux()) {
      const Vec grad = method_ == Method::Acbf ? acbf_gradient(cbf_, st.x) : racbf_gradient(cbf_, st.x);
      const AuxEstimates ar = aux_rates(cbf_, aux(S), grad, u, b_.plant.B, Fx);
      dS.segment(lay_.ths(), lay_.p) = ar.theta_s;
      dS.segment(lay_.lhs(), lay_.m) = ar.lambda_s;
    }
    return dS;
  }

  void integrate(Vec& S, const Step& step) {
    const double h = b_.dt / s_.substeps;
    const VectorField f = [&](const Vec& z) { return derivative(z, step); };
    for (int i = 0; i < s_.substeps; ++i) {
      S = rk4_step(f, S, h);
      if (adaptive()) S = project_estimates(S);
      trace_.min_h_substep = std::min(trace_.min_h_substep, b_.h.value(S.segment(lay_.x(), lay_.n)));
    }
  }

  Vec zeta_star() const {
    if (!L_) return b_.plant.theta_star;
    Vec z(lay_.p + lay_.m);
    z << b_.plant.theta_star, b_.plant.lambda_star;
    return z;
  }

  void measure(const Vec& x_k, const Vec& x_next, const Vec& u) {
    const Mat Fx = b_.plant.F(x_k);
    const Mat Phi_full = smid_regressor(Fx, u);
    Vec y;
    if (s_.smid_measurement == SmidMeasurement::Proxy) {
      Vec z(lay_.p + lay_.m);
      z << b_.plant.theta_star, b_.plant.lambda_star;
      std::normal_distribution<double> nd(0.0, 1.0);
      Vec eta(lay_.m);
      for (int i = 0; i < lay_.m; ++i) eta(i) = nd(rng_);
      y = Phi_full * z + Sigma_.llt().matrixL() * eta;
    } else {
      y = smid_measurement(b_.plant.A, b_.plant.B, b_.dt, x_k, x_next);
    }
    if (L_) {
      belief_ = belief_update(belief_, Phi_full, y, Sigma_);
    } else {
      const Vec y_theta = y - u.cwiseProduct(b_.plant.lambda_star);
      belief_ = belief_update(belief_, -Fx, y_theta, Sigma_);
    }
  }

  double lyapunov(const Vec& S) const {
    const AdaptiveState st = adaptive_state(S, 0.0);
    std::optional<Vec> le;
    if (L_) le = st.lambda_hat - b_.plant.lambda_star;
    return lyapunov_value(st.x - st.x_m, st.theta_hat - b_.plant.theta_star, le, b_.P, s_.gamma_theta,
                          s_.gamma_lambda);
  }

  void set_update(Vec& S, double t) {
    ResetEvent ev;
    ev.t = t;
    ev.V_before = lyapunov(S);
    const SetPair sp = smid_step(Theta_, L_, belief_, s_.smid_confidence);
    ev.fell_back = sp.fell_back;
    Theta_ = sp.Theta;
    L_ = sp.L;
    if (adaptive()) {
      AdaptiveState st = adaptive_state(S, t);
      AuxEstimates ax = aux(S);
      apply_resets(st, has_aux() ? &ax : nullptr, Theta_, L_);
      S.segment(lay_.th(), lay_.p) = st.theta_hat;
      S.segment(lay_.lh(), lay_.m) = st.lambda_hat;
      S.segment(lay_.ths(), lay_.p) = ax.theta_s;
      S.segment(lay_.lhs(), lay_.m) = ax.lambda_s;
    }
    refresh_baselines();
    ev.V_after = lyapunov(S);
    if (!Theta_.contains(b_.plant.theta_star, 0.0) || (L_ && !L_->contains(b_.plant.lambda_star, 0.0)))
      trace_.truth_always_inside = false;
    trace_.resets.push_back(ev);
  }

  void record(const Vec& S, const Step& st, double t, const Vec& prev_rs) {
    TraceRow row;
    row.t = t;
    row.x = S.segment(lay_.x(), lay_.n);
    row.x_m = S.segment(lay_.xm(), lay_.n);
    row.u = st.u;
    row.r_star = st.r_star;
    row.r_s = st.r_s;
    row.h_x = b_.h.value(row.x);
    row.h_xm = b_.h.value(row.x_m);
    row.hr_x = chain_eval(b_.chain_p, row.x).values.back();
    row.delta_ebsb = st.delta;
    row.beta_ebsf = st.beta;
    row.theta_hat = S.segment(lay_.th(), lay_.p);
    row.lambda_hat = S.segment(lay_.lh(), lay_.m);
    row.V = lyapunov(S);
    row.theta_lo = Theta_.lo();
    row.theta_hi = Theta_.hi();
    row.lambda_lo = L_ ? L_->lo() : b_.plant.lambda_star;
    row.lambda_hi = L_ ? L_->hi() : b_.plant.lambda_star;
    row.jitter = prev_rs.size() ? (st.r_s - prev_rs).norm() / b_.dt : 0.0;
    trace_.rows.push_back(std::move(row));
  }

  const Benchmark& b_;
  const Scenario& s_;
  Method method_;
  bool smid_;
  std::mt19937_64 rng_;
  Layout lay_;
  ConvexParamSet Theta_;
  std::optional<ConvexParamSet> L_;
  GaussianBelief belief_;
  Mat Sigma_;
  AdaptiveCbfConfig cbf_;
  Trace trace_;
};

}  // namespace

Trace run(const Benchmark& bench, Method method, bool smid, std::uint64_t seed) {
  return Runner(bench, method, smid, seed).run();
}

Trace run(const Scenario& s, Method method, bool smid, std::uint64_t seed) {
  if (method == Method::Ebsb && s.problem != Problem::P1)
    throw Error(ErrorCode::InvalidScenario, "ebsb requires a known input gain (problem p1)");
  const Benchmark b = build_benchmark(s);
  return run(b, method, smid, seed);
}

double jitter_metric(const Trace& trace) {
  if (trace.rows.size() < 2) return 0.0;
  const double t_half = 0.5 * trace.rows.back().t;
  double j = 0.0;
  for (std::size_t i = 1; i < trace.rows.size(); ++i)
    if (trace.rows[i - 1].t >= t_half) j = std::max(j, trace.rows[i].jitter);
  return j;
}

double min_h(const Trace& trace) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.rows) m = std::min(m, r.h_x);
  return m;
}

double final_tracking_error(const Trace& trace) {
  if (trace.rows.empty()) return 0.0;
  return (trace.rows.back().x - trace.rows.back().x_m).norm();
}

double beta_zero_time(const Trace& trace) {
  if (trace.rows.empty()) return -1.0;
  if (!(trace.rows.back().beta_ebsf == 0.0)) return -1.0;
  for (std::size_t i = trace.rows.size(); i-- > 0;)
    if (!(trace.rows[i].beta_ebsf == 0.0)) return trace.rows[i + 1].t;
  return trace.rows.front().t;
}

AssumptionReport check_scenario(const Scenario& s) {
  AssumptionReport rep;
  Benchmark b;
  try {
    b = assemble(s);
  } catch (const Error& e) {
    rep.checks.push_back({"scenario", CheckStatus::Fail, false, e.what(), Vec()});
    return rep;
  }
  if (s.auto_adjust_initial) auto_adjust(b);
  for (const auto& a : b.adjustments) rep.checks.push_back({"adjustment", CheckStatus::Pass, false, a, b.x0});
  const AssumptionReport exact = exact_initial_checks(b);
  rep.checks.insert(rep.checks.end(), exact.checks.begin(), exact.checks.end());

  const Vec lo = (Vec(4) << -5.0, -5.0, -5.0, -5.0).finished() + (Vec(4) << s.pillar_center, 0.0, 0.0).finished();
  const Vec hi = (Vec(4) << 5.0, 5.0, 5.0, 5.0).finished() + (Vec(4) << s.pillar_center, 0.0, 0.0).finished();
  const int samples = 20000;
  rep.checks.push_back(sample_gradient_bound("assumption2", b.h, lo, hi, samples, 1));
  if (s.problem == Problem::P1) {
    rep.checks.push_back(sample_boundedness("assumption4", b.chain_m, lo, hi, samples, 2));
    rep.checks.push_back(sample_vanishing_gradient("assumption5", b.chain_m, b.plant.B, 1e-3, s.delta, lo, hi,
                                                   samples, 3));
  }
  rep.checks.push_back(sample_boundedness("assumption8", b.chain_p, lo, hi, samples, 4));
  rep.checks.push_back(sample_vanishing_gradient("assumption9", b.chain_p, b.plant.B, 1e-3, s.delta, lo, hi,
                                                 samples, 5));
  if (s.problem == Problem::P2 && b.Theta0.contains(b.theta_hat0) && b.L0->contains(b.lambda_hat0)) {
    const double E2 = error_bound(b.x0 - b.xm0, b.theta_hat0, b.Theta0, s.gamma_theta,
                                  LambdaPrior{b.lambda_hat0, *b.L0, s.gamma_lambda}, b.P);
    const double g = linear_gauge(s.ebsf_gauge_kappa)(E2);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
      Vec x(4);
      for (int j = 0; j < 4; ++j) x(j) = lo(j) + u(rng) * (hi(j) - lo(j));
      best = std::max(best, chain_eval(b.chain_p, x).values.back());
    }
    std::ostringstream os;
    os << "alpha_ebsf(E2)=" << g << " sampled sup h_r=" << best;
    rep.checks.push_back({"ebsf_gauge", best > g ? CheckStatus::Pass : CheckStatus::Indeterminate, true, os.str(),
                          Vec()});
  }
  return rep;
}

}  // namespace safeadapt
