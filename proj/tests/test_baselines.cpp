#include "oracles.hpp"
#include "safeadapt/baselines.hpp"
#include "safeadapt/errors.hpp"
#include "safeadapt/sim.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace safeadapt;

namespace {

double uni(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vec in_box(std::mt19937_64& rng, const ConvexParamSet& s) {
  Vec v(s.dim());
  for (int i = 0; i < s.dim(); ++i) v(i) = uni(rng, s.lo()(i), s.hi()(i));
  return v;
}

AdaptiveCbfConfig config(const Benchmark& b, double Delta) {
  AdaptiveCbfConfig c;
  c.chain = b.chain_p;
  c.alpha_r = b.scenario.alpha_r;
  c.Delta = Delta;
  c.Theta = b.Theta0;
  c.L = b.L0;
  c.gamma_theta_s = b.scenario.gamma_theta_s;
  c.gamma_lambda_s = b.scenario.gamma_lambda_s;
  return c;
}

Vec near_pillar(std::mt19937_64& rng) {
  for (;;) {
    Vec x(4);
    x << uni(rng, 0.3, 1.45), uni(rng, -0.6, 0.6), uni(rng, -0.2, 1.2), uni(rng, -0.8, 0.8);
    if ((x.head(2) - Eigen::Vector2d(2.0, 0.0)).norm() > 0.52) return x;
  }
}

}  // namespace

TEST(Baselines, FeedforwardExamples) {
  Mat K(2, 4);
  K << -1, 0, -2, 0, 0, -1, 0, -2;
  const Vec p = (Vec(2) << 0.4, -0.3).finished();
  EXPECT_LE((ideal_feedforward(K, p, Vec::Zero(2), Vec::Zero(2)) - p).norm(), 1e-15);
  const Vec one = Vec::Ones(2);
  const double t = 1.7;
  const Vec r = ideal_feedforward(K, t * one, one, Vec::Zero(2));
  EXPECT_LE((r - (t * one + 2.0 * one)).norm(), 1e-14);
  EXPECT_THROW(ideal_feedforward(Mat::Zero(2, 3), p, p, p), Error);
}

TEST(Baselines, FeedforwardTracksTrajectory) {
  const Benchmark b = build_benchmark(default_p1());
  const TrajectorySpec& spec = b.scenario.trajectory;
  DesiredState d0 = desired_trajectory(spec, 0.0);
  Vec xm(4);
  xm << d0.p, d0.pd;
  const double dt = 1e-3;
  double worst = 0.0;
  for (int k = 0; k < 12000; ++k) {
    const double t = k * dt;
    auto f = [&](double tt, const Vec& s) {
      const DesiredState d = desired_trajectory(spec, tt);
      return b.ref.dynamics(s, ideal_feedforward(b.ref.K, d.p, d.pd, d.pdd));
    };
    const Vec k1 = f(t, xm), k2 = f(t + dt / 2, xm + dt / 2 * k1), k3 = f(t + dt / 2, xm + dt / 2 * k2),
              k4 = f(t + dt, xm + dt * k3);
    xm += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    worst = std::max(worst, (xm.head(2) - desired_trajectory(spec, t + dt).p).norm());
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(Baselines, IdealGovernor) {
  const Benchmark b = build_benchmark(default_p1());
  const double a = b.scenario.alpha_r, delta = b.scenario.delta;
  const Vec far = (Vec(4) << -5.0, 0.0, 0.0, 0.0).finished();
  const Vec r0 = (Vec(2) << 0.2, 0.1).finished();
  EXPECT_EQ(ideal_reference(b.chain_m, a, delta, b.ref, r0, far).r_s, r0);

  std::mt19937_64 rng(31);
  int active = 0;
  for (int i = 0; i < 200; ++i) {
    const Vec x = near_pillar(rng);
    const Vec r_star = (Vec(2) << uni(rng, -2, 8), uni(rng, -3, 3)).finished();
    const GovernorStep s = ideal_reference(b.chain_m, a, delta, b.ref, r_star, x);
    const ChainEval ev = chain_eval(b.chain_m, x);
    const Vec g = b.ref.B.transpose() * ev.grad_hr;
    const double rhs = -a * ev.values.back() + delta - ev.grad_hr.dot(b.ref.Am * x);
    const double gap = rhs - g.dot(r_star);
    const Vec closed = r_star + std::max(gap, 0.0) * g / g.squaredNorm();
    EXPECT_LE((s.r_s - closed).norm(), 1e-9 * (1.0 + closed.norm()));
    const Vec o = oracle::hildreth(Mat::Identity(2, 2), r_star, {{g, rhs}});
    const double jo = oracle::objective(Mat::Identity(2, 2), r_star, o);
    EXPECT_NEAR(oracle::objective(Mat::Identity(2, 2), r_star, s.r_s), jo, 1e-6 * (1.0 + jo));
    if (gap > 0.0) ++active;
  }
  EXPECT_GT(active, 20);
}

TEST(Baselines, AcbfBarrierSeam) {
  const double D = 0.7;
  EXPECT_DOUBLE_EQ(acbf_barrier(D, D), D * D);
  EXPECT_DOUBLE_EQ(acbf_barrier(std::nextafter(D, 0.0), D), D * D);
  EXPECT_DOUBLE_EQ(acbf_barrier(0.0, D), 0.0);
  EXPECT_NEAR(acbf_barrier(D / 2, D), 0.75 * D * D, 1e-15);
  for (double h : {D - 1e-3, D, D + 1e-3, 0.2, 2.0}) {
    const double eps = 1e-6;
    const double fd = (acbf_barrier(h + eps, D) - acbf_barrier(h - eps, D)) / (2 * eps);
    EXPECT_NEAR(acbf_barrier_slope(h, D), fd, 1e-5);
  }
}

TEST(Baselines, DeltaBoundsByHand) {
  const Benchmark b = build_benchmark(default_p1());
  AdaptiveCbfConfig c = config(b, 0.0);
  c.L.reset();
  const AuxEstimates aux{b.theta_hat0, b.lambda_hat0};
  double far2 = 0.0;
  for (int k = 0; k < 4; ++k) {
    const Vec v = (Vec(2) << ((k & 1) ? c.Theta.hi()(0) : c.Theta.lo()(0)),
                   ((k & 2) ? c.Theta.hi()(1) : c.Theta.lo()(1)))
                      .finished();
    far2 = std::max(far2, (v - aux.theta_s).squaredNorm());
  }
  EXPECT_NEAR(delta_acbf_bound(c, aux), std::sqrt(far2 / (2.0 * c.gamma_theta_s)), 1e-12);
  const double diam2 = (c.Theta.hi() - c.Theta.lo()).squaredNorm();
  EXPECT_NEAR(delta_racbf_bound(c), 0.5 * c.alpha_r * diam2 / c.gamma_theta_s, 1e-12);
  // k in [0,3], b in [0,2], m = 1.1, k_hat = 2, b_hat = 0.5
  EXPECT_NEAR(delta_acbf_bound(c, aux), 0.5082, 1e-3);
  EXPECT_NEAR(delta_racbf_bound(c), 1.0744, 1e-3);

  const Benchmark b2 = build_benchmark(default_p2());
  const AdaptiveCbfConfig c2 = config(b2, 0.0);
  const AuxEstimates aux2{b2.theta_hat0, b2.lambda_hat0};
  // theta box [0,6]x[0,4] from (1, 0.25); lambda box [0.4,2] from 0.5
  EXPECT_NEAR(delta_acbf_bound(c2, aux2), std::sqrt((25.0 + 3.75 * 3.75) / 20.0 + (2 * 1.5 * 1.5) / 20.0), 1e-9);
  EXPECT_NEAR(delta_racbf_bound(c2), 0.5 * 2.0 * ((36.0 + 16.0) / 10.0 + (2 * 1.6 * 1.6) / 10.0), 1e-9);

  AdaptiveCbfConfig tiny = c;
  tiny.Theta = ConvexParamSet::box(b.plant.theta_star.array() - 1e-9, b.plant.theta_star.array() + 1e-9);
  EXPECT_LE(delta_racbf_bound(tiny), 1e-15);
}

TEST(Baselines, AcbfSaturatedAndCollapse) {
  const Benchmark b = build_benchmark(default_p2());
  const AdaptiveCbfConfig c = config(b, 0.5);
  const Vec far = (Vec(4) << -5.0, 0.0, 0.0, 0.0).finished();
  const Vec r0 = (Vec(2) << 3.0, 0.1).finished();
  const AuxEstimates aux{b.theta_hat0, b.lambda_hat0};
  const Mat F = benchmark_regressor()(far);
  EXPECT_EQ(acbf_reference(c, b.ref, far, b.theta_hat0, b.lambda_hat0, aux, r0, F).r_s, r0);

  // aux equal to the control estimates: plain CBF constraint on the reference closed loop
  std::mt19937_64 rng(32);
  for (int i = 0; i < 50; ++i) {
    const Vec x = near_pillar(rng);
    const Vec th = in_box(rng, b.Theta0), lh = in_box(rng, *b.L0);
    const AuxEstimates same{th, lh};
    const Mat Fx = benchmark_regressor()(x);
    const GovernorStep s = racbf_reference(c, b.ref, x, th, lh, same, r0, Fx);
    const ChainEval ev = chain_eval(c.chain, x);
    EXPECT_LE((s.constraint.normal - b.ref.B.transpose() * ev.grad_hr).norm(), 1e-12);
    EXPECT_NEAR(s.constraint.offset, -c.alpha_r * ev.values.back() + c.Delta - ev.grad_hr.dot(b.ref.Am * x), 1e-10);
  }
}

// Constraint over r written out from the closed loop with u eliminated.
TEST(Baselines, AdaptiveQpOracle) {
  const Benchmark b = build_benchmark(default_p2());
  std::mt19937_64 rng(33);
  const Mat I = Mat::Identity(2, 2);
  for (bool robust : {false, true}) {
    const AdaptiveCbfConfig c = config(b, robust ? 0.8 : 0.6);
    int active = 0;
    for (int i = 0; i < 200; ++i) {
      const Vec x = near_pillar(rng);
      const Vec th = in_box(rng, b.Theta0), lh = in_box(rng, *b.L0);
      const AuxEstimates aux{in_box(rng, b.Theta0), in_box(rng, *b.L0)};
      const Vec r_star = (Vec(2) << uni(rng, -2, 8), uni(rng, -3, 3)).finished();
      const Mat Fx = benchmark_regressor()(x);
      const GovernorStep s = robust ? racbf_reference(c, b.ref, x, th, lh, aux, r_star, Fx)
                                    : acbf_reference(c, b.ref, x, th, lh, aux, r_star, Fx);
      const ChainEval ev = chain_eval(c.chain, x);
      const double hr = ev.values.back();
      const Vec g = robust ? ev.grad_hr : Vec(acbf_barrier_slope(hr, c.Delta) * ev.grad_hr);
      const double rhs = robust ? -c.alpha_r * hr + c.Delta : 0.0;
      // lhs(r) = g'(Am x + B(r + F(th - th_s) - diag(u)(lh - lh_s))), u = diag(lh)^-1 (K x + r + F th)
      auto lhs = [&](const Vec& r) {
        const Vec u = (b.ref.K * x + r + Fx * th).cwiseQuotient(lh);
        return g.dot(b.ref.Am * x + b.ref.B * (r + Fx * (th - aux.theta_s) - u.cwiseProduct(lh - aux.lambda_s)));
      };
      const double l0 = lhs(Vec::Zero(2));
      const Vec a = (Vec(2) << lhs(Vec::Unit(2, 0)) - l0, lhs(Vec::Unit(2, 1)) - l0).finished();
      if (a.norm() < 1e-8) continue;
      const Vec o = oracle::hildreth(I, r_star, {{a, rhs - l0}});
      const double jo = oracle::objective(I, r_star, o);
      EXPECT_NEAR(oracle::objective(I, r_star, s.r_s), jo, 1e-6 * (1.0 + jo));
      EXPECT_GE(lhs(s.r_s) - rhs, -1e-9 * (1.0 + r_star.norm()));
      if (jo > 1e-9) ++active;
    }
    EXPECT_GT(active, 20);
  }
}

TEST(Baselines, AuxRates) {
  const Benchmark b = build_benchmark(default_p2());
  const AdaptiveCbfConfig c = config(b, 0.5);
  const Vec x = (Vec(4) << 1.0, 0.2, 0.3, 0.0).finished();
  const Mat Fx = benchmark_regressor()(x);
  const Vec u = (Vec(2) << 0.7, -0.4).finished();
  const AuxEstimates mid{0.5 * (b.Theta0.lo() + b.Theta0.hi()), 0.5 * (b.L0->lo() + b.L0->hi())};
  const AuxEstimates zero = aux_rates(c, mid, Vec::Zero(4), u, b.ref.B, Fx);
  EXPECT_EQ(zero.theta_s.norm(), 0.0);
  EXPECT_EQ(zero.lambda_s.norm(), 0.0);

  const Vec g = (Vec(4) << 0.1, -0.3, 0.8, 0.5).finished();
  const AuxEstimates raw = aux_rates(c, mid, g, u, b.ref.B, Fx);
  const Vec bg = b.ref.B.transpose() * g;
  EXPECT_LE((raw.theta_s - c.gamma_theta_s * Fx.transpose() * bg).norm(), 1e-12);
  EXPECT_LE((raw.lambda_s + c.gamma_lambda_s * u.cwiseProduct(bg)).norm(), 1e-12);

  // at the upper theta corner, outward components are removed
  const AuxEstimates corner{b.Theta0.hi(), b.L0->lo()};
  const AuxEstimates pr = aux_rates(c, corner, g, u, b.ref.B, Fx);
  const Vec want_t = (c.gamma_theta_s * Fx.transpose() * bg).cwiseMin(0.0);
  const Vec want_l = (-c.gamma_lambda_s * u.cwiseProduct(bg)).cwiseMax(0.0);
  EXPECT_LE((pr.theta_s - want_t).norm(), 1e-12);
  EXPECT_LE((pr.lambda_s - want_l).norm(), 1e-12);
}
