#include "safeadapt/ebsf.hpp"

#include "safeadapt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace safeadapt {

std::function<double(double)> linear_gauge(double kappa) {
  return [kappa](double e) { return kappa * e; };
}

double beta_ebsf(const EbsfConfig& cfg, const Vec& x, const Vec& e_x) {
  const double hr = chain_eval(cfg.chain, x).values.back();
  const double lo = cfg.delta / (3.0 * cfg.alpha_r);
  const double M = std::max(cfg.gauge(e_x.norm()), 2.0 * lo);
  return std::clamp((M - hr) / (M - lo), 0.0, 1.0);
}

double set_max_linear(const ConvexParamSet& set, const Vec& c) {
  if (set.is_box()) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) s += c(i) > 0.0 ? c(i) * set.hi()(i) : c(i) * set.lo()(i);
    return s;
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : set.vertices()) best = std::max(best, c.dot(v));
  return best;
}

double set_min_linear(const ConvexParamSet& set, const Vec& c) { return -set_max_linear(set, -c); }

double xi_value(const EbsfConfig& cfg, const RefModel& ref, const Vec& x, double beta, const Vec& theta_hat,
                const Vec& lambda_hat, const Mat& Fx) {
  if ((lambda_hat.array().abs() < 1e-12).any()) throw Error(ErrorCode::SingularLambdaHat, "lambda_hat near zero");
  const ChainEval ev = chain_eval(cfg.chain, x);
  const Vec& g = ev.grad_hr;
  const Vec b = ref.B.transpose() * g;
  double xi = -cfg.alpha_r * ev.values.back() + cfg.delta - g.dot((ref.Am - beta * ref.B * ref.K) * x);
  if (beta != 0.0) {
    const Vec q = ref.K * x + Fx * theta_hat;
    xi += beta * set_max_linear(cfg.Theta, Fx.transpose() * b);
    const Vec c = b.cwiseProduct(q).cwiseQuotient(lambda_hat);
    xi -= beta * (cfg.L ? set_min_linear(*cfg.L, c) : c.dot(lambda_hat));
  }
  return xi;
}

std::vector<HalfSpace> ebsf_constraints(const Vec& w, double beta, const Vec& lambda_hat,
                                        const std::optional<ConvexParamSet>& L, double xi) {
  const Eigen::Index m = w.size();
  if (!L) return {{lambda_hat.cwiseProduct(w), xi}};
  if (m > 8) throw Error(ErrorCode::OutOfDomain, "input dimension too large for orthant enumeration");
  if (!L->is_box()) throw Error(ErrorCode::OutOfDomain, "input gain set must be a box");
  const unsigned full = (1u << m) - 1u;
  std::vector<HalfSpace> out;
  for (unsigned mask = 0; mask <= full; ++mask) {
    if (mask == 0 && xi > 0.0) continue;
    if (mask == full && xi <= 0.0) continue;
    Vec ell(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double corner = (mask >> j) & 1u ? L->lo()(j) : L->hi()(j);
      ell(j) = (1.0 - beta) * lambda_hat(j) + beta * corner;
    }
    out.push_back({ell.cwiseProduct(w), xi});
  }
  return out;
}

EbsfStep ebsf_reference(const EbsfConfig& cfg, const RefModel& ref, const Vec& r_star, const Vec& x, const Vec& e_x,
                        const Vec& theta_hat, const Vec& lambda_hat, const Mat& Fx) {
  EbsfStep s;
  s.beta = beta_ebsf(cfg, x, e_x);
  s.xi = xi_value(cfg, ref, x, s.beta, theta_hat, lambda_hat, Fx);
  const Vec w = ref.B.transpose() * chain_eval(cfg.chain, x).grad_hr;
  s.constraints = ebsf_constraints(w, s.beta, lambda_hat, cfg.L, s.xi);
  const Vec z_star = r_star.cwiseQuotient(lambda_hat);
  const Mat weight = lambda_hat.array().square().matrix().asDiagonal();
  const Vec z = qp_project(weight, z_star, s.constraints);
  s.r_s = lambda_hat.cwiseProduct(z);
  return s;
}

}  // namespace safeadapt
