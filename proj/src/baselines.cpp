#include "safeadapt/baselines.hpp"

#include "safeadapt/errors.hpp"

#include <cmath>

namespace safeadapt {

Vec ideal_feedforward(const Mat& K, const Vec& p, const Vec& pd, const Vec& pdd) {
  const Eigen::Index m = p.size();
  if (K.cols() != 2 * m) throw Error(ErrorCode::OutOfDomain, "K must split into position and velocity blocks");
  return pdd - K.leftCols(m) * p - K.rightCols(m) * pd;
}

namespace {

GovernorStep solve_single(const Vec& r_star, HalfSpace c) {
  GovernorStep out;
  out.constraint = std::move(c);
  if (out.constraint.normal.norm() < 1e-10) {
    if (out.constraint.offset <= 0.0) {
      out.r_s = r_star;
      return out;
    }
    throw Error(ErrorCode::Infeasible, "safety constraint has no input authority");
  }
  out.r_s = qp_project(Mat::Identity(r_star.size(), r_star.size()), r_star, {out.constraint});
  return out;
}

// Half-space over r for g'(Am x + B(r + F(th - th_s) - diag(u)(lh - lh_s))) >= rhs
// with u from the uncertain input gain control law.
HalfSpace adaptive_constraint(const AdaptiveCbfConfig& cfg, const RefModel& ref, const Vec& g, const Vec& x,
                              const Vec& theta_hat, const Vec& lambda_hat, const AuxEstimates& aux, const Mat& Fx,
                              double rhs) {
  const Vec b = ref.B.transpose() * g;
  Vec drive = Fx * (theta_hat - aux.theta_s);
  Vec scale = Vec::Ones(b.size());
  if (cfg.L) {
    if ((lambda_hat.array().abs() < 1e-12).any()) throw Error(ErrorCode::SingularLambdaHat, "lambda_hat near zero");
    const Vec D = (lambda_hat - aux.lambda_s).cwiseQuotient(lambda_hat);
    drive -= D.cwiseProduct(ref.K * x + Fx * theta_hat);
    scale -= D;
  }
  return {scale.cwiseProduct(b), rhs - g.dot(ref.Am * x) - b.dot(drive)};
}

}  // namespace

GovernorStep ideal_reference(const HocbfChain& chain, double alpha_r, double delta, const RefModel& ref,
                             const Vec& r_star, const Vec& x) {
  const ChainEval ev = chain_eval(chain, x);
  const Vec& g = ev.grad_hr;
  return solve_single(r_star, {ref.B.transpose() * g, -alpha_r * ev.values.back() + delta - g.dot(ref.Am * x)});
}

double acbf_barrier(double h_r, double Delta) {
  if (h_r >= Delta) return Delta * Delta;
  return Delta * Delta - (h_r - Delta) * (h_r - Delta);
}

double acbf_barrier_slope(double h_r, double Delta) { return h_r >= Delta ? 0.0 : -2.0 * (h_r - Delta); }

double delta_acbf_bound(const AdaptiveCbfConfig& cfg, const AuxEstimates& aux) {
  const double st = sup_distance(cfg.Theta, aux.theta_s);
  double v = st * st / (2.0 * cfg.gamma_theta_s);
  if (cfg.L) {
    const double sl = sup_distance(*cfg.L, aux.lambda_s);
    v += sl * sl / (2.0 * cfg.gamma_lambda_s);
  }
  return std::sqrt(v);
}

double delta_racbf_bound(const AdaptiveCbfConfig& cfg) {
  const double dt = cfg.Theta.diameter();
  double v = dt * dt / cfg.gamma_theta_s;
  if (cfg.L) {
    const double dl = cfg.L->diameter();
    v += dl * dl / cfg.gamma_lambda_s;
  }
  return 0.5 * cfg.alpha_r * v;
}

Vec acbf_gradient(const AdaptiveCbfConfig& cfg, const Vec& x) {
  const ChainEval ev = chain_eval(cfg.chain, x);
  return acbf_barrier_slope(ev.values.back(), cfg.Delta) * ev.grad_hr;
}

Vec racbf_gradient(const AdaptiveCbfConfig& cfg, const Vec& x) { return chain_eval(cfg.chain, x).grad_hr; }

GovernorStep acbf_reference(const AdaptiveCbfConfig& cfg, const RefModel& ref, const Vec& x, const Vec& theta_hat,
                            const Vec& lambda_hat, const AuxEstimates& aux, const Vec& r_star, const Mat& Fx) {
  const Vec g = acbf_gradient(cfg, x);
  if (g.norm() == 0.0) {
    GovernorStep out;
    out.r_s = r_star;
    out.constraint = {Vec::Zero(r_star.size()), 0.0};
    return out;
  }
  return solve_single(r_star, adaptive_constraint(cfg, ref, g, x, theta_hat, lambda_hat, aux, Fx, 0.0));
}

GovernorStep racbf_reference(const AdaptiveCbfConfig& cfg, const RefModel& ref, const Vec& x, const Vec& theta_hat,
                             const Vec& lambda_hat, const AuxEstimates& aux, const Vec& r_star, const Mat& Fx) {
  const ChainEval ev = chain_eval(cfg.chain, x);
  const double rhs = -cfg.alpha_r * ev.values.back() + cfg.Delta;
  return solve_single(r_star, adaptive_constraint(cfg, ref, ev.grad_hr, x, theta_hat, lambda_hat, aux, Fx, rhs));
}

AuxEstimates aux_rates(const AdaptiveCbfConfig& cfg, const AuxEstimates& aux, const Vec& grad, const Vec& u,
                       const Mat& B, const Mat& Fx) {
  const Vec b = B.transpose() * grad;
  AuxEstimates rate;
  rate.theta_s = tangent_cone_project(cfg.Theta, aux.theta_s, cfg.gamma_theta_s * Fx.transpose() * b);
  if (cfg.L)
    rate.lambda_s = tangent_cone_project(*cfg.L, aux.lambda_s, -cfg.gamma_lambda_s * u.cwiseProduct(b));
  else
    rate.lambda_s = Vec::Zero(aux.lambda_s.size());
  return rate;
}

}  // namespace safeadapt
