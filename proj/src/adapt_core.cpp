#include "safeadapt/adapt_core.hpp"

#include "safeadapt/errors.hpp"

#include <cmath>

namespace safeadapt {

Vec Plant::dynamics(const Vec& x, const Vec& u) const {
  return A * x + B * (lambda_star.cwiseProduct(u) - F(x) * theta_star);
}

bool is_controllable(const Mat& A, const Mat& B) {
  const Eigen::Index n = A.rows();
  Mat C(n, n * B.cols());
  Mat block = B;
  for (Eigen::Index i = 0; i < n; ++i) {
    C.middleCols(i * B.cols(), B.cols()) = block;
    block = A * block;
  }
  Eigen::FullPivLU<Mat> lu(C);
  lu.setThreshold(1e-10);
  return lu.rank() == n;
}

void validate_plant(const Plant& plant) {
  if (plant.A.rows() != plant.A.cols() || plant.B.rows() != plant.A.rows())
    throw Error(ErrorCode::InvalidScenario, "plant dimension mismatch");
  if (plant.lambda_star.size() != plant.m()) throw Error(ErrorCode::InvalidScenario, "lambda* has wrong size");
  if ((plant.lambda_star.array() <= 0.0).any()) throw Error(ErrorCode::InvalidScenario, "lambda* must be positive");
  if (!is_controllable(plant.A, plant.B)) throw Error(ErrorCode::InvalidScenario, "(A, B) is not controllable");
}

RefModel make_ref_model(const Plant& plant, const Mat& K) {
  RefModel ref{plant.A + plant.B * K, K, plant.B};
  if (!is_hurwitz(ref.Am)) throw Error(ErrorCode::NotHurwitz, "A + B K is not Hurwitz");
  return ref;
}

Vec control_p1(const AdaptiveState& s, const RefModel& ref, const Mat& Fx, const Vec& r_s) {
  return ref.K * s.x + r_s + Fx * s.theta_hat;
}

Vec control_p2(const AdaptiveState& s, const RefModel& ref, const Mat& Fx, const Vec& r_s) {
  if ((s.lambda_hat.array().abs() < 1e-12).any()) throw Error(ErrorCode::SingularLambdaHat, "lambda_hat near zero");
  return (ref.K * s.x + r_s + Fx * s.theta_hat).cwiseQuotient(s.lambda_hat);
}

Vec theta_rate(const AdaptiveState& s, const Mat& Fx, const Mat& B, const Vec& e_x, const Mat& P, double gamma,
               const ConvexParamSet& Theta) {
  const Vec raw = -gamma * Fx.transpose() * (B.transpose() * (P * e_x));
  return tangent_cone_project(Theta, s.theta_hat, raw);
}

Rates theta_lambda_rates(const AdaptiveState& s, const Mat& Fx, const Mat& B, const Vec& e_x, const Vec& u,
                         const Mat& P, double gamma_theta, double gamma_lambda, const ConvexParamSet& Theta,
                         const ConvexParamSet& L) {
  const Vec bpe = B.transpose() * (P * e_x);
  Rates r;
  r.theta = tangent_cone_project(Theta, s.theta_hat, -gamma_theta * Fx.transpose() * bpe);
  r.lambda = tangent_cone_project(L, s.lambda_hat, gamma_lambda * u.cwiseProduct(bpe));
  return r;
}

double lyapunov_value(const Vec& e_x, const Vec& theta_err, const std::optional<Vec>& lambda_err, const Mat& P,
                      double gamma_theta, double gamma_lambda) {
  double v = e_x.dot(P * e_x) + theta_err.squaredNorm() / gamma_theta;
  if (lambda_err) v += lambda_err->squaredNorm() / gamma_lambda;
  return v;
}

double error_bound(const Vec& e_x0, const Vec& theta_hat0, const ConvexParamSet& Theta, double gamma_theta,
                   const std::optional<LambdaPrior>& lambda, const Mat& P) {
  const SymEig eig = sym_eig(P);
  const double psi = sup_distance(Theta, theta_hat0);
  double v0 = eig.d.maxCoeff() * e_x0.squaredNorm() + psi * psi / gamma_theta;
  if (lambda) {
    const double psi_l = sup_distance(lambda->L, lambda->lambda_hat0);
    v0 += psi_l * psi_l / lambda->gamma_lambda;
  }
  return std::sqrt(v0 / eig.d.minCoeff());
}

}  // namespace safeadapt
