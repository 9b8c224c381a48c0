#pragma once

#include "safeadapt/convex_sets.hpp"
#include "safeadapt/numkit.hpp"

#include <functional>
#include <optional>

namespace safeadapt {

using Regressor = std::function<Mat(const Vec&)>;

struct Plant {
  Mat A, B;
  Regressor F;
  Vec theta_star;
  Vec lambda_star;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(theta_star.size()); }

  // x' = A x + B (Lambda u - F(x) theta*)
  Vec dynamics(const Vec& x, const Vec& u) const;
};

bool is_controllable(const Mat& A, const Mat& B);

// Validates controllability and lambda* > 0.
void validate_plant(const Plant& plant);

struct RefModel {
  Mat Am, K, B;

  Vec dynamics(const Vec& xm, const Vec& r) const { return Am * xm + B * r; }
};

// Am = A + B K. Throws NotHurwitz if Am is not Hurwitz.
RefModel make_ref_model(const Plant& plant, const Mat& K);

struct AdaptiveState {
  Vec x, x_m, theta_hat, lambda_hat;
  double t = 0.0;
};

// u = K x + r_s + F(x) theta_hat
Vec control_p1(const AdaptiveState& s, const RefModel& ref, const Mat& Fx, const Vec& r_s);

// u = diag(lambda_hat)^-1 (K x + r_s + F(x) theta_hat)
Vec control_p2(const AdaptiveState& s, const RefModel& ref, const Mat& Fx, const Vec& r_s);

Vec theta_rate(const AdaptiveState& s, const Mat& Fx, const Mat& B, const Vec& e_x, const Mat& P, double gamma,
               const ConvexParamSet& Theta);

struct Rates {
  Vec theta, lambda;
};

Rates theta_lambda_rates(const AdaptiveState& s, const Mat& Fx, const Mat& B, const Vec& e_x, const Vec& u,
                         const Mat& P, double gamma_theta, double gamma_lambda, const ConvexParamSet& Theta,
                         const ConvexParamSet& L);

// The lambda term is only present for the uncertain input matrix problem.
double lyapunov_value(const Vec& e_x, const Vec& theta_err, const std::optional<Vec>& lambda_err, const Mat& P,
                      double gamma_theta, double gamma_lambda);

struct LambdaPrior {
  Vec lambda_hat0;
  ConvexParamSet L;
  double gamma_lambda;
};

double error_bound(const Vec& e_x0, const Vec& theta_hat0, const ConvexParamSet& Theta, double gamma_theta,
                   const std::optional<LambdaPrior>& lambda, const Mat& P);

}  // namespace safeadapt
