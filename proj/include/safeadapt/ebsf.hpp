#pragma once

#include "safeadapt/adapt_core.hpp"
#include "safeadapt/barrier.hpp"
#include "safeadapt/convex_sets.hpp"

#include <functional>
#include <optional>

namespace safeadapt {

struct EbsfConfig {
  double alpha_r = 1.0;
  double delta = 0.01;
  HocbfChain chain;  // drift = A
  std::function<double(double)> gauge;
  ConvexParamSet Theta;
  // Empty when the input gain is known; lambda_hat is then the true gain.
  std::optional<ConvexParamSet> L;
};

std::function<double(double)> linear_gauge(double kappa);

double beta_ebsf(const EbsfConfig& cfg, const Vec& x, const Vec& e_x);

double xi_value(const EbsfConfig& cfg, const RefModel& ref, const Vec& x, double beta, const Vec& theta_hat,
                const Vec& lambda_hat, const Mat& Fx);

// w = (grad h_r B)'; constraints over z = diag(lambda_hat)^-1 r.
std::vector<HalfSpace> ebsf_constraints(const Vec& w, double beta, const Vec& lambda_hat,
                                        const std::optional<ConvexParamSet>& L, double xi);

struct EbsfStep {
  Vec r_s;
  double beta = 0.0;
  double xi = 0.0;
  std::vector<HalfSpace> constraints;
};

EbsfStep ebsf_reference(const EbsfConfig& cfg, const RefModel& ref, const Vec& r_star, const Vec& x, const Vec& e_x,
                        const Vec& theta_hat, const Vec& lambda_hat, const Mat& Fx);

// Extremes of c' v over a parameter set (per coordinate for boxes).
double set_max_linear(const ConvexParamSet& set, const Vec& c);
double set_min_linear(const ConvexParamSet& set, const Vec& c);

}  // namespace safeadapt
