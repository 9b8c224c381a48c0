#pragma once

#include "safeadapt/adapt_core.hpp"
#include "safeadapt/barrier.hpp"
#include "safeadapt/convex_sets.hpp"
#include "safeadapt/ebsb.hpp"

#include <optional>

namespace safeadapt {

struct AuxEstimates {
  Vec theta_s;
  Vec lambda_s;
};

// Shared by aCBF and RaCBF. L is empty for the known input gain problem.
struct AdaptiveCbfConfig {
  HocbfChain chain;
  double alpha_r = 1.0;
  double Delta = 0.0;  // Delta_acbf or Delta_racbf
  ConvexParamSet Theta;
  std::optional<ConvexParamSet> L;
  double gamma_theta_s = 10.0;
  double gamma_lambda_s = 10.0;
};

// K = [Kp Kv] on position/velocity blocks.
Vec ideal_feedforward(const Mat& K, const Vec& p, const Vec& pd, const Vec& pdd);

GovernorStep ideal_reference(const HocbfChain& chain, double alpha_r, double delta, const RefModel& ref,
                             const Vec& r_star, const Vec& x);

double acbf_barrier(double h_r, double Delta);
// d h_a / d h_r
double acbf_barrier_slope(double h_r, double Delta);

double delta_acbf_bound(const AdaptiveCbfConfig& cfg, const AuxEstimates& aux);
double delta_racbf_bound(const AdaptiveCbfConfig& cfg);

GovernorStep acbf_reference(const AdaptiveCbfConfig& cfg, const RefModel& ref, const Vec& x, const Vec& theta_hat,
                            const Vec& lambda_hat, const AuxEstimates& aux, const Vec& r_star, const Mat& Fx);

GovernorStep racbf_reference(const AdaptiveCbfConfig& cfg, const RefModel& ref, const Vec& x, const Vec& theta_hat,
                             const Vec& lambda_hat, const AuxEstimates& aux, const Vec& r_star, const Mat& Fx);

// grad is the state gradient of the safety function driving the auxiliary laws.
AuxEstimates aux_rates(const AdaptiveCbfConfig& cfg, const AuxEstimates& aux, const Vec& grad, const Vec& u,
                       const Mat& B, const Mat& Fx);

Vec acbf_gradient(const AdaptiveCbfConfig& cfg, const Vec& x);
Vec racbf_gradient(const AdaptiveCbfConfig& cfg, const Vec& x);

}  // namespace safeadapt
