#pragma once

#include "safeadapt/adapt_core.hpp"
#include "safeadapt/baselines.hpp"
#include "safeadapt/convex_sets.hpp"

#include <optional>
#include <utility>

namespace safeadapt {

struct GaussianBelief {
  Vec zeta_hat;
  Mat P_cov;
};

struct SmidSchedule {
  double update_period = 0.5;
  double confidence = 0.05;
};

GaussianBelief belief_update(const GaussianBelief& belief, const Mat& Phi, const Vec& y, const Mat& Sigma);

struct Bounds {
  Vec lo, hi;
};

Bounds extract_bounds(const GaussianBelief& belief, double delta_conf);

// Diagonal prior whose bounds enclose the given box around zeta_hat0.
GaussianBelief init_belief(const Vec& zeta_hat0, const ConvexParamSet& box, double delta_conf);

struct SetPair {
  ConvexParamSet Theta;
  std::optional<ConvexParamSet> L;
  bool fell_back = false;  // intersection would have been empty or degenerate
};

// The belief stacks [theta; lambda] when L is present, theta alone otherwise.
SetPair smid_step(const ConvexParamSet& Theta, const std::optional<ConvexParamSet>& L, const GaussianBelief& belief,
                  double delta_conf);

void apply_resets(AdaptiveState& state, AuxEstimates* aux, const ConvexParamSet& Theta,
                  const std::optional<ConvexParamSet>& L);

// Phi = [-F(x_k), diag(u_k)] and y = (B dt)^+ (x_{k+1} - (I + A dt) x_k).
Mat smid_regressor(const Mat& Fx, const Vec& u);
Vec smid_measurement(const Mat& A, const Mat& B, double dt, const Vec& x_k, const Vec& x_next);

}  // namespace safeadapt
