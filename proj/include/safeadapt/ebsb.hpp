#pragma once

#include "safeadapt/adapt_core.hpp"
#include "safeadapt/barrier.hpp"
#include "safeadapt/convex_sets.hpp"

namespace safeadapt {

struct EbsbConfig {
  double alpha_r = 1.0;
  double delta = 0.01;
  HocbfChain chain;  // drift = Am
  WMatrices w;
  ConvexParamSet Theta;
};

double delta_ebsb(const EbsbConfig& cfg, const Vec& x, const Vec& x_m, const Vec& theta_hat, const Mat& Fx,
                  const Mat& B);

struct GovernorStep {
  Vec r_s;
  HalfSpace constraint;  // over r
  double delta = 0.0;    // buffer used in the right-hand side
};

GovernorStep ebsb_reference(const EbsbConfig& cfg, const RefModel& ref, const Vec& r_star, const Vec& x,
                            const Vec& x_m, const Vec& theta_hat, const Mat& Fx);

AssumptionReport check_assumption3(const EbsbConfig& cfg, const Vec& x0, const Vec& x_m0, const Vec& theta_hat0);

// Signals whose nonnegativity along a run is sufficient for plant safety.
struct EbsbProbes {
  std::vector<double> H_e;  // H_e1..H_er
  std::vector<double> H_m;  // H_m1..H_mr
};

EbsbProbes ebsb_probes(const EbsbConfig& cfg, const Vec& x, const Vec& x_m);

// Single half-space weighted-identity projection shared with the baseline governors.
Vec project_single(const Vec& r_star, const HalfSpace& c);

}  // namespace safeadapt
