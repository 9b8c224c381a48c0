#pragma once

#include "safeadapt/convex_sets.hpp"
#include "safeadapt/numkit.hpp"

#include <functional>
#include <string>
#include <vector>

namespace safeadapt {

struct BarrierFn {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;  // column vector, transpose of the row gradient
  std::function<Mat(const Vec&)> hessian;   // may be empty
  double kappa = 1.0;
  double c = 0.0;
};

// h(x) = ||x[0:2] - center|| - radius for a planar point mass state.
BarrierFn pillar_barrier(const Eigen::Vector2d& center, double radius, int n);

struct ChainEval {
  std::vector<double> values;  // h_1..h_r
  Vec grad_hr;
};

struct HocbfChain {
  BarrierFn base;
  Mat drift;
  std::vector<double> alphas;  // alpha_1..alpha_r
  int r = 2;
  // Required for r > 2.
  std::function<ChainEval(const Vec&)> custom;
};

HocbfChain make_chain(const BarrierFn& base, const Mat& drift, const std::vector<double>& alphas, int r);

ChainEval chain_eval(const HocbfChain& chain, const Vec& x);

struct WMatrices {
  Mat C_h;
  std::vector<Mat> W;  // W_0..W_r
};

WMatrices build_w_matrices(const std::vector<Vec>& basis, double kappa, const std::vector<double>& alphas,
                           const Mat& Am, int r);

struct LipschitzReport {
  double max_violation = 0.0;
  bool pass = true;
  std::size_t worst_index = 0;
};

LipschitzReport check_lipschitz_bound(const WMatrices& w, const BarrierFn& h,
                                      const std::vector<std::pair<Vec, Vec>>& samples);

struct ScalarFn {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;  // may be empty
};

BarrierFn softmin_bounded(const ScalarFn& h_r, double D);

enum class CheckStatus { Pass, Fail, Indeterminate };

const char* to_string(CheckStatus s);

struct AssumptionCheck {
  std::string name;
  CheckStatus status = CheckStatus::Indeterminate;
  bool sampled = false;
  std::string detail;
  Vec witness;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  // Exact checks only; sampled ones never fail the report.
  bool ok() const;
};

// Sampled boundedness of {x : h_r(x) >= 0} inside the box [lo, hi]. Fails
// with a witness if the set reaches the box boundary.
AssumptionCheck sample_boundedness(const std::string& name, const HocbfChain& chain, const Vec& lo, const Vec& hi,
                                   int samples, unsigned seed);

// Sampled check that ||grad h|| <= kappa on points drawn in [lo, hi] with h >= -c.
AssumptionCheck sample_gradient_bound(const std::string& name, const BarrierFn& h, const Vec& lo, const Vec& hi,
                                      int samples, unsigned seed);

// Sampled check: wherever ||grad h_r B|| < d_min on S_r, the drift margin
// alpha_r h_r + grad h_r drift x must reach margin.
AssumptionCheck sample_vanishing_gradient(const std::string& name, const HocbfChain& chain, const Mat& B,
                                          double d_min, double margin, const Vec& lo, const Vec& hi, int samples,
                                          unsigned seed);

}  // namespace safeadapt
