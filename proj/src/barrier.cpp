#include "safeadapt/barrier.hpp"

#include "safeadapt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace safeadapt {

BarrierFn pillar_barrier(const Eigen::Vector2d& center, double radius, int n) {
  if (n < 2) throw Error(ErrorCode::OutOfDomain, "pillar barrier needs a planar position");
  BarrierFn h;
  h.kappa = 1.0;
  h.c = 0.5 * radius;
  h.value = [center, radius](const Vec& x) { return (x.head<2>() - center).norm() - radius; };
  h.gradient = [center, n](const Vec& x) {
    Vec g = Vec::Zero(n);
    const Eigen::Vector2d d = x.head<2>() - center;
    const double r = d.norm();
    if (r > 0.0) g.head<2>() = d / r;
    return g;
  };
  h.hessian = [center, n](const Vec& x) {
    Mat H = Mat::Zero(n, n);
    const Eigen::Vector2d d = x.head<2>() - center;
    const double r = d.norm();
    if (r > 0.0) {
      const Eigen::Vector2d u = d / r;
      H.topLeftCorner<2, 2>() = (Eigen::Matrix2d::Identity() - u * u.transpose()) / r;
    }
    return H;
  };
  return h;
}

HocbfChain make_chain(const BarrierFn& base, const Mat& drift, const std::vector<double>& alphas, int r) {
  if (r < 1) throw Error(ErrorCode::OutOfDomain, "relative degree must be positive");
  if (static_cast<int>(alphas.size()) != r) throw Error(ErrorCode::OutOfDomain, "need one alpha per chain level");
  for (double a : alphas)
    if (!(a > 0.0)) throw Error(ErrorCode::OutOfDomain, "alphas must be positive");
  HocbfChain c;
  c.base = base;
  c.drift = drift;
  c.alphas = alphas;
  c.r = r;
  return c;
}

ChainEval chain_eval(const HocbfChain& chain, const Vec& x) {
  if (!x.allFinite()) throw Error(ErrorCode::NonFiniteState, "non-finite state in chain evaluation");
  if (chain.custom) return chain.custom(x);
  if (chain.r > 2) throw Error(ErrorCode::UnsupportedDegree, "r > 2 needs a user-supplied chain");
  ChainEval out;
  const double h1 = chain.base.value(x);
  const Vec g1 = chain.base.gradient(x);
  out.values.push_back(h1);
  if (chain.r == 1) {
    out.grad_hr = g1;
    return out;
  }
  const double a1 = chain.alphas[0];
  const Vec fx = chain.drift * x;
  out.values.push_back(g1.dot(fx) + a1 * h1);
  const Mat H = chain.base.hessian(x);
  out.grad_hr = H * fx + chain.drift.transpose() * g1 + a1 * g1;
  return out;
}

WMatrices build_w_matrices(const std::vector<Vec>& basis, double kappa, const std::vector<double>& alphas,
                           const Mat& Am, int r) {
  if (basis.empty()) throw Error(ErrorCode::NonOrthonormalBasis, "empty basis");
  if (static_cast<int>(alphas.size()) < r) throw Error(ErrorCode::OutOfDomain, "need alpha_1..alpha_r");
  const Eigen::Index n = basis.front().size();
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      if (basis[j].size() != n) throw Error(ErrorCode::NonOrthonormalBasis, "basis dimension mismatch");
      const double g = basis[i].dot(basis[j]);
      if (std::abs(g - (i == j ? 1.0 : 0.0)) > 1e-9) throw Error(ErrorCode::NonOrthonormalBasis, "Gram matrix is not I");
    }
  WMatrices w;
  w.C_h = Mat::Zero(n, n);
  for (const auto& b : basis) w.C_h += b * b.transpose();
  w.W.push_back(kappa * kappa * w.C_h.transpose() * w.C_h);
  for (int i = 1; i <= r; ++i) {
    const Mat& P = w.W.back();
    Mat next = (alphas[0] + alphas[i - 1]) * P + Am.transpose() * P + P * Am;
    w.W.push_back(0.5 * (next + next.transpose()));
  }
  return w;
}

LipschitzReport check_lipschitz_bound(const WMatrices& w, const BarrierFn& h,
                                      const std::vector<std::pair<Vec, Vec>>& samples) {
  LipschitzReport rep;
  const Mat& W0 = w.W.front();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vec d = samples[i].first - samples[i].second;
    const double lhs = std::abs(h.value(samples[i].first) - h.value(samples[i].second));
    const double rhs = std::sqrt(std::max(d.dot(W0 * d), 0.0));
    const double v = lhs - rhs;
    if (v > worst) {
      worst = v;
      rep.worst_index = i;
    }
  }
  rep.max_violation = samples.empty() ? 0.0 : std::max(worst, 0.0);
  rep.pass = rep.max_violation <= 1e-9;
  return rep;
}

BarrierFn softmin_bounded(const ScalarFn& h_r, double D) {
  if (!(D > 0.0)) throw Error(ErrorCode::OutOfDomain, "D must be positive");
  struct Parts {
    double value, w1, w2;
  };
  auto parts = [h_r, D](const Vec& x) {
    const double a = -h_r.value(x);
    const double b = x.squaredNorm() - D;
    const double m = std::max(a, b);
    const double ea = std::exp(a - m), eb = std::exp(b - m);
    const double s = ea + eb;
    return Parts{-(m + std::log(s)), ea / s, eb / s};
  };
  BarrierFn out;
  out.value = [parts](const Vec& x) { return parts(x).value; };
  out.gradient = [parts, h_r](const Vec& x) {
    const Parts p = parts(x);
    return Vec(p.w1 * h_r.gradient(x) - p.w2 * 2.0 * x);
  };
  if (h_r.hessian) {
    out.hessian = [parts, h_r](const Vec& x) {
      const Parts p = parts(x);
      const Vec ga = -h_r.gradient(x);
      const Vec gb = 2.0 * x;
      const Mat Ha = -h_r.hessian(x);
      const Mat Hb = 2.0 * Mat::Identity(x.size(), x.size());
      const Vec dg = ga - gb;
      return Mat(-(p.w1 * Ha + p.w2 * Hb + p.w1 * p.w2 * dg * dg.transpose()));
    };
  }
  return out;
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

bool AssumptionReport::ok() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const AssumptionCheck& c) { return !c.sampled && c.status == CheckStatus::Fail; });
}

namespace {

Vec uniform_in_box(std::mt19937_64& rng, const Vec& lo, const Vec& hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec x(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) x(i) = lo(i) + u(rng) * (hi(i) - lo(i));
  return x;
}

}  // namespace

AssumptionCheck sample_boundedness(const std::string& name, const HocbfChain& chain, const Vec& lo, const Vec& hi,
                                   int samples, unsigned seed) {
  AssumptionCheck c{name, CheckStatus::Pass, true, "no point of S_r found on the sampling box boundary", Vec()};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> face(0, 2 * lo.size() - 1);
  for (int s = 0; s < samples; ++s) {
    Vec x = uniform_in_box(rng, lo, hi);
    const Eigen::Index f = face(rng);
    x(f / 2) = f % 2 ? hi(f / 2) : lo(f / 2);
    if (chain_eval(chain, x).values.back() >= 0.0) {
      c.status = CheckStatus::Fail;
      c.detail = "S_r reaches the sampling box boundary";
      c.witness = x;
      return c;
    }
  }
  return c;
}

AssumptionCheck sample_gradient_bound(const std::string& name, const BarrierFn& h, const Vec& lo, const Vec& hi,
                                      int samples, unsigned seed) {
  AssumptionCheck c{name, CheckStatus::Pass, true, "", Vec()};
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  int used = 0;
  for (int s = 0; s < samples; ++s) {
    const Vec x = uniform_in_box(rng, lo, hi);
    if (h.value(x) < -h.c) continue;
    ++used;
    const double g = h.gradient(x).norm();
    if (g > worst) worst = g;
    if (g > h.kappa * (1.0 + 1e-12)) {
      c.status = CheckStatus::Fail;
      c.witness = x;
      break;
    }
  }
  std::ostringstream os;
  os << "max sampled gradient norm " << worst << " over " << used << " points, kappa " << h.kappa;
  c.detail = os.str();
  if (used == 0) c.status = CheckStatus::Indeterminate;
  return c;
}

AssumptionCheck sample_vanishing_gradient(const std::string& name, const HocbfChain& chain, const Mat& B,
                                          double d_min, double margin, const Vec& lo, const Vec& hi, int samples,
                                          unsigned seed) {
  AssumptionCheck c{name, CheckStatus::Pass, true, "", Vec()};
  std::mt19937_64 rng(seed);
  int near_singular = 0;
  for (int s = 0; s < samples; ++s) {
    const Vec x = uniform_in_box(rng, lo, hi);
    const ChainEval ev = chain_eval(chain, x);
    const double hr = ev.values.back();
    if (hr < 0.0) continue;
    if ((B.transpose() * ev.grad_hr).norm() >= d_min) continue;
    ++near_singular;
    if (chain.alphas.back() * hr + ev.grad_hr.dot(chain.drift * x) < margin) {
      c.status = CheckStatus::Fail;
      c.witness = x;
      c.detail = "drift margin below threshold where the input gradient vanishes";
      return c;
    }
  }
  std::ostringstream os;
  os << near_singular << " sampled points of S_r with small input gradient, all with sufficient margin";
  c.detail = os.str();
  return c;
}

}  // namespace safeadapt
