#include "safeadapt/ebsb.hpp"

#include "safeadapt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace safeadapt {

namespace {

double alpha_tail_product(const std::vector<double>& alphas, int i) {
  // prod_{k=i}^r alpha_k with 1-based i
  double p = 1.0;
  for (std::size_t k = static_cast<std::size_t>(i - 1); k < alphas.size(); ++k) p *= alphas[k];
  return p;
}

}  // namespace

double delta_ebsb(const EbsbConfig& cfg, const Vec& x, const Vec& x_m, const Vec& theta_hat, const Mat& Fx,
                  const Mat& B) {
  const ChainEval ref = chain_eval(cfg.chain, x_m);
  const double h1 = ref.values.front();
  if (!(h1 > 0.0)) throw Error(ErrorCode::ReferenceUnsafe, "h(x_m) is not positive");
  const double h1f = std::max(h1, 1e-12);
  const int r = cfg.chain.r;
  const Vec e = x - x_m;
  const double psi = sup_distance(cfg.Theta, theta_hat);
  const Mat& Wr = cfg.w.W[r];
  const Mat& Wr1 = cfg.w.W[r - 1];
  const double num = e.dot(Wr * e) + 2.0 * psi * (Fx.transpose() * (B.transpose() * (Wr1 * e))).norm();
  double d = num / (2.0 * h1f);
  if (r > 1) d -= ref.values[1] * ref.values.back() / h1f;
  return std::max(d, 0.0);
}

Vec project_single(const Vec& r_star, const HalfSpace& c) {
  const double gap = c.offset - c.normal.dot(r_star);
  if (gap <= 0.0) return r_star;
  return r_star + gap * c.normal / c.normal.squaredNorm();
}

GovernorStep ebsb_reference(const EbsbConfig& cfg, const RefModel& ref, const Vec& r_star, const Vec& x,
                            const Vec& x_m, const Vec& theta_hat, const Mat& Fx) {
  GovernorStep out;
  out.delta = delta_ebsb(cfg, x, x_m, theta_hat, Fx, ref.B);
  const ChainEval ev = chain_eval(cfg.chain, x_m);
  const Vec& g = ev.grad_hr;
  out.constraint.normal = ref.B.transpose() * g;
  out.constraint.offset = -cfg.alpha_r * ev.values.back() + cfg.delta + out.delta - g.dot(ref.Am * x_m);
  if (out.constraint.normal.norm() < 1e-10) {
    if (out.constraint.offset <= 0.0) {
      out.r_s = r_star;
      return out;
    }
    throw Error(ErrorCode::InfeasibleAtSingularGradient, "governor gradient vanishes with the constraint violated");
  }
  out.r_s = qp_project(Mat::Identity(r_star.size(), r_star.size()), r_star, {out.constraint});
  return out;
}

AssumptionReport check_assumption3(const EbsbConfig& cfg, const Vec& x0, const Vec& x_m0, const Vec& theta_hat0) {
  AssumptionReport rep;
  const int r = cfg.chain.r;
  const Vec e = x0 - x_m0;
  const ChainEval ev = chain_eval(cfg.chain, x_m0);
  const double h1 = ev.values.front();

  auto add = [&](const std::string& name, bool ok, const std::string& detail, const Vec& witness) {
    rep.checks.push_back({name, ok ? CheckStatus::Pass : CheckStatus::Fail, false, detail, witness});
  };

  {
    const double need = std::max(cfg.delta / alpha_tail_product(cfg.chain.alphas, 1),
                                 std::sqrt(std::max(e.dot(cfg.w.W[0] * e), 0.0)));
    std::ostringstream os;
    os << "h_1(x_m0)=" << h1 << " required " << need;
    add("assumption3a", h1 >= need, os.str(), x_m0);
  }
  {
    bool ok = true;
    std::ostringstream os;
    for (int i = 2; i <= r; ++i) {
      const double hi = ev.values[i - 1];
      const double quad = h1 > 0.0 ? e.dot(cfg.w.W[i - 1] * e) / (2.0 * h1) : std::numeric_limits<double>::infinity();
      const double need = std::max(cfg.delta / alpha_tail_product(cfg.chain.alphas, i), quad);
      os << "h_" << i << "(x_m0)=" << hi << " required " << need << "; ";
      if (!(hi >= need)) ok = false;
    }
    if (r == 1) os << "vacuous for r=1";
    add("assumption3b", ok, os.str(), x_m0);
  }
  {
    const double hx = cfg.chain.base.value(x0);
    std::ostringstream os;
    os << "h(x0)=" << hx;
    add("assumption3c", hx >= 0.0, os.str(), x0);
  }
  add("assumption3d", cfg.Theta.contains(theta_hat0), "theta_hat(0) membership in Theta", theta_hat0);
  return rep;
}

EbsbProbes ebsb_probes(const EbsbConfig& cfg, const Vec& x, const Vec& x_m) {
  EbsbProbes p;
  const int r = cfg.chain.r;
  const Vec e = x - x_m;
  const ChainEval ev = chain_eval(cfg.chain, x_m);
  const double h1 = ev.values.front();
  p.H_e.push_back(h1 * h1 - e.dot(cfg.w.W[0] * e));
  for (int i = 2; i <= r; ++i) p.H_e.push_back(2.0 * h1 * ev.values[i - 1] - e.dot(cfg.w.W[i - 1] * e));
  for (int i = 1; i <= r; ++i)
    p.H_m.push_back(ev.values[i - 1] - cfg.delta / alpha_tail_product(cfg.chain.alphas, i));
  return p;
}

}  // namespace safeadapt
