#include "safeadapt/smid.hpp"

#include "safeadapt/errors.hpp"

#include <cmath>

namespace safeadapt {

GaussianBelief belief_update(const GaussianBelief& belief, const Mat& Phi, const Vec& y, const Mat& Sigma) {
  if (!Phi.allFinite() || !y.allFinite()) throw Error(ErrorCode::NonFiniteState, "non-finite measurement");
  const Mat& P = belief.P_cov;
  const Mat PPhiT = P * Phi.transpose();
  Mat S = Sigma + Phi * PPhiT;
  S = 0.5 * (S + S.transpose());
  const SymEig eig = sym_eig(S);
  if (!(eig.d.minCoeff() > 0.0) || eig.d.maxCoeff() / eig.d.minCoeff() > 1e12)
    throw Error(ErrorCode::IllConditioned, "innovation covariance is ill conditioned");
  Eigen::LLT<Mat> llt(S);
  const Mat gain = llt.solve(PPhiT.transpose()).transpose();
  GaussianBelief out;
  out.zeta_hat = belief.zeta_hat + gain * (y - Phi * belief.zeta_hat);
  Mat Pn = P - gain * PPhiT.transpose();
  out.P_cov = 0.5 * (Pn + Pn.transpose());
  return out;
}

Bounds extract_bounds(const GaussianBelief& belief, double delta_conf) {
  if (!(delta_conf > 0.0 && delta_conf < 1.0)) throw Error(ErrorCode::OutOfDomain, "delta_conf must lie in (0, 1)");
  const Eigen::Index q = belief.zeta_hat.size();
  const SymEig eig = sym_eig(belief.P_cov);
  const double c = inv_erf(1.0 - delta_conf / static_cast<double>(q));
  const Vec vhat = eig.V.transpose() * belief.zeta_hat;
  const Vec vtil = (2.0 * eig.d.array()).sqrt().matrix() * c;
  const Mat absV = eig.V.cwiseAbs();
  Bounds b;
  b.lo = eig.V * vhat - absV * vtil;
  b.hi = eig.V * vhat + absV * vtil;
  return b;
}

GaussianBelief init_belief(const Vec& zeta_hat0, const ConvexParamSet& box, double delta_conf) {
  if (!box.is_box()) throw Error(ErrorCode::OutOfDomain, "belief initialization needs a box");
  const Eigen::Index q = zeta_hat0.size();
  const double c = inv_erf(1.0 - delta_conf / static_cast<double>(q));
  GaussianBelief b;
  b.zeta_hat = zeta_hat0;
  const Vec half = (box.hi() - zeta_hat0).cwiseMax(zeta_hat0 - box.lo());
  b.P_cov = (half.array().square() / (2.0 * c * c)).matrix().asDiagonal();
  return b;
}

namespace {

std::optional<ConvexParamSet> try_intersect(const ConvexParamSet& set, const Vec& lo, const Vec& hi) {
  const Vec nlo = set.lo().cwiseMax(lo);
  const Vec nhi = set.hi().cwiseMin(hi);
  if ((nlo.array() >= nhi.array()).any()) return std::nullopt;
  return ConvexParamSet::box(nlo, nhi);
}

}  // namespace

SetPair smid_step(const ConvexParamSet& Theta, const std::optional<ConvexParamSet>& L, const GaussianBelief& belief,
                  double delta_conf) {
  if (!Theta.is_box() || (L && !L->is_box())) throw Error(ErrorCode::OutOfDomain, "set updates need boxes");
  const int p = Theta.dim();
  const Bounds b = extract_bounds(belief, delta_conf);
  SetPair out{Theta, L, false};
  auto nt = try_intersect(Theta, b.lo.head(p), b.hi.head(p));
  std::optional<ConvexParamSet> nl;
  if (L) nl = try_intersect(*L, b.lo.tail(L->dim()), b.hi.tail(L->dim()));
  if (!nt || (L && !nl)) {
    out.fell_back = true;
    return out;
  }
  out.Theta = *nt;
  if (L) out.L = *nl;
  return out;
}

void apply_resets(AdaptiveState& state, AuxEstimates* aux, const ConvexParamSet& Theta,
                  const std::optional<ConvexParamSet>& L) {
  state.theta_hat = ortho_project(Theta, state.theta_hat);
  if (L) state.lambda_hat = ortho_project(*L, state.lambda_hat);
  if (aux) {
    aux->theta_s = ortho_project(Theta, aux->theta_s);
    if (L) aux->lambda_s = ortho_project(*L, aux->lambda_s);
  }
}

Mat smid_regressor(const Mat& Fx, const Vec& u) {
  Mat Phi(Fx.rows(), Fx.cols() + u.size());
  Phi << -Fx, Mat(u.asDiagonal());
  return Phi;
}

Vec smid_measurement(const Mat& A, const Mat& B, double dt, const Vec& x_k, const Vec& x_next) {
  const Mat Bd = B * dt;
  const Vec rhs = x_next - (Mat::Identity(A.rows(), A.cols()) + A * dt) * x_k;
  return Bd.completeOrthogonalDecomposition().solve(rhs);
}

}  // namespace safeadapt
