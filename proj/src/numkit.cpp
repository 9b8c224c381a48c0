#include "safeadapt/numkit.hpp"

#include "safeadapt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace safeadapt {

namespace {

bool all_finite(const Mat& m) { return m.allFinite(); }

// Kronecker-form solve of Am' X + X Am = -Q without any definiteness check.
Mat lyapunov_raw(const Mat& Am, const Mat& Q) {
  const Eigen::Index n = Am.rows();
  const Mat I = Mat::Identity(n, n);
  Mat L = Mat::Zero(n * n, n * n);
  // vec(Am' X) = (I kron Am') vec X, vec(X Am) = (Am' kron I) vec X
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      L.block(i * n, j * n, n, n) += I(i, j) * Am.transpose();
      L.block(i * n, j * n, n, n) += Am(j, i) * I;
    }
  Eigen::FullPivLU<Mat> lu(L);
  if (!lu.isInvertible()) throw Error(ErrorCode::NotHurwitz, "Lyapunov operator is singular");
  const Vec q = Eigen::Map<const Vec>(Q.data(), n * n);
  Vec x = lu.solve(-q);
  Mat X = Eigen::Map<Mat>(x.data(), n, n);
  return 0.5 * (X + X.transpose());
}

}  // namespace

Mat solve_lyapunov(const Mat& Am, const Mat& Q) {
  if (Am.rows() != Am.cols() || Q.rows() != Am.rows() || Q.cols() != Am.cols())
    throw Error(ErrorCode::OutOfDomain, "dimension mismatch");
  if (!all_finite(Am) || !all_finite(Q)) throw Error(ErrorCode::OutOfDomain, "non-finite input");
  if (!is_hurwitz(Am)) throw Error(ErrorCode::NotHurwitz, "Am has an eigenvalue with Re >= 0");
  Mat P = lyapunov_raw(Am, Q);
  Eigen::LLT<Mat> llt(P);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotHurwitz, "solution is not positive definite");
  return P;
}

Vec qp_project(const Mat& W, const Vec& target, const std::vector<HalfSpace>& constraints) {
  const Eigen::Index n = target.size();
  if (W.rows() != n || W.cols() != n) throw Error(ErrorCode::OutOfDomain, "weight dimension mismatch");
  Eigen::LLT<Mat> wllt(W);
  if (wllt.info() != Eigen::Success) throw Error(ErrorCode::OutOfDomain, "weight is not positive definite");
  const Mat Winv = wllt.solve(Mat::Identity(n, n));

  std::vector<const HalfSpace*> live;
  for (const auto& c : constraints) {
    if (c.normal.size() != n) throw Error(ErrorCode::OutOfDomain, "constraint dimension mismatch");
    if (!c.normal.allFinite() || !std::isfinite(c.offset)) throw Error(ErrorCode::OutOfDomain, "non-finite constraint");
    const double nn = c.normal.norm();
    if (nn <= 1e-14) {
      if (c.offset > 1e-12) throw Error(ErrorCode::Infeasible, "zero-normal constraint with positive offset");
      continue;
    }
    live.push_back(&c);
  }

  const std::size_t k = live.size();
  if (k > 20) throw Error(ErrorCode::OutOfDomain, "too many constraints for active-set enumeration");

  auto feasible = [&](const Vec& z) {
    for (const auto* c : live) {
      const double scale = 1.0 + std::abs(c->offset) + c->normal.norm() * z.norm();
      if (c->normal.dot(z) - c->offset < -1e-9 * scale) return false;
    }
    return true;
  };

  double best_cost = std::numeric_limits<double>::infinity();
  Vec best;
  const std::size_t subsets = std::size_t{1} << k;
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    const int size = __builtin_popcountll(mask);
    if (size > n) continue;
    Vec z = target;
    if (size > 0) {
      Mat A(size, n);
      Vec b(size);
      int row = 0;
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (std::size_t{1} << i)) {
          A.row(row) = live[i]->normal.transpose();
          b(row) = live[i]->offset;
          ++row;
        }
      const Mat G = A * Winv * A.transpose();
      Eigen::FullPivLU<Mat> lu(G);
      lu.setThreshold(1e-12);
      if (!lu.isInvertible()) continue;
      const Vec mu = lu.solve(b - A * target);
      if ((G * mu - (b - A * target)).norm() > 1e-9 * (1.0 + b.norm() + (A * target).norm())) continue;
      if (mu.minCoeff() < -1e-12 * (1.0 + mu.cwiseAbs().maxCoeff())) continue;
      z = target + Winv * A.transpose() * mu;
    }
    if (!feasible(z)) continue;
    const Vec d = z - target;
    const double cost = d.dot(W * d);
    if (cost < best_cost) {
      best_cost = cost;
      best = z;
    }
  }
  if (best.size() == 0) throw Error(ErrorCode::Infeasible, "no active set yields a feasible KKT point");
  return best;
}

double inv_erf(double y) {
  if (!std::isfinite(y) || y <= -1.0 || y >= 1.0) throw Error(ErrorCode::OutOfDomain, "inv_erf needs |y| < 1");
  if (y == 0.0) return 0.0;
  const double s = y < 0 ? -1.0 : 1.0;
  const double a = std::abs(y);
  // Winitzki start, then Newton on erf or erfc depending on the tail.
  const double ka = 0.147;
  const double ln = std::log(1.0 - a * a);
  const double t = 2.0 / (M_PI * ka) + 0.5 * ln;
  double z = std::sqrt(std::sqrt(t * t - ln / ka) - t);
  const double c = 2.0 / std::sqrt(M_PI);
  const double tail = 1.0 - a;
  for (int it = 0; it < 100; ++it) {
    const double resid = a < 0.5 ? std::erf(z) - a : tail - std::erfc(z);
    const double deriv = c * std::exp(-z * z);
    // Halley correction
    const double step = resid / deriv;
    const double dz = step / (1.0 + z * step);
    z -= dz;
    if (std::abs(dz) <= 1e-16 * std::max(1.0, std::abs(z))) break;
  }
  return s * z;
}

Vec rk4_step(const VectorField& f, const Vec& x, double dt) {
  const Vec k1 = f(x);
  if (!k1.allFinite()) throw Error(ErrorCode::NonFiniteState, "non-finite derivative");
  const Vec k2 = f(x + 0.5 * dt * k1);
  if (!k2.allFinite()) throw Error(ErrorCode::NonFiniteState, "non-finite derivative");
  const Vec k3 = f(x + 0.5 * dt * k2);
  if (!k3.allFinite()) throw Error(ErrorCode::NonFiniteState, "non-finite derivative");
  const Vec k4 = f(x + dt * k3);
  if (!k4.allFinite()) throw Error(ErrorCode::NonFiniteState, "non-finite derivative");
  Vec out = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!out.allFinite()) throw Error(ErrorCode::NonFiniteState, "non-finite state");
  return out;
}

SymEig sym_eig(const Mat& P) {
  const Eigen::Index n = P.rows();
  if (P.cols() != n) throw Error(ErrorCode::OutOfDomain, "matrix is not square");
  if (!P.allFinite()) throw Error(ErrorCode::OutOfDomain, "non-finite matrix");
  Mat a = 0.5 * (P + P.transpose());
  Mat v = Mat::Identity(n, n);
  const double fro = a.norm();
  bool converged = n <= 1 || fro == 0.0;
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(2.0 * off) <= 1e-15 * fro) {
      converged = true;
      break;
    }
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  if (!converged) throw Error(ErrorCode::NotConverged, "Jacobi sweeps exhausted");

  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto l, auto r) { return a(l, l) < a(r, r); });
  SymEig out{Mat(n, n), Vec(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.d(i) = std::max(a(order[i], order[i]), 0.0);
    out.V.col(i) = v.col(order[i]);
  }
  return out;
}

bool is_hurwitz(const Mat& A) {
  if (A.size() == 0) return false;
  Eigen::EigenSolver<Mat> es(A, false);
  return (es.eigenvalues().real().array() < 0.0).all();
}

Mat lqr_gain(const Mat& A, const Mat& B, const Mat& Q, const Mat& R) {
  const Eigen::Index n = A.rows();
  const Mat Rinv = R.llt().solve(Mat::Identity(R.rows(), R.cols()));
  // Bass stabilizing start
  const double beta = A.norm() + 1.0;
  const Mat Ab = A + beta * Mat::Identity(n, n);
  Mat Wc = lyapunov_raw(-Ab.transpose(), 2.0 * B * B.transpose());
  Eigen::LLT<Mat> wl(Wc);
  if (wl.info() != Eigen::Success) throw Error(ErrorCode::NotConverged, "pair (A, B) is not controllable");
  Mat K = -B.transpose() * wl.solve(Mat::Identity(n, n));
  for (int it = 0; it < 200; ++it) {
    const Mat Acl = A + B * K;
    const Mat P = solve_lyapunov(Acl, Q + K.transpose() * R * K);
    const Mat Kn = -Rinv * B.transpose() * P;
    const double change = (Kn - K).norm();
    K = Kn;
    if (change <= 1e-13 * (1.0 + K.norm())) return K;
  }
  throw Error(ErrorCode::NotConverged, "Kleinman iteration did not converge");
}

}  // namespace safeadapt
