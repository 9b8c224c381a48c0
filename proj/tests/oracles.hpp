#pragma once

// Independent reference computations used as test oracles. None of these call
// into the library.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Plain Gaussian elimination with partial pivoting.
inline Vec gauss_solve(Mat A, Vec b) {
  const int n = static_cast<int>(A.rows());
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
    A.row(k).swap(A.row(piv));
    std::swap(b(k), b(piv));
    for (int i = k + 1; i < n; ++i) {
      const double f = A(i, k) / A(k, k);
      A.row(i) -= f * A.row(k);
      b(i) -= f * b(k);
    }
  }
  Vec x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b(i);
    for (int j = i + 1; j < n; ++j) s -= A(i, j) * x(j);
    x(i) = s / A(i, i);
  }
  return x;
}

// Am' P + P Am = -Q, unknowns ordered row-major and assembled entry by entry.
inline Mat lyapunov(const Mat& Am, const Mat& Q) {
  const int n = static_cast<int>(Am.rows());
  Mat M = Mat::Zero(n * n, n * n);
  Vec rhs(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int row = i * n + j;
      rhs(row) = -Q(i, j);
      for (int k = 0; k < n; ++k) {
        M(row, k * n + j) += Am(k, i);  // (Am' P)_ij
        M(row, i * n + k) += Am(k, j);  // (P Am)_ij
      }
    }
  const Vec p = gauss_solve(M, rhs);
  Mat P(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P(i, j) = p(i * n + j);
  return P;
}

// Bisection on std::erf.
inline double inv_erf(double y) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::erf(mid) < y) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct Row {
  Vec a;
  double b;
};

// Hildreth dual coordinate ascent for min 1/2 (z-t)' W (z-t) s.t. a_k' z >= b_k.
inline Vec hildreth(const Mat& W, const Vec& t, const std::vector<Row>& rows, int sweeps = 200000) {
  const int m = static_cast<int>(rows.size());
  if (m == 0) return t;
  const Mat Winv = W.inverse();
  Mat A(m, t.size());
  Vec b(m);
  for (int k = 0; k < m; ++k) {
    A.row(k) = rows[k].a.transpose();
    b(k) = rows[k].b;
  }
  const Mat G = A * Winv * A.transpose();
  const Vec c = b - A * t;
  Vec mu = Vec::Zero(m);
  for (int s = 0; s < sweeps; ++s) {
    double change = 0.0;
    for (int k = 0; k < m; ++k) {
      if (G(k, k) <= 0.0) continue;
      const double r = c(k) - G.row(k).dot(mu);
      const double nk = std::max(0.0, mu(k) + r / G(k, k));
      change = std::max(change, std::abs(nk - mu(k)));
      mu(k) = nk;
    }
    if (change < 1e-15) break;
  }
  return t + Winv * A.transpose() * mu;
}

inline double objective(const Mat& W, const Vec& t, const Vec& z) { return (z - t).dot(W * (z - t)); }

// Covariance form recovered from the information form: P+^-1 = P^-1 + Phi' S^-1 Phi.
struct Belief {
  Vec mean;
  Mat cov;
};

inline Belief information_update(const Belief& b, const Mat& Phi, const Vec& y, const Mat& Sigma) {
  const Mat Si = Sigma.inverse();
  const Mat info = b.cov.inverse() + Phi.transpose() * Si * Phi;
  const Vec eta = b.cov.inverse() * b.mean + Phi.transpose() * Si * y;
  Belief out;
  out.cov = info.inverse();
  out.mean = out.cov * eta;
  return out;
}

inline double central_diff(const std::function<double(const Vec&)>& f, const Vec& x, int i, double h) {
  Vec xp = x, xm = x;
  xp(i) += h;
  xm(i) -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

}  // namespace oracle
