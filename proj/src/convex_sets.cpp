#include "safeadapt/convex_sets.hpp"

#include "safeadapt/errors.hpp"

#include <algorithm>
#include <cmath>

namespace safeadapt {

namespace {

constexpr double kTol = 1e-9;

// Calls fn on every size-k index subset of [0, n).
template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

bool recession_cone_trivial(const std::vector<HalfSpace>& faces, int p) {
  const int nf = static_cast<int>(faces.size());
  auto in_cone = [&](const Vec& d) {
    for (const auto& f : faces)
      if (f.normal.dot(d) < -kTol) return false;
    return true;
  };
  if (p == 1) {
    Vec d(1);
    d(0) = 1.0;
    return !in_cone(d) && !in_cone(-d);
  }
  Mat all(nf, p);
  for (int r = 0; r < nf; ++r) all.row(r) = faces[r].normal.transpose();
  if (Eigen::FullPivLU<Mat>(all).rank() < p) return false;
  bool trivial = true;
  // Extreme rays of {d : N d >= 0} have p-1 independent active rows.
  for_each_subset(nf, p - 1, [&](const std::vector<int>& idx) {
    if (!trivial) return;
    Mat N(p - 1, p);
    for (int r = 0; r < p - 1; ++r) N.row(r) = faces[idx[r]].normal.transpose();
    Eigen::FullPivLU<Mat> lu(N);
    if (lu.rank() != p - 1) return;
    Vec d = lu.kernel().col(0);
    d.normalize();
    if (in_cone(d) || in_cone(-d)) trivial = false;
  });
  return trivial;
}

std::vector<Vec> enumerate_vertices(const std::vector<HalfSpace>& faces, int p) {
  std::vector<Vec> out;
  const int nf = static_cast<int>(faces.size());
  for_each_subset(nf, p, [&](const std::vector<int>& idx) {
    Mat N(p, p);
    Vec c(p);
    for (int r = 0; r < p; ++r) {
      N.row(r) = faces[idx[r]].normal.transpose();
      c(r) = faces[idx[r]].offset;
    }
    Eigen::FullPivLU<Mat> lu(N);
    if (!lu.isInvertible()) return;
    const Vec v = lu.solve(c);
    for (const auto& f : faces)
      if (f.normal.dot(v) - f.offset < -kTol) return;
    for (const auto& w : out)
      if ((w - v).norm() <= 1e-9) return;
    out.push_back(v);
  });
  return out;
}

}  // namespace

ConvexParamSet ConvexParamSet::box(const Vec& lo, const Vec& hi) {
  if (lo.size() != hi.size() || lo.size() == 0) throw Error(ErrorCode::OutOfDomain, "box bounds size mismatch");
  if (!lo.allFinite() || !hi.allFinite()) throw Error(ErrorCode::OutOfDomain, "non-finite box bounds");
  if ((lo.array() >= hi.array()).any()) throw Error(ErrorCode::EmptyInterior, "box needs lo < hi");
  ConvexParamSet s;
  s.is_box_ = true;
  s.dim_ = static_cast<int>(lo.size());
  s.lo_ = lo;
  s.hi_ = hi;
  return s;
}

ConvexParamSet ConvexParamSet::polytope(const std::vector<HalfSpace>& faces) {
  if (faces.empty()) throw Error(ErrorCode::Unbounded, "polytope without faces");
  const int p = static_cast<int>(faces.front().normal.size());
  ConvexParamSet s;
  s.is_box_ = false;
  s.dim_ = p;
  for (const auto& f : faces) {
    if (f.normal.size() != p) throw Error(ErrorCode::OutOfDomain, "face dimension mismatch");
    const double nn = f.normal.norm();
    if (!(nn > 0.0) || !std::isfinite(f.offset)) throw Error(ErrorCode::OutOfDomain, "degenerate face");
    s.faces_.push_back({f.normal / nn, f.offset / nn});
  }
  if (p <= 4) {
    if (!recession_cone_trivial(s.faces_, p)) throw Error(ErrorCode::Unbounded, "polytope is unbounded");
    s.vertices_ = enumerate_vertices(s.faces_, p);
    if (static_cast<int>(s.vertices_.size()) < p + 1) throw Error(ErrorCode::EmptyInterior, "polytope has empty interior");
    Vec centroid = Vec::Zero(p);
    for (const auto& v : s.vertices_) centroid += v;
    centroid /= static_cast<double>(s.vertices_.size());
    for (const auto& f : s.faces_)
      if (f.normal.dot(centroid) - f.offset <= kTol) throw Error(ErrorCode::EmptyInterior, "polytope has empty interior");
  }
  return s;
}

std::vector<HalfSpace> ConvexParamSet::faces() const {
  if (!is_box_) return faces_;
  std::vector<HalfSpace> out;
  for (int i = 0; i < dim_; ++i) {
    Vec e = Vec::Zero(dim_);
    e(i) = 1.0;
    out.push_back({e, lo_(i)});
    out.push_back({-e, -hi_(i)});
  }
  return out;
}

std::vector<Vec> ConvexParamSet::vertices() const {
  if (!is_box_) {
    if (dim_ > 4) throw Error(ErrorCode::OutOfDomain, "vertex enumeration needs p <= 4");
    return vertices_;
  }
  if (dim_ > 20) throw Error(ErrorCode::OutOfDomain, "too many box corners");
  std::vector<Vec> out;
  for (unsigned mask = 0; mask < (1u << dim_); ++mask) {
    Vec v(dim_);
    for (int i = 0; i < dim_; ++i) v(i) = (mask >> i) & 1u ? hi_(i) : lo_(i);
    out.push_back(v);
  }
  return out;
}

bool ConvexParamSet::contains(const Vec& v, double tol) const {
  if (v.size() != dim_) return false;
  if (is_box_) return ((v - lo_).array() >= -tol).all() && ((hi_ - v).array() >= -tol).all();
  for (const auto& f : faces_)
    if (f.normal.dot(v) - f.offset < -tol) return false;
  return true;
}

double ConvexParamSet::volume() const {
  if (!is_box_) throw Error(ErrorCode::OutOfDomain, "volume is only defined for boxes");
  return (hi_ - lo_).prod();
}

double ConvexParamSet::diameter() const {
  if (is_box_) return (hi_ - lo_).norm();
  const auto vs = vertices();
  double d = 0.0;
  for (const auto& a : vs)
    for (const auto& b : vs) d = std::max(d, (a - b).norm());
  return d;
}

Vec tangent_cone_project(const ConvexParamSet& set, const Vec& v, const Vec& z) {
  if (z.size() != set.dim()) throw Error(ErrorCode::OutOfDomain, "direction dimension mismatch");
  if (!set.contains(v, kTol)) throw Error(ErrorCode::PointOutsideSet, "tangent cone base point outside set");
  if (set.is_box()) {
    Vec u = z;
    for (int i = 0; i < set.dim(); ++i) {
      if (v(i) - set.lo()(i) <= kTol) u(i) = std::max(u(i), 0.0);
      if (set.hi()(i) - v(i) <= kTol) u(i) = std::min(u(i), 0.0);
    }
    return u;
  }
  std::vector<HalfSpace> active;
  for (const auto& f : set.faces())
    if (f.normal.dot(v) - f.offset <= kTol) active.push_back({f.normal, 0.0});
  if (active.empty()) return z;
  return qp_project(Mat::Identity(set.dim(), set.dim()), z, active);
}

Vec ortho_project(const ConvexParamSet& set, const Vec& point) {
  if (point.size() != set.dim()) throw Error(ErrorCode::OutOfDomain, "point dimension mismatch");
  if (set.is_box()) return point.cwiseMax(set.lo()).cwiseMin(set.hi());
  if (set.contains(point, 0.0)) return point;
  return qp_project(Mat::Identity(set.dim(), set.dim()), point, set.faces());
}

double sup_distance(const ConvexParamSet& set, const Vec& theta_hat) {
  if (theta_hat.size() != set.dim()) throw Error(ErrorCode::OutOfDomain, "estimate dimension mismatch");
  if (set.is_box()) {
    const Vec far = (theta_hat - set.lo()).cwiseMax(set.hi() - theta_hat);
    return far.norm();
  }
  const auto vs = set.vertices();
  if (vs.empty()) throw Error(ErrorCode::Unbounded, "no vertices");
  double best = 0.0;
  for (const auto& v : vs) best = std::max(best, (theta_hat - v).norm());
  return best;
}

ConvexParamSet intersect_boxes(const ConvexParamSet& a, const ConvexParamSet& b) {
  if (!a.is_box() || !b.is_box() || a.dim() != b.dim()) throw Error(ErrorCode::OutOfDomain, "box intersection needs boxes");
  return ConvexParamSet::box(a.lo().cwiseMax(b.lo()), a.hi().cwiseMin(b.hi()));
}

}  // namespace safeadapt
