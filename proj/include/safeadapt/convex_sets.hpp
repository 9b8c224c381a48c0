#pragma once

#include "safeadapt/numkit.hpp"

#include <vector>

namespace safeadapt {

// Compact convex parameter set. Either an axis-aligned box or a polytope
// {v : n_k' v >= c_k}. Polytope faces are stored with unit normals. Boxes need
// lo < hi in every coordinate.
class ConvexParamSet {
 public:
  ConvexParamSet() = default;

  static ConvexParamSet box(const Vec& lo, const Vec& hi);
  static ConvexParamSet polytope(const std::vector<HalfSpace>& faces);

  bool is_box() const { return is_box_; }
  int dim() const { return dim_; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }

  std::vector<HalfSpace> faces() const;
  std::vector<Vec> vertices() const;
  bool contains(const Vec& v, double tol = 1e-9) const;
  // Box volume; polytope volume is not needed and throws.
  double volume() const;
  double diameter() const;

 private:
  bool is_box_ = true;
  int dim_ = 0;
  Vec lo_, hi_;
  std::vector<HalfSpace> faces_;
  std::vector<Vec> vertices_;
};

Vec tangent_cone_project(const ConvexParamSet& set, const Vec& v, const Vec& z);
Vec ortho_project(const ConvexParamSet& set, const Vec& point);
double sup_distance(const ConvexParamSet& set, const Vec& theta_hat);

// Box intersection used by set updates.
ConvexParamSet intersect_boxes(const ConvexParamSet& a, const ConvexParamSet& b);

}  // namespace safeadapt
