#include "safeadapt/convex_sets.hpp"
#include "safeadapt/errors.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace safeadapt;

namespace {

ConvexParamSet unit_box() { return ConvexParamSet::box(Vec::Zero(2), Vec::Ones(2) * 2.0); }

// Triangle 0 <= x, 0 <= y, x + y <= 1.
ConvexParamSet triangle() {
  std::vector<HalfSpace> f{{(Vec(2) << 1, 0).finished(), 0.0},
                           {(Vec(2) << 0, 1).finished(), 0.0},
                           {(Vec(2) << -1, -1).finished(), -1.0}};
  return ConvexParamSet::polytope(f);
}

Vec sample_in(const ConvexParamSet& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (s.is_box()) {
    Vec v(s.dim());
    for (int i = 0; i < s.dim(); ++i) v(i) = s.lo()(i) + u(rng) * (s.hi()(i) - s.lo()(i));
    // Put some samples on faces and corners.
    if (u(rng) < 0.3) v(0) = s.lo()(0);
    if (u(rng) < 0.3) v(1) = s.hi()(1);
    return v;
  }
  const auto vs = s.vertices();
  Vec w(vs.size());
  for (int i = 0; i < w.size(); ++i) w(i) = u(rng) < 0.2 ? 0.0 : u(rng);
  if (w.sum() == 0.0) w(0) = 1.0;
  w /= w.sum();
  Vec v = Vec::Zero(s.dim());
  for (std::size_t i = 0; i < vs.size(); ++i) v += w(i) * vs[i];
  return v;
}

}  // namespace

TEST(ConvexSets, BoxBasics) {
  const auto b = unit_box();
  EXPECT_TRUE(b.contains((Vec(2) << 1.0, 2.0).finished()));
  EXPECT_FALSE(b.contains((Vec(2) << 1.0, 2.1).finished()));
  EXPECT_DOUBLE_EQ(b.volume(), 4.0);
  EXPECT_NEAR(b.diameter(), std::sqrt(8.0), 1e-14);
  EXPECT_EQ(b.faces().size(), 4u);
  EXPECT_EQ(b.vertices().size(), 4u);
  EXPECT_THROW(ConvexParamSet::box(Vec::Ones(2), Vec::Zero(2)), Error);
}

TEST(ConvexSets, PolytopeVerticesAndErrors) {
  const auto t = triangle();
  EXPECT_EQ(t.vertices().size(), 3u);
  EXPECT_TRUE(t.contains((Vec(2) << 0.2, 0.2).finished()));
  EXPECT_FALSE(t.contains((Vec(2) << 0.6, 0.6).finished()));
  std::vector<HalfSpace> open{{(Vec(2) << 1, 0).finished(), 0.0}, {(Vec(2) << 0, 1).finished(), 0.0}};
  try {
    ConvexParamSet::polytope(open);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Unbounded);
  }
  std::vector<HalfSpace> empty{{(Vec(1) << 1).finished(), 1.0}, {(Vec(1) << -1).finished(), 0.0}};
  EXPECT_THROW(ConvexParamSet::polytope(empty), Error);
}

TEST(ConvexSets, SupDistanceBox) {
  const auto b = unit_box();
  const Vec th = (Vec(2) << 0.5, 1.5).finished();
  EXPECT_NEAR(sup_distance(b, th), std::hypot(1.5, 1.5), 1e-14);
  EXPECT_NEAR(sup_distance(triangle(), Vec::Zero(2)), 1.0, 1e-12);
}

TEST(ConvexSets, OrthoProjectClampsAndStaysInside) {
  const auto b = unit_box();
  const Vec p = ortho_project(b, (Vec(2) << -1.0, 3.0).finished());
  EXPECT_DOUBLE_EQ(p(0), 0.0);
  EXPECT_DOUBLE_EQ(p(1), 2.0);
  const auto t = triangle();
  const Vec q = ortho_project(t, (Vec(2) << 1.0, 1.0).finished());
  EXPECT_NEAR(q(0), 0.5, 1e-12);
  EXPECT_NEAR(q(1), 0.5, 1e-12);
}

TEST(ConvexSets, TangentConeInteriorIsIdentity) {
  const auto b = unit_box();
  const Vec z = (Vec(2) << -3.0, 5.0).finished();
  EXPECT_LE((tangent_cone_project(b, Vec::Ones(2), z) - z).norm(), 1e-15);
}

TEST(ConvexSets, TangentConeOutsideThrows) {
  try {
    tangent_cone_project(unit_box(), (Vec(2) << 3.0, 0.0).finished(), Vec::Ones(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PointOutsideSet);
  }
}

// (v - w)' proj_T(v)[z] <= (v - w)' z for v, w in the set.
TEST(ConvexSets, TangentConeInequalityAndIdempotence) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd(0.0, 2.0);
  for (const auto& set : {unit_box(), triangle()}) {
    double worst = -1e300;
    for (int i = 0; i < 1000; ++i) {
      const Vec v = sample_in(set, rng);
      const Vec w = sample_in(set, rng);
      Vec z(2);
      z << nd(rng), nd(rng);
      const Vec pz = tangent_cone_project(set, v, z);
      worst = std::max(worst, (v - w).dot(pz) - (v - w).dot(z));
      EXPECT_LE((tangent_cone_project(set, v, pz) - pz).norm(), 1e-9);
    }
    EXPECT_LE(worst, 1e-9);
  }
}

TEST(ConvexSets, IntersectBoxes) {
  const auto a = unit_box();
  const auto b = ConvexParamSet::box(Vec::Ones(2), Vec::Ones(2) * 3.0);
  const auto c = intersect_boxes(a, b);
  EXPECT_DOUBLE_EQ(c.volume(), 1.0);
}
