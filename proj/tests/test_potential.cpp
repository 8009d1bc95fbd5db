#include <gtest/gtest.h>

#include <cmath>

#include "nlgs/potential.hpp"

using namespace nlgs;

namespace {

// Nearest 1-D grid point to x.
std::size_t index_of(const SpatialGrid& g, double x) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.size(); ++i)
    if (std::abs(g.point(i)[0] - x) < std::abs(g.point(best)[0] - x)) best = i;
  return best;
}

}  // namespace

TEST(Potential, ZeroShapeIsIdenticallyZero) {
  SpatialGrid g(2, 5.0, 32);
  const auto p = Potential::build(PotentialShape::zero(), g);
  EXPECT_EQ(sup_norm(p.field()), 0.0);
  for (double m : p.mortality().values()) EXPECT_EQ(m, 1.0);
}

TEST(Potential, ParadiseBallIsOneInsideAndZeroAway) {
  SpatialGrid g(1, 20.0, 512);
  const auto p = Potential::build(PotentialShape::paradise_ball(0.5), g);
  EXPECT_EQ(p.field()[index_of(g, 0.0)], 1.0);
  EXPECT_EQ(p.field()[index_of(g, 2.0)], 0.0);
  EXPECT_EQ(p.field()[index_of(g, -2.0)], 0.0);
}

TEST(Potential, ParadiseBallCoversInnerBall) {
  for (int d = 1; d <= 3; ++d) {
    SpatialGrid g(d, 6.0, d == 3 ? 32 : 128);
    const double delta = 1.0;
    const auto p = Potential::build(PotentialShape::paradise_ball(delta), g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.radius(i) <= 0.9 * delta) {
        EXPECT_EQ(p.field()[i], 1.0);
      }
      if (g.radius(i) >= delta + g.spacing()) {
        EXPECT_EQ(p.field()[i], 0.0);
      }
    }
  }
}

TEST(Potential, EdgeRampIsOneCellWide) {
  SpatialGrid g(1, 4.0, 64);
  const auto shape = PotentialShape::plateau(0.5, 1.0);
  const double h = g.spacing();
  EXPECT_DOUBLE_EQ(shape.value(1.0, h), 0.5);
  EXPECT_DOUBLE_EQ(shape.value(1.0 + 0.5 * h, h), 0.25);
  EXPECT_EQ(shape.value(1.0 + h, h), 0.0);
}

TEST(Potential, AmplitudeAboveOneRejected) {
  SpatialGrid g(1, 10.0, 128);
  EXPECT_THROW(Potential::build(PotentialShape::bump(1.05, 1.0), g), InvalidArgument);
  EXPECT_THROW(Potential::build(PotentialShape::plateau(-0.1, 1.0), g), InvalidArgument);
}

TEST(Potential, SupportTouchingMarginRejected) {
  SpatialGrid g(1, 5.0, 64);
  EXPECT_THROW(Potential::build(PotentialShape::plateau(0.5, 4.0), g), InvalidArgument);
  EXPECT_NO_THROW(Potential::build(PotentialShape::plateau(0.5, 2.5), g));
}

TEST(Potential, BumpIsSmoothAndBounded) {
  SpatialGrid g(3, 5.0, 24);
  const auto p = Potential::build(PotentialShape::bump(0.2, 0.5), g);
  EXPECT_NEAR(p.field()[g.origin_index()], 0.2, 1e-15);
  EXPECT_LE(p.field().max(), 0.2);
  EXPECT_GE(p.field().min(), 0.0);
}

TEST(Validate, ZeroFieldPassesWithEmptySupport) {
  const auto d = validate(Field::zeros(SpatialGrid(2, 3.0, 16)));
  EXPECT_TRUE(d.ok);
  EXPECT_EQ(d.support_radius, 0.0);
  EXPECT_EQ(d.boundary_shell_max, 0.0);
}

TEST(Validate, PlateauInsideMarginPasses) {
  SpatialGrid g(1, 10.0, 256);
  const auto p = Potential::build(PotentialShape::plateau(0.5, 3.0), g);
  const auto d = validate(p.field());
  EXPECT_TRUE(d.ok) << d.message;
  EXPECT_EQ(d.max, 0.5);
  EXPECT_LE(d.support_radius, 3.0 + g.spacing());
}

TEST(Validate, RejectsOutOfRangeAndBoundaryContact) {
  SpatialGrid g(1, 4.0, 32);
  std::vector<double> v(g.size(), 0.0);
  v[g.origin_index()] = 1.5;
  EXPECT_FALSE(validate(Field(g, v)).ok);
  v[g.origin_index()] = -1e-6;
  EXPECT_FALSE(validate(Field(g, v)).ok);
  v[g.origin_index()] = 0.0;
  v[0] = 0.1;
  const auto d = validate(Field(g, v));
  EXPECT_FALSE(d.ok);
  EXPECT_EQ(d.boundary_shell_max, 0.1);
}

TEST(SubcriticalPotential, ShiftAndMortality) {
  SpatialGrid g(1, 10.0, 128);
  const auto s = SubcriticalPotential::build(1.5, PotentialShape::plateau(1.5, 0.5), g);
  EXPECT_DOUBLE_EQ(s.h(), 0.5);
  EXPECT_EQ(s.field().max(), 1.5);
  const auto m = s.mortality();
  EXPECT_EQ(m[g.origin_index()], 0.0);
  EXPECT_EQ(m[0], 1.5);
  EXPECT_THROW(SubcriticalPotential::build(1.0, PotentialShape::zero(), g), InvalidArgument);
  EXPECT_THROW(SubcriticalPotential::build(1.5, PotentialShape::plateau(1.6, 0.5), g), InvalidArgument);
}
