#include "boxspline/spline.hpp"

#include <gtest/gtest.h>

using namespace boxspline;

namespace {

BoxSplineDescriptor sheet(const char* spec) { return BoxSplineDescriptor::describe(parse_spline_spec(spec)); }

}  // namespace

TEST(Spline, ZwartPowellDatasheet) {
  const auto ds = sheet("cc2:11");
  EXPECT_EQ(ds.m, 4);
  EXPECT_EQ(ds.degree, 2);
  EXPECT_EQ(ds.r, 3);
  EXPECT_EQ(ds.continuity, 1);
  EXPECT_EQ(ds.stencil, 7);
  EXPECT_EQ(ds.support.cells, 7);
  EXPECT_FALSE(ds.unimodular);
  EXPECT_TRUE(ds.symmetric.value());
}

TEST(Spline, BccDatasheet) {
  const auto ds = sheet("bcc:110");
  EXPECT_EQ(ds.degree, 4);
  EXPECT_EQ(ds.continuity, 2);
  EXPECT_EQ(ds.stencil, 30);
}

TEST(Spline, TensorProductIsUnimodular) {
  EXPECT_TRUE(sheet("cc2:10").unimodular);
  EXPECT_TRUE(sheet("hex:10").unimodular);
  EXPECT_TRUE(sheet("cc3:100").unimodular);
  EXPECT_EQ(sheet("cc2:10").stencil, 1);
  EXPECT_EQ(sheet("cc2:10").continuity, -1);
}

TEST(Spline, SupportVolumeOfTheThreeDirectionSpline) {
  // |det| over all pairs of (1,0), (0,1), (1,1)
  EXPECT_EQ(sheet("hex:10").support.cells, 3);
}

TEST(Spline, NonSymmetricCounterexample) {
  const Lattice cc2 = builtin_lattice("cc2");
  IntMatrix n(2, 3);
  n << 1, 0, 1, 0, 1, 1;
  const DirectionMatrix xi = direction_matrix_from_coords(cc2, n);
  EXPECT_FALSE(is_symmetric(xi));
  EXPECT_EQ(degree(xi), 1);
  EXPECT_EQ(continuity(xi), 0);
}

TEST(Spline, InvalidSpecs) {
  EXPECT_THROW(parse_spline_spec("cc2:0"), std::invalid_argument);
  EXPECT_THROW(parse_spline_spec("cc2"), std::invalid_argument);
  EXPECT_THROW(parse_spline_spec("cc2:1x"), std::invalid_argument);
  EXPECT_THROW(parse_spline_spec("nope:11"), std::invalid_argument);
}

TEST(Spline, RankDeficientColumnsRejected) {
  IntMatrix n(2, 2);
  n << 1, 2, 1, 2;
  EXPECT_THROW(direction_matrix_from_coords(builtin_lattice("cc2"), n), std::invalid_argument);
}

TEST(Spline, GeneralDimension) {
  const DirectionMatrix xi = parse_spline_spec("Dn*:4:10");
  EXPECT_EQ(xi.m(), 12);
  EXPECT_EQ(degree(xi), 8);
  EXPECT_EQ(continuity(xi), 4);
}

TEST(Spline, HyperplaneNormalsOfZwartPowell) {
  EXPECT_EQ(hyperplane_normals(parse_spline_spec("cc2:11").coords).size(), 4u);
}

TEST(Spline, StencilShiftsStayWithinTheStencil) {
  const DirectionMatrix xi = parse_spline_spec("cc2:11");
  const Zonotope z(xi.coords);
  EXPECT_TRUE(z.contains(Eigen::Vector2d(0.9, 0.5)));
  EXPECT_FALSE(z.contains(Eigen::Vector2d(1.2, 0.9)));
  // off the knot planes, where closed-support counting would add boundary shifts
  for (double x : {0.13, 0.21, 0.77, -0.4}) {
    const auto shifts = stencil_shifts(xi, Eigen::Vector2d(x, 0.31));
    EXPECT_LE(static_cast<long long>(shifts.size()), stencil_size(xi));
    EXPECT_GE(shifts.size(), 1u);
  }
}

TEST(Spline, DistinctColumnsCountMultiplicities) {
  const auto cm = distinct_columns(parse_spline_spec("cc2:21").coords);
  EXPECT_EQ(cm.directions.cols(), 4);
  int total = 0;
  for (int c : cm.multiplicity) total += c;
  EXPECT_EQ(total, 6);
}
