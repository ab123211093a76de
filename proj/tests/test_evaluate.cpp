#include "boxspline/evaluate.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace boxspline;

namespace {

// Sum of M(x - G j) over every lattice shift whose support can reach x.
double shift_sum(const SplineEvaluator& m, const DirectionMatrix& xi, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (const IntVector& j : stencil_shifts(xi, x))
    s += m(x - xi.lattice.to_ambient(j));
  return s;
}

Eigen::VectorXd random_point(std::mt19937_64& rng, int dim, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x[i] = u(rng);
  return x;
}

}  // namespace

TEST(Evaluate, OneDimensionalHat) {
  const BoxSplineEvaluator hat((Eigen::MatrixXd(1, 2) << 1, 1).finished());
  EXPECT_NEAR(hat(Eigen::VectorXd::Constant(1, 0.0)), 1.0, 1e-14);
  EXPECT_NEAR(hat(Eigen::VectorXd::Constant(1, 0.25)), 0.75, 1e-14);
  EXPECT_NEAR(hat(Eigen::VectorXd::Constant(1, -0.5)), 0.5, 1e-14);
  EXPECT_EQ(hat(Eigen::VectorXd::Constant(1, 1.5)), 0.0);
}

TEST(Evaluate, QuadraticBSplineValues) {
  const BoxSplineEvaluator b((Eigen::MatrixXd(1, 3) << 1, 1, 1).finished());
  EXPECT_NEAR(b(Eigen::VectorXd::Constant(1, 0.0)), 0.75, 1e-14);
  EXPECT_NEAR(b(Eigen::VectorXd::Constant(1, 1.0)), 0.125, 1e-14);
}

TEST(Evaluate, ZwartPowellCentre) {
  // the centred ZP element has value 1/2 at the origin
  EXPECT_NEAR(eval_recursive(parse_spline_spec("cc2:11"), Eigen::Vector2d::Zero()), 0.5, 1e-12);
}

TEST(Evaluate, PartitionOfUnity) {
  std::mt19937_64 rng(7);
  for (const char* spec : {"cc2:11", "hex:20", "cc3:101", "bcc:110", "fcc:100"}) {
    const DirectionMatrix xi = parse_spline_spec(spec);
    const SplineEvaluator m(xi);
    for (int t = 0; t < 10; ++t) EXPECT_NEAR(shift_sum(m, xi, random_point(rng, xi.lattice.ambient, 1.0)), 1.0, 1e-9) << spec;
  }
}

TEST(Evaluate, SymmetryInvariance) {
  std::mt19937_64 rng(11);
  for (const char* spec : {"cc2:11", "hex:20", "bcc:110"}) {
    const DirectionMatrix xi = parse_spline_spec(spec);
    const SplineEvaluator m(xi);
    const SymmetryGroup group = symmetry_group(xi.lattice);
    for (int t = 0; t < 5; ++t) {
      const Eigen::VectorXd x = random_point(rng, xi.lattice.ambient, 1.0);
      const double v = m(x);
      for (const SymmetryElement& s : group.elements) EXPECT_NEAR(m(s.ambient * x), v, 1e-12) << spec;
    }
  }
}

TEST(Evaluate, SignedPermutationInvarianceOnTheCube) {
  const DirectionMatrix xi = parse_spline_spec("cc3:111");
  const SplineEvaluator m(xi);
  const Eigen::Vector3d x(0.31, -0.17, 0.52);
  const Eigen::Vector3d y(-0.52, 0.31, 0.17);
  EXPECT_NEAR(m(x), m(y), 1e-12);
}

TEST(Evaluate, NonNegativeAndVanishingOutsideTheSupport) {
  std::mt19937_64 rng(3);
  const DirectionMatrix xi = parse_spline_spec("cc2:21");
  const SplineEvaluator m(xi);
  const Zonotope z(xi.coords);
  for (int t = 0; t < 200; ++t) {
    const Eigen::VectorXd x = random_point(rng, 2, 2.5);
    const double v = m(x);
    EXPECT_GE(v, -1e-12);
    if (!z.contains(x, 1e-9)) {
      EXPECT_EQ(v, 0.0);
    }
  }
}

TEST(Evaluate, KnotPlanePointsAreFinite) {
  const SplineEvaluator m(parse_spline_spec("cc2:11"));
  for (double x : {0.0, 0.5, 1.0})
    for (double y : {0.0, 0.5, -0.5}) EXPECT_TRUE(std::isfinite(m(Eigen::Vector2d(x, y))));
  // continuity C1: no jump across the diagonal
  EXPECT_NEAR(m(Eigen::Vector2d(0.3, 0.3 + 1e-8)), m(Eigen::Vector2d(0.3, 0.3 - 1e-8)), 1e-7);
}

TEST(Evaluate, TransformUnderScaling) {
  const Eigen::MatrixXd zp = parse_spline_spec("cc2:11").columns;
  const auto [lhs, rhs] = transform_check(zp, 2.0 * Eigen::Matrix2d::Identity(), Eigen::Vector2d(0.21, -0.4));
  EXPECT_NEAR(lhs, rhs, 1e-6);
}

TEST(Evaluate, TransformUnderUnimodularMap) {
  Eigen::Matrix3d shear;
  shear << 1, 1, 0, 0, 1, 0, 0, 0, 1;
  const auto [lhs, rhs] = transform_check(parse_spline_spec("cc3:111"), shear, Eigen::Vector3d(0.1, 0.35, -0.2));
  EXPECT_NEAR(lhs, rhs, 1e-6);
}

TEST(Evaluate, HexagonalSplineIsTheMappedThreeDirectionSpline) {
  Eigen::MatrixXd three(2, 3);
  three << 1, 0, 1, 0, 1, 1;
  const DirectionMatrix h10 = parse_spline_spec("hex:10");
  const SplineEvaluator hex(h10);
  for (const Eigen::Vector2d& x : {Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(-0.3, 0.25), Eigen::Vector2d(0.4, 0.4)}) {
    const auto [lhs, rhs] = transform_check(three, h10.lattice.generator, x);
    EXPECT_NEAR(lhs, rhs, 1e-6);
    EXPECT_NEAR(hex(h10.lattice.generator * x), lhs, 1e-12);
  }
}

TEST(Evaluate, GeneralDimensionPartitionOfUnity) {
  const DirectionMatrix xi = parse_spline_spec("Zn:4:20");
  const SplineEvaluator m(xi);
  Eigen::VectorXd x(4);
  x << 0.1, -0.27, 0.33, 0.05;
  EXPECT_NEAR(shift_sum(m, xi, x), 1.0, 1e-9);
}
