#include "boxspline/evaluate.hpp"
#include "boxspline/fourier_oracle.hpp"

#include <gtest/gtest.h>

using namespace boxspline;

TEST(Oracle, HatFunction) {
  const FourierOracle hat((Eigen::MatrixXd(1, 2) << 1, 1).finished(), 4096);
  const auto v = hat(Eigen::VectorXd::Constant(1, 0.25));
  EXPECT_NEAR(v.value, 0.75, 1e-3);
  EXPECT_LT(v.error, 1e-3);
}

TEST(Oracle, MatchesTheRecurrence) {
  for (const char* spec : {"cc2:11", "hex:20", "cc3:101"}) {
    const DirectionMatrix xi = parse_spline_spec(spec);
    const SplineEvaluator m(xi);
    const SplineOracle ref(xi, 1e-4);
    Eigen::VectorXd x = Eigen::VectorXd::Constant(xi.lattice.ambient, 0.15);
    x[0] = -0.4;
    EXPECT_NEAR(ref(x), m(x), 1e-3) << spec;
  }
}

TEST(Oracle, HandlesHyperplaneLattices) {
  const DirectionMatrix xi = parse_spline_spec("An:2:20");
  const SplineEvaluator m(xi);
  const SplineOracle ref(xi, 1e-4);
  const Eigen::VectorXd x = xi.lattice.to_ambient(IntVector::Zero(2)) + xi.lattice.generator * Eigen::Vector2d(0.2, -0.1);
  EXPECT_NEAR(ref(x), m(x), 1e-3);
}

TEST(Oracle, UnreachableTargetThrows) {
  const SplineOracle ref(parse_spline_spec("cc2:10"), 1e-12, 8, 16);
  EXPECT_THROW(ref(Eigen::Vector2d(0.1, 0.1)), std::runtime_error);
}
