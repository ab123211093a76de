#include "boxspline/lattice.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace boxspline;

TEST(Lattice, SymmetryGroupOrders) {
  const std::map<std::string, std::size_t> expected{{"cc2", 8}, {"hex", 12}, {"cc3", 48}, {"fcc", 48}, {"bcc", 48}};
  for (const auto& [name, order] : expected) EXPECT_EQ(symmetry_group(builtin_lattice(name)).order(), order) << name;
}

TEST(Lattice, SymmetryElementsPreserveTheLattice) {
  const Lattice lat = builtin_lattice("bcc");
  for (const SymmetryElement& s : symmetry_group(lat).elements) {
    EXPECT_NEAR(std::abs(static_cast<double>(s.coords.cast<double>().determinant())), 1.0, 1e-12);
    EXPECT_TRUE((s.ambient * lat.generator).isApprox(lat.generator * s.coords.cast<double>(), 1e-12));
  }
}

TEST(Lattice, NamedDirectionSetSizes) {
  const std::map<std::string, std::vector<std::size_t>> expected{
      {"cc2", {2, 2, 2, 4}}, {"hex", {3, 3, 3, 6}}, {"cc3", {3, 6, 4, 3}}, {"fcc", {6, 3, 12, 6}}, {"bcc", {4, 3, 6, 12}}};
  for (const auto& [name, sizes] : expected) {
    const Lattice lat = builtin_lattice(name);
    for (int k = 1; k <= 4; ++k) EXPECT_EQ(direction_set(lat, k).size(), sizes[k - 1]) << name << " k=" << k;
  }
}

TEST(Lattice, DirectionSetsShareOneLength) {
  for (const char* name : {"cc2", "hex", "cc3", "fcc", "bcc"}) {
    const Lattice lat = builtin_lattice(name);
    for (int k = 1; k <= 4; ++k) {
      const DirectionSet ds = direction_set(lat, k);
      for (const IntVector& v : ds.coords) EXPECT_EQ(lat.norm2(v), ds.norm2) << name << " k=" << k;
    }
  }
}

TEST(Lattice, HexNormsAreExact) {
  const Lattice hex = builtin_lattice("hex");
  EXPECT_EQ(hex.norm2(IntVector::Unit(2, 0)), Rational(1));
  IntVector v(2);
  v << 1, 3;
  EXPECT_EQ(hex.norm2(v), Rational(7));
  EXPECT_THROW(hex.scaled_ambient(v), std::logic_error);
}

TEST(Lattice, ShellsOfTheSquareLattice) {
  const auto s = shells(builtin_lattice("cc2"), 5.0);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0].points.size(), 4u);
  EXPECT_EQ(s[1].points.size(), 4u);
  EXPECT_EQ(s[2].points.size(), 4u);
  EXPECT_EQ(s[3].points.size(), 8u);
}

TEST(Lattice, GeneralFamilies) {
  EXPECT_EQ(direction_set(builtin_lattice("Dn*", 4), 1).size(), 12u);
  EXPECT_EQ(direction_set(builtin_lattice("Zn", 5), 2).size(), 20u);
  EXPECT_EQ(direction_set(builtin_lattice("Dn", 4), 1).size(), 12u);
  EXPECT_EQ(direction_set(builtin_lattice("An", 3), 1).size(), 6u);
  EXPECT_THROW(direction_set(builtin_lattice("An*", 2), 2), std::invalid_argument);
  EXPECT_THROW(direction_set(builtin_lattice("cc2"), 5), std::out_of_range);
}

TEST(Lattice, ALatticesLiveInTheZeroSumHyperplane) {
  const Lattice an = builtin_lattice("An*", 3);
  EXPECT_EQ(an.ambient, 4);
  EXPECT_NEAR(an.generator.colwise().sum().cwiseAbs().maxCoeff(), 0.0, 1e-14);
  const Eigen::VectorXd x = an.to_ambient(IntVector::Ones(3));
  EXPECT_TRUE(an.to_lattice_coords(x).isApprox(Eigen::VectorXd::Ones(3), 1e-12));
}

TEST(Lattice, ScaledCoordinatesRoundTrip) {
  const Lattice dual = builtin_lattice("Dn*", 5);
  IntVector c(5);
  c << 1, -2, 0, 3, 1;
  EXPECT_EQ(dual.coords_from_scaled(dual.scaled_ambient(c)), c);
  IntVector off = IntVector::Zero(5);
  off[0] = 1;  // (1/2, 0, ...) is not in the lattice
  EXPECT_THROW(dual.coords_from_scaled(off), std::invalid_argument);
}

TEST(Lattice, SpecRoundTrip) {
  for (const char* spec : {"cc2", "hex", "bcc", "Dn*:4", "An:3", "Zn:5"})
    EXPECT_EQ(parse_lattice_spec(spec).spec(), spec);
  EXPECT_THROW(parse_lattice_spec("foo"), std::invalid_argument);
  EXPECT_THROW(parse_lattice_spec("Dn:x"), std::invalid_argument);
}

TEST(Lattice, CanonicalDirectionsAreSignReduced) {
  const Lattice lat = builtin_lattice("cc2");
  IntVector a(2), b(2);
  a << -1, 0;
  b << 0, -1;
  const auto c = canonical_directions(lat, {b, a});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], IntVector::Unit(2, 0));
  EXPECT_EQ(c[1], IntVector::Unit(2, 1));
}
