#pragma once

#include "boxspline/integer_linalg.hpp"
#include "boxspline/rational.hpp"

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace boxspline {

enum class LatticeFamily { cc2, hex, cc3, fcc, bcc, Zn, An, AnDual, Dn, DnDual };

/// A domain lattice G Z^d. Points are addressed by integer lattice
/// coordinates i, with ambient position G i. The A-families live in the
/// hyperplane x_1 + ... + x_{d+1} = 0 of R^{d+1}, so `ambient` may exceed `dim`.
///
/// Exact work goes through the scaled Gram matrix: |G i|^2 = i^T Q i / q with
/// integer Q = `gram` and q = `gram_scale`. The hexagonal generator carries
/// sqrt(3) as a double, but its Gram matrix is rational, so norms and
/// symmetry tests stay exact there too.
struct Lattice {
  std::string name;  // canonical family name: cc2, hex, cc3, fcc, bcc, Zn, An, An*, Dn, Dn*
  LatticeFamily family = LatticeFamily::cc2;
  int dim = 0;
  int ambient = 0;
  Eigen::MatrixXd generator;  // ambient x dim
  double cell_volume = 0.0;   // |det G|, or sqrt(det G^T G) when ambient > dim
  IntMatrix gram;             // dim x dim
  long long gram_scale = 1;

  /// Scale turning ambient coordinates of lattice points into integers
  /// (1, except d+1 for An* and 2 for Dn*); hex has none.
  long long coordinate_scale = 1;

  Eigen::VectorXd to_ambient(const IntVector& coords) const { return generator * coords.cast<double>(); }
  /// Intrinsic lattice coordinates of an ambient point (least squares when ambient > dim).
  Eigen::VectorXd to_lattice_coords(const Eigen::VectorXd& x) const;
  Rational norm2(const IntVector& coords) const;
  /// Exact integer ambient coordinates scaled by `coordinate_scale`; throws for hex.
  IntVector scaled_ambient(const IntVector& coords) const;
  /// Lattice coordinates of an ambient vector given in `coordinate_scale` units.
  IntVector coords_from_scaled(const IntVector& scaled) const;

  /// Letter used in spline names: c, h, f, b (and the family name otherwise).
  std::string letter() const;
  /// Round-trippable spec string, e.g. "bcc" or "Dn*:4".
  std::string spec() const;
  bool is_named_low_dim() const { return family <= LatticeFamily::bcc; }

  Eigen::MatrixXd left_inverse;  // dim x ambient, (G^T G)^-1 G^T
};

/// Builds one of cc2, hex, cc3, fcc, bcc, Zn, An, An*, Dn, Dn*. The five named
/// lattices fix their dimension; `d` must then be 0 or match.
Lattice builtin_lattice(std::string_view name, int d = 0);

/// Parses "<name>[:d]".
Lattice parse_lattice_spec(std::string_view spec);

/// One element of a lattice symmetry group, stored both as the integer
/// change of lattice coordinates U and the orthogonal ambient map L = G U G^-1.
struct SymmetryElement {
  IntMatrix coords;
  Eigen::MatrixXd ambient;
};

struct SymmetryGroup {
  std::vector<SymmetryElement> elements;
  std::size_t order() const { return elements.size(); }
};

/// Full orthogonal symmetry group of one of the five d <= 3 lattices.
SymmetryGroup symmetry_group(const Lattice& lat);

/// Lattice points grouped by squared length.
struct Shell {
  Rational norm2;
  std::vector<IntVector> points;  // lattice coordinates, both v and -v
};

/// Every lattice point with 0 < |v|^2 <= max_norm2, grouped by |v|^2 in
/// increasing order.
std::vector<Shell> shells(const Lattice& lat, double max_norm2);

struct DirectionSet {
  int k = 0;
  Rational norm2;                  // common squared length (for split shells, the first one)
  std::vector<IntVector> coords;   // one of {v, -v}, canonical order
  Eigen::MatrixXd vectors;         // ambient x count

  std::size_t size() const { return coords.size(); }
};

/// Direction set D^k: k = 1..4 on the five named lattices (from shells),
/// k = 1..2 on the general-d families (closed-form patterns).
DirectionSet direction_set(const Lattice& lat, int k);

/// Sign-reduces a list of lattice vectors (keeping the lexicographically
/// larger of v and -v by ambient coordinates) and sorts them in descending
/// lexicographic ambient order.
std::vector<IntVector> canonical_directions(const Lattice& lat, const std::vector<IntVector>& coords);

}  // namespace boxspline
