#pragma once

#include "boxspline/integer_linalg.hpp"
#include "boxspline/lattice.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace boxspline {

/// Direction matrix Xi of a box spline on a lattice. Columns are kept both as
/// integer lattice coordinates (Xi = G N) and as ambient vectors.
struct DirectionMatrix {
  Lattice lattice;
  std::vector<int> counts;  // repetitions per direction set; empty for explicit column lists
  IntMatrix coords;         // dim x m
  Eigen::MatrixXd columns;  // ambient x m
  std::string name;

  int dim() const { return lattice.dim; }
  int m() const { return static_cast<int>(coords.cols()); }
  /// Spline spec string ("cc2:11", "Dn*:4:10"); empty for explicit columns.
  std::string spec() const;
};

/// Each direction set D^k repeated counts[k-1] times, ordered by (k, canonical order).
DirectionMatrix build_direction_matrix(const Lattice& lat, std::span<const int> counts);

/// Direction matrix from explicit lattice-coordinate columns.
DirectionMatrix direction_matrix_from_coords(const Lattice& lat, const IntMatrix& coords, std::string name = {});

/// Parses "<lattice>:<n1><n2>[<n3>]" or "<family>:<d>:<n1><n2>".
DirectionMatrix parse_spline_spec(std::string_view spec);

/// Distinct columns of N with their multiplicities.
struct ColumnMultiset {
  IntMatrix directions;  // dim x u
  std::vector<int> multiplicity;
};
ColumnMultiset distinct_columns(const IntMatrix& coords);

/// Distinct primitive normals (lattice coordinates) of the hyperplanes
/// spanned by d-1 independent columns.
std::vector<IntVector> hyperplane_normals(const IntMatrix& coords);

int degree(const DirectionMatrix& xi);
/// Minimal number of columns whose removal leaves a non-spanning set.
int smoothness_r(const DirectionMatrix& xi);
inline int continuity(const DirectionMatrix& xi) { return smoothness_r(xi) - 2; }

/// Support volume kept exact: `cells` lattice cells of volume `cell_volume`.
struct SupportVolume {
  long long cells = 0;
  double cell_volume = 0.0;
  double value() const { return static_cast<double>(cells) * cell_volume; }
};
SupportVolume support_volume(const DirectionMatrix& xi);

/// Number of lattice shifts covering a generic point (support volume / |det G|).
/// Cross-checks the exact count against the floating ambient determinant sum
/// and throws std::runtime_error on disagreement.
long long stencil_size(const DirectionMatrix& xi);

/// True iff every nonsingular d x d submatrix of N has |det| = 1.
bool is_unimodular(const DirectionMatrix& xi);

/// True iff every lattice symmetry maps the columns onto themselves up to sign.
bool is_symmetric(const DirectionMatrix& xi, const SymmetryGroup& group);
bool is_symmetric(const DirectionMatrix& xi);

/// Support zonotope in centered lattice coordinates, as the intersection of
/// slabs |n . u| <= half_width(n) over all facet normals n.
class Zonotope {
 public:
  explicit Zonotope(const IntMatrix& coords);

  bool contains(const Eigen::VectorXd& u, double tol = 1e-9) const;
  /// Per-coordinate half extent of the bounding box.
  const Eigen::VectorXd& half_extent() const { return half_extent_; }
  const std::vector<IntVector>& normals() const { return normals_; }
  const std::vector<double>& half_widths() const { return half_widths_; }

 private:
  std::vector<IntVector> normals_;
  Eigen::MatrixXd normal_rows_;
  std::vector<double> half_widths_;
  Eigen::VectorXd half_extent_;
};

/// Lattice points j (lattice coordinates) with x - G j in the closed support.
std::vector<IntVector> stencil_shifts(const DirectionMatrix& xi, const Eigen::VectorXd& x);
std::vector<IntVector> stencil_shifts(const DirectionMatrix& xi, const Zonotope& support, const Eigen::VectorXd& x);

/// Datasheet of derived analytic properties.
struct BoxSplineDescriptor {
  DirectionMatrix xi;
  int m = 0;
  int d = 0;
  int degree = 0;
  int r = 0;
  int continuity = 0;
  SupportVolume support;
  long long stencil = 0;
  bool unimodular = false;
  std::optional<bool> symmetric;  // unknown for general-d families

  static BoxSplineDescriptor describe(const DirectionMatrix& xi);
};

}  // namespace boxspline
