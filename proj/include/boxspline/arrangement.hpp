#pragma once

#include "boxspline/spline.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace boxspline {

/// Knot planes of a centered box spline, in centered lattice coordinates u.
///
/// Planes come in parallel families, one per primitive normal n spanned by
/// d-1 columns. A family's planes are 2 n.u = o for the integer "twice
/// offsets" o = 2 n.(sum of a column subset) - n.(sum of all columns); the
/// extreme offsets are the two support facets. Cells are identified by the
/// slab each family places them in, and every cell carries a single
/// polynomial piece.
class KnotPlaneArrangement {
 public:
  struct Family {
    IntVector normal;
    Eigen::VectorXd normal_d;
    double norm = 0.0;                // |n|
    std::vector<long long> offsets;   // sorted, distinct, first = -W, last = +W
  };

  /// Slab index per family; a point lies in slab i when o[i-1] < 2 n.u < o[i].
  using RegionKey = std::vector<std::uint16_t>;
  struct RegionKeyHash {
    std::size_t operator()(const RegionKey& k) const;
  };

  struct Region {
    RegionKey key;
    Eigen::VectorXd representative;
  };

  enum class Location { inside, outside, on_plane };

  explicit KnotPlaneArrangement(const IntMatrix& coords);
  /// Rebuilds the families from `coords` and takes a known cell list.
  KnotPlaneArrangement(const IntMatrix& coords, std::vector<Region> regions);

  int dim() const { return dim_; }
  const std::vector<Family>& families() const { return families_; }
  const std::vector<Region>& regions() const { return regions_; }
  std::size_t plane_count() const;

  /// Classifies u; points within `dead_zone` (distance) of a plane report on_plane.
  Location locate(const Eigen::VectorXd& u, RegionKey& key, double dead_zone = 1e-9) const;

  /// Distance from u to the nearest bounding plane of `key`'s cell.
  double clearance(const RegionKey& key, const Eigen::VectorXd& u) const;

  /// Interior points of a cell by hit-and-run from its representative, each
  /// at least `margin` times the starting clearance away from the boundary.
  std::vector<Eigen::VectorXd> sample(const Region& region, std::size_t count, std::mt19937_64& rng,
                                      double margin = 1e-3) const;

 private:
  friend KnotPlaneArrangement build_arrangement(const DirectionMatrix& xi);
  void enumerate_cells();

  int dim_;
  std::vector<Family> families_;
  std::vector<Region> regions_;
};

/// Knot-plane arrangement of a 2D or 3D spline with every cell inside the support enumerated.
KnotPlaneArrangement build_arrangement(const DirectionMatrix& xi);

}  // namespace boxspline
