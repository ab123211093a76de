#pragma once

#include "boxspline/spline.hpp"

#include <Eigen/Dense>

#include <memory>
#include <utility>

namespace boxspline {

/// Exact evaluation of the centered box spline of a real direction matrix
/// (d x m, rank d), normalized to unit integral, by de Boor's recurrence
///
///   (m - d) B(y) = sum_xi  t_xi B_{Xi\xi}(y) + (1 - t_xi) B_{Xi\xi}(y - xi),   Xi t = y,
///
/// on the non-centered spline B, memoized over (remaining multiset, shift).
/// Directions whose removal drops the rank contribute only on knot planes and
/// are skipped; points within 1e-9 of a knot plane are first moved by a fixed
/// 1e-7 step along (1, 1/pi, 1/e, ...)/|.|.
///
/// Immutable after construction; operator() is safe to call concurrently.
class BoxSplineEvaluator {
 public:
  explicit BoxSplineEvaluator(const Eigen::MatrixXd& directions);

  double operator()(const Eigen::VectorXd& x) const;
  int dim() const;
  /// Whether knot-plane perturbation is active (disabled only for very large
  /// direction sets, where the offset table would not fit).
  bool perturbs() const;

  struct Impl;

 private:
  std::shared_ptr<const Impl> impl_;
};

/// Evaluator for a lattice spline, normalized so the lattice shifts sum to 1.
/// Works in lattice coordinates: M(x) = B_N(G^+ x).
class SplineEvaluator {
 public:
  explicit SplineEvaluator(const DirectionMatrix& xi);

  double operator()(const Eigen::VectorXd& x) const { return at_lattice_coords(lattice_.to_lattice_coords(x)); }
  double at_lattice_coords(const Eigen::VectorXd& u) const { return eval_(u); }
  const Lattice& lattice() const { return lattice_; }

 private:
  Lattice lattice_;
  BoxSplineEvaluator eval_;
};

double eval_recursive(const DirectionMatrix& xi, const Eigen::VectorXd& x);

/// Both sides of M_Xi(x) = |det L| M_{L Xi}(L x) for unit-integral splines.
std::pair<double, double> transform_check(const Eigen::MatrixXd& directions, const Eigen::MatrixXd& map,
                                          const Eigen::VectorXd& x);
std::pair<double, double> transform_check(const DirectionMatrix& xi, const Eigen::MatrixXd& map,
                                          const Eigen::VectorXd& x);

}  // namespace boxspline
