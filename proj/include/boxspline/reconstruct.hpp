#pragma once

#include "boxspline/evaluate.hpp"
#include "boxspline/ppform.hpp"
#include "boxspline/rational.hpp"
#include "boxspline/spline.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace boxspline {

/// Two-weight discrete filter c(j) = q0 f(j) + q1 sum_{k in D^1} (f(j+k) + f(j-k)).
struct QuasiInterpolant {
  Rational q0;
  Rational q1;
  std::vector<IntVector> neighbors;  // D^1 in lattice coordinates
  int target_order = 0;              // min(r, 4)
  Rational mu;                       // sum xi xi^T = mu I
  Rational lambda;                   // sum_{D^1} k k^T = lambda I
};

/// Matches the second-order term of the inverse transform 1 / M^: with
/// isotropic second moments mu (directions) and lambda (first shell),
/// q1 = -mu / (24 lambda) and q0 = 1 - 2 #D^1 q1. Throws std::invalid_argument
/// for anisotropic moments or removal number below 3.
QuasiInterpolant derive_quasi_interpolant(const DirectionMatrix& xi);

/// One row of the reference quasi-interpolant table, set against the derived weights.
struct QiCrosscheckRow {
  std::string lattice;
  int order = 0;
  std::vector<std::string> splines;  // spline specs sharing the row
  long long printed_a = 0;           // column headed 24 q0
  long long printed_b = 0;           // column headed -12 q1
  std::optional<Rational> q0, q1;    // derived, when the first listed spline admits a two-weight filter
  std::string note;
  std::vector<std::string> hypotheses;  // scalings (e.g. "12q0,-24q1") under which printed == derived
};

/// Compares every reference row with the derivation under the column scalings
/// (24q0, -12q1), (12q0, -24q1) and (24q0, -24q1). Never alters the derived values.
std::vector<QiCrosscheckRow> qi_table_crosscheck();
std::string format_qi_crosscheck(const std::vector<QiCrosscheckRow>& rows);

/// Dense box [lo, hi] of lattice points carrying one value each.
class LatticeGrid {
 public:
  LatticeGrid() = default;
  LatticeGrid(IntVector lo, IntVector hi, double fill = 0.0);

  int dim() const { return static_cast<int>(lo_.size()); }
  const IntVector& lo() const { return lo_; }
  const IntVector& hi() const { return hi_; }
  std::size_t size() const { return values_.size(); }
  bool contains(const IntVector& j) const;
  double& operator[](const IntVector& j) { return values_[offset(j)]; }
  double operator[](const IntVector& j) const { return values_[offset(j)]; }
  const std::vector<double>& values() const { return values_; }

  /// Calls fn(j) for every point, first coordinate fastest.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    if (values_.empty()) return;
    IntVector j = lo_;
    while (true) {
      fn(static_cast<const IntVector&>(j));
      Eigen::Index k = 0;
      while (k < j.size() && j[k] == hi_[k]) {
        j[k] = lo_[k];
        ++k;
      }
      if (k == j.size()) return;
      ++j[k];
    }
  }

 private:
  std::size_t offset(const IntVector& j) const;

  IntVector lo_, hi_;
  std::vector<std::size_t> stride_;
  std::vector<double> values_;
};

/// Scalar test function on R^d.
struct Signal {
  std::string name;
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> f;
  bool smooth = true;
  double operator()(const Eigen::VectorXd& x) const { return f(x); }
};

Signal gaussian_signal(int dim, double sigma, Eigen::VectorXd center = {});
/// sum_k coeff_k x^{exponents_k}
Signal polynomial_signal(int dim, std::vector<std::vector<int>> exponents, std::vector<double> coeffs);
Signal marschner_lobb_signal(double alpha = 0.25, double f_m = 6.0);
double marschner_lobb(const Eigen::VectorXd& x, double alpha = 0.25, double f_m = 6.0);

/// Values f(h G j) on a lattice box.
LatticeGrid sample_signal(const Lattice& lat, double h, const Signal& f, const IntVector& lo, const IntVector& hi);

/// Filters samples; points whose neighbors fall outside the grid are dropped
/// by shrinking the box.
LatticeGrid apply_qi(const LatticeGrid& samples, const QuasiInterpolant& qi);

/// Reconstruction sum_j c(j) M(x / h - G j) over the stencil shifts of x / h.
class SplineField {
 public:
  /// Uses the pp-form when available (d <= 3, degree <= 9), else the recursion.
  SplineField(DirectionMatrix xi, double h, LatticeGrid coeffs);
  SplineField(DirectionMatrix xi, double h, LatticeGrid coeffs, std::shared_ptr<const PiecewisePolynomial> pp);

  const DirectionMatrix& directions() const { return xi_; }
  double h() const { return h_; }
  const LatticeGrid& coefficients() const { return coeffs_; }

  /// Whether every stencil shift of x carries a coefficient.
  bool valid(const Eigen::VectorXd& x) const;
  /// Throws std::out_of_range outside the valid region.
  double operator()(const Eigen::VectorXd& x) const;

 private:
  DirectionMatrix xi_;
  double h_;
  LatticeGrid coeffs_;
  Zonotope support_;
  std::shared_ptr<const PiecewisePolynomial> pp_;
  std::shared_ptr<const SplineEvaluator> recursive_;
};

double eval_field(const SplineField& field, const Eigen::VectorXd& x);

/// Samples `f` at spacing h around the ambient box [lo, hi], filters with the
/// derived quasi-interpolant and returns a field valid on that box.
SplineField reconstruct(const DirectionMatrix& xi, const Signal& f, double h, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi, std::shared_ptr<const PiecewisePolynomial> pp = nullptr);

struct OrderStudyRow {
  double h = 0.0;
  double linf = 0.0;
  double l2 = 0.0;  // root mean square over the probe grid
};

struct OrderStudy {
  std::vector<OrderStudyRow> rows;
  double slope_linf = 0.0;  // least-squares slope of log2(error) against log2(h)
  double slope_l2 = 0.0;
  bool at_floor = false;    // some error below 1e-12: the signal is reproduced
  std::string csv() const;
};

/// Errors on a 33^d probe grid over [-radius, radius]^d.
OrderStudy order_study(const Signal& f, const DirectionMatrix& xi, const std::vector<double>& hs, double radius = 0.5,
                       int probes_per_axis = 33);

/// Least-squares slope of log2(y) against log2(x).
double log2_slope(const std::vector<double>& x, const std::vector<double>& y);

struct DensityComparisonRow {
  std::string spline;
  double h = 0.0;
  double samples_per_volume = 0.0;
  double linf = 0.0;
  double l2 = 0.0;
};

/// Reconstructs f with each spline at spacing h = (1 / (density detG))^(1/d),
/// so all lattices see the same number of samples per unit volume.
std::vector<DensityComparisonRow> equal_density_comparison(const Signal& f, const std::vector<DirectionMatrix>& splines,
                                                           double samples_per_volume, double radius = 0.5,
                                                           int probes_per_axis = 33);

/// Pairwise (order-independent) sum.
double pairwise_sum(const double* v, std::size_t n);

}  // namespace boxspline
