#pragma once

#include "boxspline/arrangement.hpp"
#include "boxspline/evaluate.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace boxspline {

/// Exponent vectors of all monomials of total degree <= degree in `dim`
/// variables, in graded-lex order (by total degree, then lexicographically
/// descending: x^2, xy, y^2).
std::vector<std::vector<int>> graded_lex_monomials(int dim, int degree);

/// Piecewise-polynomial form of a lattice spline: per arrangement cell, the
/// polynomial in centered lattice coordinates, with integer numerators over
/// one common denominator when the pieces are rational.
class PiecewisePolynomial {
 public:
  struct Piece {
    KnotPlaneArrangement::RegionKey key;
    std::vector<long long> numerators;  // graded-lex; empty for a floating form
    std::vector<double> coefficients;   // graded-lex, numerators / denominator when exact
  };

  PiecewisePolynomial(DirectionMatrix xi, KnotPlaneArrangement arrangement, int degree, bool exact, long long denominator,
                      std::vector<Piece> pieces, double fit_residual);

  const DirectionMatrix& directions() const { return xi_; }
  const KnotPlaneArrangement& arrangement() const { return arrangement_; }
  int degree() const { return degree_; }
  bool exact() const { return exact_; }
  long long denominator() const { return denominator_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  double fit_residual() const { return fit_residual_; }

  /// Spline value at an ambient point; 0 outside the support. Within 1e-9 of
  /// a knot plane a continuous spline uses an adjacent piece; otherwise the
  /// recursive evaluator takes over.
  double operator()(const Eigen::VectorXd& x) const { return at_lattice_coords(xi_.lattice.to_lattice_coords(x)); }
  /// Same, at centered lattice coordinates u.
  double at_lattice_coords(const Eigen::VectorXd& u) const;
  /// Polynomial of one piece at u (no region lookup).
  double evaluate_piece(std::size_t piece, const Eigen::VectorXd& u) const;
  /// Piece index containing u, or -1 outside the support / on a knot plane.
  long find_piece(const Eigen::VectorXd& u) const;

  /// Versioned plain-text form; integers stay integers and floating values
  /// are written as hexfloats, so the round trip is bit-exact.
  std::string serialize() const;
  static PiecewisePolynomial deserialize(const std::string& text);

 private:
  void build_tables();

  DirectionMatrix xi_;
  KnotPlaneArrangement arrangement_;
  int degree_;
  bool exact_;
  long long denominator_;
  std::vector<Piece> pieces_;
  double fit_residual_;

  std::unordered_map<KnotPlaneArrangement::RegionKey, std::size_t, KnotPlaneArrangement::RegionKeyHash> index_;
  std::vector<double> tensors_;  // per piece, (degree+1)^d dense coefficients for nested Horner
  std::shared_ptr<const SplineEvaluator> fallback_;
  bool continuous_ = false;
  Eigen::VectorXd nudge_;  // steps a point off a knot plane to pick an adjacent piece
};

struct PPFormOptions {
  double samples_per_coefficient = 3.0;
  double max_residual = 1e-9;
  long long max_denominator = 1000000;
  double integrality_tol = 1e-6;
  std::uint64_t seed = 0x5eed;
};

/// Samples each cell with the recursive evaluator, fits its polynomial by
/// least squares and rationalizes the coefficients. Throws if the fit
/// residual exceeds `max_residual`; falls back to a floating form (exact()
/// false) if rationalization fails. Degree must be <= 9.
PiecewisePolynomial to_ppform(const DirectionMatrix& xi, const PPFormOptions& options = {});

double eval_pp(const PiecewisePolynomial& pp, const Eigen::VectorXd& x);

}  // namespace boxspline
