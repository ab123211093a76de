#pragma once

#include "boxspline/spline.hpp"

#include <Eigen/Dense>

#include <memory>
#include <mutex>
#include <vector>

namespace boxspline {

/// Definitional evaluator built from the closed-form Fourier transform
///
///   M^(w) = prod_xi sinc(<w, xi> / 2),   sinc(u) = sin(u) / u,
///
/// inverted as the Fourier series of the spline periodized over a box
/// slightly larger than its support. Shares no code with the recurrence, so
/// it serves as the independent reference for it. Intended for d <= 3.
///
/// Values are returned with the unit-integral normalization; multiply by the
/// cell volume for the lattice normalization.
class FourierOracle {
 public:
  struct Value {
    double value = 0.0;
    double error = 0.0;  // |S_K - S_{K/2}|, a conservative truncation estimate
  };

  /// `directions` is d x m in an orthonormal frame; `modes` is K, the number
  /// of harmonics kept per axis on each side.
  FourierOracle(const Eigen::MatrixXd& directions, int modes);

  Value operator()(const Eigen::VectorXd& x) const;
  int modes() const { return modes_; }

 private:
  int dim_;
  int modes_;
  Eigen::VectorXd period_;
  std::vector<double> coeffs_;  // (2K+1)^d, axis 0 fastest
};

/// Reference value of the lattice spline M at ambient point x, normalized
/// like SplineEvaluator. Harmonics are doubled from `start_modes` until the
/// error estimate drops below `target`; throws std::runtime_error if that
/// needs more than `max_modes`. A-family lattices are handled in an
/// orthonormal frame of their hyperplane.
class SplineOracle {
 public:
  explicit SplineOracle(const DirectionMatrix& xi, double target = 1e-4, int start_modes = 0, int max_modes = 0);

  double operator()(const Eigen::VectorXd& x) const;
  FourierOracle::Value detailed(const Eigen::VectorXd& x) const;

 private:
  const FourierOracle& level(std::size_t i) const;

  Eigen::MatrixXd frame_;  // ambient x d orthonormal basis of the lattice span
  Eigen::MatrixXd dirs_;
  double scale_;
  double target_;
  std::vector<int> modes_;
  // finer levels are built on first use
  mutable std::vector<std::unique_ptr<FourierOracle>> levels_;
  mutable std::unique_ptr<std::once_flag[]> built_;
};

double eval_oracle(const DirectionMatrix& xi, const Eigen::VectorXd& x, double target = 1e-4);

}  // namespace boxspline
