#include "boxspline/fourier_oracle.hpp"

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace boxspline {

namespace {

using Complex = std::complex<double>;

double sinc(double u) { return std::abs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u; }

// Contracts a d-dimensional tensor (side n, axis 0 fastest) with one
// exponential vector per axis.
double contract(const std::vector<double>& coeffs, std::size_t n, int d, const std::vector<std::vector<Complex>>& exps) {
  std::vector<Complex> cur(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) cur[i] = coeffs[i];
  std::size_t size = coeffs.size();
  for (int axis = 0; axis < d; ++axis) {
    const std::vector<Complex>& e = exps[static_cast<std::size_t>(axis)];
    const std::size_t rest = size / n;
    std::vector<Complex> next(rest);
    for (std::size_t r = 0; r < rest; ++r) {
      Complex acc = 0.0;
      const Complex* row = cur.data() + r * n;
      for (std::size_t k = 0; k < n; ++k) acc += row[k] * e[k];
      next[r] = acc;
    }
    cur.swap(next);
    size = rest;
  }
  return cur[0].real();
}

}  // namespace

FourierOracle::FourierOracle(const Eigen::MatrixXd& directions, int modes)
    : dim_(static_cast<int>(directions.rows())), modes_(modes) {
  if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("FourierOracle: dimension must be 1..3");
  if (modes < 2) throw std::invalid_argument("FourierOracle: need at least 2 harmonics");
  const Eigen::VectorXd half_extent = 0.5 * directions.cwiseAbs().rowwise().sum();
  period_ = 2.0 * half_extent.array() + 1.0;

  const std::size_t n = 2 * static_cast<std::size_t>(modes) + 1;
  std::size_t total = 1;
  for (int i = 0; i < dim_; ++i) total *= n;
  coeffs_.resize(total);
  double volume = period_.prod();
  std::vector<long long> k(static_cast<std::size_t>(dim_), -modes);
  Eigen::VectorXd omega(dim_);
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (int i = 0; i < dim_; ++i) omega[i] = 2.0 * std::numbers::pi * static_cast<double>(k[static_cast<std::size_t>(i)]) / period_[i];
    double value = 1.0;
    for (Eigen::Index j = 0; j < directions.cols(); ++j) value *= sinc(0.5 * omega.dot(directions.col(j)));
    coeffs_[idx] = value / volume;
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (++k[i] <= modes) break;
      k[i] = -modes;
    }
  }
}

FourierOracle::Value FourierOracle::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("FourierOracle: point has wrong dimension");
  const std::size_t n = 2 * static_cast<std::size_t>(modes_) + 1;
  const int half = modes_ / 2;
  const std::size_t nh = 2 * static_cast<std::size_t>(half) + 1;
  std::vector<std::vector<Complex>> exps(static_cast<std::size_t>(dim_)), exps_half(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) {
    const double a = 2.0 * std::numbers::pi * x[i] / period_[i];
    auto& e = exps[static_cast<std::size_t>(i)];
    e.resize(n);
    for (int k = -modes_; k <= modes_; ++k) e[static_cast<std::size_t>(k + modes_)] = std::polar(1.0, a * k);
    exps_half[static_cast<std::size_t>(i)].assign(e.begin() + (modes_ - half), e.begin() + (modes_ + half + 1));
  }
  // the truncated sum at K/2 reuses the central block of coefficients
  std::vector<double> inner;
  inner.reserve(static_cast<std::size_t>(std::pow(static_cast<double>(nh), dim_)));
  std::vector<std::size_t> k(static_cast<std::size_t>(dim_), 0);
  std::size_t total_half = 1;
  for (int i = 0; i < dim_; ++i) total_half *= nh;
  for (std::size_t idx = 0; idx < total_half; ++idx) {
    std::size_t flat = 0, stride = 1;
    for (int i = 0; i < dim_; ++i) {
      flat += (k[static_cast<std::size_t>(i)] + static_cast<std::size_t>(modes_ - half)) * stride;
      stride *= n;
    }
    inner.push_back(coeffs_[flat]);
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (++k[i] < nh) break;
      k[i] = 0;
    }
  }
  const double full = contract(coeffs_, n, dim_, exps);
  const double coarse = contract(inner, nh, dim_, exps_half);
  return {full, std::abs(full - coarse)};
}


SplineOracle::SplineOracle(const DirectionMatrix& xi, double target, int start_modes, int max_modes)
    : scale_(xi.lattice.cell_volume), target_(target) {
  const int d = xi.dim();
  if (xi.lattice.ambient == d) {
    frame_ = Eigen::MatrixXd::Identity(d, d);
  } else {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(xi.lattice.generator);
    frame_ = qr.householderQ() * Eigen::MatrixXd::Identity(xi.lattice.ambient, d);
  }
  dirs_ = frame_.transpose() * xi.columns;
  if (start_modes <= 0) start_modes = d == 1 ? 256 : d == 2 ? 64 : 32;
  if (max_modes <= 0) max_modes = d == 1 ? 8192 : d == 2 ? 1024 : 128;
  for (int k = start_modes; k <= max_modes; k *= 2) modes_.push_back(k);
  if (modes_.empty()) throw std::invalid_argument("SplineOracle: start_modes exceeds max_modes");
  levels_.resize(modes_.size());
  built_ = std::make_unique<std::once_flag[]>(modes_.size());
}

const FourierOracle& SplineOracle::level(std::size_t i) const {
  std::call_once(built_[i], [&] { levels_[i] = std::make_unique<FourierOracle>(dirs_, modes_[i]); });
  return *levels_[i];
}

FourierOracle::Value SplineOracle::detailed(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd y = frame_.transpose() * x;
  FourierOracle::Value v;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    v = level(i)(y);
    if (v.error <= target_) return {v.value * scale_, v.error * scale_};
  }
  std::ostringstream os;
  os << "Fourier oracle: accuracy target " << target_ << " not reached with " << modes_.back()
     << " harmonics (estimate " << v.error << ")";
  throw std::runtime_error(os.str());
}

double SplineOracle::operator()(const Eigen::VectorXd& x) const { return detailed(x).value; }

double eval_oracle(const DirectionMatrix& xi, const Eigen::VectorXd& x, double target) { return SplineOracle(xi, target)(x); }

}  // namespace boxspline
