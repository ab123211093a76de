#include "boxspline/evaluate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace boxspline {

namespace {

constexpr double kKnotZone = 1e-9;
constexpr double kPerturbStep = 1e-7;
constexpr std::size_t kMaxDistinct = 16;
constexpr int kMaxMultiplicity = 15;
constexpr double kMaxOffsetTable = 1e6;

struct StateKey {
  std::uint64_t remaining;
  std::uint64_t shift;
  bool operator==(const StateKey& o) const { return remaining == o.remaining && shift == o.shift; }
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    return static_cast<std::size_t>(k.remaining * 0x9e3779b97f4a7c15ull ^ (k.shift + 0x632be59bd9b4e019ull + (k.remaining << 7)));
  }
};

inline int nibble(std::uint64_t packed, std::size_t i) { return static_cast<int>((packed >> (4 * i)) & 0xFu); }
inline std::uint64_t bump(std::uint64_t packed, std::size_t i, int delta) {
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(packed) + (static_cast<std::int64_t>(delta) << (4 * i)));
}

}  // namespace

struct BoxSplineEvaluator::Impl {
  int d = 0;
  Eigen::MatrixXd dirs;  // d x u distinct directions
  std::vector<int> mult;
  std::uint64_t full = 0;  // packed multiplicities
  Eigen::VectorXd half_sum;
  Eigen::VectorXd box_lo, box_hi;  // non-centered bounding box per remaining set is recomputed
  std::vector<std::int8_t> spans;  // spans[mask] == 1 iff distinct columns in mask span R^d

  // knot planes in centered coordinates
  Eigen::MatrixXd knot_normals;  // k x d (unit)
  std::vector<std::vector<double>> knot_offsets;
  bool perturb = true;
  Eigen::VectorXd perturb_dir;

  Eigen::VectorXd prepare(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = x;
    if (!perturb) return y;
    for (int attempt = 1; attempt <= 8; ++attempt) {
      bool near = false;
      const Eigen::VectorXd proj = knot_normals * y;
      for (Eigen::Index k = 0; k < proj.size() && !near; ++k) {
        const auto& offs = knot_offsets[static_cast<std::size_t>(k)];
        auto it = std::lower_bound(offs.begin(), offs.end(), proj[k]);
        if (it != offs.end() && std::abs(*it - proj[k]) < kKnotZone) near = true;
        if (it != offs.begin() && std::abs(*std::prev(it) - proj[k]) < kKnotZone) near = true;
      }
      if (!near) return y;
      y = x + static_cast<double>(attempt) * kPerturbStep * perturb_dir;
    }
    return y;
  }
};

namespace {

template <int Dim>
class Recurrence {
 public:
  using Vec = Eigen::Matrix<double, Dim, 1>;
  using Mat = Eigen::Matrix<double, Dim, Dim>;

  Recurrence(const BoxSplineEvaluator::Impl& s, const Eigen::VectorXd& y0) : s_(s), y0_(y0), u_(s.dirs.cols()) {
    dirs_.reserve(u_);
    for (std::size_t i = 0; i < u_; ++i) dirs_.push_back(s.dirs.col(static_cast<Eigen::Index>(i)));
    memo_.reserve(256);
  }

  double eval(std::uint64_t remaining, std::uint64_t shift) {
    const StateKey key{remaining, shift};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const double v = compute(remaining, shift);
    memo_.emplace(key, v);
    return v;
  }

 private:
  double compute(std::uint64_t remaining, std::uint64_t shift) {
    const int d = s_.d;
    Vec y = y0_;
    Vec lo = Vec::Zero(d), hi = Vec::Zero(d);
    int m = 0;
    unsigned mask = 0;
    for (std::size_t i = 0; i < u_; ++i) {
      const int sh = nibble(shift, i);
      if (sh) y -= static_cast<double>(sh) * dirs_[i];
      const int c = nibble(remaining, i);
      if (c) {
        m += c;
        mask |= 1u << i;
        lo += static_cast<double>(c) * dirs_[i].cwiseMin(0.0);
        hi += static_cast<double>(c) * dirs_[i].cwiseMax(0.0);
      }
    }
    for (int k = 0; k < d; ++k)
      if (y[k] < lo[k] - 1e-12 || y[k] > hi[k] + 1e-12) return 0.0;

    if (m == d) {
      Mat b(d, d);
      int col = 0;
      for (std::size_t i = 0; i < u_; ++i)
        if (nibble(remaining, i)) b.col(col++) = dirs_[i];
      const Eigen::PartialPivLU<Mat> lu(b);
      const Vec t = lu.solve(y);
      for (int k = 0; k < d; ++k)
        if (t[k] < 0.0 || t[k] >= 1.0) return 0.0;
      return 1.0 / std::abs(lu.determinant());
    }

    // least-norm coefficients around the center: t = 1/2 + Xi^T (Xi Xi^T)^-1 (y - Xi 1/2)
    Mat a = Mat::Zero(d, d);
    Vec z = y;
    for (std::size_t i = 0; i < u_; ++i) {
      const int c = nibble(remaining, i);
      if (!c) continue;
      a.noalias() += static_cast<double>(c) * dirs_[i] * dirs_[i].transpose();
      z -= 0.5 * static_cast<double>(c) * dirs_[i];
    }
    const Vec lambda = a.ldlt().solve(z);

    double sum = 0.0;
    for (std::size_t i = 0; i < u_; ++i) {
      const int c = nibble(remaining, i);
      if (!c) continue;
      const unsigned sub_mask = c == 1 ? (mask & ~(1u << i)) : mask;
      if (!s_.spans[sub_mask]) continue;
      const double t = 0.5 + dirs_[i].dot(lambda);
      const std::uint64_t next = bump(remaining, i, -1);
      double term = 0.0;
      if (t != 0.0) term += t * eval(next, shift);
      if (t != 1.0) term += (1.0 - t) * eval(next, bump(shift, i, 1));
      sum += static_cast<double>(c) * term;
    }
    return sum / static_cast<double>(m - d);
  }

  const BoxSplineEvaluator::Impl& s_;
  Vec y0_;
  std::size_t u_;
  std::vector<Vec> dirs_;
  std::unordered_map<StateKey, double, StateKeyHash> memo_;
};

template <int Dim>
double run(const BoxSplineEvaluator::Impl& s, const Eigen::VectorXd& y0) {
  Recurrence<Dim> rec(s, y0);
  return rec.eval(s.full, 0);
}

}  // namespace

BoxSplineEvaluator::BoxSplineEvaluator(const Eigen::MatrixXd& directions) {
  auto impl = std::make_shared<Impl>();
  const int d = static_cast<int>(directions.rows());
  impl->d = d;
  if (d < 1) throw std::invalid_argument("BoxSplineEvaluator: empty direction matrix");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(directions);
  if (lu.rank() != d) throw std::invalid_argument("BoxSplineEvaluator: directions do not span");

  // distinct columns with multiplicity (exact comparison)
  std::vector<Eigen::VectorXd> distinct;
  for (Eigen::Index j = 0; j < directions.cols(); ++j) {
    const Eigen::VectorXd c = directions.col(j);
    if (c.isZero(0.0)) throw std::invalid_argument("BoxSplineEvaluator: zero direction");
    auto it = std::find_if(distinct.begin(), distinct.end(), [&](const Eigen::VectorXd& v) { return v == c; });
    if (it == distinct.end()) {
      distinct.push_back(c);
      impl->mult.push_back(1);
    } else {
      ++impl->mult[static_cast<std::size_t>(it - distinct.begin())];
    }
  }
  if (distinct.size() > kMaxDistinct) throw std::invalid_argument("BoxSplineEvaluator: more than 16 distinct directions");
  const std::size_t u = distinct.size();
  impl->dirs.resize(d, static_cast<Eigen::Index>(u));
  impl->half_sum = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < u; ++i) {
    if (impl->mult[i] > kMaxMultiplicity) throw std::invalid_argument("BoxSplineEvaluator: multiplicity above 15");
    impl->dirs.col(static_cast<Eigen::Index>(i)) = distinct[i];
    impl->full |= static_cast<std::uint64_t>(impl->mult[i]) << (4 * i);
    impl->half_sum += 0.5 * impl->mult[i] * distinct[i];
  }

  impl->spans.assign(std::size_t{1} << u, 0);
  for (std::size_t mask = 1; mask < impl->spans.size(); ++mask) {
    if (static_cast<int>(std::popcount(mask)) < d) continue;
    Eigen::MatrixXd sub(d, std::popcount(mask));
    int col = 0;
    for (std::size_t i = 0; i < u; ++i)
      if (mask & (std::size_t{1} << i)) sub.col(col++) = distinct[i];
    Eigen::FullPivLU<Eigen::MatrixXd> sub_lu(sub);
    sub_lu.setThreshold(1e-10);
    impl->spans[mask] = sub_lu.rank() == d ? 1 : 0;
  }

  // knot planes: hyperplanes spanned by d-1 independent directions, at every
  // partial sum of directions
  double table = 1.0;
  for (int c : impl->mult) table *= c + 1;
  impl->perturb = table <= kMaxOffsetTable && d >= 2;
  impl->perturb_dir.resize(d);
  const double seeds[] = {1.0, 1.0 / std::numbers::pi, 1.0 / std::numbers::e, 1.0 / std::numbers::sqrt2,
                          1.0 / std::numbers::sqrt3, std::numbers::ln2, 1.0 / std::numbers::phi, std::numbers::egamma};
  for (int k = 0; k < d; ++k) impl->perturb_dir[k] = seeds[k % 8] + 0.01 * (k / 8);
  impl->perturb_dir.normalize();
  if (impl->perturb) {
    std::vector<Eigen::VectorXd> normals;
    Eigen::MatrixXd span(d, d - 1);
    for_each_subset(static_cast<int>(u), d - 1, [&](const std::vector<int>& idx) {
      for (int i = 0; i < d - 1; ++i) span.col(i) = distinct[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
      Eigen::FullPivLU<Eigen::MatrixXd> slu(span.transpose());
      slu.setThreshold(1e-10);
      if (slu.rank() != d - 1) return true;
      Eigen::VectorXd n = slu.kernel().col(0).normalized();
      for (Eigen::Index i = 0; i < n.size(); ++i) {
        if (std::abs(n[i]) > 1e-12) {
          if (n[i] < 0) n = -n;
          break;
        }
      }
      const bool dup = std::any_of(normals.begin(), normals.end(), [&](const Eigen::VectorXd& o) { return (o - n).norm() < 1e-10; });
      if (!dup) normals.push_back(n);
      return true;
    });
    impl->knot_normals.resize(static_cast<Eigen::Index>(normals.size()), d);
    for (std::size_t k = 0; k < normals.size(); ++k) {
      const Eigen::VectorXd& n = normals[k];
      impl->knot_normals.row(static_cast<Eigen::Index>(k)) = n.transpose();
      std::vector<double> sums{0.0};
      for (std::size_t i = 0; i < u; ++i) {
        const double a = n.dot(distinct[i]);
        std::vector<double> next;
        next.reserve(sums.size() * static_cast<std::size_t>(impl->mult[i] + 1));
        for (double s : sums)
          for (int c = 0; c <= impl->mult[i]; ++c) next.push_back(s + c * a);
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end(), [](double p, double q) { return std::abs(p - q) < 1e-12; }), next.end());
        sums.swap(next);
      }
      const double shift = n.dot(impl->half_sum);
      for (double& s : sums) s -= shift;
      impl->knot_offsets.push_back(std::move(sums));
    }
  }
  impl_ = std::move(impl);
}

int BoxSplineEvaluator::dim() const { return impl_->d; }
bool BoxSplineEvaluator::perturbs() const { return impl_->perturb; }

double BoxSplineEvaluator::operator()(const Eigen::VectorXd& x) const {
  const Impl& s = *impl_;
  if (x.size() != s.d) throw std::invalid_argument("BoxSplineEvaluator: point has wrong dimension");
  const Eigen::VectorXd y0 = s.prepare(x) + s.half_sum;
  switch (s.d) {
    case 2:
      return run<2>(s, y0);
    case 3:
      return run<3>(s, y0);
    default:
      return run<Eigen::Dynamic>(s, y0);
  }
}

SplineEvaluator::SplineEvaluator(const DirectionMatrix& xi) : lattice_(xi.lattice), eval_(xi.coords.cast<double>()) {}

double eval_recursive(const DirectionMatrix& xi, const Eigen::VectorXd& x) { return SplineEvaluator(xi)(x); }

std::pair<double, double> transform_check(const Eigen::MatrixXd& directions, const Eigen::MatrixXd& map,
                                          const Eigen::VectorXd& x) {
  const double det = map.determinant();
  if (std::abs(det) < 1e-12) throw std::invalid_argument("transform_check: map is singular");
  const double lhs = BoxSplineEvaluator(directions)(x);
  const double rhs = std::abs(det) * BoxSplineEvaluator(map * directions)(map * x);
  return {lhs, rhs};
}

std::pair<double, double> transform_check(const DirectionMatrix& xi, const Eigen::MatrixXd& map, const Eigen::VectorXd& x) {
  if (xi.lattice.ambient != xi.lattice.dim) throw std::invalid_argument("transform_check: needs ambient == dim");
  return transform_check(xi.columns, map, x);
}

}  // namespace boxspline
