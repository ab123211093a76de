#include "boxspline/arrangement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace boxspline {

namespace {

constexpr double kSame = 1e-9;

struct Plane {
  Eigen::VectorXd a;
  double b;
};

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(), [](double p, double q) { return std::abs(p - q) < kSame; }), v.end());
}

std::vector<double> midpoints(const std::vector<double>& v) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) out.push_back(0.5 * (v[i] + v[i + 1]));
  return out;
}

}  // namespace

std::size_t KnotPlaneArrangement::RegionKeyHash::operator()(const RegionKey& k) const {
  std::uint64_t h = 1469598103934665603ull;
  for (std::uint16_t v : k) h = (h ^ v) * 1099511628211ull;
  return static_cast<std::size_t>(h);
}

KnotPlaneArrangement::KnotPlaneArrangement(const IntMatrix& coords) : dim_(static_cast<int>(coords.rows())) {
  IntVector total = coords.rowwise().sum();
  for (const IntVector& n : hyperplane_normals(coords)) {
    Family f;
    f.normal = n;
    f.normal_d = n.cast<double>();
    f.norm = f.normal_d.norm();
    std::set<long long> sums{0};
    for (Eigen::Index j = 0; j < coords.cols(); ++j) {
      const long long a = n.dot(coords.col(j));
      if (a == 0) continue;
      std::set<long long> next = sums;
      for (long long s : sums) next.insert(s + a);
      sums.swap(next);
    }
    const long long shift = n.dot(total);
    for (long long s : sums) f.offsets.push_back(2 * s - shift);
    if (f.offsets.size() > std::numeric_limits<std::uint16_t>::max() - 1)
      throw std::runtime_error("knot-plane arrangement: too many parallel planes");
    families_.push_back(std::move(f));
  }
}

KnotPlaneArrangement::KnotPlaneArrangement(const IntMatrix& coords, std::vector<Region> regions)
    : KnotPlaneArrangement(coords) {
  for (const Region& r : regions)
    if (r.key.size() != families_.size() || r.representative.size() != dim_)
      throw std::invalid_argument("knot-plane arrangement: region does not match the plane families");
  regions_ = std::move(regions);
}

std::size_t KnotPlaneArrangement::plane_count() const {
  std::size_t n = 0;
  for (const Family& f : families_) n += f.offsets.size();
  return n;
}

KnotPlaneArrangement::Location KnotPlaneArrangement::locate(const Eigen::VectorXd& u, RegionKey& key,
                                                           double dead_zone) const {
  key.resize(families_.size());
  bool near = false;
  for (std::size_t i = 0; i < families_.size(); ++i) {
    const Family& f = families_[i];
    const double t = 2.0 * f.normal_d.dot(u);
    const auto it = std::lower_bound(f.offsets.begin(), f.offsets.end(), t,
                                     [](long long o, double v) { return static_cast<double>(o) < v; });
    const auto idx = static_cast<std::size_t>(it - f.offsets.begin());
    if (idx == 0 || idx == f.offsets.size()) {
      // outside this family's outer slab, unless sitting on a facet
      const double gap = idx == 0 ? static_cast<double>(f.offsets.front()) - t : t - static_cast<double>(f.offsets.back());
      if (gap > 2.0 * f.norm * dead_zone) return Location::outside;
      near = true;
    }
    double dist = std::numeric_limits<double>::infinity();
    if (idx < f.offsets.size()) dist = static_cast<double>(f.offsets[idx]) - t;
    if (idx > 0) dist = std::min(dist, t - static_cast<double>(f.offsets[idx - 1]));
    if (dist <= 2.0 * f.norm * dead_zone) near = true;
    key[i] = static_cast<std::uint16_t>(idx);
  }
  return near ? Location::on_plane : Location::inside;
}

double KnotPlaneArrangement::clearance(const RegionKey& key, const Eigen::VectorXd& u) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < families_.size(); ++i) {
    const Family& f = families_[i];
    const double t = 2.0 * f.normal_d.dot(u);
    const double lo = static_cast<double>(f.offsets[key[i] - 1u]);
    const double hi = static_cast<double>(f.offsets[key[i]]);
    best = std::min(best, std::min(t - lo, hi - t) / (2.0 * f.norm));
  }
  return best;
}

std::vector<Eigen::VectorXd> KnotPlaneArrangement::sample(const Region& region, std::size_t count, std::mt19937_64& rng,
                                                          double margin) const {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;
  Eigen::VectorXd p = region.representative;
  const double floor = margin * clearance(region.key, p);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 200 * count + 1000) {
      std::ostringstream os;
      os << "knot-plane arrangement: cannot sample cell around (" << region.representative.transpose() << ")";
      throw std::runtime_error(os.str());
    }
    Eigen::VectorXd w(dim_);
    for (int i = 0; i < dim_; ++i) w[i] = gauss(rng);
    w.normalize();
    double tmin = -std::numeric_limits<double>::infinity(), tmax = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < families_.size(); ++i) {
      const Family& f = families_[i];
      const double slope = 2.0 * f.normal_d.dot(w);
      if (std::abs(slope) < 1e-300) continue;
      const double t0 = 2.0 * f.normal_d.dot(p);
      const double lo = (static_cast<double>(f.offsets[region.key[i] - 1u]) - t0) / slope;
      const double hi = (static_cast<double>(f.offsets[region.key[i]]) - t0) / slope;
      tmin = std::max(tmin, std::min(lo, hi));
      tmax = std::min(tmax, std::max(lo, hi));
    }
    if (!(tmax > tmin)) continue;
    const double t = tmin + (0.05 + 0.9 * unit(rng)) * (tmax - tmin);
    const Eigen::VectorXd q = p + t * w;
    if (clearance(region.key, q) < floor) continue;
    p = q;
    out.push_back(q);
  }
  return out;
}

void KnotPlaneArrangement::enumerate_cells() {
  std::vector<Plane> planes;
  for (const Family& f : families_)
    for (long long o : f.offsets) planes.push_back({f.normal_d, 0.5 * static_cast<double>(o)});

  std::unordered_set<RegionKey, RegionKeyHash> seen;
  RegionKey key;
  Eigen::VectorXd full(dim_);

  // Sweep along the first remaining axis: every cell's extent along it ends
  // at vertices, so slicing between consecutive vertex coordinates meets
  // every cell; recurse on the slice.
  auto sweep = [&](auto&& self, const std::vector<Plane>& ps, int k, int depth) -> void {
    std::vector<double> critical;
    if (k == 1) {
      for (const Plane& p : ps)
        if (std::abs(p.a[0]) > kSame) critical.push_back(p.b / p.a[0]);
    } else {
      Eigen::MatrixXd a(k, k);
      Eigen::VectorXd b(k);
      for_each_subset(static_cast<int>(ps.size()), k, [&](const std::vector<int>& idx) {
        for (int i = 0; i < k; ++i) {
          a.row(i) = ps[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])].a.transpose();
          b[i] = ps[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])].b;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        if (lu.rank() < k) return true;
        const Eigen::VectorXd v = lu.solve(b);
        full.tail(k) = v;
        if (locate(full, key, 1e-7) == Location::outside) return true;
        critical.push_back(v[0]);
        return true;
      });
    }
    sort_unique(critical);
    for (double x : midpoints(critical)) {
      full[depth] = x;
      if (k == 1) {
        if (locate(full, key, 1e-12) == Location::inside && seen.insert(key).second) regions_.push_back({key, full});
        continue;
      }
      std::vector<Plane> sliced;
      for (const Plane& p : ps) {
        Eigen::VectorXd a = p.a.tail(k - 1);
        const double len = a.norm();
        if (len < kSame) continue;
        double b = (p.b - p.a[0] * x) / len;
        a /= len;
        const bool dup = std::any_of(sliced.begin(), sliced.end(), [&](const Plane& q) {
          return (std::abs(q.b - b) < kSame && (q.a - a).norm() < kSame) || (std::abs(q.b + b) < kSame && (q.a + a).norm() < kSame);
        });
        if (!dup) sliced.push_back({std::move(a), b});
      }
      self(self, sliced, k - 1, depth + 1);
    }
  };
  sweep(sweep, planes, dim_, 0);
  std::sort(regions_.begin(), regions_.end(), [](const Region& p, const Region& q) { return p.key < q.key; });
}

KnotPlaneArrangement build_arrangement(const DirectionMatrix& xi) {
  if (xi.dim() < 1 || xi.dim() > 3) throw std::invalid_argument("build_arrangement: dimension must be 1, 2 or 3");
  KnotPlaneArrangement arr(xi.coords);
  arr.enumerate_cells();
  if (arr.regions().empty()) throw std::runtime_error("build_arrangement: no cells found for " + xi.name);
  return arr;
}

}  // namespace boxspline
