#include "boxspline/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace boxspline {

namespace {

constexpr double kCoordTol = 1e-9;

Lattice finish(Lattice lat, long long gram_scale, long long coordinate_scale) {
  lat.ambient = static_cast<int>(lat.generator.rows());
  lat.dim = static_cast<int>(lat.generator.cols());
  const Eigen::MatrixXd gtg = lat.generator.transpose() * lat.generator;
  lat.cell_volume = lat.ambient == lat.dim ? std::abs(lat.generator.determinant()) : std::sqrt(gtg.determinant());
  lat.gram_scale = gram_scale;
  lat.coordinate_scale = coordinate_scale;
  const Eigen::MatrixXd scaled = gtg * static_cast<double>(gram_scale);
  lat.gram = scaled.array().round().cast<long long>().matrix();
  if ((scaled - lat.gram.cast<double>()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::logic_error("lattice " + lat.name + ": Gram matrix is not integral at the declared scale");
  lat.left_inverse = gtg.inverse() * lat.generator.transpose();
  return lat;
}

}  // namespace

Eigen::VectorXd Lattice::to_lattice_coords(const Eigen::VectorXd& x) const { return left_inverse * x; }

Rational Lattice::norm2(const IntVector& coords) const {
  const long long q = coords.dot(gram * coords);
  return Rational(q, gram_scale);
}

IntVector Lattice::scaled_ambient(const IntVector& coords) const {
  if (coordinate_scale == 0) throw std::logic_error("lattice " + name + " has irrational ambient coordinates");
  const Eigen::VectorXd v = to_ambient(coords) * static_cast<double>(coordinate_scale);
  IntVector out = v.array().round().cast<long long>().matrix();
  if ((v - out.cast<double>()).cwiseAbs().maxCoeff() > kCoordTol)
    throw std::logic_error("scaled_ambient: non-integral coordinates");
  return out;
}

IntVector Lattice::coords_from_scaled(const IntVector& scaled) const {
  if (coordinate_scale == 0) throw std::logic_error("lattice " + name + " has irrational ambient coordinates");
  const Eigen::VectorXd x = scaled.cast<double>() / static_cast<double>(coordinate_scale);
  IntVector coords = to_lattice_coords(x).array().round().cast<long long>().matrix();
  if (scaled_ambient(coords) != scaled) throw std::invalid_argument("coords_from_scaled: vector is not a lattice point");
  return coords;
}

std::string Lattice::letter() const {
  switch (family) {
    case LatticeFamily::cc2:
    case LatticeFamily::cc3:
      return "c";
    case LatticeFamily::hex:
      return "h";
    case LatticeFamily::fcc:
      return "f";
    case LatticeFamily::bcc:
      return "b";
    default:
      return "[" + spec() + "]";
  }
}

std::string Lattice::spec() const { return is_named_low_dim() ? name : name + ":" + std::to_string(dim); }

Lattice builtin_lattice(std::string_view name, int d) {
  Lattice lat;
  lat.name = std::string(name);
  auto fixed = [&](int want) {
    if (d != 0 && d != want)
      throw std::invalid_argument("lattice " + lat.name + " has fixed dimension " + std::to_string(want));
  };
  if (name == "cc2") {
    fixed(2);
    lat.family = LatticeFamily::cc2;
    lat.generator = Eigen::MatrixXd::Identity(2, 2);
    return finish(lat, 1, 1);
  }
  if (name == "hex") {
    fixed(2);
    lat.family = LatticeFamily::hex;
    const double s = std::sqrt(3.0);
    lat.generator.resize(2, 2);
    lat.generator << 0.5, 0.5, -0.5 * s, 0.5 * s;
    return finish(lat, 2, 0);
  }
  if (name == "cc3") {
    fixed(3);
    lat.family = LatticeFamily::cc3;
    lat.generator = Eigen::MatrixXd::Identity(3, 3);
    return finish(lat, 1, 1);
  }
  if (name == "fcc") {
    fixed(3);
    lat.family = LatticeFamily::fcc;
    lat.generator.resize(3, 3);
    lat.generator << 0, 1, 1, 1, 0, 1, 1, 1, 0;
    return finish(lat, 1, 1);
  }
  if (name == "bcc") {
    fixed(3);
    lat.family = LatticeFamily::bcc;
    lat.generator.resize(3, 3);
    lat.generator << -1, 1, 1, 1, -1, 1, 1, 1, -1;
    return finish(lat, 1, 1);
  }
  if (d < 2) throw std::invalid_argument("lattice " + lat.name + " needs a dimension d >= 2");
  if (name == "Zn") {
    lat.family = LatticeFamily::Zn;
    lat.generator = Eigen::MatrixXd::Identity(d, d);
    return finish(lat, 1, 1);
  }
  if (name == "An") {
    lat.family = LatticeFamily::An;
    lat.generator = Eigen::MatrixXd::Zero(d + 1, d);
    for (int j = 0; j < d; ++j) {
      lat.generator(j, j) = -1.0;
      lat.generator(j + 1, j) = 1.0;
    }
    return finish(lat, 1, 1);
  }
  if (name == "An*") {
    lat.family = LatticeFamily::AnDual;
    lat.generator = Eigen::MatrixXd::Constant(d + 1, d, -1.0);
    for (int j = 0; j < d; ++j) lat.generator(j, j) = d;
    lat.generator /= static_cast<double>(d + 1);
    return finish(lat, d + 1, d + 1);
  }
  if (name == "Dn") {
    lat.family = LatticeFamily::Dn;
    lat.generator = Eigen::MatrixXd::Zero(d, d);
    lat.generator(0, 0) = -1.0;
    lat.generator(1, 0) = -1.0;
    for (int j = 1; j < d; ++j) {
      lat.generator(j - 1, j) = 1.0;
      lat.generator(j, j) = -1.0;
    }
    return finish(lat, 1, 1);
  }
  if (name == "Dn*") {
    lat.family = LatticeFamily::DnDual;
    lat.generator = Eigen::MatrixXd::Identity(d, d);
    lat.generator.col(d - 1).setConstant(0.5);
    return finish(lat, 4, 2);
  }
  throw std::invalid_argument("unknown lattice '" + lat.name + "'");
}

Lattice parse_lattice_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) return builtin_lattice(spec, 0);
  const std::string dim_text(spec.substr(colon + 1));
  std::size_t used = 0;
  int d = 0;
  try {
    d = std::stoi(dim_text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != dim_text.size()) throw std::invalid_argument("bad lattice dimension in '" + std::string(spec) + "'");
  return builtin_lattice(spec.substr(0, colon), d);
}

// ---------------------------------------------------------------------------
// Shell enumeration (Fincke-Pohst on the Cholesky factor of the Gram matrix)

std::vector<Shell> shells(const Lattice& lat, double max_norm2) {
  const int d = lat.dim;
  const Eigen::MatrixXd gram = lat.gram.cast<double>() / static_cast<double>(lat.gram_scale);
  const Eigen::MatrixXd r = gram.llt().matrixU();  // gram = R^T R, R upper triangular
  const double bound = max_norm2 + 1e-9;
  std::map<long long, std::vector<IntVector>> by_norm;

  IntVector coords = IntVector::Zero(d);
  // partial[k] = sum_{i>=k} (R x)_i^2 restricted to fixed coordinates k..d-1
  std::vector<double> partial(static_cast<std::size_t>(d + 1), 0.0);
  std::function<void(int)> descend = [&](int k) {
    if (k < 0) {
      if (coords.isZero()) return;
      const long long q = coords.dot(lat.gram * coords);
      by_norm[q].push_back(coords);
      return;
    }
    // (R x)_k = r_kk x_k + sum_{j>k} r_kj x_j
    double tail = 0.0;
    for (int j = k + 1; j < d; ++j) tail += r(k, j) * static_cast<double>(coords[j]);
    const double remaining = bound - partial[static_cast<std::size_t>(k + 1)];
    if (remaining < 0) return;
    const double radius = std::sqrt(remaining) / r(k, k);
    const double center = -tail / r(k, k);
    const auto lo = static_cast<long long>(std::ceil(center - radius - 1e-12));
    const auto hi = static_cast<long long>(std::floor(center + radius + 1e-12));
    for (long long v = lo; v <= hi; ++v) {
      coords[k] = v;
      const double rk = r(k, k) * static_cast<double>(v) + tail;
      partial[static_cast<std::size_t>(k)] = partial[static_cast<std::size_t>(k + 1)] + rk * rk;
      if (partial[static_cast<std::size_t>(k)] <= bound) descend(k - 1);
    }
    coords[k] = 0;
  };
  descend(d - 1);

  std::vector<Shell> out;
  for (auto& [q, pts] : by_norm) {
    const Rational n2(q, lat.gram_scale);
    if (n2.to_double() > max_norm2 + 1e-12) continue;
    std::sort(pts.begin(), pts.end(), IntVectorLess{});
    out.push_back(Shell{n2, std::move(pts)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Direction sets

namespace {

// Compares ambient positions lexicographically with a tolerance; -1, 0, 1.
int compare_ambient(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] > b[i] + kCoordTol) return 1;
    if (a[i] < b[i] - kCoordTol) return -1;
  }
  return 0;
}

// All distinct coordinate permutations of `base`; with `free_signs` every
// nonzero entry additionally takes both signs; with `pair_signs` v and -v.
std::vector<IntVector> pattern(std::vector<long long> base, bool free_signs, bool pair_signs) {
  std::set<IntVector, IntVectorLess> out;
  std::sort(base.begin(), base.end());
  const int n = static_cast<int>(base.size());
  do {
    IntVector v = Eigen::Map<IntVector>(base.data(), n);
    if (free_signs) {
      std::vector<int> nz;
      for (int i = 0; i < n; ++i)
        if (v[i] != 0) nz.push_back(i);
      for (unsigned mask = 0; mask < (1u << nz.size()); ++mask) {
        IntVector w = v;
        for (std::size_t b = 0; b < nz.size(); ++b)
          if (mask & (1u << b)) w[nz[b]] = -w[nz[b]];
        out.insert(w);
      }
    } else {
      out.insert(v);
      if (pair_signs) out.insert(IntVector(-v));
    }
  } while (std::next_permutation(base.begin(), base.end()));
  return {out.begin(), out.end()};
}

std::vector<long long> repeat(std::initializer_list<std::pair<long long, int>> parts) {
  std::vector<long long> out;
  for (const auto& [value, count] : parts)
    for (int i = 0; i < count; ++i) out.push_back(value);
  return out;
}

void append(std::vector<IntVector>& dst, const std::vector<IntVector>& src) { dst.insert(dst.end(), src.begin(), src.end()); }

// Scaled ambient vectors of the closed-form first/second direction sets of
// the general-d families.
std::vector<IntVector> family_pattern(const Lattice& lat, int k) {
  const int d = lat.dim;
  std::vector<IntVector> out;
  switch (lat.family) {
    case LatticeFamily::Zn:
      if (k == 1) return pattern(repeat({{1, 1}, {0, d - 1}}), true, false);
      return pattern(repeat({{1, 2}, {0, d - 2}}), true, false);
    case LatticeFamily::An:
      if (k == 1) return pattern(repeat({{1, 1}, {-1, 1}, {0, d - 1}}), false, false);
      if (d == 2) return pattern({2, -1, -1}, false, true);
      return pattern(repeat({{1, 2}, {-1, 2}, {0, d - 3}}), false, false);
    case LatticeFamily::AnDual:
      if (k == 1) return pattern(repeat({{d, 1}, {-1, d}}), false, true);
      if (d < 3) throw std::invalid_argument("An*: second direction set pattern needs d >= 3");
      return pattern(repeat({{d - 1, 2}, {-2, d - 1}}), false, true);
    case LatticeFamily::Dn:
      if (k == 1) return pattern(repeat({{1, 2}, {0, d - 2}}), true, false);
      out = pattern(repeat({{2, 1}, {0, d - 1}}), true, false);
      if (d > 3) append(out, pattern(repeat({{1, 4}, {0, d - 4}}), true, false));
      return out;
    case LatticeFamily::DnDual: {
      const auto diagonals = pattern(repeat({{1, d}}), true, false);
      const auto axes = pattern(repeat({{2, 1}, {0, d - 1}}), true, false);
      const auto pairs = pattern(repeat({{2, 2}, {0, d - 2}}), true, false);
      if (d <= 3) return k == 1 ? diagonals : axes;
      if (d == 4) {
        if (k == 2) return pairs;
        out = diagonals;
        append(out, axes);
        return out;
      }
      if (k == 1) return axes;
      if (d < 8) return diagonals;
      if (d > 8) return pairs;
      out = diagonals;
      append(out, pairs);
      return out;
    }
    default:
      throw std::logic_error("family_pattern: not a general-d family");
  }
}

}  // namespace

std::vector<IntVector> canonical_directions(const Lattice& lat, const std::vector<IntVector>& coords) {
  std::vector<std::pair<Eigen::VectorXd, IntVector>> kept;
  for (const IntVector& c : coords) {
    if (c.isZero()) continue;
    const Eigen::VectorXd v = lat.to_ambient(c);
    const Eigen::VectorXd mv = -v;
    IntVector chosen = compare_ambient(v, mv) >= 0 ? c : IntVector(-c);
    const bool seen = std::any_of(kept.begin(), kept.end(), [&](const auto& e) { return e.second == chosen; });
    if (!seen) kept.emplace_back(lat.to_ambient(chosen), chosen);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return compare_ambient(a.first, b.first) > 0; });
  std::vector<IntVector> out;
  out.reserve(kept.size());
  for (auto& e : kept) out.push_back(std::move(e.second));
  return out;
}

DirectionSet direction_set(const Lattice& lat, int k) {
  DirectionSet ds;
  ds.k = k;
  if (lat.is_named_low_dim()) {
    if (k < 1 || k > 4) throw std::out_of_range("direction_set: shell index must be in 1..4 on " + lat.name);
    // grow the radius until k distinct shells are present
    double radius = 1.0;
    std::vector<Shell> sh = shells(lat, radius);
    while (static_cast<int>(sh.size()) < k) {
      radius *= 2.0;
      sh = shells(lat, radius);
    }
    const Shell& shell = sh[static_cast<std::size_t>(k - 1)];
    ds.norm2 = shell.norm2;
    ds.coords = canonical_directions(lat, shell.points);
  } else {
    if (k < 1 || k > 2) throw std::out_of_range("direction_set: shell index must be 1 or 2 on " + lat.spec());
    std::vector<IntVector> coords;
    for (const IntVector& v : family_pattern(lat, k)) coords.push_back(lat.coords_from_scaled(v));
    ds.coords = canonical_directions(lat, coords);
    ds.norm2 = lat.norm2(ds.coords.front());
  }
  ds.vectors.resize(lat.ambient, static_cast<Eigen::Index>(ds.coords.size()));
  for (std::size_t i = 0; i < ds.coords.size(); ++i) ds.vectors.col(static_cast<Eigen::Index>(i)) = lat.to_ambient(ds.coords[i]);
  return ds;
}

// ---------------------------------------------------------------------------
// Symmetry groups

SymmetryGroup symmetry_group(const Lattice& lat) {
  if (!lat.is_named_low_dim()) throw std::invalid_argument("symmetry_group: unsupported lattice family " + lat.spec());
  const int d = lat.dim;
  const IntMatrix& q = lat.gram;

  // Candidate images of generator column j: lattice points of equal norm.
  double max_norm = 0.0;
  for (int j = 0; j < d; ++j) max_norm = std::max(max_norm, static_cast<double>(q(j, j)) / static_cast<double>(lat.gram_scale));
  std::vector<std::vector<IntVector>> candidates(static_cast<std::size_t>(d));
  for (const Shell& s : shells(lat, max_norm)) {
    for (int j = 0; j < d; ++j) {
      if (s.norm2 == Rational(q(j, j), lat.gram_scale)) {
        auto& c = candidates[static_cast<std::size_t>(j)];
        c.insert(c.end(), s.points.begin(), s.points.end());
      }
    }
  }

  // Assemble U column by column, keeping the Gram matrix invariant (U^T Q U = Q).
  std::vector<IntMatrix> found;
  IntMatrix u = IntMatrix::Zero(d, d);
  std::function<void(int)> assemble = [&](int j) {
    if (j == d) {
      found.push_back(u);
      return;
    }
    for (const IntVector& c : candidates[static_cast<std::size_t>(j)]) {
      bool ok = true;
      for (int i = 0; i < j && ok; ++i) ok = (u.col(i).dot(q * c) == q(i, j));
      if (!ok) continue;
      u.col(j) = c;
      assemble(j + 1);
    }
  };
  assemble(0);

  SymmetryGroup group;
  std::unordered_set<IntVector, IntVectorHash, IntVectorEqual> keys;
  auto key = [](const IntMatrix& m) { return IntVector(Eigen::Map<const IntVector>(m.data(), m.size())); };
  const Eigen::MatrixXd ginv = lat.generator.inverse();
  for (const IntMatrix& m : found) {
    if (std::llabs(determinant<long long>(m)) != 1) continue;
    SymmetryElement e{m, lat.generator * m.cast<double>() * ginv};
    const Eigen::MatrixXd err = e.ambient.transpose() * e.ambient - Eigen::MatrixXd::Identity(d, d);
    if (err.cwiseAbs().maxCoeff() > 1e-12) throw std::logic_error("symmetry_group: non-orthogonal element");
    keys.insert(key(m));
    group.elements.push_back(std::move(e));
  }

  // Closure, identity, and central inversion are verified, not assumed.
  const IntMatrix id = IntMatrix::Identity(d, d);
  if (!keys.count(key(id)) || !keys.count(key(IntMatrix(-id))))
    throw std::logic_error("symmetry_group: missing I or -I");
  for (const auto& a : group.elements) {
    for (const auto& b : group.elements) {
      if (!keys.count(key(IntMatrix(a.coords * b.coords)))) throw std::logic_error("symmetry_group: not closed under products");
    }
  }
  return group;
}

}  // namespace boxspline
