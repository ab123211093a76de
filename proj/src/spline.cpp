#include "boxspline/spline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace boxspline {

std::string DirectionMatrix::spec() const {
  if (counts.empty()) return {};
  std::string s = lattice.spec() + ":";
  for (int c : counts) s += std::to_string(c);
  return s;
}

DirectionMatrix build_direction_matrix(const Lattice& lat, std::span<const int> counts) {
  if (counts.empty()) throw std::invalid_argument("build_direction_matrix: empty repetition vector");
  std::vector<IntVector> cols;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] < 0) throw std::invalid_argument("build_direction_matrix: negative repetition count");
    if (counts[k] == 0) continue;
    const DirectionSet ds = direction_set(lat, static_cast<int>(k) + 1);
    for (int rep = 0; rep < counts[k]; ++rep) cols.insert(cols.end(), ds.coords.begin(), ds.coords.end());
  }
  if (cols.empty()) throw std::invalid_argument("build_direction_matrix: no directions selected");
  IntMatrix coords(lat.dim, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) coords.col(static_cast<Eigen::Index>(i)) = cols[i];

  std::string name = "M" + lat.letter();
  for (int c : counts) name += std::to_string(c);
  DirectionMatrix xi = direction_matrix_from_coords(lat, coords, name);
  xi.counts.assign(counts.begin(), counts.end());
  return xi;
}

DirectionMatrix direction_matrix_from_coords(const Lattice& lat, const IntMatrix& coords, std::string name) {
  if (coords.rows() != lat.dim) throw std::invalid_argument("direction matrix: row count must equal the lattice dimension");
  if (integer_rank(coords) != lat.dim)
    throw std::invalid_argument("direction matrix: columns do not span R^" + std::to_string(lat.dim));
  DirectionMatrix xi;
  xi.lattice = lat;
  xi.coords = coords;
  xi.columns = lat.generator * coords.cast<double>();
  xi.name = std::move(name);
  return xi;
}

DirectionMatrix parse_spline_spec(std::string_view spec) {
  const auto last = spec.rfind(':');
  if (last == std::string_view::npos || last + 1 >= spec.size())
    throw std::invalid_argument("spline spec must look like <lattice>:<counts>, got '" + std::string(spec) + "'");
  const Lattice lat = parse_lattice_spec(spec.substr(0, last));
  std::vector<int> counts;
  for (char c : spec.substr(last + 1)) {
    if (c < '0' || c > '9') throw std::invalid_argument("bad repetition digit in '" + std::string(spec) + "'");
    counts.push_back(c - '0');
  }
  const std::size_t max_sets = lat.is_named_low_dim() ? 4 : 2;
  if (counts.size() > max_sets) throw std::invalid_argument("too many direction sets in '" + std::string(spec) + "'");
  return build_direction_matrix(lat, counts);
}

ColumnMultiset distinct_columns(const IntMatrix& coords) {
  std::vector<IntVector> dirs;
  ColumnMultiset out;
  for (Eigen::Index j = 0; j < coords.cols(); ++j) {
    const IntVector c = coords.col(j);
    auto it = std::find(dirs.begin(), dirs.end(), c);
    if (it == dirs.end()) {
      dirs.push_back(c);
      out.multiplicity.push_back(1);
    } else {
      ++out.multiplicity[static_cast<std::size_t>(it - dirs.begin())];
    }
  }
  out.directions.resize(coords.rows(), static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t i = 0; i < dirs.size(); ++i) out.directions.col(static_cast<Eigen::Index>(i)) = dirs[i];
  return out;
}

std::vector<IntVector> hyperplane_normals(const IntMatrix& coords) {
  const int d = static_cast<int>(coords.rows());
  // parallel columns span the same hyperplanes; keep one primitive representative
  std::vector<IntVector> lines;
  for (Eigen::Index j = 0; j < coords.cols(); ++j) {
    IntVector p = primitive(coords.col(j));
    if (std::find(lines.begin(), lines.end(), p) == lines.end()) lines.push_back(p);
  }
  std::set<IntVector, IntVectorLess> normals;
  if (d == 1) {
    normals.insert(IntVector::Ones(1));
    return {normals.begin(), normals.end()};
  }
  IntMatrix span(d, d - 1);
  for_each_subset(static_cast<int>(lines.size()), d - 1, [&](const std::vector<int>& idx) {
    for (int i = 0; i < d - 1; ++i) span.col(i) = lines[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    IntVector n = hyperplane_normal(span);
    if (!n.isZero()) normals.insert(std::move(n));
    return true;
  });
  return {normals.begin(), normals.end()};
}

int degree(const DirectionMatrix& xi) { return xi.m() - xi.dim(); }

int smoothness_r(const DirectionMatrix& xi) {
  const ColumnMultiset cm = distinct_columns(xi.coords);
  int best = 0;
  for (const IntVector& n : hyperplane_normals(xi.coords)) {
    int inside = 0;
    for (Eigen::Index j = 0; j < cm.directions.cols(); ++j)
      if (n.dot(cm.directions.col(j)) == 0) inside += cm.multiplicity[static_cast<std::size_t>(j)];
    best = std::max(best, inside);
  }
  return xi.m() - best;
}

namespace {

// Sum over d-subsets of distinct columns of |det| times the product of
// multiplicities, i.e. the zonotope volume in lattice cells.
template <typename Visit>
void for_each_basis(const ColumnMultiset& cm, int d, Visit&& visit) {
  IntMatrix sub(d, d);
  for_each_subset(static_cast<int>(cm.directions.cols()), d, [&](const std::vector<int>& idx) {
    long long weight = 1;
    for (int i = 0; i < d; ++i) {
      const auto j = static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]);
      sub.col(i) = cm.directions.col(static_cast<Eigen::Index>(j));
      weight *= cm.multiplicity[j];
    }
    visit(idx, determinant<long long>(sub), weight);
    return true;
  });
}

}  // namespace

SupportVolume support_volume(const DirectionMatrix& xi) {
  const ColumnMultiset cm = distinct_columns(xi.coords);
  long long cells = 0;
  for_each_basis(cm, xi.dim(), [&](const std::vector<int>&, long long det, long long weight) { cells += std::llabs(det) * weight; });
  return SupportVolume{cells, xi.lattice.cell_volume};
}

long long stencil_size(const DirectionMatrix& xi) {
  const SupportVolume vol = support_volume(xi);
  // independent floating route through ambient determinants (a == d only)
  if (xi.lattice.ambient == xi.lattice.dim) {
    const ColumnMultiset cm = distinct_columns(xi.coords);
    const int d = xi.dim();
    double ambient_volume = 0.0;
    Eigen::MatrixXd sub(d, d);
    for_each_basis(cm, d, [&](const std::vector<int>& idx, long long, long long weight) {
      for (int i = 0; i < d; ++i) sub.col(i) = xi.lattice.to_ambient(cm.directions.col(idx[static_cast<std::size_t>(i)]));
      ambient_volume += std::abs(sub.determinant()) * static_cast<double>(weight);
    });
    const double ratio = ambient_volume / xi.lattice.cell_volume;
    if (std::abs(ratio - std::round(ratio)) > 1e-6 * std::max(1.0, ratio) ||
        std::llround(ratio) != vol.cells) {
      std::ostringstream os;
      os << "stencil_size: inconsistent support volume for " << xi.name << " (ambient/detG = " << ratio
         << ", lattice count = " << vol.cells << ")";
      throw std::runtime_error(os.str());
    }
  }
  return vol.cells;
}

bool is_unimodular(const DirectionMatrix& xi) {
  const ColumnMultiset cm = distinct_columns(xi.coords);
  bool ok = true;
  for_each_basis(cm, xi.dim(), [&](const std::vector<int>&, long long det, long long) {
    if (det != 0 && std::llabs(det) != 1) ok = false;
  });
  return ok;
}

bool is_symmetric(const DirectionMatrix& xi, const SymmetryGroup& group) {
  // canonical multiset of columns up to sign
  auto canon = [](const IntMatrix& cols) {
    std::multiset<IntVector, IntVectorLess> s;
    for (Eigen::Index j = 0; j < cols.cols(); ++j) {
      IntVector c = cols.col(j);
      for (Eigen::Index i = 0; i < c.size(); ++i) {
        if (c[i] != 0) {
          if (c[i] < 0) c = -c;
          break;
        }
      }
      s.insert(std::move(c));
    }
    return s;
  };
  const auto base = canon(xi.coords);
  for (const SymmetryElement& e : group.elements) {
    if (canon(e.coords * xi.coords) != base) return false;
  }
  return true;
}

bool is_symmetric(const DirectionMatrix& xi) { return is_symmetric(xi, symmetry_group(xi.lattice)); }

Zonotope::Zonotope(const IntMatrix& coords) {
  const int d = static_cast<int>(coords.rows());
  normals_ = hyperplane_normals(coords);
  normal_rows_.resize(static_cast<Eigen::Index>(normals_.size()), d);
  for (std::size_t i = 0; i < normals_.size(); ++i) {
    const IntVector& n = normals_[i];
    normal_rows_.row(static_cast<Eigen::Index>(i)) = n.cast<double>().transpose();
    long long s = 0;
    for (Eigen::Index j = 0; j < coords.cols(); ++j) s += std::llabs(n.dot(coords.col(j)));
    half_widths_.push_back(0.5 * static_cast<double>(s));
  }
  half_extent_ = 0.5 * coords.cast<double>().cwiseAbs().rowwise().sum();
}

bool Zonotope::contains(const Eigen::VectorXd& u, double tol) const {
  if ((u.cwiseAbs() - half_extent_).maxCoeff() > tol) return false;
  const Eigen::VectorXd proj = normal_rows_ * u;
  for (Eigen::Index i = 0; i < proj.size(); ++i)
    if (std::abs(proj[i]) > half_widths_[static_cast<std::size_t>(i)] + tol) return false;
  return true;
}

std::vector<IntVector> stencil_shifts(const DirectionMatrix& xi, const Eigen::VectorXd& x) {
  return stencil_shifts(xi, Zonotope(xi.coords), x);
}

std::vector<IntVector> stencil_shifts(const DirectionMatrix& xi, const Zonotope& support, const Eigen::VectorXd& x) {
  const Eigen::VectorXd u = xi.lattice.to_lattice_coords(x);
  const int d = xi.dim();
  IntVector lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = static_cast<long long>(std::ceil(u[i] - support.half_extent()[i] - 1e-9));
    hi[i] = static_cast<long long>(std::floor(u[i] + support.half_extent()[i] + 1e-9));
  }
  std::vector<IntVector> out;
  IntVector j = lo;
  while (true) {
    if (support.contains(u - j.cast<double>())) out.push_back(j);
    int k = 0;
    while (k < d && j[k] == hi[k]) {
      j[k] = lo[k];
      ++k;
    }
    if (k == d) break;
    ++j[k];
  }
  return out;
}

BoxSplineDescriptor BoxSplineDescriptor::describe(const DirectionMatrix& xi) {
  BoxSplineDescriptor ds;
  ds.xi = xi;
  ds.m = xi.m();
  ds.d = xi.dim();
  ds.degree = boxspline::degree(xi);
  ds.r = smoothness_r(xi);
  ds.continuity = ds.r - 2;
  ds.support = support_volume(xi);
  ds.stencil = stencil_size(xi);
  ds.unimodular = is_unimodular(xi);
  if (xi.lattice.is_named_low_dim()) ds.symmetric = is_symmetric(xi);
  return ds;
}

}  // namespace boxspline
