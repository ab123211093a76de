#include "boxspline/ppform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace boxspline {

namespace {

constexpr const char* kMagic = "boxspline-ppform";
constexpr int kVersion = 1;

std::string hex(double v) {
  std::ostringstream os;
  os << std::hexfloat << v;
  return os.str();
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("ppform: bad number '" + s + "'");
  return v;
}

long long lcm_checked(long long a, long long b) {
  const __int128 l = static_cast<__int128>(a / std::gcd(a, b)) * b;
  if (l > static_cast<__int128>(INT64_MAX)) throw std::overflow_error("ppform: common denominator overflows");
  return static_cast<long long>(l);
}

long double binomial(int n, int k) {
  long double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double horner(const double* t, int d, int n, const Eigen::VectorXd& u, std::size_t block) {
  if (d == 1) {
    double r = 0.0;
    for (int k = n - 1; k >= 0; --k) r = r * u[0] + t[k];
    return r;
  }
  const std::size_t inner = block / static_cast<std::size_t>(n);
  double r = 0.0;
  for (int k = n - 1; k >= 0; --k) r = r * u[d - 1] + horner(t + static_cast<std::size_t>(k) * inner, d - 1, n, u, inner);
  return r;
}

}  // namespace

std::vector<std::vector<int>> graded_lex_monomials(int dim, int degree) {
  std::vector<std::vector<int>> out;
  for (int total = 0; total <= degree; ++total) {
    std::vector<int> e(static_cast<std::size_t>(dim), 0);
    auto fill = [&](auto&& self, int pos, int left) -> void {
      if (pos == dim - 1) {
        e[static_cast<std::size_t>(pos)] = left;
        out.push_back(e);
        return;
      }
      for (int k = left; k >= 0; --k) {
        e[static_cast<std::size_t>(pos)] = k;
        self(self, pos + 1, left - k);
      }
    };
    fill(fill, 0, total);
  }
  return out;
}

PiecewisePolynomial::PiecewisePolynomial(DirectionMatrix xi, KnotPlaneArrangement arrangement, int degree, bool exact,
                                         long long denominator, std::vector<Piece> pieces, double fit_residual)
    : xi_(std::move(xi)),
      arrangement_(std::move(arrangement)),
      degree_(degree),
      exact_(exact),
      denominator_(denominator),
      pieces_(std::move(pieces)),
      fit_residual_(fit_residual) {
  build_tables();
}

void PiecewisePolynomial::build_tables() {
  const int d = xi_.dim();
  const auto monos = graded_lex_monomials(d, degree_);
  const std::size_t n = static_cast<std::size_t>(degree_ + 1);
  std::size_t block = 1;
  for (int i = 0; i < d; ++i) block *= n;
  tensors_.assign(block * pieces_.size(), 0.0);
  index_.clear();
  for (std::size_t p = 0; p < pieces_.size(); ++p) {
    const Piece& piece = pieces_[p];
    if (piece.coefficients.size() != monos.size()) throw std::invalid_argument("ppform: coefficient count mismatch");
    if (!index_.emplace(piece.key, p).second) throw std::invalid_argument("ppform: duplicate region");
    for (std::size_t k = 0; k < monos.size(); ++k) {
      std::size_t flat = 0, stride = 1;
      for (int i = 0; i < d; ++i) {
        flat += static_cast<std::size_t>(monos[k][static_cast<std::size_t>(i)]) * stride;
        stride *= n;
      }
      tensors_[p * block + flat] = piece.coefficients[k];
    }
  }
  fallback_ = std::make_shared<const SplineEvaluator>(xi_);
  continuous_ = smoothness_r(xi_) >= 2;
  nudge_.resize(d);
  for (int i = 0; i < d; ++i) nudge_[i] = i == 0 ? 1.0 : (i == 1 ? 1.0 / std::numbers::pi : 1.0 / std::numbers::e);
  nudge_ *= 1e-8 / nudge_.norm();
}

double PiecewisePolynomial::evaluate_piece(std::size_t piece, const Eigen::VectorXd& u) const {
  const int d = xi_.dim();
  const std::size_t block = tensors_.size() / pieces_.size();
  return horner(tensors_.data() + piece * block, d, degree_ + 1, u, block);
}

long PiecewisePolynomial::find_piece(const Eigen::VectorXd& u) const {
  thread_local KnotPlaneArrangement::RegionKey key;
  if (arrangement_.locate(u, key) != KnotPlaneArrangement::Location::inside) return -1;
  const auto it = index_.find(key);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

double PiecewisePolynomial::at_lattice_coords(const Eigen::VectorXd& u) const {
  thread_local KnotPlaneArrangement::RegionKey key;
  switch (arrangement_.locate(u, key)) {
    case KnotPlaneArrangement::Location::outside:
      return 0.0;
    case KnotPlaneArrangement::Location::on_plane:
      // a continuous spline takes the value of any adjacent piece on the plane
      if (continuous_) {
        // the nudge can run almost parallel to a plane, so grow it until it clears the dead zone
        for (const double step : {1.0, -1.0, 1e2, -1e2}) {
          if (arrangement_.locate(u + step * nudge_, key) != KnotPlaneArrangement::Location::inside) continue;
          const auto it = index_.find(key);
          if (it != index_.end()) return evaluate_piece(it->second, u);
        }
      }
      return fallback_->at_lattice_coords(u);
    case KnotPlaneArrangement::Location::inside:
      break;
  }
  const auto it = index_.find(key);
  if (it == index_.end()) {
    std::ostringstream os;
    os << "ppform: no piece for the cell containing (" << u.transpose() << ")";
    throw std::runtime_error(os.str());
  }
  return evaluate_piece(it->second, u);
}

std::string PiecewisePolynomial::serialize() const {
  std::ostringstream os;
  const int d = xi_.dim();
  os << kMagic << ' ' << kVersion << '\n';
  os << "lattice " << xi_.lattice.spec() << '\n';
  os << "name " << (xi_.name.empty() ? "-" : xi_.name) << '\n';
  os << "columns " << d << ' ' << xi_.m() << '\n';
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < xi_.m(); ++j) os << (j ? " " : "") << xi_.coords(i, j);
    os << '\n';
  }
  os << "degree " << degree_ << '\n';
  os << "exact " << (exact_ ? 1 : 0) << '\n';
  os << "denominator " << denominator_ << '\n';
  os << "residual " << hex(fit_residual_) << '\n';
  os << "families " << arrangement_.families().size() << '\n';
  for (const auto& f : arrangement_.families()) {
    for (int i = 0; i < d; ++i) os << f.normal[i] << ' ';
    os << f.offsets.size();
    for (long long o : f.offsets) os << ' ' << o;
    os << '\n';
  }
  os << "regions " << pieces_.size() << '\n';
  for (std::size_t p = 0; p < pieces_.size(); ++p) {
    const Piece& piece = pieces_[p];
    for (std::size_t i = 0; i < piece.key.size(); ++i) os << (i ? " " : "") << piece.key[i];
    os << " |";
    for (int i = 0; i < d; ++i) os << ' ' << hex(arrangement_.regions()[p].representative[i]);
    os << " |";
    if (exact_) {
      for (long long v : piece.numerators) os << ' ' << v;
    } else {
      for (double v : piece.coefficients) os << ' ' << hex(v);
    }
    os << '\n';
  }
  os << "end\n";
  return os.str();
}

PiecewisePolynomial PiecewisePolynomial::deserialize(const std::string& text) {
  std::istringstream is(text);
  auto expect = [&](const std::string& word) {
    std::string got;
    if (!(is >> got) || got != word) throw std::invalid_argument("ppform: expected '" + word + "', got '" + got + "'");
  };
  expect(kMagic);
  int version = 0;
  is >> version;
  if (version != kVersion) throw std::invalid_argument("ppform: unsupported version " + std::to_string(version));
  std::string lattice_spec, name;
  expect("lattice");
  is >> lattice_spec;
  expect("name");
  is >> name;
  if (name == "-") name.clear();
  int d = 0, m = 0;
  expect("columns");
  is >> d >> m;
  const Lattice lat = parse_lattice_spec(lattice_spec);
  if (d != lat.dim || m <= 0) throw std::invalid_argument("ppform: column block does not match the lattice");
  IntMatrix coords(d, m);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < m; ++j) is >> coords(i, j);
  DirectionMatrix xi = direction_matrix_from_coords(lat, coords, name);
  int degree = 0, exact = 0;
  long long denominator = 1;
  std::string residual;
  expect("degree");
  is >> degree;
  expect("exact");
  is >> exact;
  expect("denominator");
  is >> denominator;
  expect("residual");
  is >> residual;
  if (!is || degree != m - d || denominator <= 0) throw std::invalid_argument("ppform: bad header");

  KnotPlaneArrangement families_only(coords);
  std::size_t nf = 0;
  expect("families");
  is >> nf;
  if (nf != families_only.families().size()) throw std::invalid_argument("ppform: plane families do not match the columns");
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& fam = families_only.families()[f];
    IntVector n(d);
    for (int i = 0; i < d; ++i) is >> n[i];
    std::size_t count = 0;
    is >> count;
    std::vector<long long> offsets(count);
    for (auto& o : offsets) is >> o;
    if (n != fam.normal || offsets != fam.offsets) throw std::invalid_argument("ppform: plane family mismatch");
  }
  std::size_t nr = 0;
  expect("regions");
  is >> nr;
  const std::size_t nc = graded_lex_monomials(d, degree).size();
  std::vector<Piece> pieces(nr);
  std::vector<KnotPlaneArrangement::Region> regions(nr);
  for (std::size_t r = 0; r < nr; ++r) {
    Piece& piece = pieces[r];
    piece.key.resize(nf);
    for (auto& k : piece.key) is >> k;
    expect("|");
    regions[r].key = piece.key;
    regions[r].representative.resize(d);
    for (int i = 0; i < d; ++i) {
      std::string s;
      is >> s;
      regions[r].representative[i] = parse_double(s);
    }
    expect("|");
    if (exact) {
      piece.numerators.resize(nc);
      for (auto& v : piece.numerators) is >> v;
      for (long long v : piece.numerators) piece.coefficients.push_back(static_cast<double>(v) / static_cast<double>(denominator));
    } else {
      for (std::size_t k = 0; k < nc; ++k) {
        std::string s;
        is >> s;
        piece.coefficients.push_back(parse_double(s));
      }
    }
  }
  expect("end");
  if (!is) throw std::invalid_argument("ppform: truncated input");
  return PiecewisePolynomial(std::move(xi), KnotPlaneArrangement(coords, std::move(regions)), degree, exact != 0, denominator,
                             std::move(pieces), parse_double(residual));
}

PiecewisePolynomial to_ppform(const DirectionMatrix& xi, const PPFormOptions& options) {
  const int d = xi.dim();
  const int p = degree(xi);
  if (p > 9) throw std::invalid_argument("to_ppform: degree above 9");
  KnotPlaneArrangement arr = build_arrangement(xi);
  const SplineEvaluator eval(xi);
  const auto monos = graded_lex_monomials(d, p);
  const std::size_t nc = monos.size();
  std::map<std::vector<int>, std::size_t> mono_index;
  for (std::size_t k = 0; k < nc; ++k) mono_index[monos[k]] = k;
  const auto ns = static_cast<std::size_t>(std::ceil(options.samples_per_coefficient * static_cast<double>(nc)));

  std::mt19937_64 rng(options.seed);
  std::vector<std::vector<long double>> global(arr.regions().size());
  std::vector<std::vector<Eigen::VectorXd>> points(arr.regions().size());
  std::vector<std::vector<double>> values(arr.regions().size());
  double worst_residual = 0.0;

  for (std::size_t r = 0; r < arr.regions().size(); ++r) {
    const auto& region = arr.regions()[r];
    points[r] = arr.sample(region, ns, rng);
    Eigen::VectorXd center = Eigen::VectorXd::Zero(d);
    for (const auto& q : points[r]) center += q;
    center /= static_cast<double>(ns);
    double scale = 0.0;
    for (const auto& q : points[r]) scale = std::max(scale, (q - center).cwiseAbs().maxCoeff());
    if (scale <= 0.0) throw std::runtime_error("to_ppform: degenerate cell sample");

    Eigen::MatrixXd a(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(nc));
    Eigen::VectorXd b(static_cast<Eigen::Index>(ns));
    for (std::size_t s = 0; s < ns; ++s) {
      const Eigen::VectorXd z = (points[r][s] - center) / scale;
      for (std::size_t k = 0; k < nc; ++k) {
        double v = 1.0;
        for (int i = 0; i < d; ++i) v *= std::pow(z[i], monos[k][static_cast<std::size_t>(i)]);
        a(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k)) = v;
      }
      b[static_cast<Eigen::Index>(s)] = eval.at_lattice_coords(points[r][s]);
      values[r].push_back(b[static_cast<Eigen::Index>(s)]);
    }
    const Eigen::VectorXd local = a.colPivHouseholderQr().solve(b);
    const double residual = (a * local - b).cwiseAbs().maxCoeff();
    worst_residual = std::max(worst_residual, residual);
    if (residual > options.max_residual) {
      std::ostringstream os;
      os << "to_ppform: fit residual " << residual << " in the cell around (" << region.representative.transpose()
         << ") exceeds " << options.max_residual;
      throw std::runtime_error(os.str());
    }

    // expand sum_a c_a ((u - center)/scale)^a into monomials of u
    std::vector<long double>& g = global[r];
    g.assign(nc, 0.0L);
    for (std::size_t k = 0; k < nc; ++k) {
      const std::vector<int>& alpha = monos[k];
      const long double lead = static_cast<long double>(local[static_cast<Eigen::Index>(k)]) /
                               std::pow(static_cast<long double>(scale), std::accumulate(alpha.begin(), alpha.end(), 0));
      std::vector<int> beta(static_cast<std::size_t>(d), 0);
      auto expand = [&](auto&& self, int axis, long double factor) -> void {
        if (axis == d) {
          g[mono_index.at(beta)] += factor;
          return;
        }
        const int ak = alpha[static_cast<std::size_t>(axis)];
        for (int bk = 0; bk <= ak; ++bk) {
          beta[static_cast<std::size_t>(axis)] = bk;
          self(self, axis + 1,
               factor * binomial(ak, bk) * std::pow(-static_cast<long double>(center[axis]), ak - bk));
        }
      };
      expand(expand, 0, lead);
    }
  }

  // exact form: rationalize every coefficient, then bring all onto one denominator
  bool exact = true;
  std::vector<std::vector<Rational>> rational(global.size());
  long long denominator = 1;
  for (std::size_t r = 0; r < global.size() && exact; ++r) {
    for (long double c : global[r]) {
      Rational q;
      const double v = static_cast<double>(c);
      if (!rationalize(v, options.max_denominator, 1e-8 * std::max(1.0, std::abs(v)), q)) {
        exact = false;
        break;
      }
      rational[r].push_back(q);
      denominator = lcm_checked(denominator, q.den());
      if (denominator > options.max_denominator) {
        exact = false;
        break;
      }
    }
  }
  if (exact) {
    for (std::size_t r = 0; r < global.size() && exact; ++r)
      for (long double c : global[r]) {
        const long double scaled = c * static_cast<long double>(denominator);
        if (std::abs(scaled - std::round(scaled)) > options.integrality_tol) exact = false;
      }
  }

  std::vector<PiecewisePolynomial::Piece> pieces(global.size());
  for (std::size_t r = 0; r < global.size(); ++r) {
    pieces[r].key = arr.regions()[r].key;
    if (exact) {
      for (const Rational& q : rational[r]) {
        const long long num = q.num() * (denominator / q.den());
        pieces[r].numerators.push_back(num);
        pieces[r].coefficients.push_back(static_cast<double>(num) / static_cast<double>(denominator));
      }
    } else {
      for (long double c : global[r]) pieces[r].coefficients.push_back(static_cast<double>(c));
    }
  }
  PiecewisePolynomial pp(xi, std::move(arr), p, exact, exact ? denominator : 1, std::move(pieces), worst_residual);

  // the stored (rounded) polynomials must still reproduce the samples
  for (std::size_t r = 0; r < points.size(); ++r)
    for (std::size_t s = 0; s < points[r].size(); ++s) {
      const double err = std::abs(pp.evaluate_piece(r, points[r][s]) - values[r][s]);
      if (err > 10.0 * options.max_residual + 1e-12) {
        if (!exact) throw std::runtime_error("to_ppform: floating pp-form does not reproduce its samples");
        // rationalization snapped to the wrong fraction: keep the floating fit
        PPFormOptions retry = options;
        retry.max_denominator = 0;
        return to_ppform(xi, retry);
      }
    }
  return pp;
}

double eval_pp(const PiecewisePolynomial& pp, const Eigen::VectorXd& x) { return pp(x); }

}  // namespace boxspline
