// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is nonzero when any criterion fails.

#include "boxspline/evaluate.hpp"
#include "boxspline/fourier_oracle.hpp"
#include "boxspline/ppform.hpp"
#include "boxspline/reconstruct.hpp"
#include "boxspline/render.hpp"
#include "boxspline/spline.hpp"
#include "boxspline/tables.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace boxspline;

namespace {

constexpr double kPartitionTol = 1e-9;
constexpr double kSupportTol = 1e-9;
constexpr double kSymmetryTol = 1e-9;
constexpr double kNegativityTol = 1e-12;
constexpr double kOracleTol = 1e-3;
constexpr double kPPTol = 1e-9;
constexpr double kTransformTol = 1e-6;
constexpr double kReproductionTol = 1e-8;
constexpr double kSlopeTol = 0.35;

constexpr double kSymmetrySeconds = 5.0;
constexpr double kDatasheetSeconds = 30.0;
constexpr double kInvariantSeconds = 120.0;
constexpr double kOrderStudySeconds = 300.0;

const std::vector<std::string> kInvariantSet{"cc2:11", "cc2:21", "hex:20", "cc3:101", "bcc:110", "fcc:100", "bcc:200"};
const std::vector<std::string> kReproductionSet{"cc2:11", "cc2:30", "cc2:21", "cc2:40", "hex:20", "cc3:101", "bcc:110", "fcc:100"};

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Outcome {
  bool pass = true;
  std::string summary;
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o) {
  std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << id << "  " << title << " -- " << o.summary
            << std::endl;
  if (!o.pass) ++failures;
}

void run(int id, const std::string& title, const std::function<Outcome()>& body) {
  try {
    report(id, title, body());
  } catch (const std::exception& e) {
    report(id, title, {false, std::string("exception: ") + e.what()});
  }
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

// pp-forms are costly in 3D; build each once.
std::shared_ptr<const PiecewisePolynomial> ppform_of(const std::string& spec) {
  static std::map<std::string, std::shared_ptr<const PiecewisePolynomial>> cache;
  auto& slot = cache[spec];
  if (!slot) slot = std::make_shared<const PiecewisePolynomial>(to_ppform(parse_spline_spec(spec)));
  return slot;
}

const TableReport& tables() {
  static const TableReport report = regenerate_tables();
  return report;
}

// Mismatch count and cell count of one regenerated table, optionally filtered by row label.
std::pair<std::size_t, std::size_t> table_cells(const std::string& table,
                                                const std::function<bool(const TableCell&)>& keep = nullptr) {
  std::size_t bad = 0, total = 0;
  for (const TableCell& c : tables().cells) {
    if (c.table != table || (keep && !keep(c))) continue;
    ++total;
    bad += !c.match;
  }
  return {bad, total};
}

Eigen::VectorXd uniform_point(std::mt19937_64& rng, const Eigen::VectorXd& half_width) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd x(half_width.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = u(rng) * half_width[i];
  return x;
}

Eigen::VectorXd ambient_half_width(const DirectionMatrix& xi) { return 0.5 * xi.columns.cwiseAbs().rowwise().sum(); }

Outcome criterion1() {
  const std::map<std::string, std::size_t> expected{{"cc2", 8}, {"hex", 12}, {"cc3", 48}, {"fcc", 48}, {"bcc", 48}};
  const Stopwatch clock;
  Outcome o;
  std::ostringstream os;
  for (const auto& [name, order] : expected) {
    const std::size_t got = symmetry_group(builtin_lattice(name)).order();
    os << name << '=' << got << ' ';
    o.pass = o.pass && got == order;
  }
  const double t = clock.seconds();
  o.pass = o.pass && t < kSymmetrySeconds;
  o.summary = os.str() + "in " + fmt(t) + " s (limit " + fmt(kSymmetrySeconds) + " s)";
  return o;
}

Outcome criterion2() {
  const auto sizes = table_cells("direction_sets", [](const TableCell& c) { return c.column == "size"; });
  const auto sets = table_cells("direction_sets", [](const TableCell& c) { return c.column == "vectors"; });
  const bool pass = sizes.first == 0 && sets.first == 0 && sizes.second == 20 && sets.second == 20;
  return {pass, std::to_string(sizes.second - sizes.first) + "/" + std::to_string(sizes.second) + " cardinalities, " +
                    std::to_string(sets.second - sets.first) + "/" + std::to_string(sets.second) +
                    " vector sets equal up to sign and order"};
}

Outcome criterion3() {
  const Stopwatch clock;
  long long rows = 0;
  // recompute from scratch so the timing covers the exact arithmetic
  for (const char* table : {"bivariate", "trivariate"}) {
    for (const TableCell& c : tables().cells)
      if (c.table == table && c.column == "stencil") {
        ++rows;
        const std::string spec = c.row.substr(0, c.row.find(' '));
        (void)BoxSplineDescriptor::describe(parse_spline_spec(spec));
      }
  }
  const double t = clock.seconds();
  const auto bi = table_cells("bivariate"), tri = table_cells("trivariate");
  const bool pass = bi.first == 0 && tri.first == 0 && bi.second > 0 && tri.second > 0 && t < kDatasheetSeconds;
  return {pass, std::to_string(rows) + " splines, " + std::to_string(bi.first + tri.first) + " mismatches in " +
                    std::to_string(bi.second + tri.second) + " (degree, continuity, stencil) cells, recomputed in " +
                    fmt(t) + " s (limit " + fmt(kDatasheetSeconds) + " s)"};
}

Outcome criterion4() {
  const std::vector<std::string> families{"Zn", "An", "An*", "Dn", "Dn*"};
  auto low_d = [](const TableCell& c) {
    return c.row.find(":4 ") != std::string::npos || c.row.find(":5 ") != std::string::npos;
  };
  const auto sets = table_cells("multivariate", [&](const TableCell& c) { return low_d(c) && c.row.find(" k=") != std::string::npos; });
  const auto all = table_cells("multivariate");
  bool every_family = true;
  for (const std::string& f : families)
    for (const char* d : {":4 ", ":5 "})
      every_family = every_family && std::any_of(tables().cells.begin(), tables().cells.end(), [&](const TableCell& c) {
                       return c.table == "multivariate" && c.row.rfind(f + d, 0) == 0;
                     });
  const std::size_t dual4 = direction_set(builtin_lattice("Dn*", 4), 1).size();
  const bool pass = sets.first == 0 && all.first == 0 && every_family && dual4 == 12;
  return {pass, std::to_string(sets.second - sets.first) + "/" + std::to_string(sets.second) +
                    " d=4,5 size/pattern cells match; all " + std::to_string(all.second) +
                    " general-d cells mismatches=" + std::to_string(all.first) + "; Dn* d=4 first set has " +
                    std::to_string(dual4) + " directions"};
}

Outcome criterion5() {
  const Stopwatch clock;
  std::mt19937_64 rng(20261015);
  double worst_partition = 0.0, worst_support = 0.0, worst_symmetry = 0.0, most_negative = 0.0;
  for (const std::string& spec : kInvariantSet) {
    const DirectionMatrix xi = parse_spline_spec(spec);
    const SplineEvaluator m(xi);
    const Zonotope support(xi.coords);
    const SymmetryGroup group = symmetry_group(xi.lattice);
    const Eigen::VectorXd half = 1.25 * ambient_half_width(xi);
    for (int t = 0; t < 100; ++t) {
      const Eigen::VectorXd x = uniform_point(rng, half);
      const double v = m(x);
      most_negative = std::min(most_negative, v);
      if (!support.contains(xi.lattice.to_lattice_coords(x), 1e-9)) worst_support = std::max(worst_support, std::abs(v));
      for (const SymmetryElement& s : group.elements) worst_symmetry = std::max(worst_symmetry, std::abs(m(s.ambient * x) - v));
      double sum = 0.0;
      for (const IntVector& j : stencil_shifts(xi, support, x)) sum += m(x - xi.lattice.to_ambient(j));
      worst_partition = std::max(worst_partition, std::abs(sum - 1.0));
    }
  }
  const double t = clock.seconds();
  const bool pass = worst_partition <= kPartitionTol && worst_support <= kSupportTol && worst_symmetry <= kSymmetryTol &&
                    most_negative >= -kNegativityTol && t < kInvariantSeconds;
  return {pass, "7 splines x 100 points: partition err " + fmt(worst_partition) + ", outside-support max " +
                    fmt(worst_support) + ", symmetry err " + fmt(worst_symmetry) + ", min value " + fmt(most_negative) +
                    ", " + fmt(t) + " s"};
}

Outcome criterion6() {
  std::mt19937_64 rng(6);
  double worst = 0.0;
  std::string worst_spec;
  for (const std::string& spec : kInvariantSet) {
    const DirectionMatrix xi = parse_spline_spec(spec);
    const SplineEvaluator m(xi);
    const SplineOracle oracle(xi, 1e-4);
    const Eigen::VectorXd half = ambient_half_width(xi);
    for (int t = 0; t < 200; ++t) {
      const Eigen::VectorXd x = uniform_point(rng, half);
      const double err = std::abs(oracle(x) - m(x));
      if (err > worst) {
        worst = err;
        worst_spec = spec;
      }
    }
  }
  return {worst <= kOracleTol, "7 splines x 200 points, max |recursive - Fourier| = " + fmt(worst) + " (" + worst_spec +
                                   "), tolerance " + fmt(kOracleTol)};
}

Outcome criterion7() {
  Outcome o;
  std::ostringstream os;
  const std::vector<std::pair<std::string, long long>> denominators{{"cc2:11", 8}, {"cc2:21", 192}, {"hex:20", 24}};
  for (const auto& [spec, bound] : denominators) {
    const auto pp = ppform_of(spec);
    const bool ok = pp->exact() && bound % pp->denominator() == 0;
    os << spec << " denominator " << pp->denominator() << (ok ? " | " : " does not divide ") << bound << "; ";
    o.pass = o.pass && ok;
  }
  std::mt19937_64 rng(7);
  double worst_pp = 0.0;
  int points = 0;
  for (const std::string& spec : kInvariantSet) {
    const DirectionMatrix xi = parse_spline_spec(spec);
    const auto pp = ppform_of(spec);
    const SplineEvaluator m(xi);
    const Zonotope support(xi.coords);
    const Eigen::VectorXd half = ambient_half_width(xi);
    for (int hits = 0; hits < 1000;) {
      const Eigen::VectorXd x = uniform_point(rng, half);
      if (!support.contains(xi.lattice.to_lattice_coords(x), -1e-6)) continue;  // interior points only
      ++hits;
      ++points;
      worst_pp = std::max(worst_pp, std::abs((*pp)(x) - m(x)));
    }
  }
  os << points << " interior points, max |pp - recursive| = " << fmt(worst_pp) << "; ";
  o.pass = o.pass && worst_pp <= kPPTol;

  double worst_map = 0.0;
  const Eigen::MatrixXd zp = parse_spline_spec("cc2:11").columns;
  Eigen::Matrix3d shear;
  shear << 1, 1, 0, 0, 1, 0, 0, 0, 1;
  Eigen::MatrixXd three(2, 3);
  three << 1, 0, 1, 0, 1, 1;
  const DirectionMatrix h10 = parse_spline_spec("hex:10");
  const SplineEvaluator hex(h10);
  const DirectionMatrix c111 = parse_spline_spec("cc3:111");
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd x2 = uniform_point(rng, Eigen::Vector2d(1.2, 1.2));
    const Eigen::VectorXd x3 = uniform_point(rng, Eigen::Vector3d(1.0, 1.0, 1.0));
    for (const auto& [lhs, rhs] : {transform_check(zp, 2.0 * Eigen::Matrix2d::Identity(), x2), transform_check(c111, shear, x3),
                                   transform_check(three, h10.lattice.generator, x2)})
      worst_map = std::max(worst_map, std::abs(lhs - rhs));
    // the hexagonal three-direction spline is the mapped Cartesian one
    worst_map = std::max(worst_map, std::abs(hex(h10.lattice.generator * x2) -
                                             transform_check(three, h10.lattice.generator, x2).first));
  }
  os << "linear-map checks (2I, shear, hexagonal generator) max err " << fmt(worst_map);
  o.pass = o.pass && worst_map <= kTransformTol;
  o.summary = os.str();
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::ostringstream os;
  double worst = 0.0;
  std::string worst_case;
  for (const std::string& spec : kReproductionSet) {
    const DirectionMatrix xi = parse_spline_spec(spec);
    const int r = smoothness_r(xi);
    if (r != 3 && r != 4) throw std::logic_error(spec + " has r outside {3, 4}");
    const QuasiInterpolant qi = derive_quasi_interpolant(xi);
    if (qi.q0 + Rational(2 * static_cast<long long>(qi.neighbors.size())) * qi.q1 != Rational(1)) {
      o.pass = false;
      os << spec << " breaks constant reproduction; ";
    }
    const int d = xi.lattice.ambient;
    const double h = 0.25;
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(d, -0.5), hi = Eigen::VectorXd::Constant(d, 0.5);
    // interior probe grid, shifted off the sample lattice
    std::vector<Eigen::VectorXd> probes;
    const int n = d == 2 ? 9 : 5;
    const int count = static_cast<int>(std::pow(n, d));
    for (int idx = 0; idx < count; ++idx) {
      Eigen::VectorXd x(d);
      int rest = idx;
      for (int i = 0; i < d; ++i) {
        x[i] = -0.45 + 0.9 * ((rest % n) + 0.3819660112501051) / n;
        rest /= n;
      }
      probes.push_back(x);
    }
    for (const auto& exps : graded_lex_monomials(d, r - 1)) {
      const Signal mono = polynomial_signal(d, {exps}, {1.0});
      const SplineField field = reconstruct(xi, mono, h, lo, hi, ppform_of(spec));
      for (const Eigen::VectorXd& x : probes) {
        const double err = std::abs(field(x) - mono(x));
        if (err > worst) {
          worst = err;
          std::ostringstream c;
          c << spec << " x^(";
          for (std::size_t i = 0; i < exps.size(); ++i) c << (i ? "," : "") << exps[i];
          c << ')';
          worst_case = c.str();
        }
      }
    }
  }
  o.pass = o.pass && worst <= kReproductionTol;
  os << "8 splines: q0 + 2#D1 q1 = 1 exactly; monomials of degree <= r-1 reproduced, max err " << fmt(worst) << " ("
     << worst_case << ")";
  const auto rows = qi_table_crosscheck();
  std::cout << "\nQuasi-interpolant reference cross-check (reported, not asserted):\n" << format_qi_crosscheck(rows) << std::endl;
  os << "; cross-check report with " << rows.size() << " rows printed above";
  o.summary = os.str();
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::ostringstream os;
  struct Study {
    const char* spec;
    std::vector<double> hs;
    Eigen::VectorXd center;
  };
  // off-centre Gaussian, wide enough that the leading error term is visible at every h
  const std::vector<Study> studies{{"cc2:11", {0.25, 0.125, 0.0625}, Eigen::Vector2d(2.0, 1.0)},
                                   {"bcc:110", {0.5, 0.25, 0.125}, Eigen::Vector3d(2.0, 1.0, 0.5)}};
  for (const Study& s : studies) {
    const Stopwatch clock;
    const DirectionMatrix xi = parse_spline_spec(s.spec);
    const int r = smoothness_r(xi);
    const OrderStudy study = order_study(gaussian_signal(static_cast<int>(s.center.size()), 2.0, s.center), xi, s.hs);
    const double t = clock.seconds();
    std::cout << "\norder study " << s.spec << " (r = " << r << ")\n" << study.csv();
    const bool ok = std::abs(study.slope_linf - r) <= kSlopeTol && std::abs(study.slope_l2 - r) <= kSlopeTol &&
                    t < kOrderStudySeconds;
    os << s.spec << " slope linf " << fmt(study.slope_linf) << ", l2 " << fmt(study.slope_l2) << " vs r=" << r << " in "
       << fmt(t) << " s; ";
    o.pass = o.pass && ok;
  }
  std::cout << std::endl;
  os << "tolerance +-" << kSlopeTol;
  o.summary = os.str();
  return o;
}

Outcome criterion10() {
  Outcome o;
  std::ostringstream os;
  // ray-cast smoke test: Marschner-Lobb through the body-centred spline
  const DirectionMatrix b110 = parse_spline_spec("bcc:110");
  const double density = 1000.0;
  const double h = std::cbrt(1.0 / (density * b110.lattice.cell_volume));
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, -1.0 - h), hi = Eigen::VectorXd::Constant(3, 1.0 + h);
  const SplineField field = reconstruct(b110, marschner_lobb_signal(), h, lo, hi, ppform_of("bcc:110"));
  const int res = 40;
  const GrayImage first = raycast(field, 0.5, res, 1.0);
  const GrayImage second = raycast(field, 0.5, res, 1.0);
  // the level set spans the whole view, so the structure shows up as shading, not as a silhouette edge
  std::vector<bool> seen(256, false);
  for (std::uint8_t p : first.pixels) seen[p] = true;
  const auto shades = std::count(seen.begin(), seen.end(), true);
  const bool nonempty = first.nonzero() > 0 && shades >= 16;
  const bool stable = first.checksum() == second.checksum();
  std::ostringstream sum;
  sum << std::hex << std::setw(16) << std::setfill('0') << first.checksum();
  os << "ray-cast " << res << "x" << res << " at h=" << fmt(h) << ": " << first.nonzero() << " lit pixels, " << shades << " grey levels, checksum "
     << sum.str() << (stable ? " (stable)" : " (UNSTABLE)") << "; ";
  o.pass = nonempty && stable;

  // equal-density comparison across the three cubic lattices
  std::vector<DirectionMatrix> splines{parse_spline_spec("cc3:101"), parse_spline_spec("fcc:100"), b110};
  const auto rows = equal_density_comparison(gaussian_signal(3, 0.5), splines, 64.0, 0.5, 17);
  std::cout << "\nequal-density comparison (64 samples per unit volume, Gaussian sigma=0.5)\n"
            << "spline,h,samples_per_volume,linf,l2\n";
  bool finite = rows.size() == splines.size();
  for (const auto& row : rows) {
    std::cout << row.spline << ',' << row.h << ',' << row.samples_per_volume << ',' << row.linf << ',' << row.l2 << '\n';
    finite = finite && std::isfinite(row.l2) && std::isfinite(row.linf) && row.l2 > 0.0;
  }
  std::cout << std::endl;
  os << "equal-density table with " << rows.size() << " lattices" << (finite ? "" : " has non-finite errors");
  o.pass = o.pass && finite;
  o.summary = os.str();
  return o;
}

}  // namespace

int main() {
  const Stopwatch total;
  run(1, "symmetry groups of the five lattices", criterion1);
  run(2, "direction sets D^1..D^4", criterion2);
  run(3, "bivariate and trivariate datasheets", criterion3);
  run(4, "general-d direction sets", criterion4);
  run(5, "partition of unity, non-negativity, symmetry, support", criterion5);
  run(6, "recursive evaluator vs Fourier oracle", criterion6);
  run(7, "pp-form integrality, agreement and linear maps", criterion7);
  run(8, "quasi-interpolant reproduction", criterion8);
  run(9, "approximation order", criterion9);
  run(10, "ray-cast smoke test and equal-density errors", criterion10);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << " in "
            << fmt(total.seconds()) << " s" << std::endl;
  return failures == 0 ? 0 : 1;
}
