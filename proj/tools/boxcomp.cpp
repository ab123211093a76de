// boxcomp: datasheets, table regeneration, evaluation, pp-forms,
// quasi-interpolants, order studies and images for lattice box splines.

#include "boxspline/evaluate.hpp"
#include "boxspline/fourier_oracle.hpp"
#include "boxspline/ppform.hpp"
#include "boxspline/reconstruct.hpp"
#include "boxspline/render.hpp"
#include "boxspline/spline.hpp"
#include "boxspline/tables.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace {

using namespace boxspline;

enum ExitCode { ok = 0, usage = 1, mismatch = 2, numerical = 3 };

// Thrown for malformed user input; maps to the usage exit code.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

DirectionMatrix spline_from(const std::string& spec) {
  try {
    return parse_spline_spec(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::out_of_range& e) {
    throw UsageError(e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string rational_text(const Rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

void print_lattice(const Lattice& lat, std::ostream& os) {
  os << "lattice        " << lat.spec() << "\n"
     << "dimension      " << lat.dim << " (ambient " << lat.ambient << ")\n"
     << "cell volume    " << lat.cell_volume << "\n"
     << "generator\n";
  const Eigen::IOFormat fmt(Eigen::StreamPrecision, 0, " ", "\n", "  ");
  os << lat.generator.format(fmt) << "\n";
  if (lat.is_named_low_dim()) os << "symmetries     " << symmetry_group(lat).order() << "\n";
  const int shells = lat.is_named_low_dim() ? 4 : 2;
  for (int k = 1; k <= shells; ++k) {
    try {
      const DirectionSet ds = direction_set(lat, k);
      os << "D^" << k << "            " << ds.size() << " directions, |v|^2 = " << ds.norm2 << "\n";
    } catch (const std::invalid_argument& e) {
      os << "D^" << k << "            unavailable: " << e.what() << "\n";
    }
  }
}

void print_datasheet(const DirectionMatrix& xi, bool csv, std::ostream& os) {
  const BoxSplineDescriptor ds = BoxSplineDescriptor::describe(xi);
  const std::string symmetric = ds.symmetric ? (*ds.symmetric ? "yes" : "no") : "unknown";
  std::string q0, q1;
  if (ds.r == 3 || ds.r == 4) {
    try {
      const QuasiInterpolant qi = derive_quasi_interpolant(xi);
      q0 = rational_text(qi.q0);
      q1 = rational_text(qi.q1);
    } catch (const std::invalid_argument&) {
      q0 = q1 = "n/a";  // anisotropic second moments
    }
  }
  if (csv) {
    os << "spline,m,degree,continuity,stencil,support_volume,unimodular,symmetric,q0,q1\n"
       << xi.spec() << ',' << ds.m << ',' << ds.degree << ',' << ds.continuity << ',' << ds.stencil << ','
       << std::setprecision(12) << ds.support.value() << ',' << (ds.unimodular ? "yes" : "no") << ',' << symmetric
       << ',' << q0 << ',' << q1 << '\n';
    return;
  }
  os << "spline         " << xi.spec() << "\n"
     << "lattice        " << xi.lattice.spec() << "\n"
     << "directions     m = " << ds.m << ", d = " << ds.d << "\n"
     << "degree         " << ds.degree << "\n"
     << "continuity     C" << ds.continuity << " (r = " << ds.r << ")\n"
     << "stencil        " << ds.stencil << "\n"
     << "support volume " << std::setprecision(12) << ds.support.value() << " (" << ds.support.cells
     << " lattice cells)\n"
     << "unimodular     " << (ds.unimodular ? "yes" : "no") << "\n"
     << "symmetric      " << symmetric << "\n";
  if (!q0.empty()) os << "quasi-interp.  q0 = " << q0 << ", q1 = " << q1 << "\n";
}

Signal signal_from(const std::string& name, int dim) {
  if (name == "ml") {
    if (dim != 3) throw UsageError("the Marschner-Lobb signal is three-dimensional");
    return marschner_lobb_signal();
  }
  if (name == "gaussian") return gaussian_signal(dim, 0.5);
  throw UsageError("unknown signal '" + name + "' (expected ml or gaussian)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Box splines on lattices: datasheets, tables, evaluation and reconstruction"};
  app.set_help_flag("--help", "Print this help message and exit");  // -h is taken by --h
  app.require_subcommand(1, 1);

  std::string spec, out, plane = "z=0", signal = "ml", expected = default_expected_tables_path();
  std::vector<double> at, hs;
  double h = 0.0, iso = 0.5, density = 0.0;
  int res = 64;
  bool csv = false, oracle = false;

  auto* info = app.add_subcommand("info", "Datasheet of a spline (cc2:11, bcc:110, Dn*:4:10) or a lattice (bcc, Dn*:4)");
  info->add_option("spec", spec, "spline or lattice spec")->required();
  info->add_flag("--csv", csv, "one CSV row instead of aligned text");

  auto* tables = app.add_subcommand("tables", "Regenerate the reference tables and diff them against expected values");
  tables->add_option("--expected", expected, "expected-value JSON file");

  auto* eval = app.add_subcommand("eval", "Evaluate a spline at one point");
  eval->add_option("spec", spec, "spline spec")->required();
  eval->add_option("--at", at, "ambient point, comma separated")->required()->delimiter(',');
  eval->add_flag("--oracle", oracle, "also print the Fourier reference value");

  auto* ppform = app.add_subcommand("ppform", "Export the piecewise-polynomial form (d <= 3)");
  ppform->add_option("spec", spec, "spline spec")->required();
  ppform->add_option("--out", out, "output file (default stdout)");

  auto* qi = app.add_subcommand("qi", "Derived quasi-interpolant of a spline; without a spec, the reference cross-check");
  qi->add_option("spec", spec, "spline spec");

  auto* order = app.add_subcommand("order", "Empirical approximation order for a Gaussian signal (CSV)");
  order->add_option("spec", spec, "spline spec")->required();
  order->add_option("--h", hs, "sampling spacings, comma separated")->delimiter(',');
  order->add_option("--out", out, "CSV file (default stdout)");

  auto* slice = app.add_subcommand("slice", "PGM image of a spline on a 2D domain or an axis-aligned slice of a 3D one");
  slice->add_option("spec", spec, "spline spec")->required();
  slice->add_option("--plane", plane, "slice plane for 3D splines, e.g. z=0");
  slice->add_option("--res", res, "image resolution")->check(CLI::Range(1, 4096));
  slice->add_option("--out", out, "PGM file")->required();

  auto* raycast = app.add_subcommand("raycast", "Ray-cast the level set of a reconstructed 3D signal");
  raycast->add_option("spec", spec, "3D spline spec")->required();
  raycast->add_option("--signal", signal, "ml or gaussian")->check(CLI::IsMember({"ml", "gaussian"}));
  raycast->add_option("--h", h, "sampling spacing (default: from --density)");
  raycast->add_option("--density", density, "samples per unit volume (default 4096)");
  raycast->add_option("--iso", iso, "iso value");
  raycast->add_option("--res", res, "image resolution")->check(CLI::Range(1, 4096));
  raycast->add_option("--out", out, "PGM file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*info) {
      try {
        print_datasheet(parse_spline_spec(spec), csv, std::cout);
      } catch (const std::invalid_argument& spline_error) {
        Lattice lat;
        try {
          lat = parse_lattice_spec(spec);
        } catch (const std::invalid_argument&) {
          throw UsageError(spline_error.what());
        }
        // for fixed-dimension lattices a suffix is always a repetition vector
        if (lat.is_named_low_dim() && spec.find(':') != std::string::npos) throw UsageError(spline_error.what());
        print_lattice(lat, std::cout);
      }
      return ok;
    }
    if (*tables) {
      const TableReport report = regenerate_tables(expected);
      std::cout << report.text();
      return report.mismatches() == 0 ? ok : mismatch;
    }
    if (*eval) {
      const DirectionMatrix xi = spline_from(spec);
      if (static_cast<int>(at.size()) != xi.lattice.ambient)
        throw UsageError("--at needs " + std::to_string(xi.lattice.ambient) + " coordinates");
      const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(at.data(), static_cast<Eigen::Index>(at.size()));
      std::cout << std::setprecision(17) << eval_recursive(xi, x) << "\n";
      if (oracle) {
        const FourierOracle::Value ref = SplineOracle(xi).detailed(x);
        std::cout << std::setprecision(10) << ref.value << " +- " << std::setprecision(2) << ref.error << " (Fourier)\n";
      }
      return ok;
    }
    if (*ppform) {
      const DirectionMatrix xi = spline_from(spec);
      if (xi.dim() > 3) throw UsageError("pp-forms are built for d <= 3");
      const PiecewisePolynomial pp = to_ppform(xi);
      write_text(out, pp.serialize());
      std::cerr << pp.pieces().size() << " pieces, "
                << (pp.exact() ? "denominator " + std::to_string(pp.denominator()) : std::string("floating form")) << "\n";
      return ok;
    }
    if (*qi) {
      if (spec.empty()) {
        std::cout << format_qi_crosscheck(qi_table_crosscheck());
        return ok;
      }
      const DirectionMatrix xi = spline_from(spec);
      const QuasiInterpolant q = derive_quasi_interpolant(xi);
      std::cout << "q0 = " << q.q0 << "\nq1 = " << q.q1 << "\nneighbors = " << q.neighbors.size()
                << "\ntarget order = " << q.target_order << "\nmu = " << q.mu << "\nlambda = " << q.lambda << "\n";
      return ok;
    }
    if (*order) {
      const DirectionMatrix xi = spline_from(spec);
      if (hs.empty()) hs = xi.dim() == 2 ? std::vector<double>{0.25, 0.125, 0.0625} : std::vector<double>{0.5, 0.25, 0.125};
      Eigen::VectorXd center(xi.lattice.ambient);
      for (int i = 0; i < center.size(); ++i) center[i] = i == 0 ? 2.0 : (i == 1 ? 1.0 : 0.5);
      const OrderStudy study = order_study(gaussian_signal(xi.lattice.ambient, 2.0, center), xi, hs);
      write_text(out, study.csv());
      std::cerr << "slope linf " << study.slope_linf << ", l2 " << study.slope_l2 << "\n";
      return ok;
    }
    if (*slice) {
      const DirectionMatrix xi = spline_from(spec);
      if (xi.lattice.ambient != 2 && xi.lattice.ambient != 3) throw UsageError("slice needs a 2D or 3D spline");
      SlicePlane sp;
      try {
        sp = parse_slice_plane(plane);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      bool empty = false;
      const GrayImage img = render_slice(xi, res, sp, &empty);
      if (empty) std::cerr << "warning: plane " << plane << " misses the support; image is blank\n";
      img.write(out);
      std::cout << std::hex << std::setw(16) << std::setfill('0') << img.checksum() << "\n";
      return ok;
    }
    if (*raycast) {
      const DirectionMatrix xi = spline_from(spec);
      if (xi.lattice.ambient != 3) throw UsageError("raycast needs a 3D spline");
      const Signal f = signal_from(signal, 3);
      if (h <= 0.0) {
        const double rho = density > 0.0 ? density : 4096.0;
        h = std::cbrt(1.0 / (rho * xi.lattice.cell_volume));
      }
      const double extent = 1.0;
      const Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, -extent - h), hi = Eigen::VectorXd::Constant(3, extent + h);
      const SplineField field = reconstruct(xi, f, h, lo, hi);
      const GrayImage img = boxspline::raycast(field, iso, res, extent);
      img.write(out);
      std::cerr << "h = " << h << ", " << img.nonzero() << " lit pixels\n";
      std::cout << std::hex << std::setw(16) << std::setfill('0') << img.checksum() << "\n";
      return ok;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return numerical;
  }
  return usage;
}
