#include "boxspline/tables.hpp"

#include "boxspline/spline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace boxspline {

namespace {

using nlohmann::json;

// Sign-canonical, sorted copy of a vector list, for comparison up to sign and order.
std::vector<std::vector<long long>> canonical_set(std::vector<std::vector<long long>> vs) {
  for (auto& v : vs) {
    const auto nz = std::find_if(v.begin(), v.end(), [](long long x) { return x != 0; });
    if (nz != v.end() && *nz < 0)
      for (auto& x : v) x = -x;
  }
  std::sort(vs.begin(), vs.end());
  return vs;
}

std::vector<std::vector<long long>> to_lists(const std::vector<IntVector>& vs) {
  std::vector<std::vector<long long>> out;
  for (const IntVector& v : vs) out.emplace_back(v.data(), v.data() + v.size());
  return out;
}

std::string render(const std::vector<std::vector<long long>>& vs) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < vs.size(); ++i) {
    os << (i ? " (" : "(");
    for (std::size_t j = 0; j < vs[i].size(); ++j) os << (j ? "," : "") << vs[i][j];
    os << ')';
  }
  os << '}';
  return os.str();
}

std::string counts_label(const std::vector<int>& counts) {
  std::string s;
  for (int c : counts) s += std::to_string(c);
  return s;
}

class Collector {
 public:
  explicit Collector(TableReport& report) : report_(report) {}

  void table(const std::string& name) {
    current_ = name;
    report_.tables.push_back(name);
  }

  template <typename T>
  void cell(const std::string& row, const std::string& column, const T& expected, const T& actual) {
    std::ostringstream e, a;
    e << expected;
    a << actual;
    report_.cells.push_back({current_, row, column, e.str(), a.str(), expected == actual});
  }

  void cell_text(const std::string& row, const std::string& column, const std::string& expected, const std::string& actual) {
    report_.cells.push_back({current_, row, column, expected, actual, expected == actual});
  }

  // Records a failure to compute a row instead of aborting the whole report.
  void error(const std::string& row, const std::string& what) {
    report_.cells.push_back({current_, row, "error", "-", what, false});
  }

 private:
  TableReport& report_;
  std::string current_;
};

void check_lattices(const json& expected, Collector& out) {
  out.table("lattices");
  for (const auto& [name, row] : expected.items()) {
    try {
      const Lattice lat = builtin_lattice(name);
      out.cell(name, "dim", row.at("dim").get<int>(), lat.dim);
      const auto g = row.at("generator").get<std::vector<std::vector<double>>>();
      bool same = static_cast<int>(g.size()) == lat.ambient;
      for (std::size_t i = 0; same && i < g.size(); ++i) {
        same = static_cast<int>(g[i].size()) == lat.dim;
        for (std::size_t j = 0; same && j < g[i].size(); ++j)
          same = std::abs(g[i][j] - lat.generator(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) < 1e-15;
      }
      out.cell_text(name, "generator", "as listed", same ? "as listed" : "differs");
      out.cell(name, "symmetry_order", row.at("symmetry_order").get<std::size_t>(), symmetry_group(lat).order());
    } catch (const std::exception& e) {
      out.error(name, e.what());
    }
  }
}

void check_direction_sets(const json& expected, Collector& out) {
  out.table("direction_sets");
  for (const auto& [name, rows] : expected.items()) {
    const Lattice lat = builtin_lattice(name);
    for (const json& row : rows) {
      const int k = row.at("k").get<int>();
      const std::string label = name + " k=" + std::to_string(k);
      try {
        const DirectionSet ds = direction_set(lat, k);
        out.cell(label, "size", row.at("size").get<std::size_t>(), ds.size());
        std::vector<std::vector<long long>> want, got;
        if (row.contains("coords")) {
          want = row.at("coords").get<std::vector<std::vector<long long>>>();
          got = to_lists(ds.coords);
        } else {
          want = row.at("vectors").get<std::vector<std::vector<long long>>>();
          std::vector<IntVector> amb;
          for (const IntVector& c : ds.coords) amb.push_back(lat.scaled_ambient(c));
          got = to_lists(amb);
        }
        out.cell_text(label, "vectors", render(canonical_set(want)), render(canonical_set(got)));
      } catch (const std::exception& e) {
        out.error(label, e.what());
      }
    }
  }
}

void check_datasheets(const std::string& table, const json& rows, Collector& out) {
  out.table(table);
  for (const json& row : rows) {
    const std::string lattice = row.at("lattice").get<std::string>();
    const auto counts = row.at("counts").get<std::vector<int>>();
    const std::string label = lattice + ":" + counts_label(counts) + " [" + row.at("row").get<std::string>() + "]";
    try {
      const DirectionMatrix xi = build_direction_matrix(builtin_lattice(lattice), counts);
      out.cell(label, "degree", row.at("degree").get<int>(), degree(xi));
      out.cell(label, "continuity", row.at("continuity").get<int>(), continuity(xi));
      out.cell(label, "stencil", row.at("stencil").get<long long>(), stencil_size(xi));
    } catch (const std::exception& e) {
      out.error(label, e.what());
    }
  }
}

void check_multivariate(const json& expected, Collector& out) {
  out.table("multivariate");
  for (const json& row : expected.at("direction_sets")) {
    const std::string family = row.at("lattice").get<std::string>();
    const int d = row.at("d").get<int>();
    const int k = row.at("k").get<int>();
    const std::string label = family + ":" + std::to_string(d) + " k=" + std::to_string(k) + " " + row.at("pattern").get<std::string>();
    try {
      const Lattice lat = builtin_lattice(family, d);
      const DirectionSet ds = direction_set(lat, k);
      out.cell(label, "size", row.at("size").get<std::size_t>(), ds.size());
      // the closed-form pattern must coincide with the k-th shell found by enumeration
      const auto all = shells(lat, ds.norm2.to_double() * (1.0 + 1e-9));
      const auto it = std::find_if(all.begin(), all.end(), [&](const Shell& s) { return s.norm2 == ds.norm2; });
      const bool is_kth = it != all.end() && static_cast<int>(it - all.begin()) == k - 1;
      const std::string got = is_kth ? render(canonical_set(to_lists(it->points))) : "not shell " + std::to_string(k);
      std::vector<IntVector> both;
      for (const IntVector& c : ds.coords) {
        both.push_back(c);
        both.push_back(-c);
      }
      out.cell_text(label, "pattern = shell", render(canonical_set(to_lists(both))), got);
    } catch (const std::exception& e) {
      out.error(label, e.what());
    }
  }
  for (const json& row : expected.at("splines")) {
    const std::string family = row.at("lattice").get<std::string>();
    const int d = row.at("d").get<int>();
    const std::string label = family + ":" + std::to_string(d) + " [" + row.at("row").get<std::string>() + "]";
    try {
      const Lattice lat = builtin_lattice(family, d);
      DirectionMatrix xi;
      if (row.contains("vectors_scaled")) {
        const auto vs = row.at("vectors_scaled").get<std::vector<std::vector<long long>>>();
        IntMatrix coords(d, static_cast<Eigen::Index>(vs.size()));
        for (std::size_t j = 0; j < vs.size(); ++j)
          coords.col(static_cast<Eigen::Index>(j)) = lat.coords_from_scaled(Eigen::Map<const IntVector>(vs[j].data(), static_cast<Eigen::Index>(vs[j].size())));
        xi = direction_matrix_from_coords(lat, coords);
      } else {
        xi = build_direction_matrix(lat, row.at("counts").get<std::vector<int>>());
      }
      out.cell(label, "degree", row.at("degree").get<int>(), degree(xi));
      out.cell(label, "continuity", row.at("continuity").get<int>(), continuity(xi));
    } catch (const std::exception& e) {
      out.error(label, e.what());
    }
  }
}

}  // namespace

std::size_t TableReport::mismatches() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const TableCell& c) { return !c.match; }));
}

std::string TableReport::text() const {
  std::ostringstream os;
  for (const TableCell& c : cells)
    if (!c.match)
      os << "MISMATCH " << c.table << " | " << c.row << " | " << c.column << ": expected " << c.expected << ", got " << c.actual << '\n';
  os << tables.size() << " tables, " << mismatches() << " mismatches\n";
  return os.str();
}

std::string default_expected_tables_path() { return std::string(BOXCOMP_DATA_DIR) + "/expected_tables.json"; }

TableReport regenerate_tables(const std::string& expected_path) {
  std::ifstream in(expected_path);
  if (!in) throw std::runtime_error("cannot read expected tables from '" + expected_path + "'");
  json expected;
  try {
    expected = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("cannot parse '" + expected_path + "': " + e.what());
  }
  TableReport report;
  Collector out(report);
  try {
    check_lattices(expected.at("lattices"), out);
    check_direction_sets(expected.at("direction_sets"), out);
    check_datasheets("bivariate", expected.at("bivariate"), out);
    check_datasheets("trivariate", expected.at("trivariate"), out);
    check_multivariate(expected.at("multivariate"), out);
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed expected tables in '" + expected_path + "': " + e.what());
  }
  return report;
}

}  // namespace boxspline
