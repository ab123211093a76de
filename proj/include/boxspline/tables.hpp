#pragma once

#include <string>
#include <vector>

namespace boxspline {

/// One regenerated table entry next to its expected value.
struct TableCell {
  std::string table;
  std::string row;
  std::string column;
  std::string expected;
  std::string actual;
  bool match = false;
};

struct TableReport {
  std::vector<std::string> tables;  // table names in report order
  std::vector<TableCell> cells;

  std::size_t mismatches() const;
  /// Mismatched cells, one per line, then "<n> tables, <k> mismatches".
  std::string text() const;
};

/// Path of the bundled expected-value file.
std::string default_expected_tables_path();

/// Recomputes lattices (generators, symmetry-group orders), direction sets,
/// bivariate and trivariate datasheets (degree, continuity, stencil) and the
/// general-d direction sets and splines, and compares every cell with the
/// JSON file at `expected_path`. Throws std::runtime_error if the file
/// cannot be read or parsed.
TableReport regenerate_tables(const std::string& expected_path = default_expected_tables_path());

}  // namespace boxspline
