#include "boxspline/tables.hpp"

#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace boxspline;

TEST(Tables, RegeneratesWithoutMismatches) {
  const TableReport report = regenerate_tables();
  EXPECT_EQ(report.tables.size(), 5u);
  EXPECT_EQ(report.mismatches(), 0u) << report.text();
  EXPECT_NE(report.text().find("5 tables, 0 mismatches"), std::string::npos);
}

TEST(Tables, CorruptedExpectationsAreListed) {
  std::ifstream in(default_expected_tables_path());
  nlohmann::json j = nlohmann::json::parse(in);
  j["lattices"]["hex"]["symmetry_order"] = 11;
  j["bivariate"][0]["degree"] = 9;
  const auto path = std::filesystem::temp_directory_path() / "boxspline_corrupt_tables.json";
  std::ofstream(path) << j.dump();
  const TableReport report = regenerate_tables(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(report.mismatches(), 2u);
  EXPECT_NE(report.text().find("hex | symmetry_order"), std::string::npos);
}

TEST(Tables, MissingFileThrows) {
  EXPECT_THROW(regenerate_tables("/nonexistent/tables.json"), std::runtime_error);
}
