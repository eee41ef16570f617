#pragma once

// Tabular result files: "#"-prefixed echo lines (one "key: value" each, the
// value being compact JSON), then a tab-separated header and rows.

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "formgraph/error.hpp"
#include "formgraph/features.hpp"

namespace formgraph {

inline constexpr const char* kResultsFormat = "resv1";

struct ResultTable {
  std::vector<std::pair<std::string, nlohmann::json>> echo;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_echo(std::string key, nlohmann::json value) { echo.emplace_back(std::move(key), std::move(value)); }

  void add_row(std::vector<std::string> r) {
    if (r.size() != columns.size())
      throw UsageError("result row has " + std::to_string(r.size()) + " cells, table has " +
                       std::to_string(columns.size()) + " columns");
    rows.push_back(std::move(r));
  }
};

inline std::string fixed(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline void write_table(const ResultTable& t, std::ostream& os) {
  os << "# format: \"" << kResultsFormat << "\"\n";
  os << "# feature_layout: \"" << kFeatureLayoutVersion << "\"\n";
  for (const auto& [k, v] : t.echo) os << "# " << k << ": " << v.dump() << '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "\t" : "") << t.columns[c];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "\t" : "") << r[c];
    os << '\n';
  }
}

inline void write_table(const ResultTable& t, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write results file '" + path + "'");
  write_table(t, os);
  if (!os) throw DataError("write failed for '" + path + "'");
}

}  // namespace formgraph
