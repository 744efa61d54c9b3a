// CSV and JSON writers for sweep rows and diff reports.
//
// CSV: one header row, one row per point in sweep order, floats in shortest
// round-trip form. JSON: {"metadata": {...}, "rows": [{column: value}]}.
#pragma once

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "clonesim/errors.hpp"
#include "clonesim/experiments.hpp"
#include "clonesim/format.hpp"

namespace clonesim {

// A column-major view of any row type: header plus per-row cells.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> cells;  // already formatted
  std::vector<std::vector<bool>> numeric;       // cell is a number (unquoted in JSON)
};

inline Table sweep_table(const std::vector<SweepRow>& rows) {
  Table t;
  t.columns = {"mu", "nu", "eta", "zeta", "gamma2", "theta", "detector", "f1", "f2", "f_avg", "p_success",
               "c00", "c01", "c10", "c11", "kappa_feasible", "defined"};
  for (const auto& r : rows) {
    const auto& p = r.report;
    std::vector<std::string> c = {format_double(r.mu),
                                  format_double(r.nu),
                                  format_double(r.eta),
                                  format_double(r.zeta),
                                  format_double(r.gamma2),
                                  r.theta ? format_double(*r.theta) : "",
                                  to_string(r.kind),
                                  format_double(p.f1),
                                  format_double(p.f2),
                                  format_double(p.f_avg),
                                  format_double(p.p_success),
                                  format_double(p.coincidences.c00),
                                  format_double(p.coincidences.c01),
                                  format_double(p.coincidences.c10),
                                  format_double(p.coincidences.c11),
                                  p.kappa_feasible ? "1" : "0",
                                  p.defined ? "1" : "0"};
    std::vector<bool> num(c.size(), true);
    num[5] = r.theta.has_value();
    num[6] = false;
    t.cells.push_back(std::move(c));
    t.numeric.push_back(std::move(num));
  }
  return t;
}

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.cells) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

inline std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::ordered_json table_json(const Table& t, const nlohmann::ordered_json& metadata) {
  nlohmann::ordered_json j;
  j["metadata"] = metadata;
  j["rows"] = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < t.cells.size(); ++r) {
    nlohmann::ordered_json row;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      const auto& cell = t.cells[r][i];
      if (!t.numeric[r][i])
        row[t.columns[i]] = cell.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(cell);
      else
        row[t.columns[i]] = std::stod(cell);
    }
    j["rows"].push_back(row);
  }
  return j;
}

inline void write_json(std::ostream& os, const Table& t, const nlohmann::ordered_json& metadata) {
  os << table_json(t, metadata).dump(2) << '\n';
}

// Writes <dir>/<stem>.csv or .json and returns the path.
inline std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem, const Table& t,
                                         bool as_json, const nlohmann::ordered_json& metadata) {
  std::filesystem::create_directories(dir);
  auto path = dir / (stem + (as_json ? ".json" : ".csv"));
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  if (as_json)
    write_json(out, t, metadata);
  else
    write_csv(out, t);
  return path;
}

}  // namespace clonesim
