// Recomputing the detector tables and the (mu, nu) surfaces and diffing
// them against the stored reference values.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "clonesim/experiments.hpp"
#include "clonesim/format.hpp"
#include "clonesim/golden.hpp"
#include "clonesim/output.hpp"

namespace clonesim {

struct CellDiff {
  std::string table;
  DetectorKind kind = DetectorKind::single_photon_counter;
  double x = 0;
  std::string quantity;  // p_success, f1 or f2
  double reference = 0, value = 0, tolerance = 0;

  double diff() const { return value - reference; }
  bool pass() const { return std::abs(diff()) <= tolerance; }
};

struct TableOptions {
  double gamma2 = 0.01;
  double table1_zeta = kTable1Zeta;
  int quadrature_points = kDefaultQuadraturePoints;
  DetectionScheme scheme;
  int jobs = 1;
};

inline std::vector<SweepRow> compute_table(const GoldenTable& g, const TableOptions& o) {
  std::vector<double> xs;
  for (const auto& r : g.rows) xs.push_back(r.x);
  if (g.variable == "eta")
    return table_detector_efficiency(xs, o.gamma2, o.table1_zeta, o.quadrature_points, o.scheme, o.jobs);
  return table_dark_counts(xs, o.gamma2, o.quadrature_points, o.scheme, o.jobs);
}

inline std::vector<CellDiff> compare_table(const GoldenTable& g, const std::vector<SweepRow>& rows) {
  std::vector<CellDiff> out;
  for (const auto& ref : g.rows) {
    for (DetectorKind k : {DetectorKind::single_photon_counter, DetectorKind::on_off}) {
      auto it = std::find_if(rows.begin(), rows.end(), [&](const SweepRow& r) {
        double x = g.variable == "eta" ? r.eta : r.zeta;
        return r.kind == k && x == ref.x;
      });
      if (it == rows.end()) throw Error("missing computed row for " + g.name);
      const GoldenCell& cell = k == DetectorKind::on_off ? ref.on_off : ref.counter;
      const auto& rep = it->report;
      out.push_back({g.name, k, ref.x, "p_success", cell.p_success, rep.p_success, g.tolerance.p_success});
      out.push_back({g.name, k, ref.x, "f1", cell.f1, rep.f1, g.tolerance.fidelity});
      out.push_back({g.name, k, ref.x, "f2", cell.f2, rep.f2, g.tolerance.fidelity});
    }
  }
  return out;
}

inline Table diff_table(const std::vector<CellDiff>& diffs) {
  Table t;
  t.columns = {"table", "detector", "x", "quantity", "reference", "value", "diff", "tolerance", "pass"};
  for (const auto& d : diffs) {
    t.cells.push_back({d.table, to_string(d.kind), format_double(d.x), d.quantity, format_double(d.reference),
                       format_double(d.value), format_double(d.diff()), format_double(d.tolerance),
                       d.pass() ? "1" : "0"});
    t.numeric.push_back({false, false, true, false, true, true, true, true, true});
  }
  return t;
}

// For the dark-count table: rows with zeta >= 1e-3 must show ON/OFF average
// fidelity above the counter one.
struct CrossoverCheck {
  double zeta = 0;
  double counter_f = 0, on_off_f = 0;
  bool pass() const { return on_off_f > counter_f; }
};

inline std::vector<CrossoverCheck> crossover_checks(const std::vector<SweepRow>& rows, double from_zeta = 1e-3) {
  std::vector<CrossoverCheck> out;
  for (const auto& r : rows) {
    if (r.kind != DetectorKind::single_photon_counter || r.zeta < from_zeta) continue;
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const SweepRow& o) { return o.kind == DetectorKind::on_off && o.zeta == r.zeta; });
    if (it != rows.end()) out.push_back({r.zeta, r.report.f_avg, it->report.f_avg});
  }
  return out;
}

struct SensitivityRow {
  double gamma2 = 0;
  int failing = 0;
  double worst_ratio = 0;  // max |diff| / tolerance
};

inline const std::vector<double>& sensitivity_gamma2_grid() {
  static const std::vector<double> g = {0.0, 0.005, 0.01, 0.02};
  return g;
}

inline std::vector<SensitivityRow> gamma2_sensitivity(const GoldenTable& g, TableOptions o,
                                                      const std::vector<double>& grid = sensitivity_gamma2_grid()) {
  std::vector<SensitivityRow> out;
  for (double g2 : grid) {
    o.gamma2 = g2;
    SensitivityRow s{g2, 0, 0};
    for (const auto& d : compare_table(g, compute_table(g, o))) {
      if (!d.pass()) ++s.failing;
      s.worst_ratio = std::max(s.worst_ratio, std::abs(d.diff()) / d.tolerance);
    }
    out.push_back(s);
  }
  return out;
}

// Fewest failing cells, then smallest worst ratio.
inline SensitivityRow best_gamma2(const std::vector<SensitivityRow>& rows) {
  return *std::min_element(rows.begin(), rows.end(), [](const SensitivityRow& a, const SensitivityRow& b) {
    return a.failing != b.failing ? a.failing < b.failing : a.worst_ratio < b.worst_ratio;
  });
}

inline Table sensitivity_table(const std::string& name, const std::vector<SensitivityRow>& rows) {
  Table t;
  t.columns = {"table", "gamma2", "failing_cells", "worst_diff_over_tolerance"};
  for (const auto& r : rows) {
    t.cells.push_back({name, format_double(r.gamma2), std::to_string(r.failing), format_double(r.worst_ratio)});
    t.numeric.push_back({false, true, true, true});
  }
  return t;
}

// Checks on a (mu, nu) surface computed with perfect detectors.
struct SurfaceChecks {
  double center_p = 0;            // P_success at mu = nu = 1/2
  double plateau_spread = 0;      // max - min of F_avg on the mu + nu = 1 grid points inside the band
  double plateau_value = 0;
  int plateau_points = 0;
  double optimum_f = 0;           // F_avg and P at (mu0, nu0), computed separately
  double optimum_p = 0;
};

inline bool on_balanced_line(double mu, double nu) { return std::abs(mu + nu - 1.0) < 1e-12; }

inline bool inside_band(double mu) { return mu >= kMu0 - 1e-12 && mu <= 1.0 - kMu0 + 1e-12; }

inline SurfaceChecks surface_checks(const std::vector<SweepRow>& rows) {
  SurfaceChecks c;
  double lo = 1e300, hi = -1e300;
  for (const auto& r : rows) {
    if (std::abs(r.mu - 0.5) < 1e-12 && std::abs(r.nu - 0.5) < 1e-12) c.center_p = r.report.p_success;
    if (on_balanced_line(r.mu, r.nu) && inside_band(r.mu) && r.report.defined && r.report.empty_nodes == 0) {
      lo = std::min(lo, r.report.f_avg);
      hi = std::max(hi, r.report.f_avg);
      c.plateau_value = r.report.f_avg;
      ++c.plateau_points;
    }
  }
  c.plateau_spread = c.plateau_points ? hi - lo : 0.0;
  return c;
}

}  // namespace clonesim
