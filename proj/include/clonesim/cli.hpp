// Command-line front end. run_cli() is the whole program; the executable in
// tools/ only forwards argv and the standard streams.
//
// Exit codes: 0 ok, 1 tolerance or validation failure, 2 usage or config
// error.
#pragma once

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "clonesim/config.hpp"
#include "clonesim/experiments.hpp"
#include "clonesim/output.hpp"
#include "clonesim/reproduce.hpp"
#include "clonesim/validate.hpp"

namespace clonesim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kOutDirEnv = "CLONESIM_OUT_DIR";

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::string format;
  int jobs = 1;
};

namespace detail {

inline RunConfig load_run_config(const CliOptions& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (!o.format.empty()) c.format = parse_format(o.format);
  return c;
}

// --out, then the config file, then the environment, then ./clonesim_out.
inline std::filesystem::path output_dir(const CliOptions& o, const RunConfig& c) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (!c.out_dir.empty()) return c.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "clonesim_out";
}

inline nlohmann::ordered_json metadata(const RunConfig& c, const std::string& target) {
  nlohmann::ordered_json m;
  m["target"] = target;
  m["config_hash"] = config_hash(c);
  m["timestamp"] = utc_timestamp();
  m["tolerances"] = {{"fidelity", golden_table1().tolerance.fidelity},
                     {"p_success", golden_table1().tolerance.p_success}};
  m["config"] = to_json(c);
  return m;
}

inline std::string fixed(double x, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << x;
  return os.str();
}

inline int cmd_fidelity(const CliOptions& o, std::ostream& out) {
  RunConfig c = load_run_config(o);
  SimulationConfig sim = c.simulation();
  CloneReport r = evaluate(build_events(sim, o.jobs), sim.detector, sim.scheme);
  double fa = analytic_average_fidelity(c.cloner);
  std::optional<double> pa;
  if (on_balanced_line(c.mu, c.nu) && c.kappa_rule == KappaRule::optimal)
    pa = analytic_average_success(c.cloner, c.mu, c.quadrature_points);

  if (c.format == OutputFormat::json) {
    nlohmann::ordered_json j;
    j["metadata"] = metadata(c, "fidelity");
    j["analytic"] = {{"f1", fa}, {"f2", fa}, {"f_avg", fa}};
    if (pa) j["analytic"]["p_success"] = *pa;
    j["simulation"] = {{"f1", r.f1}, {"f2", r.f2}, {"f_avg", r.f_avg}, {"p_success", r.p_success},
                       {"c00", r.coincidences.c00}, {"c01", r.coincidences.c01},
                       {"c10", r.coincidences.c10}, {"c11", r.coincidences.c11},
                       {"kappa_feasible", r.kappa_feasible}, {"defined", r.defined}};
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "cloner " << to_string(c.cloner) << ", detector " << to_string(c.detector_kind) << " (eta "
      << format_double(c.eta) << ", zeta " << format_double(c.zeta) << "), gamma2 " << format_double(c.gamma2)
      << ", mu " << format_double(c.mu) << ", nu " << format_double(c.nu) << "\n";
  out << std::left << std::setw(12) << "quantity" << std::setw(12) << "analytic" << std::setw(12) << "simulation"
      << "difference\n";
  auto row = [&](const char* name, std::optional<double> a, double s) {
    out << std::left << std::setw(12) << name << std::setw(12) << (a ? fixed(*a) : "n/a") << std::setw(12)
        << fixed(s) << (a ? fixed(s - *a) : "n/a") << "\n";
  };
  row("F1", fa, r.f1);
  row("F2", fa, r.f2);
  row("F_avg", fa, r.f_avg);
  row("P_success", pa, r.p_success);
  if (!r.kappa_feasible) out << "note: kappa clamped at some inputs\n";
  if (!r.defined) out << "note: no accepted coincidences, fidelities undefined\n";
  return kExitOk;
}

inline int reproduce_table(const GoldenTable& g, const CliOptions& o, const RunConfig& c, std::ostream& out) {
  auto dir = output_dir(o, c);
  bool as_json = c.format == OutputFormat::json;
  TableOptions opt;
  opt.gamma2 = c.gamma2;
  opt.table1_zeta = c.zeta;
  opt.quadrature_points = c.quadrature_points;
  opt.scheme = c.scheme;
  opt.jobs = o.jobs;
  auto rows = compute_table(g, opt);
  auto meta = metadata(c, g.name);
  out << "wrote " << write_table(dir, g.name, sweep_table(rows), as_json, meta).string() << "\n";
  auto diffs = compare_table(g, rows);
  out << "wrote " << write_table(dir, g.name + "_diff", diff_table(diffs), as_json, meta).string() << "\n";

  int failing = 0;
  for (const auto& d : diffs) {
    if (d.pass()) continue;
    ++failing;
    out << "MISS " << g.name << " " << to_string(d.kind) << " " << g.variable << "=" << format_double(d.x) << " "
        << d.quantity << ": value " << fixed(d.value, 4) << " reference " << fixed(d.reference, 4) << " diff "
        << fixed(d.diff(), 4) << " tolerance " << format_double(d.tolerance) << "\n";
  }
  bool crossover_ok = true;
  if (g.variable == "zeta") {
    for (const auto& x : crossover_checks(rows)) {
      out << (x.pass() ? "ok   " : "MISS ") << "crossover zeta=" << format_double(x.zeta) << ": on_off F "
          << fixed(x.on_off_f, 4) << " vs counter F " << fixed(x.counter_f, 4) << "\n";
      crossover_ok = crossover_ok && x.pass();
    }
  }
  out << g.name << ": " << diffs.size() - failing << "/" << diffs.size() << " cells within tolerance\n";
  if (failing == 0 && crossover_ok) return kExitOk;

  auto sens = gamma2_sensitivity(g, opt);
  out << "wrote "
      << write_table(dir, g.name + "_gamma2_sensitivity", sensitivity_table(g.name, sens), as_json, meta).string()
      << "\n";
  for (const auto& s : sens)
    out << "gamma2=" << format_double(s.gamma2) << ": " << s.failing << " failing cells, worst diff/tolerance "
        << fixed(s.worst_ratio, 3) << "\n";
  out << "best matching gamma2: " << format_double(best_gamma2(sens).gamma2) << "\n";
  return kExitFailure;
}

inline int reproduce_surface(const std::string& target, const CliOptions& o, const RunConfig& c, std::ostream& out) {
  auto dir = output_dir(o, c);
  SweepSpec spec = surface_spec(kDefaultSurfaceGrid, c.quadrature_points);
  auto rows = sweep_mu_nu(spec, o.jobs);
  out << "wrote "
      << write_table(dir, target, sweep_table(rows), c.format == OutputFormat::json, metadata(c, target)).string()
      << "\n";
  auto checks = surface_checks(rows);
  bool ok = true;
  if (target == "fig3") {
    double expect = analytic_average_fidelity(ClonerSpec::mirror_family());
    bool flat = checks.plateau_points > 0 && checks.plateau_spread < 1e-6;
    bool level = std::abs(checks.plateau_value - expect) < 1e-6;
    out << (flat ? "ok   " : "MISS ") << "F_avg plateau on mu + nu = 1 inside the band: spread "
        << detail::sci(checks.plateau_spread) << " over " << checks.plateau_points << " points\n";
    out << (level ? "ok   " : "MISS ") << "plateau level " << fixed(checks.plateau_value) << " vs closed form "
        << fixed(expect) << "\n";
    ok = flat && level;
  } else {
    bool zero = checks.center_p <= 1e-12;
    out << (zero ? "ok   " : "MISS ") << "P_success at mu = nu = 1/2: " << detail::sci(checks.center_p) << "\n";
    // On the balanced line inside the band P_success peaks at the band edge.
    SimulationConfig sim;
    sim.spdc = SpdcConfig{0.0, 0.0, spec.spdc_order};
    sim.detector = DetectorModel::perfect();
    sim.quadrature_points = spec.quadrature_points;
    auto best = average_over_inputs(sim, spec.quadrature_points);
    bool peak = true;
    for (const auto& r : rows)
      if (on_balanced_line(r.mu, r.nu) && inside_band(r.mu))
        peak = peak && r.report.p_success <= best.p_success + 1e-12 && r.report.f_avg <= best.f_avg + 1e-9;
    out << (peak ? "ok   " : "MISS ") << "(mu0, nu0) maximizes F_avg and P_success on the balanced line: F "
        << fixed(best.f_avg) << ", P " << fixed(best.p_success) << "\n";
    ok = zero && peak;
  }
  return ok ? kExitOk : kExitFailure;
}

inline int cmd_reproduce(const std::string& target, const CliOptions& o, std::ostream& out, std::ostream& err) {
  if (target != "table1" && target != "table2" && target != "fig3" && target != "fig4") {
    err << "unknown reproduce target '" << target << "' (expected table1, table2, fig3 or fig4)\n";
    return kExitUsage;
  }
  RunConfig c = load_run_config(o);
  if (target == "table1") return reproduce_table(golden_table1(), o, c, out);
  if (target == "table2") return reproduce_table(golden_table2(), o, c, out);
  return reproduce_surface(target, o, c, out);
}

inline int cmd_sweep(const std::string& spec_file, const CliOptions& o, std::ostream& out) {
  RunConfig c = load_config(spec_file);
  if (!o.format.empty()) c.format = parse_format(o.format);
  auto rows = run_sweep(c.sweep_spec(), o.jobs);
  auto path = write_table(output_dir(o, c), "sweep", sweep_table(rows), c.format == OutputFormat::json,
                          metadata(c, "sweep"));
  out << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
  return kExitOk;
}

inline int cmd_validate(std::ostream& out) {
  auto results = run_validation();
  int failed = 0;
  for (const auto& r : results) {
    out << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    failed += r.pass ? 0 : 1;
  }
  out << results.size() - failed << "/" << results.size() << " properties passed\n";
  return failed ? kExitFailure : kExitOk;
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator for photonic mirror phase-covariant cloning", "clonesim"};
  app.require_subcommand(1);
  CliOptions o;
  app.add_option("--config", o.config_path, "JSON run configuration");
  app.add_option("--out", o.out_dir, std::string("output directory (default: $") + kOutDirEnv + " or clonesim_out)");
  app.add_option("--format", o.format, "output format: csv or json");
  app.add_option("--jobs", o.jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  auto* fid = app.add_subcommand("fidelity", "analytic and simulated fidelities for one configuration");
  std::string target;
  auto* rep = app.add_subcommand("reproduce", "recompute table1, table2, fig3 or fig4 and diff against references");
  rep->add_option("target", target, "table1 | table2 | fig3 | fig4")->required();
  std::string spec_file;
  auto* swp = app.add_subcommand("sweep", "run the grid sweep described by a config file");
  swp->add_option("spec-file", spec_file, "JSON config with a sweep section")->required();
  auto* val = app.add_subcommand("validate", "run the invariant self-checks");
  for (auto* sub : {fid, rep, swp, val}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }
  if (!o.format.empty() && o.format != "csv" && o.format != "json") {
    err << "usage error: --format must be csv or json\n";
    return kExitUsage;
  }

  try {
    if (*fid) return detail::cmd_fidelity(o, out);
    if (*rep) return detail::cmd_reproduce(target, o, out, err);
    if (*swp) return detail::cmd_sweep(spec_file, o, out);
    if (*val) return detail::cmd_validate(out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InfeasibleConfiguration& e) {
    err << "infeasible configuration: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "invalid parameter: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace clonesim
