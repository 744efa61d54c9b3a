// Run configuration: JSON parsing with strict key checking, serialization
// and conversion into simulation and sweep settings.
//
// Layout (every key optional, defaults shown in RunConfig):
//   {
//     "cloner": "mpcc" | "uc" | "pcc" | "mirror:<theta>" | "a2:<value>",
//     "spdc": {"gamma2": 0.01, "phi": 0, "order": 3},
//     "pdbs": {"mu": mu0, "nu": nu0},
//     "detector": {"kind": "counter" | "on_off" | "perfect", "eta": 1, "zeta": 1e-6},
//     "scheme": {"gating": "mode_gated" | "fourfold", "herald_v_arm": true},
//     "kappa": "optimal" | "clamped" | <number>,
//     "delta": 0,
//     "quadrature_points": 64,
//     "sweep": {"mu": grid, "nu": grid, "eta": grid, "zeta": grid, "gamma2": grid,
//               "theta": grid, "kinds": ["counter", ...], "spdc_order": 3},
//     "output": {"dir": "out", "format": "csv" | "json"}
//   }
// A grid is either a list of numbers or {"start": a, "stop": b, "count": n}.
#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "clonesim/errors.hpp"
#include "clonesim/experiments.hpp"
#include "clonesim/format.hpp"

namespace clonesim {

using json = nlohmann::ordered_json;

enum class OutputFormat { csv, json };

struct SweepGrids {
  std::vector<double> mu, nu, eta, zeta, gamma2, theta;
  std::vector<DetectorKind> kinds;
  std::optional<int> spdc_order;

  friend bool operator==(const SweepGrids&, const SweepGrids&) = default;
};

struct RunConfig {
  ClonerSpec cloner;
  double gamma2 = 0.01;
  double phi = 0.0;
  int spdc_order = 3;
  double mu = kMu0;
  double nu = kNu0;
  DetectorKind detector_kind = DetectorKind::single_photon_counter;
  double eta = 1.0;
  double zeta = 1e-6;
  DetectionScheme scheme;
  KappaRule kappa_rule = KappaRule::optimal;
  double kappa = 1.0;
  double delta = 0.0;
  int quadrature_points = kDefaultQuadraturePoints;
  SweepGrids sweep;
  std::string out_dir;
  OutputFormat format = OutputFormat::csv;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  SimulationConfig simulation() const {
    SimulationConfig s;
    s.cloner = cloner;
    s.spdc = SpdcConfig::from_gamma2(gamma2, spdc_order, phi);
    s.pdbs = {mu, nu};
    s.detector = make_detector(detector_kind, eta, zeta);
    s.scheme = scheme;
    s.kappa_rule = kappa_rule;
    s.kappa = kappa;
    s.delta = delta;
    s.quadrature_points = quadrature_points;
    return s;
  }

  // Unset grids fall back to the single-point values of this config.
  SweepSpec sweep_spec() const {
    SweepSpec s;
    auto pick = [](const std::vector<double>& g, double v) { return g.empty() ? std::vector<double>{v} : g; };
    s.mu = pick(sweep.mu, mu);
    s.nu = pick(sweep.nu, nu);
    s.eta = pick(sweep.eta, eta);
    s.zeta = pick(sweep.zeta, zeta);
    s.gamma2 = pick(sweep.gamma2, gamma2);
    s.theta = sweep.theta;
    s.kinds = sweep.kinds.empty() ? std::vector<DetectorKind>{detector_kind} : sweep.kinds;
    s.cloner = cloner;
    s.spdc_order = sweep.spdc_order.value_or(spdc_order);
    s.quadrature_points = quadrature_points;
    s.scheme = scheme;
    s.kappa_rule = kappa_rule == KappaRule::optimal ? KappaRule::clamped : kappa_rule;
    return s;
  }
};

inline ClonerSpec parse_cloner(const std::string& text) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw ConfigError("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("bad number in cloner '" + text + "'");
    }
  };
  if (text == "mpcc") return ClonerSpec::mirror_family();
  if (text == "uc") return ClonerSpec::universal();
  if (text == "pcc") return ClonerSpec::phase_covariant();
  if (text.rfind("mirror:", 0) == 0) {
    double th = number(text.substr(7));
    if (!(th >= 0 && th <= std::numbers::pi)) throw ConfigError("mirror theta outside [0, pi]");
    return ClonerSpec::mirror(th);
  }
  if (text.rfind("a2:", 0) == 0) {
    double a2 = number(text.substr(3));
    if (!(a2 >= -0.5 && a2 <= 1.0)) throw ConfigError("a2 outside [-1/2, 1]");
    return ClonerSpec::a2(a2);
  }
  throw ConfigError("unknown cloner '" + text + "'");
}

inline DetectorKind parse_detector_kind(const std::string& s) {
  if (s == "perfect") return DetectorKind::perfect;
  if (s == "counter") return DetectorKind::single_photon_counter;
  if (s == "on_off") return DetectorKind::on_off;
  throw ConfigError("unknown detector kind '" + s + "'");
}

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError("unknown output format '" + s + "'");
}

inline std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

namespace detail {
inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.contains(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

inline double get_number(const json& j, const std::string& key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

inline int get_int(const json& j, const std::string& key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  return v.get<int>();
}

inline std::string get_string(const json& j, const std::string& key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

inline std::vector<double> parse_grid(const json& j, const std::string& where) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& x : j) {
      if (!x.is_number()) throw ConfigError(where + " must contain numbers");
      out.push_back(x.get<double>());
    }
  } else if (j.is_object()) {
    check_keys(j, {"start", "stop", "count"}, where);
    double a = get_number(j, "start", where), b = get_number(j, "stop", where);
    int n = get_int(j, "count", where);
    if (n < 1) throw ConfigError(where + ".count must be >= 1");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  } else {
    throw ConfigError(where + " must be a list or a {start, stop, count} range");
  }
  if (out.empty()) throw ConfigError(where + " is empty");
  return out;
}
}  // namespace detail

inline RunConfig parse_config(const json& j) {
  using namespace detail;
  RunConfig c;
  check_keys(j, {"cloner", "spdc", "pdbs", "detector", "scheme", "kappa", "delta", "quadrature_points", "sweep",
                 "output"},
             "config");
  try {
    if (j.contains("cloner")) c.cloner = parse_cloner(get_string(j, "cloner", "config"));
    if (j.contains("spdc")) {
      const auto& s = j["spdc"];
      check_keys(s, {"gamma2", "phi", "order"}, "spdc");
      if (s.contains("gamma2")) c.gamma2 = get_number(s, "gamma2", "spdc");
      if (s.contains("phi")) c.phi = get_number(s, "phi", "spdc");
      if (s.contains("order")) c.spdc_order = get_int(s, "order", "spdc");
    }
    if (j.contains("pdbs")) {
      const auto& s = j["pdbs"];
      check_keys(s, {"mu", "nu"}, "pdbs");
      if (s.contains("mu")) c.mu = get_number(s, "mu", "pdbs");
      if (s.contains("nu")) c.nu = get_number(s, "nu", "pdbs");
    }
    if (j.contains("detector")) {
      const auto& s = j["detector"];
      check_keys(s, {"kind", "eta", "zeta"}, "detector");
      if (s.contains("kind")) c.detector_kind = parse_detector_kind(get_string(s, "kind", "detector"));
      if (s.contains("eta")) c.eta = get_number(s, "eta", "detector");
      if (s.contains("zeta")) c.zeta = get_number(s, "zeta", "detector");
    }
    if (j.contains("scheme")) {
      const auto& s = j["scheme"];
      check_keys(s, {"gating", "herald_v_arm"}, "scheme");
      if (s.contains("gating")) {
        auto g = get_string(s, "gating", "scheme");
        if (g == "mode_gated")
          c.scheme.gating = DetectionScheme::Gating::mode_gated;
        else if (g == "fourfold")
          c.scheme.gating = DetectionScheme::Gating::fourfold;
        else
          throw ConfigError("unknown gating '" + g + "'");
      }
      if (s.contains("herald_v_arm")) {
        if (!s["herald_v_arm"].is_boolean()) throw ConfigError("scheme.herald_v_arm must be a boolean");
        c.scheme.herald_v_arm = s["herald_v_arm"].get<bool>();
      }
    }
    if (j.contains("kappa")) {
      const auto& k = j["kappa"];
      if (k.is_string()) {
        auto s = k.get<std::string>();
        if (s == "optimal")
          c.kappa_rule = KappaRule::optimal;
        else if (s == "clamped")
          c.kappa_rule = KappaRule::clamped;
        else
          throw ConfigError("kappa must be 'optimal', 'clamped' or a number");
      } else if (k.is_number()) {
        c.kappa_rule = KappaRule::fixed;
        c.kappa = k.get<double>();
      } else {
        throw ConfigError("kappa must be 'optimal', 'clamped' or a number");
      }
    }
    if (j.contains("delta")) c.delta = get_number(j, "delta", "config");
    if (j.contains("quadrature_points")) c.quadrature_points = get_int(j, "quadrature_points", "config");
    if (j.contains("sweep")) {
      const auto& s = j["sweep"];
      check_keys(s, {"mu", "nu", "eta", "zeta", "gamma2", "theta", "kinds", "spdc_order"}, "sweep");
      if (s.contains("mu")) c.sweep.mu = parse_grid(s["mu"], "sweep.mu");
      if (s.contains("nu")) c.sweep.nu = parse_grid(s["nu"], "sweep.nu");
      if (s.contains("eta")) c.sweep.eta = parse_grid(s["eta"], "sweep.eta");
      if (s.contains("zeta")) c.sweep.zeta = parse_grid(s["zeta"], "sweep.zeta");
      if (s.contains("gamma2")) c.sweep.gamma2 = parse_grid(s["gamma2"], "sweep.gamma2");
      if (s.contains("theta")) c.sweep.theta = parse_grid(s["theta"], "sweep.theta");
      if (s.contains("kinds")) {
        if (!s["kinds"].is_array() || s["kinds"].empty()) throw ConfigError("sweep.kinds must be a non-empty list");
        for (const auto& k : s["kinds"]) {
          if (!k.is_string()) throw ConfigError("sweep.kinds must contain strings");
          c.sweep.kinds.push_back(parse_detector_kind(k.get<std::string>()));
        }
      }
      if (s.contains("spdc_order")) c.sweep.spdc_order = get_int(s, "spdc_order", "sweep");
    }
    if (j.contains("output")) {
      const auto& s = j["output"];
      check_keys(s, {"dir", "format"}, "output");
      if (s.contains("dir")) c.out_dir = get_string(s, "dir", "output");
      if (s.contains("format")) c.format = parse_format(get_string(s, "format", "output"));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  // Range checks on the assembled values.
  if (!(c.gamma2 >= 0 && c.gamma2 <= 0.1)) throw ConfigError("spdc.gamma2 outside [0, 0.1]");
  if (c.spdc_order != 2 && c.spdc_order != 3) throw ConfigError("spdc.order must be 2 or 3");
  if (!(c.mu >= 0 && c.mu <= 1 && c.nu >= 0 && c.nu <= 1)) throw ConfigError("pdbs mu, nu outside [0, 1]");
  if (!(c.eta >= 0 && c.eta <= 1)) throw ConfigError("detector.eta outside [0, 1]");
  if (!(c.zeta >= 0 && std::isfinite(c.zeta))) throw ConfigError("detector.zeta must be finite and >= 0");
  if (c.kappa_rule == KappaRule::fixed && !(std::abs(c.kappa) <= 1)) throw ConfigError("kappa outside [-1, 1]");
  if (c.quadrature_points < 16) throw ConfigError("quadrature_points must be >= 16");
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline json to_json(const RunConfig& c) {
  json j;
  j["cloner"] = to_string(c.cloner);
  j["spdc"] = {{"gamma2", c.gamma2}, {"phi", c.phi}, {"order", c.spdc_order}};
  j["pdbs"] = {{"mu", c.mu}, {"nu", c.nu}};
  j["detector"] = {{"kind", to_string(c.detector_kind)}, {"eta", c.eta}, {"zeta", c.zeta}};
  j["scheme"] = {{"gating", to_string(c.scheme.gating)}, {"herald_v_arm", c.scheme.herald_v_arm}};
  switch (c.kappa_rule) {
    case KappaRule::optimal: j["kappa"] = "optimal"; break;
    case KappaRule::clamped: j["kappa"] = "clamped"; break;
    case KappaRule::fixed: j["kappa"] = c.kappa; break;
  }
  j["delta"] = c.delta;
  j["quadrature_points"] = c.quadrature_points;
  json s = json::object();
  auto put = [&](const char* k, const std::vector<double>& g) {
    if (!g.empty()) s[k] = g;
  };
  put("mu", c.sweep.mu);
  put("nu", c.sweep.nu);
  put("eta", c.sweep.eta);
  put("zeta", c.sweep.zeta);
  put("gamma2", c.sweep.gamma2);
  put("theta", c.sweep.theta);
  if (!c.sweep.kinds.empty()) {
    s["kinds"] = json::array();
    for (auto k : c.sweep.kinds) s["kinds"].push_back(to_string(k));
  }
  if (c.sweep.spdc_order) s["spdc_order"] = *c.sweep.spdc_order;
  if (!s.empty()) j["sweep"] = s;
  json o = {{"format", to_string(c.format)}};
  if (!c.out_dir.empty()) o["dir"] = c.out_dir;
  j["output"] = o;
  return j;
}

// 64-bit FNV-1a of the canonical JSON form.
inline std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : to_json(c).dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace clonesim
