// Input averaging, parameter sweeps and the detector tables.
//
// The expensive part of a configuration is the optical pipeline per input
// node; its outcome is stored as a detector-independent event list so one
// pipeline run serves every (eta, zeta, detector kind) evaluated on it.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "clonesim/analytic.hpp"
#include "clonesim/detectors.hpp"
#include "clonesim/errors.hpp"
#include "clonesim/format.hpp"
#include "clonesim/optics.hpp"
#include "clonesim/quadrature.hpp"

namespace clonesim {

inline constexpr int kDefaultQuadraturePoints = 64;
inline constexpr int kDefaultSurfaceGrid = 81;

// Which cloner is built and over which inputs it is averaged.
struct ClonerSpec {
  enum class Kind { mirror_family, universal, phase_covariant, mirror, a2 };
  Kind kind = Kind::mirror_family;
  double value = 0.0;  // theta for mirror, a2 for a2

  static ClonerSpec mirror_family() { return {}; }
  static ClonerSpec universal() { return {Kind::universal, 0.0}; }
  static ClonerSpec phase_covariant() { return {Kind::phase_covariant, -0.5}; }
  static ClonerSpec mirror(double theta) { return {Kind::mirror, theta}; }
  static ClonerSpec a2(double a2) { return {Kind::a2, a2}; }

  friend bool operator==(const ClonerSpec&, const ClonerSpec&) = default;
};

inline std::string to_string(const ClonerSpec& c) {
  switch (c.kind) {
    case ClonerSpec::Kind::mirror_family: return "mpcc";
    case ClonerSpec::Kind::universal: return "uc";
    case ClonerSpec::Kind::phase_covariant: return "pcc";
    case ClonerSpec::Kind::mirror: return "mirror:" + format_double(c.value);
    case ClonerSpec::Kind::a2: return "a2:" + format_double(c.value);
  }
  return "?";
}

struct InputNode {
  double theta = 0.0;
  double weight = 0.0;
  CloneParameter lambda{1.0};
};

// Nodes of the input distribution with weights summing to 1. Sphere averages
// use Gauss-Legendre in cos(theta); mirror pairs are two point evaluations.
// The phase-covariant cloner is the a2 = -1/2 member of the a2 family.
inline std::vector<InputNode> input_nodes(const ClonerSpec& c, int quadrature_points) {
  std::vector<InputNode> nodes;
  auto sphere = [&](const std::function<CloneParameter(double)>& rule) {
    if (quadrature_points < 1) throw DomainError("quadrature_points must be positive");
    const auto& gl = gauss_legendre(quadrature_points);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      double theta = std::acos(gl.nodes[i]);
      nodes.push_back({theta, gl.weights[i] / 2.0, rule(theta)});
    }
  };
  switch (c.kind) {
    case ClonerSpec::Kind::mirror_family:
      sphere(lambda_from_theta);
      break;
    case ClonerSpec::Kind::universal:
      sphere([](double) { return lambda_from_a2(0.0); });
      break;
    case ClonerSpec::Kind::mirror: {
      CloneParameter l = lambda_from_theta(c.value);
      nodes.push_back({c.value, 0.5, l});
      nodes.push_back({std::numbers::pi - c.value, 0.5, l});
      break;
    }
    case ClonerSpec::Kind::phase_covariant:
    case ClonerSpec::Kind::a2: {
      CloneParameter l = lambda_from_a2(c.value);
      // P2(cos theta) = a2
      double x = std::sqrt((2.0 * c.value + 1.0) / 3.0);
      nodes.push_back({std::acos(x), 0.5, l});
      nodes.push_back({std::acos(-x), 0.5, l});
      break;
    }
  }
  return nodes;
}

inline QubitDistribution distribution_of(const ClonerSpec& c) {
  switch (c.kind) {
    case ClonerSpec::Kind::mirror_family:
    case ClonerSpec::Kind::universal: return QubitDistribution::universal();
    case ClonerSpec::Kind::mirror: return QubitDistribution::mirror(c.value);
    case ClonerSpec::Kind::phase_covariant:
    case ClonerSpec::Kind::a2: return QubitDistribution::mirror(std::acos(std::sqrt((2.0 * c.value + 1.0) / 3.0)));
  }
  return QubitDistribution::universal();
}

// Closed-form average fidelity of the cloner over its own distribution.
inline double analytic_average_fidelity(const ClonerSpec& c) {
  switch (c.kind) {
    case ClonerSpec::Kind::mirror_family: return average_fidelity(distribution_of(c), lambda_from_theta);
    case ClonerSpec::Kind::mirror: {
      CloneParameter l = lambda_from_theta(c.value);
      return average_fidelity(distribution_of(c), [l](double) { return l; });
    }
    default: {
      CloneParameter l = lambda_from_a2(c.kind == ClonerSpec::Kind::universal ? 0.0 : c.value);
      return average_fidelity(distribution_of(c), [l](double) { return l; });
    }
  }
}

// Input average of 1/(6 Lambda^2) scaled by 2(1 - 2mu)^2, the success
// probability of the ideal machine at a PDBS point on mu + nu = 1.
inline double analytic_average_success(const ClonerSpec& c, double mu, int quadrature_points) {
  double p = 0;
  for (const auto& n : input_nodes(c, quadrature_points))
    p += n.weight * (1.0 - 2.0 * mu) * (1.0 - 2.0 * mu) / (2.0 * n.lambda.lambda() * n.lambda.lambda());
  return p;
}

enum class KappaRule { optimal, clamped, fixed };

struct SimulationConfig {
  ClonerSpec cloner;
  SpdcConfig spdc = SpdcConfig::from_gamma2(0.01);
  PdbsConfig pdbs;
  DetectorModel detector = DetectorModel::counter(1.0, 1e-6);
  DetectionScheme scheme;
  KappaRule kappa_rule = KappaRule::optimal;
  double kappa = 1.0;  // used by KappaRule::fixed
  double delta = 0.0;
  int quadrature_points = kDefaultQuadraturePoints;
};

struct Event {
  Polarization fired = Polarization::H;
  int n0h = 0, n0v = 0, n0p_h = 0, n0p_v = 0;
  std::vector<int> arms;  // n1_psi, n1_psibar, n2_psi, n2_psibar
  double probability = 0;
};

struct NodeEvents {
  InputNode node;
  double kappa = 0;
  bool kappa_feasible = true;
  std::vector<Event> events;
};

inline NodeEvents node_events(const InputNode& node, const SimulationConfig& cfg) {
  NodeEvents out{node, 0.0, true, {}};
  switch (cfg.kappa_rule) {
    case KappaRule::optimal: out.kappa = kappa_for(node.lambda, cfg.pdbs); break;
    case KappaRule::clamped: {
      auto k = kappa_clamped(node.lambda, cfg.pdbs);
      out.kappa = k.kappa;
      out.kappa_feasible = k.feasible;
      break;
    }
    case KappaRule::fixed: out.kappa = cfg.kappa; break;
  }
  InputQubit q{node.theta, cfg.delta};
  PureState psi = post_pdbs_state(cfg.spdc, q, cfg.pdbs);
  for (const auto& b : herald_branches(psi, FeedforwardConfig{out.kappa})) {
    if (b.state.empty()) continue;
    for (const auto& [arms, p] : arm_populations(b.state, {Spatial::s1pp, Spatial::s2pp}, q)) {
      if (p < 1e-30) continue;
      out.events.push_back({b.fired, b.n0h, b.n0v, b.n0p_h, b.n0p_v, arms, p});
    }
  }
  return out;
}

inline CoincidenceTable node_coincidences(const NodeEvents& ne, const DetectorModel& d, DetectionScheme scheme) {
  ArmPopulations weighted;
  for (const auto& e : ne.events) {
    HeraldBranch hb;
    hb.fired = e.fired;
    hb.n0h = e.n0h;
    hb.n0v = e.n0v;
    hb.n0p_h = e.n0p_h;
    hb.n0p_v = e.n0p_v;
    double w = herald_weight(hb, d, d, scheme);
    if (w != 0) weighted[e.arms] += w * e.probability;
  }
  return coincidences_from_populations(weighted, d, scheme);
}

// Runs f(i) for i in [0, n) on up to `jobs` threads. Results land by index.
template <class T>
std::vector<T> parallel_map(std::size_t n, int jobs, const std::function<T(std::size_t)>& f) {
  std::vector<T> out(n);
  unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs) : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          out[i] = f(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

// Pipeline events for every input node of a configuration.
struct InputEvents {
  std::vector<NodeEvents> nodes;
  bool kappa_feasible() const {
    return std::all_of(nodes.begin(), nodes.end(), [](const NodeEvents& n) { return n.kappa_feasible; });
  }
};

inline InputEvents build_events(const SimulationConfig& cfg, int jobs = 1) {
  if (cfg.quadrature_points < 16 && (cfg.cloner.kind == ClonerSpec::Kind::mirror_family ||
                                     cfg.cloner.kind == ClonerSpec::Kind::universal))
    throw DomainError("sphere averages need at least 16 quadrature points");
  auto nodes = input_nodes(cfg.cloner, cfg.quadrature_points);
  InputEvents ev;
  ev.nodes = parallel_map<NodeEvents>(nodes.size(), jobs, [&](std::size_t i) { return node_events(nodes[i], cfg); });
  return ev;
}

struct CloneReport {
  double f1 = 0, f2 = 0, f_avg = 0, p_success = 0;
  CoincidenceTable coincidences;  // input-averaged
  bool kappa_feasible = true;
  int empty_nodes = 0;            // nodes with no accepted events
  bool defined = true;            // false when no node accepted anything
};

// P_success and C_ij are weighted input averages. Fidelities are weighted
// averages of the per-node ratios over nodes that accept events.
inline CloneReport evaluate(const InputEvents& ev, const DetectorModel& d, DetectionScheme scheme = {}) {
  d.validate();
  CloneReport r;
  double wsum = 0;
  for (const auto& ne : ev.nodes) {
    CoincidenceTable t = node_coincidences(ne, d, scheme);
    double w = ne.node.weight;
    r.coincidences += t.scaled(w);
    r.p_success += w * t.total();
    r.kappa_feasible = r.kappa_feasible && ne.kappa_feasible;
    if (t.total() > 0) {
      auto f = fidelities_from_coincidences(t);
      r.f1 += w * f.f1;
      r.f2 += w * f.f2;
      wsum += w;
    } else {
      ++r.empty_nodes;
    }
  }
  if (wsum > 0) {
    r.f1 /= wsum;
    r.f2 /= wsum;
  } else {
    r.defined = false;
  }
  r.f_avg = 0.5 * (r.f1 + r.f2);
  return r;
}

inline CloneReport average_over_inputs(const SimulationConfig& cfg, int quadrature_points, int jobs = 1) {
  if (quadrature_points < 16) throw DomainError("average_over_inputs needs at least 16 quadrature points");
  SimulationConfig c = cfg;
  c.quadrature_points = quadrature_points;
  return evaluate(build_events(c, jobs), c.detector, c.scheme);
}

// One sweep row: the parameter point, detector and averaged report.
struct SweepRow {
  double mu = 0, nu = 0, eta = 1, zeta = 0, gamma2 = 0;
  std::optional<double> theta;
  DetectorKind kind = DetectorKind::perfect;
  CloneReport report;
};

struct SweepSpec {
  std::vector<double> mu = {kMu0};
  std::vector<double> nu = {kNu0};
  std::vector<double> eta = {1.0};
  std::vector<double> zeta = {1e-6};
  std::vector<double> gamma2 = {0.01};
  std::vector<double> theta;  // when set, each value replaces the cloner by mirror(theta)
  std::vector<DetectorKind> kinds = {DetectorKind::single_photon_counter};
  ClonerSpec cloner;
  int spdc_order = 3;
  int quadrature_points = kDefaultQuadraturePoints;
  DetectionScheme scheme;
  KappaRule kappa_rule = KappaRule::clamped;

  void validate() const {
    auto nonempty = [](const auto& v, const char* name) {
      if (v.empty()) throw ConfigError(std::string("sweep grid '") + name + "' is empty");
    };
    nonempty(mu, "mu");
    nonempty(nu, "nu");
    nonempty(eta, "eta");
    nonempty(zeta, "zeta");
    nonempty(gamma2, "gamma2");
    nonempty(kinds, "detector kinds");
    for (double x : mu)
      if (!(x >= 0 && x <= 1)) throw ConfigError("mu outside [0, 1]");
    for (double x : nu)
      if (!(x >= 0 && x <= 1)) throw ConfigError("nu outside [0, 1]");
    for (double x : eta)
      if (!(x >= 0 && x <= 1)) throw ConfigError("eta outside [0, 1]");
    for (double x : zeta)
      if (!(x >= 0 && std::isfinite(x))) throw ConfigError("zeta must be finite and >= 0");
    for (double x : gamma2)
      if (!(x >= 0 && x <= 0.1)) throw ConfigError("gamma2 outside [0, 0.1]");
    for (double x : theta)
      if (!(x >= 0 && x <= std::numbers::pi)) throw ConfigError("theta outside [0, pi]");
    if (spdc_order != 2 && spdc_order != 3) throw ConfigError("spdc order must be 2 or 3");
    if (quadrature_points < 16) throw ConfigError("quadrature points must be >= 16");
  }
};

inline DetectorModel make_detector(DetectorKind k, double eta, double zeta) {
  return k == DetectorKind::perfect ? DetectorModel::perfect() : DetectorModel{k, eta, zeta};
}

// Rows are ordered by (gamma2, theta, mu, nu) then (kind, eta, zeta),
// independent of how work is scheduled.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs = 1) {
  spec.validate();
  struct Point {
    double mu, nu, gamma2;
    std::optional<double> theta;
  };
  std::vector<Point> points;
  std::vector<std::optional<double>> thetas;
  if (spec.theta.empty())
    thetas.push_back(std::nullopt);
  else
    thetas.assign(spec.theta.begin(), spec.theta.end());
  for (double g2 : spec.gamma2)
    for (auto th : thetas)
      for (double mu : spec.mu)
        for (double nu : spec.nu) points.push_back({mu, nu, g2, th});

  auto per_point = [&](std::size_t i) {
    const Point& p = points[i];
    SimulationConfig cfg;
    cfg.cloner = p.theta ? ClonerSpec::mirror(*p.theta) : spec.cloner;
    cfg.spdc = SpdcConfig::from_gamma2(p.gamma2, spec.spdc_order);
    cfg.pdbs = {p.mu, p.nu};
    cfg.scheme = spec.scheme;
    cfg.kappa_rule = spec.kappa_rule;
    cfg.quadrature_points = spec.quadrature_points;
    InputEvents ev = build_events(cfg, 1);
    std::vector<SweepRow> rows;
    for (DetectorKind k : spec.kinds)
      for (double eta : (k == DetectorKind::perfect ? std::vector<double>{1.0} : spec.eta))
        for (double zeta : (k == DetectorKind::perfect ? std::vector<double>{0.0} : spec.zeta)) {
          SweepRow row{p.mu, p.nu, eta, zeta, p.gamma2, p.theta, k, {}};
          row.report = evaluate(ev, make_detector(k, eta, zeta), spec.scheme);
          rows.push_back(row);
        }
    return rows;
  };
  auto chunks = parallel_map<std::vector<SweepRow>>(points.size(), jobs, per_point);
  std::vector<SweepRow> out;
  for (auto& c : chunks) out.insert(out.end(), c.begin(), c.end());
  return out;
}

inline SweepSpec surface_spec(int grid = kDefaultSurfaceGrid, int quadrature_points = kDefaultQuadraturePoints) {
  SweepSpec s;
  s.mu.clear();
  for (int i = 0; i < grid; ++i) s.mu.push_back(static_cast<double>(i) / (grid - 1));
  s.nu = s.mu;
  s.kinds = {DetectorKind::perfect};
  s.zeta = {0.0};
  s.gamma2 = {0.01};
  s.spdc_order = 2;
  s.quadrature_points = quadrature_points;
  s.kappa_rule = KappaRule::clamped;
  return s;
}

// Fidelity and success surfaces over the (mu, nu) square.
inline std::vector<SweepRow> sweep_mu_nu(const SweepSpec& spec, int jobs = 1) { return run_sweep(spec, jobs); }

inline std::vector<SweepRow> table_detector_efficiency(const std::vector<double>& etas, double gamma2,
                                                       double zeta = 1e-6,
                                                       int quadrature_points = kDefaultQuadraturePoints,
                                                       DetectionScheme scheme = {}, int jobs = 1) {
  SweepSpec s;
  s.eta = etas;
  s.zeta = {zeta};
  s.gamma2 = {gamma2};
  s.kinds = {DetectorKind::single_photon_counter, DetectorKind::on_off};
  s.quadrature_points = quadrature_points;
  s.scheme = scheme;
  s.kappa_rule = KappaRule::optimal;
  return run_sweep(s, jobs);
}

inline std::vector<SweepRow> table_dark_counts(const std::vector<double>& zetas, double gamma2,
                                               int quadrature_points = kDefaultQuadraturePoints,
                                               DetectionScheme scheme = {}, int jobs = 1) {
  SweepSpec s;
  s.eta = {1.0};
  s.zeta = zetas;
  s.gamma2 = {gamma2};
  s.kinds = {DetectorKind::single_photon_counter, DetectorKind::on_off};
  s.quadrature_points = quadrature_points;
  s.scheme = scheme;
  s.kappa_rule = KappaRule::optimal;
  return run_sweep(s, jobs);
}

}  // namespace clonesim
