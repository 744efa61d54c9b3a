// Detector POVMs (perfect, single-photon counter, ON/OFF bucket), the
// polarization analysis of the output modes and coincidence counting.
//
// All POVM elements are diagonal in photon number, so a detector acting on
// one polarization mode is fully described by its weight per Fock level.
#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "clonesim/analytic.hpp"
#include "clonesim/errors.hpp"
#include "clonesim/fock.hpp"

namespace clonesim {

enum class DetectorKind { perfect, single_photon_counter, on_off };

inline std::string to_string(DetectorKind k) {
  switch (k) {
    case DetectorKind::perfect: return "perfect";
    case DetectorKind::single_photon_counter: return "counter";
    case DetectorKind::on_off: return "on_off";
  }
  return "?";
}

struct DetectorModel {
  DetectorKind kind = DetectorKind::perfect;
  double eta = 1.0;
  double zeta = 0.0;

  static DetectorModel perfect() { return {}; }
  static DetectorModel counter(double eta, double zeta) { return {DetectorKind::single_photon_counter, eta, zeta}; }
  static DetectorModel on_off(double eta, double zeta) { return {DetectorKind::on_off, eta, zeta}; }

  void validate() const {
    if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidDetectorModel("eta must lie in [0, 1]");
    if (!(zeta >= 0.0 && std::isfinite(zeta))) throw InvalidDetectorModel("zeta must be finite and >= 0");
    if (kind == DetectorKind::perfect && (eta != 1.0 || zeta != 0.0))
      throw InvalidDetectorModel("perfect detector requires eta = 1 and zeta = 0");
  }

  // No registered photon on m incident photons.
  double p_zero(int m) const {
    if (kind == DetectorKind::perfect) return m == 0 ? 1.0 : 0.0;
    return std::exp(-zeta) * std::pow(1.0 - eta, m);
  }

  // The element that counts as "one photon": Pi_1 for number-resolving
  // detectors, Pi_{>=1} for bucket detectors.
  double p_click(int m) const {
    switch (kind) {
      case DetectorKind::perfect: return m == 1 ? 1.0 : 0.0;
      case DetectorKind::single_photon_counter: {
        double dark = std::exp(-zeta) * zeta * std::pow(1.0 - eta, m);
        double real = m >= 1 ? std::exp(-zeta) * eta * m * std::pow(1.0 - eta, m - 1) : 0.0;
        return dark + real;
      }
      case DetectorKind::on_off: return 1.0 - p_zero(m);
    }
    return 0.0;
  }

  friend bool operator==(const DetectorModel&, const DetectorModel&) = default;
};

enum class Outcome { zero, one, many, at_least_one };

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::zero: return "zero";
    case Outcome::one: return "one";
    case Outcome::many: return "many";
    case Outcome::at_least_one: return "at_least_one";
  }
  return "?";
}

// Diagonal effect on one polarization mode; weights[m] = <m|Pi|m>.
struct PovmElement {
  Outcome outcome = Outcome::zero;
  std::vector<double> weights;

  double operator()(int m) const {
    return m >= 0 && m < static_cast<int>(weights.size()) ? weights[static_cast<std::size_t>(m)] : 0.0;
  }
};

inline std::vector<PovmElement> spc_povm(const DetectorModel& d, int n_max) {
  if (d.kind == DetectorKind::on_off) throw InvalidDetectorModel("spc_povm needs a number-resolving detector");
  d.validate();
  PovmElement p0{Outcome::zero, {}}, p1{Outcome::one, {}}, pm{Outcome::many, {}};
  for (int m = 0; m <= n_max; ++m) {
    p0.weights.push_back(d.p_zero(m));
    p1.weights.push_back(d.p_click(m));
    pm.weights.push_back(1.0 - p0.weights.back() - p1.weights.back());
  }
  return {p0, p1, pm};
}

inline std::vector<PovmElement> onoff_povm(const DetectorModel& d, int n_max) {
  if (d.kind != DetectorKind::on_off) throw InvalidDetectorModel("onoff_povm needs an ON/OFF detector");
  d.validate();
  PovmElement p0{Outcome::zero, {}}, p1{Outcome::at_least_one, {}};
  for (int m = 0; m <= n_max; ++m) {
    p0.weights.push_back(d.p_zero(m));
    p1.weights.push_back(1.0 - p0.weights.back());
  }
  return {p0, p1};
}

inline std::vector<PovmElement> povm(const DetectorModel& d, int n_max) {
  return d.kind == DetectorKind::on_off ? onoff_povm(d, n_max) : spc_povm(d, n_max);
}

// Wave-plate rotation of one spatial mode sending |psi> to the H slot and
// |psi-bar> to the V slot: a_H^dag = a* a_psi^dag - b a_psibar^dag,
// a_V^dag = b* a_psi^dag + a a_psibar^dag.
inline ModeTransform analysis_rotation(const std::vector<Spatial>& modes, const InputQubit& q) {
  std::vector<ModeLabel> labels;
  for (Spatial s : modes) {
    labels.push_back({s, Polarization::H});
    labels.push_back({s, Polarization::V});
  }
  auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  complex a = q.alpha(), b = q.beta();
  for (Eigen::Index k = 0; k < n; k += 2) {
    m(k, k) = std::conj(a);
    m(k, k + 1) = -b;
    m(k + 1, k) = std::conj(b);
    m(k + 1, k + 1) = a;
  }
  return {labels, labels, m};
}

// Joint photon-number distribution of (n_psi, n_psibar) per spatial mode.
using ArmPopulations = std::map<std::vector<int>, double>;

namespace detail {
inline void accumulate_populations(const FockBasisState& k, double p, const std::vector<Spatial>& modes,
                                   ArmPopulations& out) {
  std::vector<int> key;
  for (Spatial s : modes) {
    key.push_back(k.occupation({s, Polarization::H}));
    key.push_back(k.occupation({s, Polarization::V}));
  }
  out[key] += p;
}
}  // namespace detail

inline ArmPopulations arm_populations(const PureState& s, const std::vector<Spatial>& modes, const InputQubit& q) {
  ArmPopulations out;
  for (const auto& [k, a] : apply_mode_transform(s, analysis_rotation(modes, q)))
    detail::accumulate_populations(k, std::norm(a), modes, out);
  return out;
}

inline ArmPopulations arm_populations(const DensityOperator& rho, const std::vector<Spatial>& modes,
                                      const InputQubit& q) {
  ArmPopulations out;
  for (const auto& [k, v] : apply_mode_transform(rho, analysis_rotation(modes, q)))
    if (k.first == k.second) detail::accumulate_populations(k.first, v.real(), modes, out);
  return out;
}

// Joint outcome distribution of the psi arm (first) and psi-bar arm (second)
// of one spatial mode.
inline std::map<std::pair<Outcome, Outcome>, double> measure_in_basis(const DensityOperator& rho, Spatial mode,
                                                                      const InputQubit& q, const DetectorModel& d) {
  auto pops = arm_populations(rho, {mode}, q);
  int n_max = rho.limits().per_mode;
  auto elements = povm(d, n_max);
  std::map<std::pair<Outcome, Outcome>, double> out;
  for (const auto& eh : elements)
    for (const auto& ev : elements) {
      double p = 0;
      for (const auto& [n, w] : pops) p += w * eh(n[0]) * ev(n[1]);
      out[{eh.outcome, ev.outcome}] = p;
    }
  return out;
}

struct CoincidenceTable {
  double c00 = 0, c01 = 0, c10 = 0, c11 = 0;

  double total() const { return c00 + c01 + c10 + c11; }
  CoincidenceTable& operator+=(const CoincidenceTable& o) {
    c00 += o.c00;
    c01 += o.c01;
    c10 += o.c10;
    c11 += o.c11;
    return *this;
  }
  CoincidenceTable scaled(double w) const { return {c00 * w, c01 * w, c10 * w, c11 * w}; }
};

// How the output coincidences are accepted.
//
// mode_gated: each output mode must register exactly one photon regardless
// of polarization (the click element applied to its total photon number);
// C_ij then weighs the psi or psi-bar arm click alone.
// fourfold: no mode gate; an arm outcome needs a click on that arm and a
// silent sibling arm.
//
// herald_v_arm: the 0' herald is polarization resolved and its V arm must
// stay silent, which contributes one more vacuum factor.
struct DetectionScheme {
  enum class Gating { mode_gated, fourfold };
  Gating gating = Gating::mode_gated;
  bool herald_v_arm = true;

  friend bool operator==(const DetectionScheme&, const DetectionScheme&) = default;
};

inline std::string to_string(DetectionScheme::Gating g) {
  return g == DetectionScheme::Gating::mode_gated ? "mode_gated" : "fourfold";
}

// Populations keyed by (n1_psi, n1_psibar, n2_psi, n2_psibar).
inline CoincidenceTable coincidences_from_populations(const ArmPopulations& pops, const DetectorModel& d,
                                                      DetectionScheme scheme = {}) {
  CoincidenceTable t;
  for (const auto& [n, p] : pops) {
    if (p == 0) continue;
    double w = p;
    std::array<double, 2> mode1{}, mode2{};  // index 1: psi arm, 0: psi-bar arm
    if (scheme.gating == DetectionScheme::Gating::mode_gated) {
      w *= d.p_click(n[0] + n[1]) * d.p_click(n[2] + n[3]);
      mode1 = {d.p_click(n[1]), d.p_click(n[0])};
      mode2 = {d.p_click(n[3]), d.p_click(n[2])};
    } else {
      mode1 = {d.p_zero(n[0]) * d.p_click(n[1]), d.p_click(n[0]) * d.p_zero(n[1])};
      mode2 = {d.p_zero(n[2]) * d.p_click(n[3]), d.p_click(n[2]) * d.p_zero(n[3])};
    }
    if (w == 0) continue;
    t.c00 += w * mode1[0] * mode2[0];
    t.c01 += w * mode1[0] * mode2[1];
    t.c10 += w * mode1[1] * mode2[0];
    t.c11 += w * mode1[1] * mode2[1];
  }
  return t;
}

inline CoincidenceTable coincidences(const DensityOperator& rho_out, const InputQubit& q, const DetectorModel& d,
                                     DetectionScheme scheme = {}) {
  return coincidences_from_populations(arm_populations(rho_out, {Spatial::s1pp, Spatial::s2pp}, q), d, scheme);
}

inline FidelityReport fidelities_from_coincidences(const CoincidenceTable& t) {
  double p = t.total();
  if (!(p > 0)) throw ZeroSuccessProbability("no accepted coincidences");
  FidelityReport r;
  r.f1 = (t.c11 + t.c10) / p;
  r.f2 = (t.c11 + t.c01) / p;
  r.f_avg = 0.5 * (r.f1 + r.f2);
  r.p_success = p;
  return r;
}

}  // namespace clonesim
