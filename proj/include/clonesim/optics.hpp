// Photonic cloning pipeline: SPDC source, input preparation on mode 2, the
// polarization-dependent beam splitter (PDBS), heralded feedforward damping
// and the conditional output state on modes 1'' and 2''.
//
// Mode roles: 0 and 1 carry the entangled ancilla pair, 0' heralds the
// second source pair whose partner in mode 2 is the qubit to be cloned.
// Modes 1 and 2 meet on the PDBS and leave as 1' and 2', which are relabeled
// 1'' and 2'' after the feedforward.
#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "clonesim/analytic.hpp"
#include "clonesim/detectors.hpp"
#include "clonesim/errors.hpp"
#include "clonesim/fock.hpp"

namespace clonesim {

inline const double kMu0 = (1.0 - 1.0 / std::numbers::sqrt3) / 2.0;
inline const double kNu0 = (1.0 + 1.0 / std::numbers::sqrt3) / 2.0;

// The third-order source term can put three photons into one PDBS output
// mode, so the pipeline runs with a per-mode cap of 3.
inline constexpr FockLimits kPipelineLimits{3, 6};

inline constexpr double kKappaTolerance = 1e-12;

struct SpdcConfig {
  double gamma = 0.1;
  double phi = 0.0;
  int order = 3;

  static SpdcConfig from_gamma2(double gamma2, int order = 3, double phi = 0.0) {
    return {std::sqrt(gamma2), phi, order};
  }
  double gamma2() const { return gamma * gamma; }

  void validate() const {
    if (!(gamma >= 0.0) || gamma * gamma > 0.1 + 1e-15) throw DomainError("SPDC gamma^2 must lie in [0, 0.1]");
    if (order != 2 && order != 3) throw DomainError("SPDC order must be 2 or 3");
  }
};

struct PdbsConfig {
  double mu = kMu0;
  double nu = kNu0;

  static PdbsConfig optimal() { return {}; }
  // A point on the mu + nu = 1 line.
  static PdbsConfig balanced(double mu) { return {mu, 1.0 - mu}; }

  void validate() const {
    if (!(mu >= 0.0 && mu <= 1.0 && nu >= 0.0 && nu <= 1.0)) throw DomainError("PDBS mu and nu must lie in [0, 1]");
  }
};

// kappa is signed: PDBS settings with mu > 1/2 need a negative damping
// amplitude to keep the right interference sign.
struct FeedforwardConfig {
  double kappa = 1.0;

  void validate() const {
    if (!(std::abs(kappa) <= 1.0 + kKappaTolerance)) throw DomainError("feedforward |kappa| must not exceed 1");
  }
};

namespace detail {
inline void add_psi_plus(PureState& s, FockBasisState rest, complex amp) {
  const double r = std::numbers::sqrt2 / 2;
  s.add(rest.with({Spatial::s0, Polarization::H}, 1).with({Spatial::s1, Polarization::V}, 1), amp * r);
  s.add(rest.with({Spatial::s0, Polarization::V}, 1).with({Spatial::s1, Polarization::H}, 1), amp * r);
}
}  // namespace detail

// Source state through third order in gamma. The common factor gamma^2
// e^{2i phi} is divided out before normalizing so gamma = 0 is well defined.
inline PureState spdc_state(const SpdcConfig& cfg, FockLimits limits = kPipelineLimits) {
  cfg.validate();
  using P = Polarization;
  PureState s(limits);
  FockBasisState one_one{{{Spatial::s0p, P::H}, 1}, {{Spatial::s2, P::H}, 1}};
  detail::add_psi_plus(s, one_one, 1.0);
  if (cfg.order >= 3 && cfg.gamma > 0) {
    complex g = std::polar(cfg.gamma, cfg.phi);
    FockBasisState two_two{{{Spatial::s0p, P::H}, 2}, {{Spatial::s2, P::H}, 2}};
    detail::add_psi_plus(s, two_two, g);
    // epsilon_01 |1_H>_0' |1_H>_2
    s.add(one_one.with({Spatial::s0, P::H}, 1).with({Spatial::s0, P::V}, 1), 0.5 * g);
    s.add(one_one.with({Spatial::s1, P::H}, 1).with({Spatial::s1, P::V}, 1), 0.5 * g);
    s.add(one_one.with({Spatial::s0, P::H}, 2).with({Spatial::s1, P::V}, 2), 0.5 * g);
    s.add(one_one.with({Spatial::s0, P::V}, 2).with({Spatial::s1, P::H}, 2), 0.5 * g);
  }
  return s.normalized();
}

// a_2H^dag -> alpha a_2H^dag + beta a_2V^dag, completed to a unitary on mode 2.
inline ModeTransform input_preparation(const InputQubit& q) {
  Eigen::Matrix2cd m;
  complex a = q.alpha(), b = q.beta();
  m << a, b, -std::conj(b), std::conj(a);
  std::vector<ModeLabel> modes = {{Spatial::s2, Polarization::H}, {Spatial::s2, Polarization::V}};
  return {modes, modes, m};
}

inline PureState prepare_input(const PureState& state, const InputQubit& q) {
  return apply_mode_transform(state, input_preparation(q));
}

inline ModeTransform pdbs(const PdbsConfig& cfg) {
  cfg.validate();
  using P = Polarization;
  std::vector<ModeLabel> in = {{Spatial::s1, P::H}, {Spatial::s1, P::V}, {Spatial::s2, P::H}, {Spatial::s2, P::V}};
  std::vector<ModeLabel> out = {{Spatial::s1p, P::H}, {Spatial::s1p, P::V}, {Spatial::s2p, P::H}, {Spatial::s2p, P::V}};
  double sm = std::sqrt(cfg.mu), cm = std::sqrt(1.0 - cfg.mu);
  double sn = std::sqrt(cfg.nu), cn = std::sqrt(1.0 - cfg.nu);
  Eigen::Matrix4cd m;
  m << cm, 0, -sm, 0,  //
      0, cn, 0, sn,    //
      sm, 0, cm, 0,    //
      0, sn, 0, -cn;
  return {in, out, m};
}

// |Psi'>: source, prepared input, PDBS.
inline PureState post_pdbs_state(const SpdcConfig& spdc, const InputQubit& q, const PdbsConfig& bs) {
  return apply_mode_transform(prepare_input(spdc_state(spdc), q), pdbs(bs));
}

inline double int_pow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// D_H multiplies by kappa^m for m H photons in 1' and 2'; D_V by (-kappa)^n
// for n V photons there.
inline Operator damping_operator(const FeedforwardConfig& cfg, Polarization pol) {
  cfg.validate();
  double k = pol == Polarization::H ? cfg.kappa : -cfg.kappa;
  return Operator::diagonal([k, pol](const FockBasisState& b) -> complex {
    int n = b.occupation({Spatial::s1p, pol}) + b.occupation({Spatial::s2p, pol});
    return int_pow(k, n);
  });
}

inline double kappa_unchecked(const CloneParameter& p, const PdbsConfig& cfg) {
  return p.lambda_bar() * (1.0 - 2.0 * cfg.mu) / (p.lambda() * std::sqrt(2.0 * cfg.mu * cfg.nu));
}

inline double kappa_for(const CloneParameter& p, const PdbsConfig& cfg) {
  cfg.validate();
  if (std::abs(cfg.mu + cfg.nu - 1.0) > 1e-12) throw DomainError("kappa_for requires mu + nu = 1");
  if (cfg.mu * cfg.nu == 0.0) throw InfeasibleConfiguration("PDBS with mu*nu = 0 admits no damping amplitude");
  double k = kappa_unchecked(p, cfg);
  if (std::abs(k) > 1.0 + kKappaTolerance)
    throw InfeasibleConfiguration("required |kappa| = " + std::to_string(std::abs(k)) + " exceeds 1");
  return std::clamp(k, -1.0, 1.0);
}

struct ClampedKappa {
  double kappa = 0.0;
  bool feasible = true;
};

// For free (mu, nu) sweeps: the same formula at the given point, clamped to
// [-1, 1] with its sign kept. mu*nu = 0 is flagged and clamped to +1.
inline ClampedKappa kappa_clamped(const CloneParameter& p, const PdbsConfig& cfg) {
  cfg.validate();
  if (cfg.mu * cfg.nu == 0.0) return {1.0, false};
  double k = kappa_unchecked(p, cfg);
  if (std::abs(k) <= 1.0 + kKappaTolerance) return {std::clamp(k, -1.0, 1.0), true};
  return {k > 0 ? 1.0 : -1.0, false};
}

// One herald pattern: photon numbers in 0 and 0', which polarization of
// mode 0 triggered the feedforward, and the damped output on 1'', 2''.
struct HeraldBranch {
  Polarization fired = Polarization::H;
  int n0h = 0, n0v = 0, n0p_h = 0, n0p_v = 0;
  PureState state;  // unnormalized
};

// Detector-independent decomposition of the feedforward. Both damping
// branches are kept for every pattern; detector weights pick them later.
inline std::vector<HeraldBranch> herald_branches(const PureState& psi_prime, const FeedforwardConfig& ff) {
  std::map<FockBasisState, PureState> groups;
  const std::set<Spatial> heralds = {Spatial::s0, Spatial::s0p};
  const std::set<Spatial> outputs = {Spatial::s1p, Spatial::s2p};
  for (const auto& [k, a] : psi_prime) {
    auto it = groups.try_emplace(k.restricted(heralds), psi_prime.limits()).first;
    it->second.add(k.restricted(outputs), a);
  }
  Operator dh = damping_operator(ff, Polarization::H), dv = damping_operator(ff, Polarization::V);
  std::vector<HeraldBranch> out;
  for (const auto& [h, phi] : groups) {
    for (Polarization pol : {Polarization::H, Polarization::V}) {
      HeraldBranch b;
      b.fired = pol;
      b.n0h = h.occupation({Spatial::s0, Polarization::H});
      b.n0v = h.occupation({Spatial::s0, Polarization::V});
      b.n0p_h = h.occupation({Spatial::s0p, Polarization::H});
      b.n0p_v = h.occupation({Spatial::s0p, Polarization::V});
      PureState damped = (pol == Polarization::H ? dh : dv).apply(phi);
      b.state = relabel(relabel(damped, Spatial::s1p, Spatial::s1pp), Spatial::s2p, Spatial::s2pp);
      out.push_back(std::move(b));
    }
  }
  return out;
}

// Probability weight of a herald branch: the fired polarization of mode 0
// clicks while the other stays silent, and 0' registers one photon.
inline double herald_weight(const HeraldBranch& b, const DetectorModel& trigger, const DetectorModel& herald,
                            DetectionScheme scheme = {}) {
  double w = b.fired == Polarization::H ? trigger.p_click(b.n0h) * trigger.p_zero(b.n0v)
                                        : trigger.p_click(b.n0v) * trigger.p_zero(b.n0h);
  if (scheme.herald_v_arm)
    w *= herald.p_click(b.n0p_h) * herald.p_zero(b.n0p_v);
  else
    w *= herald.p_click(b.n0p_h + b.n0p_v);
  return w;
}

inline PureStateMixture feedforward_mixture(const std::vector<HeraldBranch>& branches, const DetectorModel& trigger,
                                            const DetectorModel& herald, DetectionScheme scheme = {}) {
  PureStateMixture m;
  for (const auto& b : branches) {
    double w = herald_weight(b, trigger, herald, scheme);
    if (w != 0 && !b.state.empty()) m.terms.emplace_back(w, b.state);
  }
  return m;
}

// Conditional output state on modes 1'', 2'' (sub-normalized).
inline DensityOperator feedforward_output(const PureState& psi_prime, const FeedforwardConfig& cfg,
                                          const DetectorModel& trigger, const DetectorModel& herald,
                                          DetectionScheme scheme = {}) {
  trigger.validate();
  herald.validate();
  return feedforward_mixture(herald_branches(psi_prime, cfg), trigger, herald, scheme).to_density(psi_prime.limits());
}

// Single-copy fidelities of rho_out restricted to one photon in each output
// mode, computed by partial trace and overlap with the input qubit.
// Returns {F1, F2, probability of the one-photon-per-mode sector}.
inline std::array<double, 3> clone_fidelities(const DensityOperator& rho_out, const InputQubit& q) {
  auto one_each = [](const FockBasisState& k) {
    return k.total(Spatial::s1pp) == 1 && k.total(Spatial::s2pp) == 1 && k.total() == 2;
  };
  DensityOperator projected(rho_out.limits());
  for (const auto& [k, v] : rho_out)
    if (one_each(k.first) && one_each(k.second)) projected.add(k.first, k.second, v);
  double p = projected.trace().real();
  if (!(p > 0)) throw ZeroSuccessProbability("output has no one-photon-per-mode component");
  std::array<double, 3> out{0, 0, p};
  std::array<Spatial, 2> modes = {Spatial::s1pp, Spatial::s2pp};
  for (int i = 0; i < 2; ++i) {
    DensityOperator reduced = partial_trace(projected, {modes[i]});
    FockBasisState h{{{modes[i], Polarization::H}, 1}}, v{{{modes[i], Polarization::V}, 1}};
    complex a = q.alpha(), b = q.beta();
    complex f = std::conj(a) * a * reduced.entry(h, h) + std::conj(a) * b * reduced.entry(h, v) +
                std::conj(b) * a * reduced.entry(v, h) + std::conj(b) * b * reduced.entry(v, v);
    out[i] = f.real() / p;
  }
  return out;
}

}  // namespace clonesim
