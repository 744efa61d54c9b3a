// Self-check suite behind the `validate` command. Each check returns a
// pass flag and a one-line detail.
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "clonesim/analytic.hpp"
#include "clonesim/detectors.hpp"
#include "clonesim/experiments.hpp"
#include "clonesim/fock.hpp"
#include "clonesim/optics.hpp"

namespace clonesim {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {
inline std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

// Order-2 source, perfect detectors, optimal PDBS and kappa = Lbar/Lambda.
inline std::array<double, 3> ideal_pipeline_fidelities(double theta, double delta, const CloneParameter& l,
                                                       PdbsConfig bs = PdbsConfig::optimal()) {
  InputQubit q{theta, delta};
  PureState psi = post_pdbs_state(SpdcConfig{0.0, 0.0, 2}, q, bs);
  auto rho = feedforward_output(psi, FeedforwardConfig{kappa_for(l, bs)}, DetectorModel::perfect(),
                                DetectorModel::perfect());
  return clone_fidelities(rho, q);
}
}  // namespace detail

inline std::vector<CheckResult> run_validation() {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  {
    double worst = 0;
    for (int i = 0; i < 200; ++i) worst = std::max(worst, pdbs({unit(rng), unit(rng)}).unitarity_error());
    out.push_back({"pdbs_unitarity", worst <= 1e-12, "200 random (mu, nu), max error " + detail::sci(worst)});
  }
  {
    double worst = 0, lo = 0, hi = 0;
    for (int i = 0; i < 100; ++i) {
      double eta = unit(rng), zeta = 0.2 * unit(rng);
      for (const auto& d : {DetectorModel::counter(eta, zeta), DetectorModel::on_off(eta, zeta)}) {
        auto els = povm(d, 6);
        for (int m = 0; m <= 6; ++m) {
          double s = 0;
          for (const auto& e : els) {
            s += e(m);
            lo = std::min(lo, e(m));
            hi = std::max(hi, e(m) - 1.0);
          }
          worst = std::max(worst, std::abs(s - 1.0));
        }
      }
    }
    bool ok = worst <= 1e-12 && lo >= -1e-12 && hi <= 1e-12;
    out.push_back({"povm_completeness", ok, "max |sum - 1| " + detail::sci(worst) + " over levels 0..6"});
  }
  {
    double herm = 0, min_eig = 0;
    for (int i = 0; i < 6; ++i) {
      double theta = std::numbers::pi * unit(rng), delta = 2 * std::numbers::pi * unit(rng);
      double mu = 0.1 + 0.8 * unit(rng);
      PdbsConfig bs{mu, 1.0 - mu};
      auto l = lambda_from_theta(theta);
      auto k = kappa_clamped(l, bs);
      InputQubit q{theta, delta};
      PureState psi = post_pdbs_state(SpdcConfig::from_gamma2(0.01), q, bs);
      double eta = 0.5 + 0.5 * unit(rng), zeta = 0.01 * unit(rng);
      auto d = i % 2 ? DetectorModel::on_off(eta, zeta) : DetectorModel::counter(eta, zeta);
      auto rho = feedforward_output(psi, FeedforwardConfig{k.kappa}, d, d);
      herm = std::max(herm, rho.hermiticity_error());
      min_eig = std::min(min_eig, rho.min_eigenvalue());
    }
    out.push_back({"rho_out_hermitian_psd", herm <= 1e-10 && min_eig >= -1e-10,
                   "hermiticity " + detail::sci(herm) + ", min eigenvalue " + detail::sci(min_eig)});
  }
  {
    double worst_f = 0, worst_p = 0;
    for (int i = 0; i < 25; ++i) {
      double theta = std::numbers::pi * i / 24.0;
      auto l = lambda_from_theta(theta);
      auto f = detail::ideal_pipeline_fidelities(theta, 0.0, l);
      double expect = single_copy_fidelity(theta, l);
      worst_f = std::max({worst_f, std::abs(f[0] - expect), std::abs(f[1] - expect)});
      worst_p = std::max(worst_p, std::abs(f[2] - success_probability_ideal(l)));
    }
    out.push_back({"oracle_equivalence", worst_f <= 1e-9 && worst_p <= 1e-9,
                   "25 theta points, max |dF| " + detail::sci(worst_f) + ", max |dP| " + detail::sci(worst_p)});
  }
  {
    double worst = 0;
    for (int i = 0; i < 8; ++i) {
      double theta = std::numbers::pi * unit(rng);
      auto l = lambda_from_theta(theta);
      auto a = detail::ideal_pipeline_fidelities(theta, 0.0, l);
      auto b = detail::ideal_pipeline_fidelities(theta, 2 * std::numbers::pi * unit(rng), l);
      worst = std::max({worst, std::abs(a[0] - b[0]), std::abs(a[1] - b[1])});
    }
    out.push_back({"delta_independence", worst <= 1e-9, "max |dF| " + detail::sci(worst)});
  }
  {
    double worst = 0;
    for (int i = 0; i < 8; ++i) {
      double theta = std::numbers::pi * unit(rng);
      auto a = detail::ideal_pipeline_fidelities(theta, 0.0, lambda_from_theta(theta));
      auto b = detail::ideal_pipeline_fidelities(std::numbers::pi - theta, 0.0, lambda_from_theta(theta));
      worst = std::max({worst, std::abs(a[0] - b[0]), std::abs(a[1] - b[1])});
    }
    out.push_back({"mirror_symmetry", worst <= 1e-9, "max |F(theta) - F(pi - theta)| " + detail::sci(worst)});
  }
  {
    double worst = 0;
    for (int i = 0; i <= 50; ++i)
      worst = std::max(worst,
                       std::abs(single_copy_fidelity(std::numbers::pi * i / 50, CloneParameter::universal()) - 5.0 / 6));
    out.push_back({"uc_flatness", worst <= 1e-12, "max |F - 5/6| " + detail::sci(worst)});
  }
  {
    PureState two = PureState::basis(
        {{{Spatial::s1, Polarization::H}, 1}, {{Spatial::s2, Polarization::H}, 1}}, FockLimits{2, 6});
    auto outp = apply_mode_transform(two, pdbs({0.5, 0.5}));
    complex c = outp.amplitude({{{Spatial::s1p, Polarization::H}, 1}, {{Spatial::s2p, Polarization::H}, 1}});
    out.push_back({"hom_dip", std::abs(c) <= 1e-15, "coincidence amplitude " + detail::sci(std::abs(c))});
  }
  {
    // Off the balanced line the clones become asymmetric; this is the
    // expected outcome, so the check passes when F1 and F2 differ.
    SimulationConfig c;
    c.spdc = SpdcConfig{0.0, 0.0, 2};
    c.detector = DetectorModel::perfect();
    c.pdbs = {0.3, 0.5};
    c.kappa_rule = KappaRule::clamped;
    auto r = average_over_inputs(c, 16);
    double gap = std::abs(r.f1 - r.f2);
    out.push_back({"asymmetric_off_balanced_line", gap > 1e-3,
                   "mu = 0.3, nu = 0.5: |F1 - F2| = " + detail::sci(gap) + " (asymmetry expected)"});
  }
  {
    auto l = CloneParameter::phase_covariant();
    PdbsConfig bs = PdbsConfig::balanced(0.05);
    bool threw = false;
    try {
      (void)kappa_for(l, bs);
    } catch (const InfeasibleConfiguration&) {
      threw = true;
    }
    auto k = kappa_clamped(l, bs);
    out.push_back({"kappa_clamp_flagged", threw && !k.feasible && k.kappa == 1.0,
                   "mu = 0.05, Lambda = 1/sqrt2: required kappa " + detail::sci(kappa_unchecked(l, bs)) +
                       ", clamped to " + detail::sci(k.kappa)});
  }
  return out;
}

}  // namespace clonesim
