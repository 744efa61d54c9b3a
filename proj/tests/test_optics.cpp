#include <catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "clonesim/optics.hpp"

using namespace clonesim;
using Catch::Approx;
using P = Polarization;

namespace {
const double pi = std::numbers::pi;

ModeLabel m(Spatial s, P p) { return {s, p}; }

FockBasisState leading_ket(bool h0) {
  return h0 ? FockBasisState{{m(Spatial::s0, P::H), 1}, {m(Spatial::s1, P::V), 1}, {m(Spatial::s0p, P::H), 1},
                             {m(Spatial::s2, P::H), 1}}
            : FockBasisState{{m(Spatial::s0, P::V), 1}, {m(Spatial::s1, P::H), 1}, {m(Spatial::s0p, P::H), 1},
                             {m(Spatial::s2, P::H), 1}};
}

// Ideal chain: order-2 source, perfect detectors, kappa from kappa_for.
DensityOperator ideal_output(double theta, double delta, const CloneParameter& l, PdbsConfig bs) {
  InputQubit q{theta, delta};
  auto psi = post_pdbs_state(SpdcConfig{0.0, 0.0, 2}, q, bs);
  return feedforward_output(psi, FeedforwardConfig{kappa_for(l, bs)}, DetectorModel::perfect(),
                            DetectorModel::perfect());
}
}  // namespace

TEST_CASE("second-order source is the heralded Bell pair", "[optics][spdc]") {
  auto s = spdc_state(SpdcConfig{0.3, 0.7, 2});
  CHECK(s.size() == 2);
  CHECK(s.norm() == Approx(1.0).margin(1e-12));
  CHECK(std::abs(s.amplitude(leading_ket(true)) - std::sqrt(0.5)) < 1e-15);
  CHECK(std::abs(s.amplitude(leading_ket(false)) - std::sqrt(0.5)) < 1e-15);
}

TEST_CASE("third-order source terms keep the printed coefficients", "[optics][spdc]") {
  double g = 0.1;
  auto s = spdc_state(SpdcConfig{g, 0.0, 3});
  CHECK(s.norm() == Approx(1.0).margin(1e-12));
  complex lead = s.amplitude(leading_ket(true));
  FockBasisState dbl{{m(Spatial::s0, P::H), 1}, {m(Spatial::s1, P::V), 1}, {m(Spatial::s0p, P::H), 2},
                     {m(Spatial::s2, P::H), 2}};
  CHECK(std::abs(s.amplitude(dbl) / lead - g) < 1e-14);
  // epsilon carries 1/2 per ket relative to 1/sqrt2 per Bell ket; norm of epsilon is 1.
  FockBasisState eps{{m(Spatial::s0, P::H), 2}, {m(Spatial::s1, P::V), 2}, {m(Spatial::s0p, P::H), 1},
                     {m(Spatial::s2, P::H), 1}};
  CHECK(std::abs(s.amplitude(eps) / lead - g / std::sqrt(2.0)) < 1e-14);
  // The four epsilon kets share |1_H>_0' |1_H>_2 with the Bell pair; together they weigh g^2 against it.
  double eps_weight = 0;
  for (const auto& [k, a] : s)
    if (k.occupation(m(Spatial::s0p, P::H)) == 1 && !(k == leading_ket(true)) && !(k == leading_ket(false)))
      eps_weight += std::norm(a);
  CHECK(eps_weight / (2 * std::norm(lead)) == Approx(g * g).margin(1e-14));
  // Normalization follows from the construction: 1 + 2 g^2 relative weight.
  CHECK(std::norm(lead) == Approx(0.5 / (1 + 2 * g * g)).margin(1e-14));
}

TEST_CASE("source at gamma = 0 reduces to the leading term", "[optics][spdc]") {
  auto s = spdc_state(SpdcConfig{0.0, 0.0, 3});
  CHECK(s.size() == 2);
}

TEST_CASE("source needs room for three photons per mode downstream", "[optics][spdc]") {
  auto src = spdc_state(SpdcConfig::from_gamma2(0.01), FockLimits{2, 6});
  auto prepared = prepare_input(src, InputQubit{1.0, 0.0});
  CHECK_THROWS_AS(apply_mode_transform(prepared, pdbs(PdbsConfig::optimal())), TruncationOverflow);
  CHECK_NOTHROW(post_pdbs_state(SpdcConfig::from_gamma2(0.01), InputQubit{1.0, 0.0}, PdbsConfig::optimal()));
}

TEST_CASE("input preparation", "[optics]") {
  auto lead = spdc_state(SpdcConfig{0.0, 0.0, 2});
  auto same = prepare_input(lead, InputQubit{0.0, 0.0});
  for (const auto& [k, a] : lead) CHECK(std::abs(same.amplitude(k) - a) < 1e-15);

  auto flipped = prepare_input(lead, InputQubit{pi, 0.3});
  for (const auto& [k, a] : flipped) {
    CHECK(k.occupation(m(Spatial::s2, P::H)) == 0);
    CHECK(k.occupation(m(Spatial::s2, P::V)) == 1);
  }

  // Two-photon sector: |2_H>_2 -> alpha^2 |2_H> + sqrt2 alpha beta |1_H 1_V> + beta^2 |2_V>.
  InputQubit q{pi / 2, 0.0};
  auto src = spdc_state(SpdcConfig{0.1, 0.0, 3});
  auto prep = prepare_input(src, q);
  FockBasisState base{{m(Spatial::s0, P::H), 1}, {m(Spatial::s1, P::V), 1}, {m(Spatial::s0p, P::H), 2}};
  complex c = src.amplitude(base.with(m(Spatial::s2, P::H), 2));
  complex a = q.alpha(), b = q.beta();
  CHECK(std::abs(prep.amplitude(base.with(m(Spatial::s2, P::H), 2)) - c * a * a) < 1e-15);
  CHECK(std::abs(prep.amplitude(base.with(m(Spatial::s2, P::H), 1).with(m(Spatial::s2, P::V), 1)) -
                 c * std::sqrt(2.0) * a * b) < 1e-15);
  CHECK(std::abs(prep.amplitude(base.with(m(Spatial::s2, P::V), 2)) - c * b * b) < 1e-15);
  CHECK(prep.norm() == Approx(1.0).margin(1e-12));
}

TEST_CASE("PDBS limits and the optimal setting", "[optics][pdbs]") {
  auto t = pdbs({0.0, 1.0});
  const auto& u = t.matrix();
  CHECK(u(0, 0) == complex(1.0));  // 1H -> 1'H
  CHECK(u(2, 2) == complex(1.0));  // 2H -> 2'H
  CHECK(u(1, 3) == complex(1.0));  // 1V -> 2'V
  CHECK(u(3, 1) == complex(1.0));  // 2V -> 1'V
  CHECK(t.is_unitary());

  double mu = kMu0, nu = kNu0;
  CHECK(1 - 2 * mu == Approx(1 / std::sqrt(3.0)).margin(1e-15));
  CHECK(2 * nu - 1 == Approx(1 / std::sqrt(3.0)).margin(1e-15));
  CHECK(std::sqrt(2 * mu * nu) == Approx(1 / std::sqrt(3.0)).margin(1e-15));
  CHECK(mu == Approx(0.21132486540518713).margin(1e-15));
}

TEST_CASE("PDBS is unitary for random settings", "[optics][pdbs][property]") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) CHECK(pdbs({u(rng), u(rng)}).unitarity_error() <= 1e-12);
}

TEST_CASE("two H photons bunch on the balanced PDBS", "[optics][pdbs]") {
  auto in = PureState::basis({{m(Spatial::s1, P::H), 1}, {m(Spatial::s2, P::H), 1}}, FockLimits{2, 6});
  auto out = apply_mode_transform(in, pdbs({0.5, 0.5}));
  CHECK(std::abs(out.amplitude({{m(Spatial::s1p, P::H), 1}, {m(Spatial::s2p, P::H), 1}})) <= 1e-15);
  CHECK(std::norm(out.amplitude({{m(Spatial::s1p, P::H), 2}})) == Approx(0.5).margin(1e-15));
}

TEST_CASE("damping operator", "[optics][damping]") {
  auto one = damping_operator(FeedforwardConfig{1.0}, P::V);
  auto v = PureState::basis({{m(Spatial::s1p, P::V), 1}, {m(Spatial::s2p, P::H), 1}});
  CHECK(one.apply(v).amplitude(v.begin()->first) == complex(-1.0));

  double k = 0.37;
  auto hh = PureState::basis({{m(Spatial::s1p, P::H), 1}, {m(Spatial::s2p, P::H), 1}});
  CHECK(std::abs(damping_operator({k}, P::H).apply(hh).amplitude(hh.begin()->first) - k * k) < 1e-15);

  auto vv = PureState::basis({{m(Spatial::s2p, P::V), 2}});
  CHECK(std::abs(damping_operator({0.5}, P::V).apply(vv).amplitude(vv.begin()->first) - 0.25) < 1e-15);

  // Other modes are untouched.
  auto other = PureState::basis({{m(Spatial::s0, P::H), 2}});
  CHECK(damping_operator({0.2}, P::H).apply(other).amplitude(other.begin()->first) == complex(1.0));
  CHECK_THROWS_AS(damping_operator({1.5}, P::H), DomainError);
}

TEST_CASE("kappa_for", "[optics][kappa]") {
  for (double t : {0.2, 0.9, 1.4}) {
    auto l = lambda_from_theta(t);
    CHECK(kappa_for(l, PdbsConfig::optimal()) == Approx(l.lambda_bar() / l.lambda()).margin(1e-14));
  }
  CHECK(kappa_for(CloneParameter(1.0), PdbsConfig::balanced(0.3)) == 0.0);
  CHECK(kappa_for(CloneParameter::phase_covariant(), PdbsConfig::optimal()) == Approx(1.0).margin(1e-14));
  // Mirror point of the band needs the opposite sign.
  auto l = lambda_from_theta(0.8);
  CHECK(kappa_for(l, PdbsConfig::balanced(1 - kMu0)) == Approx(-l.lambda_bar() / l.lambda()).margin(1e-14));
  CHECK_THROWS_AS(kappa_for(CloneParameter::phase_covariant(), PdbsConfig::balanced(0.05)), InfeasibleConfiguration);
  CHECK_THROWS_AS(kappa_for(l, PdbsConfig::balanced(0.0)), InfeasibleConfiguration);
  CHECK_THROWS_AS(kappa_for(l, PdbsConfig{0.3, 0.3}), DomainError);

  auto c = kappa_clamped(CloneParameter::phase_covariant(), PdbsConfig::balanced(0.05));
  CHECK_FALSE(c.feasible);
  CHECK(c.kappa == 1.0);
  auto neg = kappa_clamped(CloneParameter::phase_covariant(), PdbsConfig::balanced(0.95));
  CHECK_FALSE(neg.feasible);
  CHECK(neg.kappa == -1.0);
}

TEST_CASE("ideal chain success probability is 1/(6 Lambda^2)", "[optics][feedforward]") {
  for (double t : {0.0, 0.5, 1.2, pi / 2}) {
    auto l = lambda_from_theta(t);
    auto f = clone_fidelities(ideal_output(t, 0.0, l, PdbsConfig::optimal()), {t, 0.0});
    CHECK(f[2] == Approx(1 / (6 * l.lambda() * l.lambda())).margin(1e-12));
  }
}

TEST_CASE("pole input with kappa = 0 yields two H photons", "[optics][feedforward]") {
  auto rho = ideal_output(0.0, 0.0, CloneParameter(1.0), PdbsConfig::optimal());
  double total = 0, hh = 0;
  for (const auto& [k, v] : rho) {
    if (k.first != k.second || k.first.total(Spatial::s1pp) != 1 || k.first.total(Spatial::s2pp) != 1) continue;
    total += v.real();
    if (k.first.occupation(m(Spatial::s1pp, P::H)) == 1 && k.first.occupation(m(Spatial::s2pp, P::H)) == 1)
      hh += v.real();
  }
  CHECK(hh == Approx(total).margin(1e-15));
  CHECK(hh == Approx(1.0 / 6).margin(1e-12));
}

TEST_CASE("success probability along the balanced line", "[optics][feedforward]") {
  for (double mu : {kMu0, 0.3, 0.45, 0.6, 1 - kMu0}) {
    for (double t : {0.4, 1.1}) {
      auto l = lambda_from_theta(t);
      auto f = clone_fidelities(ideal_output(t, 0.0, l, PdbsConfig::balanced(mu)), {t, 0.0});
      double expect = (1 - 2 * mu) * (1 - 2 * mu) / (2 * l.lambda() * l.lambda());
      CHECK(f[2] == Approx(expect).margin(1e-12));
      CHECK(f[0] == Approx(single_copy_fidelity(t, l)).margin(1e-9));
      CHECK(f[1] == Approx(single_copy_fidelity(t, l)).margin(1e-9));
    }
  }
}

TEST_CASE("output state is Hermitian and positive", "[optics][property]") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 8; ++i) {
    double t = pi * u(rng), mu = 0.05 + 0.9 * u(rng), nu = 0.05 + 0.9 * u(rng);
    PdbsConfig bs{mu, nu};
    InputQubit q{t, 2 * pi * u(rng)};
    auto psi = post_pdbs_state(SpdcConfig::from_gamma2(0.1 * u(rng)), q, bs);
    auto d = i % 2 ? DetectorModel::counter(u(rng), 0.1 * u(rng)) : DetectorModel::on_off(u(rng), 0.1 * u(rng));
    auto rho = feedforward_output(psi, {kappa_clamped(lambda_from_theta(t), bs).kappa}, d, d);
    CHECK(rho.hermiticity_error() <= 1e-10);
    CHECK(rho.min_eigenvalue() >= -1e-10);
    CHECK(rho.trace().real() <= 1 + 1e-12);
    CHECK(std::abs(rho.trace().imag()) < 1e-12);
  }
}

TEST_CASE("pipeline fidelities match the closed form on a theta grid", "[optics][property]") {
  for (int i = 0; i < 25; ++i) {
    double t = pi * i / 24;
    auto l = lambda_from_theta(t);
    auto f = clone_fidelities(ideal_output(t, 0.0, l, PdbsConfig::optimal()), {t, 0.0});
    CHECK(std::abs(f[0] - single_copy_fidelity(t, l)) < 1e-9);
    CHECK(std::abs(f[1] - single_copy_fidelity(t, l)) < 1e-9);
    CHECK(std::abs(f[2] - success_probability_ideal(l)) < 1e-9);
  }
}

TEST_CASE("pipeline fidelity is independent of the input azimuth", "[optics][property]") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 10; ++i) {
    double t = pi * u(rng);
    auto l = lambda_from_theta(t);
    auto a = clone_fidelities(ideal_output(t, 0.0, l, PdbsConfig::optimal()), {t, 0.0});
    double d = 2 * pi * u(rng);
    auto b = clone_fidelities(ideal_output(t, d, l, PdbsConfig::optimal()), {t, d});
    CHECK(std::abs(a[0] - b[0]) < 1e-9);
    CHECK(std::abs(a[1] - b[1]) < 1e-9);
  }
}

TEST_CASE("pipeline fidelity is mirror symmetric", "[optics][property]") {
  for (int i = 0; i <= 12; ++i) {
    double t = pi * i / 24;
    auto l = lambda_from_theta(t);
    auto a = clone_fidelities(ideal_output(t, 0.0, l, PdbsConfig::optimal()), {t, 0.0});
    auto b = clone_fidelities(ideal_output(pi - t, 0.0, l, PdbsConfig::optimal()), {pi - t, 0.0});
    CHECK(std::abs(a[0] - b[0]) < 1e-9);
    CHECK(std::abs(a[1] - b[1]) < 1e-9);
  }
}

TEST_CASE("SPDC phase does not change detected quantities", "[optics][property]") {
  InputQubit q{1.0, 0.2};
  auto l = lambda_from_theta(1.0);
  auto run = [&](double phi) {
    auto psi = post_pdbs_state(SpdcConfig{0.1, phi, 3}, q, PdbsConfig::optimal());
    auto d = DetectorModel::counter(0.8, 0.001);
    return coincidences(feedforward_output(psi, {kappa_for(l, PdbsConfig::optimal())}, d, d), q, d);
  };
  auto a = run(0.0), b = run(1.3);
  CHECK(std::abs(a.c11 - b.c11) < 1e-14);
  CHECK(std::abs(a.c10 - b.c10) < 1e-14);
  CHECK(std::abs(a.c01 - b.c01) < 1e-14);
  CHECK(std::abs(a.c00 - b.c00) < 1e-14);
}
