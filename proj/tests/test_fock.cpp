#include <catch_amalgamated.hpp>

#include <random>

#include "clonesim/fock.hpp"
#include "clonesim/optics.hpp"
#include "oracle/dense_fock.hpp"

using namespace clonesim;
using Catch::Approx;
using P = Polarization;

namespace {

const ModeLabel k2H{Spatial::s2, P::H}, k2V{Spatial::s2, P::V};
const ModeLabel k1H{Spatial::s1, P::H}, k1V{Spatial::s1, P::V};

double distance(const PureState& a, const PureState& b) {
  double d = 0;
  for (const auto& [k, x] : a) d = std::max(d, std::abs(x - b.amplitude(k)));
  for (const auto& [k, y] : b) d = std::max(d, std::abs(a.amplitude(k) - y));
  return d;
}

// Random state on the given modes with at most n photons in total.
PureState random_state(const std::vector<ModeLabel>& modes, int n, std::mt19937_64& rng, FockLimits lim) {
  std::normal_distribution<double> g;
  PureState s(lim);
  for (const auto& occ : oracle::basis(static_cast<int>(modes.size()), n)) {
    FockBasisState k;
    bool fits = true;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      if (occ[i] > lim.per_mode) fits = false;
      k.set(modes[i], occ[i]);
    }
    if (fits) s.add(k, {g(rng), g(rng)});
  }
  return s.normalized();
}

}  // namespace

TEST_CASE("create adds one photon with the bosonic factor", "[fock]") {
  auto one = create(PureState::vacuum(), k2H);
  CHECK(one.size() == 1);
  CHECK(one.amplitude({{k2H, 1}}) == complex(1.0));

  auto two = create(one, k2H);
  CHECK(std::abs(two.amplitude({{k2H, 2}}) - std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("create is linear and matches the dense creation matrix", "[fock]") {
  complex a(0.6, 0.1), b(0.2, -0.77);
  PureState s;
  s.add({}, a);
  s.add({{k2V, 1}}, b);
  auto out = create(s, k2H);
  CHECK(std::abs(out.amplitude({{k2H, 1}}) - a) < 1e-15);
  CHECK(std::abs(out.amplitude({{k2H, 1}, {k2V, 1}}) - b) < 1e-15);

  // Dense check on modes (2H, 2V) truncated at two photons.
  Eigen::MatrixXcd adag = oracle::creation(2, 2, 0);
  auto basis = oracle::basis(2, 2);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = s.amplitude({{k2H, basis[i][0]}, {k2V, basis[i][1]}});
  Eigen::VectorXcd w = adag * v;
  for (std::size_t i = 0; i < basis.size(); ++i)
    CHECK(std::abs(w(static_cast<Eigen::Index>(i)) - out.amplitude({{k2H, basis[i][0]}, {k2V, basis[i][1]}})) < 1e-15);
}

TEST_CASE("create past the caps is a hard error", "[fock]") {
  auto s = PureState::basis({{k2H, 2}}, FockLimits{2, 6});
  CHECK_THROWS_AS(create(s, k2H), TruncationOverflow);
  auto full = PureState::basis({{k1H, 2}, {k1V, 2}, {k2H, 2}}, FockLimits{2, 6});
  CHECK_THROWS_AS(create(full, k2V), TruncationOverflow);
}

TEST_CASE("basis kets store no zero occupations and order canonically", "[fock]") {
  FockBasisState a{{k1H, 1}}, b{{k1V, 1}}, c{{k2H, 1}};
  CHECK(FockBasisState{{k1H, 0}} == FockBasisState{});
  CHECK(a.total() == 1);
  // Lexicographic over (spatial, polarization): occupying an earlier mode sorts later.
  CHECK(c < b);
  CHECK(b < a);
  CHECK(a.str() == "|1_1H>");
}

TEST_CASE("PDBS maps single photons per the mode relations", "[fock][pdbs]") {
  double mu = 0.3, nu = 0.65;
  auto t = pdbs({mu, nu});
  auto h = apply_mode_transform(PureState::basis({{k1H, 1}}), t);
  CHECK(std::abs(h.amplitude({{{Spatial::s1p, P::H}, 1}}) - std::sqrt(1 - mu)) < 1e-15);
  CHECK(std::abs(h.amplitude({{{Spatial::s2p, P::H}, 1}}) + std::sqrt(mu)) < 1e-15);
  CHECK(h.size() == 2);

  auto v = apply_mode_transform(PureState::basis({{k2V, 1}}), t);
  CHECK(std::abs(v.amplitude({{{Spatial::s1p, P::V}, 1}}) - std::sqrt(nu)) < 1e-15);
  CHECK(std::abs(v.amplitude({{{Spatial::s2p, P::V}, 1}}) + std::sqrt(1 - nu)) < 1e-15);
}

TEST_CASE("identity transform leaves states unchanged", "[fock]") {
  std::mt19937_64 rng(7);
  std::vector<ModeLabel> modes = {k1H, k1V, k2H, k2V};
  auto s = random_state(modes, 3, rng, FockLimits{3, 6});
  CHECK(distance(apply_mode_transform(s, ModeTransform::identity(modes)), s) < 1e-15);
}

TEST_CASE("non-unitary transforms are rejected", "[fock]") {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, 0.5;
  ModeTransform t({k1H, k1V}, {k1H, k1V}, m);
  CHECK_THROWS_AS(apply_mode_transform(PureState::basis({{k1H, 1}}), t), NonUnitaryTransform);
}

TEST_CASE("inner products", "[fock]") {
  CHECK(inner_product(PureState::vacuum(), PureState::vacuum()) == complex(1.0));
  CHECK(inner_product(PureState::basis({{k1H, 1}}), PureState::basis({{k1V, 1}})) == complex(0.0));
  auto psi = post_pdbs_state(SpdcConfig::from_gamma2(0.01), InputQubit{1.1, 0.4}, PdbsConfig::optimal());
  CHECK(inner_product(psi, psi).real() == Approx(1.0).margin(1e-12));
  CHECK(std::abs(inner_product(psi, psi).imag()) < 1e-15);

  PureState a, b;
  a.add({{k1H, 1}}, complex(0, 1));
  b.add({{k1H, 1}}, 2.0);
  CHECK(std::abs(inner_product(a, b) - complex(0, -2)) < 1e-15);  // conjugate-linear in a
}

TEST_CASE("random unitaries preserve norm and compose", "[fock][property]") {
  std::mt19937_64 rng(11);
  std::vector<ModeLabel> modes = {k1H, k1V, k2H, k2V};
  FockLimits lim{3, 6};
  for (int trial = 0; trial < 20; ++trial) {
    auto s = random_state(modes, 3, rng, lim);
    ModeTransform t(modes, modes, oracle::random_unitary(4, rng));
    ModeTransform u(modes, modes, oracle::random_unitary(4, rng));
    auto ts = apply_mode_transform(s, t);
    CHECK(std::abs(ts.norm() - s.norm()) < 1e-10);
    auto two_step = apply_mode_transform(ts, u);
    auto one_step = apply_mode_transform(s, t.then(u));
    CHECK(distance(two_step, one_step) < 1e-10);
  }
}

TEST_CASE("single photons transform exactly as the matrix acts", "[fock][property]") {
  std::mt19937_64 rng(5);
  std::vector<ModeLabel> modes = {k1H, k1V, k2H, k2V};
  Eigen::MatrixXcd u = oracle::random_unitary(4, rng);
  ModeTransform t(modes, modes, u);
  for (int i = 0; i < 4; ++i) {
    auto out = apply_mode_transform(PureState::basis({{modes[i], 1}}), t);
    for (int j = 0; j < 4; ++j) CHECK(std::abs(out.amplitude({{modes[j], 1}}) - u(i, j)) < 1e-14);
  }
}

TEST_CASE("sparse transform agrees with the dense permanent oracle", "[fock][property]") {
  std::mt19937_64 rng(3);
  struct Case {
    std::vector<ModeLabel> modes;
    int photons;
  };
  for (const auto& c : {Case{{k1H, k1V}, 2}, Case{{k1H, k1V, k2H}, 3}, Case{{k1H, k1V, k2H, k2V}, 3}}) {
    int n = static_cast<int>(c.modes.size());
    Eigen::MatrixXcd u = oracle::random_unitary(n, rng);
    Eigen::MatrixXcd dense = oracle::transform_matrix(u, c.photons);
    auto basis = oracle::basis(n, c.photons);
    ModeTransform t(c.modes, c.modes, u);
    for (std::size_t col = 0; col < basis.size(); ++col) {
      FockBasisState k;
      for (int i = 0; i < n; ++i) k.set(c.modes[static_cast<std::size_t>(i)], basis[col][static_cast<std::size_t>(i)]);
      auto out = apply_mode_transform(PureState::basis(k, FockLimits{3, 6}), t);
      for (std::size_t row = 0; row < basis.size(); ++row) {
        FockBasisState r;
        for (int i = 0; i < n; ++i)
          r.set(c.modes[static_cast<std::size_t>(i)], basis[row][static_cast<std::size_t>(i)]);
        CHECK(std::abs(out.amplitude(r) - dense(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col))) <
              1e-12);
      }
    }
  }
}

TEST_CASE("bystander modes ride along untouched", "[fock]") {
  ModeLabel anc{Spatial::s0, P::V};
  auto s = PureState::basis({{anc, 2}, {k1H, 1}});
  auto out = apply_mode_transform(s, pdbs({0.5, 0.5}));
  for (const auto& [k, a] : out) CHECK(k.occupation(anc) == 2);
  CHECK(out.norm() == Approx(1.0).margin(1e-12));
}

TEST_CASE("partial trace of a Bell pair is maximally mixed", "[fock][trace]") {
  ModeLabel a0H{Spatial::s0, P::H}, a0V{Spatial::s0, P::V};
  PureState bell;
  bell.add({{a0H, 1}, {k1V, 1}}, std::sqrt(0.5));
  bell.add({{a0V, 1}, {k1H, 1}}, std::sqrt(0.5));
  auto rho = DensityOperator::from_pure(bell);
  auto red = partial_trace(rho, {Spatial::s1});
  FockBasisState h{{k1H, 1}}, v{{k1V, 1}};
  CHECK(red.entry(h, h).real() == Approx(0.5).margin(1e-15));
  CHECK(red.entry(v, v).real() == Approx(0.5).margin(1e-15));
  CHECK(std::abs(red.entry(h, v)) < 1e-15);
  CHECK(red.size() == 2);

  auto all = partial_trace(rho, {Spatial::s0, Spatial::s1});
  CHECK(all.size() == rho.size());
  for (const auto& [k, x] : rho) CHECK(all.entry(k.first, k.second) == x);
}

TEST_CASE("tracing the heralding pair out of the leading source term leaves the Bell pair", "[fock][trace]") {
  auto src = spdc_state(SpdcConfig{0.0, 0.0, 2});
  auto red = partial_trace(DensityOperator::from_pure(src), {Spatial::s0, Spatial::s1});
  // Dense expectation: |psi+><psi+| with psi+ = (|H>_0|V>_1 + |V>_0|H>_1)/sqrt2.
  FockBasisState hv{{{Spatial::s0, P::H}, 1}, {k1V, 1}}, vh{{{Spatial::s0, P::V}, 1}, {k1H, 1}};
  CHECK(red.size() == 4);
  for (const auto& a : {hv, vh})
    for (const auto& b : {hv, vh}) CHECK(std::abs(red.entry(a, b) - 0.5) < 1e-15);
}

TEST_CASE("partial trace preserves trace and positivity", "[fock][property]") {
  std::mt19937_64 rng(19);
  std::vector<ModeLabel> modes = {{Spatial::s0, P::H}, k1H, k1V, k2H};
  for (int trial = 0; trial < 10; ++trial) {
    DensityOperator rho(FockLimits{3, 6});
    std::uniform_real_distribution<double> w(0.0, 1.0);
    for (int j = 0; j < 3; ++j) rho.add_pure(random_state(modes, 2, rng, FockLimits{3, 6}), w(rng) / 3);
    for (const auto& keep : {std::set<Spatial>{Spatial::s1}, std::set<Spatial>{Spatial::s0, Spatial::s2}}) {
      auto red = partial_trace(rho, keep);
      CHECK(std::abs(red.trace() - rho.trace()) < 1e-12);
      CHECK(red.hermiticity_error() < 1e-12);
      CHECK(red.min_eigenvalue() > -1e-10);
    }
  }
}

TEST_CASE("operator sandwich", "[fock][sandwich]") {
  std::mt19937_64 rng(23);
  std::vector<ModeLabel> modes = {k1H, k1V};
  auto psi = random_state(modes, 2, rng, FockLimits{2, 6});
  auto rho = DensityOperator::from_pure(psi);

  auto same = apply_operator_sandwich(rho, Operator::identity());
  for (const auto& [k, v] : rho) CHECK(std::abs(same.entry(k.first, k.second) - v) < 1e-15);

  auto x = random_state(modes, 2, rng, FockLimits{2, 6});
  auto proj = apply_operator_sandwich(rho, Operator::projector(x));
  complex overlap = inner_product(x, psi);
  double expect = std::norm(overlap);
  for (const auto& [a, xa] : x)
    for (const auto& [b, xb] : x) CHECK(std::abs(proj.entry(a, b) - expect * xa * std::conj(xb)) < 1e-12);

  ModeLabel h1p{Spatial::s1p, P::H};
  auto two = DensityOperator::from_pure(PureState::basis({{h1p, 2}}));
  auto damped = apply_operator_sandwich(two, damping_operator(FeedforwardConfig{0.5}, P::H));
  FockBasisState k{{h1p, 2}};
  CHECK(damped.entry(k, k).real() == Approx(0.0625).margin(1e-15));
}

TEST_CASE("density transform matches the pure-state transform", "[fock]") {
  std::mt19937_64 rng(29);
  std::vector<ModeLabel> modes = {k1H, k1V, k2H, k2V};
  auto psi = random_state(modes, 2, rng, FockLimits{3, 6});
  auto t = pdbs({0.2, 0.7});
  auto direct = DensityOperator::from_pure(apply_mode_transform(psi, t));
  auto via = apply_mode_transform(DensityOperator::from_pure(psi), t);
  CHECK(direct.size() == via.size());
  for (const auto& [k, v] : direct) CHECK(std::abs(via.entry(k.first, k.second) - v) < 1e-12);
}
