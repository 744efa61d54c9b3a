// Closed-form cloning math: the Lambda rules, the ideal 1->2 cloning
// isometry, single-copy fidelities, input distributions and their Legendre
// moments, and distribution averages.
//
// Qubit convention: |0> is H, |1> is V, and the input is
// cos(theta/2)|0> + e^{i delta} sin(theta/2)|1>.
#pragma once

#include <boost/math/special_functions/legendre.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "clonesim/errors.hpp"
#include "clonesim/quadrature.hpp"

namespace clonesim {

inline constexpr double kLambdaTolerance = 1e-12;

class CloneParameter {
 public:
  // Admissible range is [1/sqrt2, 1], with kLambdaTolerance of slack at both ends.
  explicit CloneParameter(double lambda) {
    if (!(lambda >= std::numbers::sqrt2 / 2 - kLambdaTolerance && lambda <= 1.0 + kLambdaTolerance))
      throw DomainError("Lambda outside [1/sqrt2, 1]: " + std::to_string(lambda));
    lambda_ = std::min(lambda, 1.0);
    lambda_bar_ = std::sqrt(std::max(0.0, 1.0 - lambda_ * lambda_));
  }

  double lambda() const { return lambda_; }
  double lambda_bar() const { return lambda_bar_; }

  static CloneParameter universal() { return CloneParameter(std::sqrt(2.0 / 3.0)); }
  static CloneParameter phase_covariant() { return CloneParameter(std::sqrt(0.5)); }

 private:
  double lambda_ = 1.0;
  double lambda_bar_ = 0.0;
};

struct InputQubit {
  double theta = 0.0;
  double delta = 0.0;

  std::complex<double> alpha() const { return std::cos(theta / 2); }
  std::complex<double> beta() const { return std::polar(1.0, delta) * std::sin(theta / 2); }
};

struct FidelityReport {
  double f1 = 0;
  double f2 = 0;
  double f_avg = 0;
  double p_success = 0;
};

inline double p_poly(double theta) {
  double c2 = std::cos(theta) * std::cos(theta);
  return 2.0 - 4.0 * c2 + 3.0 * c2 * c2;
}

inline CloneParameter lambda_from_theta(double theta) {
  double c2 = std::cos(theta) * std::cos(theta);
  return CloneParameter(std::sqrt(0.5 + c2 / (2.0 * std::sqrt(p_poly(theta)))));
}

inline CloneParameter lambda_from_a2(double a2) {
  if (!(a2 >= -0.5 && a2 <= 1.0)) throw DomainError("a2 outside [-1/2, 1]: " + std::to_string(a2));
  double inner = 1.0 - 8.0 * (1.0 - a2) * (1.0 - a2) / (3.0 * (3.0 + 4.0 * a2 * a2 - 4.0 * a2));
  if (inner < 0) throw DomainError("negative radicand in Lambda(a2)");
  return CloneParameter(std::sqrt(0.5 + 0.5 * std::sqrt(inner)));
}

// Azimuth-independent input distribution. `density` is per solid angle and
// only used by the custom kind; the other kinds are handled in closed form.
struct QubitDistribution {
  enum class Kind { universal, phase_covariant, mirror, custom };

  Kind kind = Kind::universal;
  double theta = 0.0;  // mirror: the circle at theta and its image at pi - theta
  std::function<double(double)> density;

  static QubitDistribution universal() { return {Kind::universal, 0.0, {}}; }
  static QubitDistribution phase_covariant() { return {Kind::phase_covariant, std::numbers::pi / 2, {}}; }
  static QubitDistribution mirror(double theta) { return {Kind::mirror, theta, {}}; }
  static QubitDistribution custom(std::function<double(double)> g) { return {Kind::custom, 0.0, std::move(g)}; }
};

inline std::string to_string(QubitDistribution::Kind k) {
  switch (k) {
    case QubitDistribution::Kind::universal: return "universal";
    case QubitDistribution::Kind::phase_covariant: return "phase_covariant";
    case QubitDistribution::Kind::mirror: return "mirror";
    case QubitDistribution::Kind::custom: return "custom";
  }
  return "?";
}

inline constexpr double kLegendreTolerance = 1e-10;
inline constexpr double kAverageTolerance = 1e-6;

// a_n = int dphi int d(cos theta) g P_n(cos theta), n = 0..n_max.
inline std::vector<double> legendre_coefficients(const QubitDistribution& dist, int n_max) {
  if (n_max < 2) throw DomainError("legendre_coefficients needs n_max >= 2");
  std::vector<double> a(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    double& an = a[static_cast<std::size_t>(n)];
    switch (dist.kind) {
      case QubitDistribution::Kind::universal:
        an = n == 0 ? 1.0 : 0.0;
        break;
      case QubitDistribution::Kind::phase_covariant:
        an = boost::math::legendre_p(n, 0.0);
        break;
      case QubitDistribution::Kind::mirror: {
        double c = std::cos(dist.theta);
        an = 0.5 * (boost::math::legendre_p(n, c) + boost::math::legendre_p(n, -c));
        break;
      }
      case QubitDistribution::Kind::custom:
        an = 2.0 * std::numbers::pi *
             integrate_adaptive(
                 [&](double x) { return dist.density(std::acos(x)) * boost::math::legendre_p(n, x); }, -1.0,
                 1.0, kLegendreTolerance / (2.0 * std::numbers::pi));
        break;
    }
  }
  return a;
}

// Amplitudes over |c1 c2 anc>, index 4*c1 + 2*c2 + anc.
using ThreeQubitState = std::array<std::complex<double>, 8>;

inline ThreeQubitState ideal_clone(const InputQubit& q, const CloneParameter& p) {
  const double L = p.lambda(), Lb = p.lambda_bar() / std::numbers::sqrt2;
  auto a = q.alpha(), b = q.beta();
  ThreeQubitState out{};
  out[0b000] += a * L;
  out[0b011] += a * Lb;
  out[0b101] += a * Lb;
  out[0b111] += b * L;
  out[0b010] += b * Lb;
  out[0b100] += b * Lb;
  return out;
}

// <psi| rho_k |psi> for both clones of a three-qubit state.
inline std::array<double, 2> clone_fidelities(const ThreeQubitState& s, const InputQubit& q) {
  std::array<std::complex<double>, 2> psi = {q.alpha(), q.beta()};
  std::array<double, 2> f{};
  double norm = 0;
  for (auto x : s) norm += std::norm(x);
  for (int clone = 0; clone < 2; ++clone) {
    int shift = clone == 0 ? 2 : 1;
    // <psi|_clone applied to |s>, then squared norm over the rest.
    std::array<std::complex<double>, 8> proj{};
    for (int i = 0; i < 8; ++i) {
      int bit = (i >> shift) & 1;
      int rest = i & ~(1 << shift);
      proj[rest] += std::conj(psi[bit]) * s[i];
    }
    for (auto x : proj) f[clone] += std::norm(x);
    f[clone] /= norm;
  }
  return f;
}

inline double single_copy_fidelity(double theta, const CloneParameter& p) {
  double L = p.lambda(), Lb = p.lambda_bar(), s = std::sin(theta);
  return (1.0 + L * L) / 2.0 - 0.5 * L * (L - Lb * std::numbers::sqrt2) * s * s;
}

inline double success_probability_ideal(const CloneParameter& p) { return 1.0 / (6.0 * p.lambda() * p.lambda()); }

// Average of (F1 + F2)/2 over the distribution, with F1 = F2 given by the
// closed form. Universal averages use the sphere measure sin(theta)/2.
inline double average_fidelity(const QubitDistribution& dist,
                               const std::function<CloneParameter(double)>& lambda_rule) {
  auto f = [&](double theta) { return single_copy_fidelity(theta, lambda_rule(theta)); };
  switch (dist.kind) {
    case QubitDistribution::Kind::universal:
      return 0.5 * integrate_adaptive([&](double x) { return f(std::acos(x)); }, -1.0, 1.0, kAverageTolerance);
    case QubitDistribution::Kind::phase_covariant:
      return f(std::numbers::pi / 2);
    case QubitDistribution::Kind::mirror:
      return 0.5 * (f(dist.theta) + f(std::numbers::pi - dist.theta));
    case QubitDistribution::Kind::custom:
      return 2.0 * std::numbers::pi *
             integrate_adaptive([&](double x) { return dist.density(std::acos(x)) * f(std::acos(x)); }, -1.0, 1.0,
                                kAverageTolerance / (2.0 * std::numbers::pi));
  }
  return 0.0;
}

}  // namespace clonesim
