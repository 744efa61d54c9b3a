// Numerical integration helpers: fixed Gauss-Legendre rules and an
// adaptive Gauss-Kronrod wrapper that enforces an absolute tolerance.
#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "clonesim/errors.hpp"

namespace clonesim {

struct QuadratureRule {
  std::vector<double> nodes;    // ascending, in [-1, 1]
  std::vector<double> weights;  // sum to 2
};

inline QuadratureRule make_gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre rule needs at least one node");
  auto zeros = boost::math::legendre_p_zeros<double>(n);  // non-negative half
  QuadratureRule rule;
  auto weight = [n](double x) {
    double d = boost::math::legendre_p_prime(n, x);
    return 2.0 / ((1.0 - x * x) * d * d);
  };
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it == 0.0) continue;
    rule.nodes.push_back(-*it);
    rule.weights.push_back(weight(*it));
  }
  if (n % 2 == 1) {
    rule.nodes.push_back(0.0);
    rule.weights.push_back(weight(0.0));
  }
  for (double z : zeros) {
    if (z == 0.0) continue;
    rule.nodes.push_back(z);
    rule.weights.push_back(weight(z));
  }
  return rule;
}

// Rules are cached per order; the cache is shared between threads.
inline const QuadratureRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

// Adaptive 15-point Gauss-Kronrod integral of f over [a, b]. Boost stops on a
// relative criterion; integrands here are O(1) so a tenth of abs_tol is used
// for it, and the returned estimate is checked against abs_tol.
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                                 unsigned max_depth = 15) {
  double error = 0;
  double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, max_depth, 0.1 * abs_tol, &error);
  if (!std::isfinite(value) || error > abs_tol)
    throw QuadratureFailure("adaptive quadrature missed tolerance: error estimate " + std::to_string(error));
  return value;
}

}  // namespace clonesim
