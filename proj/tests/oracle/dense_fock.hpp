// Test-only dense Fock-space oracle over a handful of modes.
//
// Basis states are occupation vectors with at most `max_photons` photons in
// total. Linear-optical transforms use the permanent formula
// <m|U|n> = perm(U[n, m]) / sqrt(prod n_i! prod m_j!), which shares no code
// with the library's creation-operator expansion.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Occupation = std::vector<int>;

inline std::vector<Occupation> basis(int modes, int max_photons) {
  std::vector<Occupation> out;
  Occupation cur(modes, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == modes) {
      out.push_back(cur);
      return;
    }
    for (int n = 0; n <= left; ++n) {
      cur[i] = n;
      rec(i + 1, left - n);
    }
    cur[i] = 0;
  };
  rec(0, max_photons);
  return out;
}

inline double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Ryser-free brute force permanent; fine for n <= 6.
inline cplx permanent(const Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return 1.0;
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  cplx total = 0;
  do {
    cplx p = 1;
    for (int i = 0; i < n; ++i) p *= a(i, perm[i]);
    total += p;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

// u(i, j): amplitude for a photon entering mode i to leave in mode j.
inline cplx transition(const Eigen::MatrixXcd& u, const Occupation& in, const Occupation& out) {
  int n_in = 0, n_out = 0;
  for (int x : in) n_in += x;
  for (int x : out) n_out += x;
  if (n_in != n_out) return 0.0;
  std::vector<int> rows, cols;
  for (std::size_t i = 0; i < in.size(); ++i)
    for (int k = 0; k < in[i]; ++k) rows.push_back(static_cast<int>(i));
  for (std::size_t j = 0; j < out.size(); ++j)
    for (int k = 0; k < out[j]; ++k) cols.push_back(static_cast<int>(j));
  Eigen::MatrixXcd sub(n_in, n_in);
  for (int r = 0; r < n_in; ++r)
    for (int c = 0; c < n_in; ++c) sub(r, c) = u(rows[r], cols[c]);
  double norm = 1.0;
  for (int x : in) norm *= factorial(x);
  for (int x : out) norm *= factorial(x);
  return permanent(sub) / std::sqrt(norm);
}

// Dense matrix of the transform on the truncated basis.
inline Eigen::MatrixXcd transform_matrix(const Eigen::MatrixXcd& u, int max_photons) {
  auto b = basis(static_cast<int>(u.rows()), max_photons);
  auto n = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = transition(u, b[c], b[r]);
  return m;
}

// Creation operator on one mode as a dense matrix (photons above the cap are dropped).
inline Eigen::MatrixXcd creation(int modes, int max_photons, int mode) {
  auto b = basis(modes, max_photons);
  std::map<Occupation, Eigen::Index> pos;
  for (std::size_t i = 0; i < b.size(); ++i) pos[b[i]] = static_cast<Eigen::Index>(i);
  auto n = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < b.size(); ++i) {
    Occupation up = b[i];
    up[mode] += 1;
    auto it = pos.find(up);
    if (it != pos.end()) m(it->second, static_cast<Eigen::Index>(i)) = std::sqrt(static_cast<double>(up[mode]));
  }
  return m;
}

// Haar-ish random unitary from the QR of a complex Gaussian matrix.
template <class Rng>
Eigen::MatrixXcd random_unitary(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) q.col(i) *= std::polar(1.0, std::arg(r(i, i)));
  return q;
}

}  // namespace oracle
