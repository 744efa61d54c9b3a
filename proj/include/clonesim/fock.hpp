// Sparse truncated Fock-space algebra over polarization-resolved spatial
// modes.
//
// A basis ket stores one photon count per (spatial mode, polarization) pair.
// Pure states are sparse amplitude maps over basis kets, density operators
// are sparse maps over ket pairs. Everything iterates in the canonical mode
// order (spatial, then polarization) so output is reproducible.
//
// Mode transforms act on creation operators: every input-mode creation
// operator of a ket is replaced by its linear combination of output-mode
// creation operators and the resulting polynomial is expanded back into
// normalized kets. Modes outside the transform are carried along untouched.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "clonesim/errors.hpp"

namespace clonesim {

using complex = std::complex<double>;

inline constexpr double kPruneEpsilon = 1e-15;

enum class Spatial : std::uint8_t { s0, s0p, s1, s2, s1p, s2p, s1pp, s2pp };
enum class Polarization : std::uint8_t { H, V };

inline constexpr std::size_t kSpatialCount = 8;
inline constexpr std::size_t kModeCount = 2 * kSpatialCount;

inline std::string to_string(Spatial s) {
  static constexpr std::array<const char*, kSpatialCount> names = {
      "0", "0'", "1", "2", "1'", "2'", "1''", "2''"};
  return names[static_cast<std::size_t>(s)];
}

inline std::string to_string(Polarization p) { return p == Polarization::H ? "H" : "V"; }

struct ModeLabel {
  Spatial spatial = Spatial::s0;
  Polarization pol = Polarization::H;

  constexpr std::size_t index() const {
    return 2 * static_cast<std::size_t>(spatial) + static_cast<std::size_t>(pol);
  }
  static constexpr ModeLabel from_index(std::size_t i) {
    return {static_cast<Spatial>(i / 2), static_cast<Polarization>(i % 2)};
  }
  friend constexpr auto operator<=>(const ModeLabel&, const ModeLabel&) = default;
};

inline std::string to_string(ModeLabel m) { return to_string(m.spatial) + to_string(m.pol); }

struct FockLimits {
  int per_mode = 2;
  int total = 6;
  friend bool operator==(const FockLimits&, const FockLimits&) = default;
};

// Occupation numbers for all sixteen modes; absent modes are zero.
class FockBasisState {
 public:
  FockBasisState() = default;
  FockBasisState(std::initializer_list<std::pair<ModeLabel, int>> occupations) {
    for (auto [mode, n] : occupations) set(mode, occupation(mode) + n);
  }

  int occupation(ModeLabel m) const { return occ_[m.index()]; }
  int operator[](ModeLabel m) const { return occupation(m); }

  void set(ModeLabel m, int n) {
    if (n < 0 || n > 255) throw TruncationOverflow("occupation out of representable range");
    occ_[m.index()] = static_cast<std::uint8_t>(n);
  }
  FockBasisState with(ModeLabel m, int n) const {
    FockBasisState out = *this;
    out.set(m, n);
    return out;
  }

  int total() const {
    int t = 0;
    for (auto n : occ_) t += n;
    return t;
  }
  int total(Spatial s) const {
    return occupation({s, Polarization::H}) + occupation({s, Polarization::V});
  }

  bool within(const FockLimits& lim) const {
    for (auto n : occ_)
      if (n > lim.per_mode) return false;
    return total() <= lim.total;
  }

  // Keeps only the listed spatial modes; the rest are zeroed.
  FockBasisState restricted(const std::set<Spatial>& keep) const {
    FockBasisState out;
    for (Spatial s : keep) {
      out.occ_[ModeLabel{s, Polarization::H}.index()] = occ_[ModeLabel{s, Polarization::H}.index()];
      out.occ_[ModeLabel{s, Polarization::V}.index()] = occ_[ModeLabel{s, Polarization::V}.index()];
    }
    return out;
  }

  // Moves every photon of spatial mode `from` into `to`.
  FockBasisState relabeled(Spatial from, Spatial to) const {
    FockBasisState out = *this;
    for (Polarization p : {Polarization::H, Polarization::V}) {
      int n = occupation({from, p});
      out.set({from, p}, 0);
      out.set({to, p}, out.occupation({to, p}) + n);
    }
    return out;
  }

  const std::array<std::uint8_t, kModeCount>& raw() const { return occ_; }

  std::string str() const {
    std::ostringstream os;
    os << '|';
    bool first = true;
    for (std::size_t i = 0; i < kModeCount; ++i) {
      if (occ_[i] == 0) continue;
      if (!first) os << ' ';
      os << int(occ_[i]) << '_' << to_string(ModeLabel::from_index(i));
      first = false;
    }
    if (first) os << "vac";
    os << '>';
    return os.str();
  }

  friend auto operator<=>(const FockBasisState&, const FockBasisState&) = default;

 private:
  std::array<std::uint8_t, kModeCount> occ_{};
};

namespace detail {
inline double sqrt_factorial(int n) {
  static const std::array<double, 13> table = [] {
    std::array<double, 13> t{};
    double f = 1.0;
    for (int i = 0; i < 13; ++i) {
      if (i > 0) f *= i;
      t[i] = std::sqrt(f);
    }
    return t;
  }();
  if (n < 13) return table[n];
  return std::sqrt(std::tgamma(n + 1.0));
}

inline double sqrt_factorial_product(const FockBasisState& k) {
  double p = 1.0;
  for (auto n : k.raw()) p *= sqrt_factorial(n);
  return p;
}
}  // namespace detail

class PureState {
 public:
  using Map = std::map<FockBasisState, complex>;

  explicit PureState(FockLimits limits = {}) : limits_(limits) {}

  static PureState vacuum(FockLimits limits = {}) { return basis({}, limits); }
  static PureState basis(const FockBasisState& k, FockLimits limits = {}, complex amp = 1.0) {
    PureState s(limits);
    s.add(k, amp);
    return s;
  }

  const FockLimits& limits() const { return limits_; }
  PureState with_limits(FockLimits lim) const {
    PureState out = *this;
    out.limits_ = lim;
    for (const auto& [k, a] : amps_)
      if (!k.within(lim)) throw TruncationOverflow("state does not fit new limits: " + k.str());
    return out;
  }

  void add(const FockBasisState& k, complex amp) {
    if (!k.within(limits_)) throw TruncationOverflow("basis state exceeds Fock caps: " + k.str());
    auto [it, inserted] = amps_.try_emplace(k, amp);
    if (!inserted) it->second += amp;
    if (std::abs(it->second) < kPruneEpsilon) amps_.erase(it);
  }

  complex amplitude(const FockBasisState& k) const {
    auto it = amps_.find(k);
    return it == amps_.end() ? complex{} : it->second;
  }

  double norm2() const {
    double s = 0;
    for (const auto& [k, a] : amps_) s += std::norm(a);
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }

  PureState normalized() const {
    double n = norm();
    if (n == 0) throw DomainError("cannot normalize the zero vector");
    PureState out(limits_);
    for (const auto& [k, a] : amps_) out.add(k, a / n);
    return out;
  }

  PureState scaled(complex c) const {
    PureState out(limits_);
    for (const auto& [k, a] : amps_) out.add(k, a * c);
    return out;
  }

  PureState& operator+=(const PureState& o) {
    for (const auto& [k, a] : o.amps_) add(k, a);
    return *this;
  }
  friend PureState operator+(PureState a, const PureState& b) { return a += b; }

  std::size_t size() const { return amps_.size(); }
  bool empty() const { return amps_.empty(); }
  auto begin() const { return amps_.begin(); }
  auto end() const { return amps_.end(); }
  const Map& amplitudes() const { return amps_; }

 private:
  FockLimits limits_;
  Map amps_;
};

inline complex inner_product(const PureState& a, const PureState& b) {
  complex s{};
  const auto& small = a.size() <= b.size() ? a : b;
  for (const auto& [k, amp] : small) {
    complex x = a.amplitude(k), y = b.amplitude(k);
    s += std::conj(x) * y;
  }
  return s;
}

// a-dagger on one mode: |..n..> -> sqrt(n+1) |..n+1..>.
inline PureState create(const PureState& state, ModeLabel mode) {
  PureState out(state.limits());
  for (const auto& [k, a] : state) {
    int n = k.occupation(mode);
    FockBasisState next = k.with(mode, n + 1);
    if (!next.within(state.limits()))
      throw TruncationOverflow("creation on " + to_string(mode) + " exceeds Fock caps at " + k.str());
    out.add(next, a * std::sqrt(n + 1.0));
  }
  return out;
}

// Linear map of input-mode creation operators onto output-mode creation
// operators: a_in(i)^dag -> sum_j matrix(i, j) a_out(j)^dag.
class ModeTransform {
 public:
  ModeTransform(std::vector<ModeLabel> inputs, std::vector<ModeLabel> outputs, Eigen::MatrixXcd matrix)
      : inputs_(std::move(inputs)), outputs_(std::move(outputs)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != static_cast<Eigen::Index>(inputs_.size()) ||
        matrix_.cols() != static_cast<Eigen::Index>(outputs_.size()))
      throw DomainError("mode transform matrix shape does not match mode lists");
  }

  static ModeTransform identity(std::vector<ModeLabel> modes) {
    auto n = static_cast<Eigen::Index>(modes.size());
    return {modes, modes, Eigen::MatrixXcd::Identity(n, n)};
  }

  const std::vector<ModeLabel>& inputs() const { return inputs_; }
  const std::vector<ModeLabel>& outputs() const { return outputs_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }

  double unitarity_error() const {
    if (matrix_.rows() != matrix_.cols()) return std::numeric_limits<double>::infinity();
    auto n = matrix_.rows();
    return (matrix_ * matrix_.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  }
  bool is_unitary(double tol = 1e-12) const { return unitarity_error() <= tol; }

  // This transform followed by `next`; next.inputs() must equal outputs().
  ModeTransform then(const ModeTransform& next) const {
    if (next.inputs_ != outputs_) throw DomainError("cannot compose transforms with mismatched modes");
    return {inputs_, next.outputs_, matrix_ * next.matrix_};
  }

 private:
  std::vector<ModeLabel> inputs_;
  std::vector<ModeLabel> outputs_;
  Eigen::MatrixXcd matrix_;
};

namespace detail {
// Expands one basis ket under a transform into the accumulator `out`.
inline void expand_ket(const FockBasisState& ket, complex amp, const ModeTransform& t,
                       const std::vector<std::vector<std::pair<std::size_t, complex>>>& rows,
                       std::map<FockBasisState, complex>& out) {
  // Monomial coefficients over the full mode set; bystanders seed the exponent.
  FockBasisState seed = ket;
  for (std::size_t i = 0; i < t.inputs().size(); ++i) seed.set(t.inputs()[i], 0);
  std::map<FockBasisState, complex> poly{{seed, amp / sqrt_factorial_product(ket)}};
  for (std::size_t i = 0; i < t.inputs().size(); ++i) {
    int n = ket.occupation(t.inputs()[i]);
    for (int rep = 0; rep < n; ++rep) {
      std::map<FockBasisState, complex> next;
      for (const auto& [mono, c] : poly) {
        for (const auto& [j, m] : rows[i]) {
          ModeLabel om = t.outputs()[j];
          FockBasisState e = mono.with(om, mono.occupation(om) + 1);
          next[e] += c * m;
        }
      }
      poly = std::move(next);
    }
  }
  for (const auto& [mono, c] : poly) out[mono] += c * sqrt_factorial_product(mono);
}
}  // namespace detail

inline PureState apply_mode_transform(const PureState& state, const ModeTransform& t, double unitarity_tol = 1e-12) {
  if (!t.is_unitary(unitarity_tol))
    throw NonUnitaryTransform("mode transform is not unitary (error " + std::to_string(t.unitarity_error()) + ")");
  std::vector<std::vector<std::pair<std::size_t, complex>>> rows(t.inputs().size());
  for (std::size_t i = 0; i < t.inputs().size(); ++i)
    for (std::size_t j = 0; j < t.outputs().size(); ++j) {
      complex m = t.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (std::abs(m) > 0) rows[i].emplace_back(j, m);
    }
  std::map<FockBasisState, complex> acc;
  for (const auto& [k, a] : state) detail::expand_ket(k, a, t, rows, acc);

  PureState out(state.limits());
  for (const auto& [k, a] : acc) {
    if (std::abs(a) < kPruneEpsilon) continue;
    if (!k.within(state.limits()))
      throw TruncationOverflow("mode transform output exceeds Fock caps: " + k.str());
    out.add(k, a);
  }
  return out;
}

inline PureState relabel(const PureState& state, Spatial from, Spatial to) {
  PureState out(state.limits());
  for (const auto& [k, a] : state) out.add(k.relabeled(from, to), a);
  return out;
}

// Linear operator given column-wise: op|b> for each basis ket b.
class Operator {
 public:
  using Column = std::function<PureState(const FockBasisState&, const FockLimits&)>;

  explicit Operator(Column col) : col_(std::move(col)) {}

  static Operator identity() {
    return Operator([](const FockBasisState& b, const FockLimits& lim) { return PureState::basis(b, lim); });
  }
  static Operator diagonal(std::function<complex(const FockBasisState&)> f) {
    return Operator([f = std::move(f)](const FockBasisState& b, const FockLimits& lim) {
      PureState s(lim);
      complex v = f(b);
      if (v != complex{}) s.add(b, v);
      return s;
    });
  }
  // |x><x|
  static Operator projector(const PureState& x) {
    return Operator([x](const FockBasisState& b, const FockLimits&) { return x.scaled(std::conj(x.amplitude(b))); });
  }

  PureState column(const FockBasisState& b, const FockLimits& lim) const { return col_(b, lim); }

  PureState apply(const PureState& s) const {
    PureState out(s.limits());
    for (const auto& [k, a] : s) out += column(k, s.limits()).scaled(a);
    return out;
  }

  // (*this) * other
  Operator operator*(const Operator& other) const {
    return Operator([lhs = *this, rhs = other](const FockBasisState& b, const FockLimits& lim) {
      return lhs.apply(rhs.column(b, lim));
    });
  }

 private:
  Column col_;
};

class DensityOperator {
 public:
  using Key = std::pair<FockBasisState, FockBasisState>;
  using Map = std::map<Key, complex>;

  explicit DensityOperator(FockLimits limits = {}) : limits_(limits) {}

  static DensityOperator from_pure(const PureState& psi, double weight = 1.0) {
    DensityOperator rho(psi.limits());
    rho.add_pure(psi, weight);
    return rho;
  }

  const FockLimits& limits() const { return limits_; }

  void add(const FockBasisState& a, const FockBasisState& b, complex v) {
    auto [it, inserted] = entries_.try_emplace({a, b}, v);
    if (!inserted) it->second += v;
    if (std::abs(it->second) < kPruneEpsilon) entries_.erase(it);
  }
  void add_pure(const PureState& psi, double weight) {
    for (const auto& [a, x] : psi)
      for (const auto& [b, y] : psi) add(a, b, weight * x * std::conj(y));
  }

  complex entry(const FockBasisState& a, const FockBasisState& b) const {
    auto it = entries_.find({a, b});
    return it == entries_.end() ? complex{} : it->second;
  }

  complex trace() const {
    complex t{};
    for (const auto& [k, v] : entries_)
      if (k.first == k.second) t += v;
    return t;
  }

  double hermiticity_error() const {
    double worst = 0;
    for (const auto& [k, v] : entries_)
      worst = std::max(worst, std::abs(v - std::conj(entry(k.second, k.first))));
    return worst;
  }

  std::vector<FockBasisState> support() const {
    std::set<FockBasisState> s;
    for (const auto& [k, v] : entries_) {
      s.insert(k.first);
      s.insert(k.second);
    }
    return {s.begin(), s.end()};
  }

  Eigen::MatrixXcd dense(const std::vector<FockBasisState>& basis) const {
    std::map<FockBasisState, Eigen::Index> pos;
    for (std::size_t i = 0; i < basis.size(); ++i) pos[basis[i]] = static_cast<Eigen::Index>(i);
    auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& [k, v] : entries_) {
      auto ia = pos.find(k.first), ib = pos.find(k.second);
      if (ia != pos.end() && ib != pos.end()) m(ia->second, ib->second) = v;
    }
    return m;
  }

  // Smallest eigenvalue of the Hermitian part restricted to the support.
  double min_eigenvalue() const {
    auto basis = support();
    if (basis.empty()) return 0.0;
    Eigen::MatrixXcd m = dense(basis);
    Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  DensityOperator& operator+=(const DensityOperator& o) {
    for (const auto& [k, v] : o.entries_) add(k.first, k.second, v);
    return *this;
  }

  std::size_t size() const { return entries_.size(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  FockLimits limits_;
  Map entries_;
};

inline DensityOperator partial_trace(const DensityOperator& rho, const std::set<Spatial>& keep) {
  std::set<Spatial> traced;
  for (std::size_t s = 0; s < kSpatialCount; ++s)
    if (!keep.contains(static_cast<Spatial>(s))) traced.insert(static_cast<Spatial>(s));
  DensityOperator out(rho.limits());
  for (const auto& [k, v] : rho) {
    if (k.first.restricted(traced) != k.second.restricted(traced)) continue;
    out.add(k.first.restricted(keep), k.second.restricted(keep), v);
  }
  return out;
}

// op * rho * op^dagger
inline DensityOperator apply_operator_sandwich(const DensityOperator& rho, const Operator& op) {
  std::map<FockBasisState, PureState> cols;
  auto column = [&](const FockBasisState& b) -> const PureState& {
    auto it = cols.find(b);
    if (it == cols.end()) it = cols.emplace(b, op.column(b, rho.limits())).first;
    return it->second;
  };
  DensityOperator out(rho.limits());
  for (const auto& [k, v] : rho) {
    const PureState& ca = column(k.first);
    const PureState& cb = column(k.second);
    for (const auto& [x, ax] : ca)
      for (const auto& [y, by] : cb) out.add(x, y, v * ax * std::conj(by));
  }
  return out;
}

// U rho U^dagger for a mode transform, computed ket by ket.
inline DensityOperator apply_mode_transform(const DensityOperator& rho, const ModeTransform& t) {
  std::map<FockBasisState, PureState> cols;
  auto image = [&](const FockBasisState& b) -> const PureState& {
    auto it = cols.find(b);
    if (it == cols.end()) it = cols.emplace(b, apply_mode_transform(PureState::basis(b, rho.limits()), t)).first;
    return it->second;
  };
  DensityOperator out(rho.limits());
  for (const auto& [k, v] : rho) {
    const PureState& ca = image(k.first);
    const PureState& cb = image(k.second);
    for (const auto& [x, ax] : ca)
      for (const auto& [y, by] : cb) out.add(x, y, v * ax * std::conj(by));
  }
  return out;
}

inline DensityOperator relabel(const DensityOperator& rho, Spatial from, Spatial to) {
  DensityOperator out(rho.limits());
  for (const auto& [k, v] : rho) out.add(k.first.relabeled(from, to), k.second.relabeled(from, to), v);
  return out;
}

// Incoherent mixture sum_k w_k |phi_k><phi_k| with unnormalized phi_k.
struct PureStateMixture {
  std::vector<std::pair<double, PureState>> terms;

  double trace() const {
    double t = 0;
    for (const auto& [w, s] : terms) t += w * s.norm2();
    return t;
  }

  DensityOperator to_density(FockLimits limits) const {
    DensityOperator rho(limits);
    for (const auto& [w, s] : terms)
      if (w != 0) rho.add_pure(s, w);
    return rho;
  }
};

}  // namespace clonesim
