#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixiso/error.hpp"

namespace mixiso {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// StateSet
// ---------------------------------------------------------------------------

/// Subset of {0..n-1} stored as a packed bitset. For n <= 64 this is a single
/// word, which the subset enumerator fills directly from a mask.
class StateSet {
 public:
  StateSet() = default;

  explicit StateSet(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  StateSet(std::size_t n, std::initializer_list<std::size_t> members) : StateSet(n) {
    for (auto v : members) insert(v);
  }

  StateSet(std::size_t n, std::span<const std::size_t> members) : StateSet(n) {
    for (auto v : members) insert(v);
  }

  static StateSet from_mask(std::size_t n, std::uint64_t mask) {
    StateSet s(n);
    if (n > 64) throw Error(ErrorKind::BadParam, "mask constructor needs n <= 64");
    if (!s.words_.empty()) s.words_[0] = mask & low_mask(n);
    return s;
  }

  static StateSet range(std::size_t n, std::size_t first, std::size_t last) {
    StateSet s(n);
    for (std::size_t v = first; v < last; ++v) s.insert(v);
    return s;
  }

  std::size_t universe() const noexcept { return n_; }

  void insert(std::size_t v) {
    if (v >= n_) throw Error(ErrorKind::BadParam, "state index " + std::to_string(v) + " out of range");
    words_[v / 64] |= (std::uint64_t{1} << (v % 64));
  }

  bool contains(std::size_t v) const noexcept {
    return v < n_ && ((words_[v / 64] >> (v % 64)) & 1U) != 0;
  }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  bool empty() const noexcept { return count() == 0; }
  bool full() const noexcept { return count() == n_; }

  std::uint64_t mask() const noexcept { return words_.empty() ? 0 : words_[0]; }

  StateSet complement() const {
    StateSet c(n_);
    for (std::size_t i = 0; i < words_.size(); ++i) c.words_[i] = ~words_[i];
    if (n_ % 64 != 0) c.words_.back() &= low_mask(n_ % 64);
    return c;
  }

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for (std::size_t v = 0; v < n_; ++v)
      if (contains(v)) out.push_back(v);
    return out;
  }

  friend bool operator==(const StateSet&, const StateSet&) = default;

 private:
  static std::uint64_t low_mask(std::size_t bits) {
    return bits >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
  }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

// ---------------------------------------------------------------------------
// Distribution
// ---------------------------------------------------------------------------

class Distribution {
 public:
  explicit Distribution(std::vector<double> p) : p_(std::move(p)) {
    double sum = 0.0;
    for (double x : p_) {
      if (!(x >= 0.0) || !std::isfinite(x))
        throw Error(ErrorKind::DomainError, "distribution entries must be finite and nonnegative");
      sum += x;
    }
    if (std::abs(sum - 1.0) > tol::kExact)
      throw Error(ErrorKind::DomainError, "distribution does not sum to 1");
  }

  static Distribution point_mass(std::size_t n, std::size_t v) {
    std::vector<double> p(n, 0.0);
    p.at(v) = 1.0;
    return Distribution(std::move(p));
  }

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const noexcept { return p_[i]; }
  std::span<const double> values() const noexcept { return p_; }

 private:
  std::vector<double> p_;
};

/// ||p - q||_TV = 1/2 sum |p - q|.
inline double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorKind::BadParam, "size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

/// ||p - ref||_{chi^2(ref)} = sum (p/ref - 1)^2 ref. Not the square root.
inline double chi2_distance(std::span<const double> p, std::span<const double> ref) {
  if (p.size() != ref.size()) throw Error(ErrorKind::BadParam, "size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(ref[i] > 0.0)) throw Error(ErrorKind::ZeroReferenceMass, "reference mass at state " + std::to_string(i));
    const double r = p[i] / ref[i] - 1.0;
    s += r * r * ref[i];
  }
  return s;
}

inline double tv_distance(const Distribution& p, const Distribution& q) {
  return tv_distance(p.values(), q.values());
}

inline double chi2_distance(const Distribution& p, const Distribution& ref) {
  return chi2_distance(p.values(), ref.values());
}

// ---------------------------------------------------------------------------
// MarkovChain
// ---------------------------------------------------------------------------

/// Validated, immutable finite Markov chain. Only build_chain and friends
/// create instances, so every MarkovChain is stochastic, irreducible and
/// carries its stationary distribution.
class MarkovChain {
 public:
  std::size_t size() const noexcept { return static_cast<std::size_t>(P_.rows()); }
  double P(std::size_t i, std::size_t j) const noexcept {
    return P_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double pi(std::size_t i) const noexcept { return pi_[static_cast<Eigen::Index>(i)]; }
  const Matrix& transitions() const noexcept { return P_; }
  const Vector& stationary() const noexcept { return pi_; }
  std::span<const double> stationary_span() const noexcept {
    return {pi_.data(), static_cast<std::size_t>(pi_.size())};
  }
  bool lazy() const noexcept { return lazy_; }
  bool reversible() const noexcept { return reversible_; }
  double pi_min() const noexcept { return pi_.minCoeff(); }

  double measure(const StateSet& a) const {
    double s = 0.0;
    for (std::size_t v = 0; v < size(); ++v)
      if (a.contains(v)) s += pi(v);
    return s;
  }

  /// P(v, D) summed over members of D.
  double prob_into(std::size_t v, const StateSet& d) const {
    double s = 0.0;
    for (std::size_t j = 0; j < size(); ++j)
      if (d.contains(j)) s += P(v, j);
    return s;
  }

 private:
  friend MarkovChain build_chain(const Matrix&);
  friend MarkovChain build_chain_with_stationary(const Matrix&, const Vector&);

  MarkovChain(Matrix P, Vector pi) : P_(std::move(P)), pi_(std::move(pi)) { classify(); }

  void classify() {
    const auto n = P_.rows();
    lazy_ = true;
    reversible_ = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (P_(i, i) < 0.5 - tol::kExact) lazy_ = false;
      for (Eigen::Index j = i + 1; j < n; ++j)
        if (std::abs(pi_[i] * P_(i, j) - pi_[j] * P_(j, i)) > tol::kExact) reversible_ = false;
    }
  }

  Matrix P_;
  Vector pi_;
  bool lazy_ = false;
  bool reversible_ = false;
};

namespace detail {

inline void check_stochastic(const Matrix& P) {
  if (P.rows() != P.cols()) throw Error(ErrorKind::NotStochastic, "transition matrix must be square");
  if (P.rows() < 2) throw Error(ErrorKind::BadParam, "a chain needs at least 2 states");
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      const double x = P(i, j);
      if (!std::isfinite(x)) throw Error(ErrorKind::NotStochastic, "non-finite entry in row " + std::to_string(i));
      if (x < 0.0) throw Error(ErrorKind::NotStochastic, "negative entry in row " + std::to_string(i));
      row += x;
    }
    if (std::abs(row - 1.0) > tol::kExact)
      throw Error(ErrorKind::NotStochastic, "row " + std::to_string(i) + " sums to " + std::to_string(row));
  }
}

/// Forward reachability from state 0 on the positive-entry digraph and on its
/// transpose; both must cover every state.
inline void check_irreducible(const Matrix& P) {
  const auto n = P.rows();
  auto reach_all = [&](bool transpose) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    Eigen::Index reached = 1;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (Eigen::Index v = 0; v < n; ++v) {
        const double w = transpose ? P(v, u) : P(u, v);
        if (w > 0.0 && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          ++reached;
          stack.push_back(v);
        }
      }
    }
    return reached == n;
  };
  if (!reach_all(false) || !reach_all(true))
    throw Error(ErrorKind::Reducible, "transition digraph is not strongly connected");
}

inline double stationarity_residual(const Matrix& P, const Vector& pi) {
  const Vector r = (pi.transpose() * P).transpose() - pi;
  return r.cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Validates the matrix and solves pi P = pi, sum pi = 1 by a dense LU solve
/// with the last balance equation replaced by the normalization.
inline MarkovChain build_chain(const Matrix& P) {
  detail::check_stochastic(P);
  detail::check_irreducible(P);
  const auto n = P.rows();
  Matrix A = P.transpose() - Matrix::Identity(n, n);
  A.row(n - 1).setOnes();
  Vector b = Vector::Zero(n);
  b[n - 1] = 1.0;
  Vector pi = A.partialPivLu().solve(b);
  if (!pi.allFinite() || (pi.array() <= 0.0).any())
    throw Error(ErrorKind::SingularStationary, "stationary solve produced a non-positive entry");
  pi /= pi.sum();
  if (detail::stationarity_residual(P, pi) > tol::kExact)
    throw Error(ErrorKind::SingularStationary, "stationary residual above tolerance");
  return MarkovChain(P, std::move(pi));
}

/// Validates a chain whose stationary distribution is known in advance. With
/// irreducibility checked the stationary law is unique, so a small residual
/// certifies the candidate.
inline MarkovChain build_chain_with_stationary(const Matrix& P, const Vector& pi) {
  detail::check_stochastic(P);
  detail::check_irreducible(P);
  if (pi.size() != P.rows()) throw Error(ErrorKind::BadParam, "pi has the wrong length");
  if (!pi.allFinite() || (pi.array() <= 0.0).any())
    throw Error(ErrorKind::StationaryMismatch, "pi must be strictly positive");
  if (std::abs(pi.sum() - 1.0) > tol::kExact) throw Error(ErrorKind::StationaryMismatch, "pi does not sum to 1");
  if (detail::stationarity_residual(P, pi) > tol::kExact)
    throw Error(ErrorKind::StationaryMismatch, "pi P != pi");
  return MarkovChain(P, pi);
}

inline MarkovChain build_chain(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix P(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
      throw Error(ErrorKind::NotStochastic, "transition matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j) P(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return build_chain(P);
}

/// Reversed chain: P_rev(u,v) = pi(v) P(v,u) / pi(u).
inline MarkovChain time_reversal(const MarkovChain& chain) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  const Matrix& P = chain.transitions();
  const Vector& pi = chain.stationary();
  Matrix R(n, n);
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = 0; v < n; ++v) R(u, v) = pi[v] * P(v, u) / pi[u];
    R.row(u) /= R.row(u).sum();
  }
  return build_chain_with_stationary(R, pi);
}

/// 1/2 (I + P); same stationary distribution.
inline MarkovChain lazify(const MarkovChain& chain) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  Matrix L = 0.5 * (Matrix::Identity(n, n) + chain.transitions());
  return build_chain_with_stationary(L, chain.stationary());
}

/// Q(A, B) = sum_{i in A, j in B} pi(i) P(i, j).
inline double ergodic_flow(const MarkovChain& chain, const StateSet& a, const StateSet& b) {
  double q = 0.0;
  const auto n = chain.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!a.contains(i)) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (b.contains(j)) row += chain.P(i, j);
    q += chain.pi(i) * row;
  }
  return q;
}

}  // namespace mixiso
