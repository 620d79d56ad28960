#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixiso/chain.hpp"
#include "mixiso/enumerate.hpp"
#include "mixiso/error.hpp"
#include "mixiso/profile.hpp"

namespace mixiso {

// Constant of the blocking-conductance mixing bound, kept as published.
inline constexpr double kBlockingConstant = 8.0 * 1376.0;
inline constexpr std::size_t kMixingIterationCap = 1'000'000;

struct SpectralRecord {
  double lambda = 0.0;
  double second_eigenvalue = 0.0;
  std::vector<double> eigenvalues;  // descending
};

/// Spectrum of S = D^{1/2} P D^{-1/2}, symmetric when the chain is reversible.
inline SpectralRecord spectral_gap(const MarkovChain& chain) {
  if (!chain.reversible()) throw Error(ErrorKind::NotReversible, "spectral gap is defined for reversible chains");
  const Vector sq = chain.stationary().cwiseSqrt();
  Eigen::MatrixXd S = sq.asDiagonal() * chain.transitions() * sq.cwiseInverse().asDiagonal();
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  SpectralRecord r;
  const auto& ev = es.eigenvalues();  // ascending
  for (Eigen::Index i = ev.size(); i-- > 0;) r.eigenvalues.push_back(ev[i]);
  r.second_eigenvalue = r.eigenvalues.at(1);
  r.lambda = 1.0 - r.second_eigenvalue;
  return r;
}

enum class Metric { tv, chi2 };

/// Worst-start distance to stationarity after t steps, for every t until it
/// drops to epsilon. Point-mass starts suffice because both distances are
/// convex in the initial distribution.
inline std::size_t exact_mixing(const MarkovChain& chain, double epsilon, Metric metric) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorKind::DomainError, "epsilon must lie in (0, 1)");
  const auto n = static_cast<Eigen::Index>(chain.size());
  const Matrix& P = chain.transitions();
  const auto pi = chain.stationary_span();
  Matrix M = Matrix::Identity(n, n);  // row v: distribution after t steps from v
  std::vector<double> row(static_cast<std::size_t>(n));
  for (std::size_t t = 0; t <= kMixingIterationCap; ++t) {
    double worst = 0.0;
    for (Eigen::Index v = 0; v < n; ++v) {
      for (Eigen::Index j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = M(v, j);
      const double d = metric == Metric::tv ? tv_distance(row, pi) : chi2_distance(row, pi);
      worst = std::max(worst, d);
    }
    if (worst <= epsilon) return t;
    M = (M * P).eval();
  }
  throw Error(ErrorKind::IterationCap, "mixing not reached within the iteration cap");
}

namespace detail {
inline void require_reversible(const MarkovChain& chain) {
  if (!chain.reversible()) throw Error(ErrorKind::NotReversible, "bound applies to reversible chains only");
}
inline void require_lazy(const MarkovChain& chain) {
  if (!chain.lazy()) throw Error(ErrorKind::NotLazy, "bound applies to lazy chains only");
}
}  // namespace detail

/// 8*1376 (int_{pi_0}^{1/2} h(x) dx + h(1/2)) bound on tau(1/4).
inline double bound_blocking_tau(const MarkovChain& chain, const Profile& h) {
  detail::require_reversible(chain);
  const double pi0 = chain.pi_min();
  return kBlockingConstant * (h.integral(pi0, 0.5) + h.at(0.5));
}

inline double bound_blocking_tau(const MarkovChain& chain, Quantity h_variant, const EnumerationOptions& opt = {}) {
  detail::require_reversible(chain);
  if (!is_supremum(h_variant)) throw Error(ErrorKind::BadParam, "h variant must be h_plus, h_mod or h_gl");
  return bound_blocking_tau(chain, profile(chain, h_variant, opt));
}

/// int_{pi_0}^{1/2} dx / (x psi_evo(x)) + log(8/eps) / psi_evo(1/2).
inline double bound_chi2_evolving(const MarkovChain& chain, const Profile& evo, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorKind::DomainError, "epsilon must lie in (0, 1)");
  return evo.integral_inverse(chain.pi_min(), 0.5) + std::log(8.0 / epsilon) / evo.at(0.5);
}

inline double bound_chi2_evolving(const MarkovChain& chain, double epsilon, const EnumerationOptions& opt = {}) {
  return bound_chi2_evolving(chain, profile(chain, Quantity::psi_evo, opt), epsilon);
}

struct SpreadMixingBound {
  double integral_form = 0.0;
  double flat_form = 0.0;
};

/// Two upper bounds on chi^2(4 eps^2) (hence on tau(eps)) from the
/// reversed-spread profile.
inline SpreadMixingBound bound_chi2_spread(const MarkovChain& chain, const Profile& rev_spread, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorKind::DomainError, "epsilon must lie in (0, 1)");
  const double pi0 = chain.pi_min();
  const double half = rev_spread.at(0.5);
  SpreadMixingBound b;
  b.integral_form = 4.0 * rev_spread.integral_inverse(pi0, 0.5) + 4.0 * std::log(2.0 / (epsilon * epsilon)) / half;
  b.flat_form = (2.0 / half) * (std::log(1.0 / pi0) + 2.0 * std::log(1.0 / (2.0 * epsilon)));
  return b;
}

inline SpreadMixingBound bound_chi2_spread(const MarkovChain& chain, double epsilon, const EnumerationOptions& opt = {}) {
  detail::require_lazy(chain);
  return bound_chi2_spread(chain, profile(chain, Quantity::psi_plus_reversed, opt), epsilon);
}

struct SpectralSandwich {
  double upper = 0.0;  // 4 psi_big(1/2)
  double lower = 0.0;  // psi^+(1/2) / 4
  double lambda = 0.0;
};

inline SpectralSandwich bound_spectral_sandwich(const MarkovChain& chain, const EnumerationOptions& opt = {}) {
  detail::require_reversible(chain);
  detail::require_lazy(chain);
  SpectralSandwich s;
  s.upper = 4.0 * profile(chain, Quantity::psi_big, opt).at(0.5);
  s.lower = 0.25 * profile(chain, Quantity::psi_plus, opt).at(0.5);
  s.lambda = spectral_gap(chain).lambda;
  return s;
}

struct TauLowerBounds {
  double psi_big_form = 0.0;
  double gap_form = 0.0;
};

/// Lower bounds on tau(eps); negative values are vacuous and reported as 0.
inline TauLowerBounds bound_tau_lower(double psi_big_half, double lambda, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw Error(ErrorKind::DomainError, "epsilon must lie in (0, 1/2)");
  const double log_term = std::log(1.0 / (2.0 * epsilon));
  TauLowerBounds b;
  b.psi_big_form = std::max(0.0, (1.0 - 4.0 * psi_big_half) / (8.0 * psi_big_half) * log_term);
  b.gap_form = std::max(0.0, 0.5 * (1.0 - lambda) / lambda * log_term);
  return b;
}

inline TauLowerBounds bound_tau_lower(const MarkovChain& chain, double epsilon, const EnumerationOptions& opt = {}) {
  detail::require_reversible(chain);
  detail::require_lazy(chain);
  return bound_tau_lower(profile(chain, Quantity::psi_big, opt).at(0.5), spectral_gap(chain).lambda, epsilon);
}

struct PointwiseCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  std::size_t x = 0;
  std::size_t z = 0;
};

namespace detail {
inline double chi2_row(const Matrix& M, Eigen::Index v, std::span<const double> pi) {
  double s = 0.0;
  for (std::size_t j = 0; j < pi.size(); ++j) {
    const double r = M(v, static_cast<Eigen::Index>(j)) / pi[j] - 1.0;
    s += r * r * pi[j];
  }
  return s;
}
}  // namespace detail

/// max_{x,z} P^{n+m}(x,z)/pi(z) - 1 against the product of the chi^2 norms of
/// P^n(x, .) and P_rev^m(z, .) at the maximizing pair.
inline PointwiseCheck pointwise_bound_check(const MarkovChain& chain, std::size_t n_steps, std::size_t m_steps) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  const auto rev = time_reversal(chain);
  const auto pi = chain.stationary_span();
  Matrix Pn = Matrix::Identity(n, n), Rm = Matrix::Identity(n, n);
  for (std::size_t i = 0; i < n_steps; ++i) Pn = (Pn * chain.transitions()).eval();
  for (std::size_t i = 0; i < m_steps; ++i) Rm = (Rm * rev.transitions()).eval();
  Matrix Pm = Matrix::Identity(n, n);
  for (std::size_t i = 0; i < m_steps; ++i) Pm = (Pm * chain.transitions()).eval();
  const Matrix Pnm = Pn * Pm;

  PointwiseCheck out;
  out.lhs = -std::numeric_limits<double>::infinity();
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index z = 0; z < n; ++z) {
      const double v = Pnm(x, z) / pi[static_cast<std::size_t>(z)] - 1.0;
      if (v > out.lhs) {
        out.lhs = v;
        out.x = static_cast<std::size_t>(x);
        out.z = static_cast<std::size_t>(z);
      }
    }
  out.rhs = std::sqrt(detail::chi2_row(Pn, static_cast<Eigen::Index>(out.x), pi)) *
            std::sqrt(detail::chi2_row(Rm, static_cast<Eigen::Index>(out.z), pi));
  return out;
}

/// Exact mixing times next to every applicable bound.
struct MixingReport {
  double epsilon = 0.25;
  std::size_t tau_exact = 0;
  std::size_t chi2_exact = 0;
  std::map<std::string, double> bounds;
  std::map<std::string, double> lower_bounds;
  std::optional<double> lambda;
  std::vector<std::string> caveats;
};

/// tau(eps) <= tau(1/4) ceil(log2(1/eps)) carries the tau(1/4) bound to
/// smaller eps.
inline double tau_bound_factor(double epsilon) {
  return epsilon >= 0.25 ? 1.0 : std::ceil(std::log2(1.0 / epsilon));
}

inline MixingReport mixing_report(const MarkovChain& chain, double epsilon, const EnumerationOptions& opt = {}) {
  MixingReport r;
  r.epsilon = epsilon;
  r.tau_exact = exact_mixing(chain, epsilon, Metric::tv);
  r.chi2_exact = exact_mixing(chain, epsilon, Metric::chi2);
  r.caveats.push_back("discrete-outer-sets: profile infima/suprema range over discrete subsets only");
  if (!chain.lazy()) r.caveats.push_back("chain is not lazy: evolving-set and spread bounds are outside their hypotheses");

  const auto evo = profile(chain, Quantity::psi_evo, opt);
  r.bounds["chi2_evolving"] = bound_chi2_evolving(chain, evo, epsilon);

  const auto rev_spread = profile(chain, Quantity::psi_plus_reversed, opt);
  const auto spread = bound_chi2_spread(chain, rev_spread, epsilon);
  r.bounds["chi2_spread_integral"] = spread.integral_form;
  r.bounds["chi2_spread_flat"] = spread.flat_form;
  r.caveats.push_back("chi2_spread_* bound chi2(4 epsilon^2), which dominates tau(epsilon)");

  if (chain.reversible()) {
    const double factor = tau_bound_factor(epsilon);
    r.bounds["tau_blocking_h_plus"] = factor * bound_blocking_tau(chain, profile(chain, Quantity::h_plus, opt));
    r.bounds["tau_blocking_h_mod"] = factor * bound_blocking_tau(chain, profile(chain, Quantity::h_mod, opt));
    r.bounds["tau_blocking_h_gl"] = factor * bound_blocking_tau(chain, profile(chain, Quantity::h_gl, opt));
    r.caveats.push_back("tau_blocking_* use the published constant 8*1376 verbatim");
    if (epsilon < 0.25) r.caveats.push_back("tau_blocking_* bounds scaled by ceil(log2(1/epsilon))");
    if (chain.lazy() && epsilon < 0.5) {
      const double big = profile(chain, Quantity::psi_big, opt).at(0.5);
      const auto gap = spectral_gap(chain);
      const auto low = bound_tau_lower(big, gap.lambda, epsilon);
      r.lower_bounds["tau_psi_big"] = low.psi_big_form;
      r.lower_bounds["tau_spectral_gap"] = low.gap_form;
      r.bounds["lambda_upper_4_psi_big"] = 4.0 * big;
      r.lower_bounds["lambda_lower_quarter_psi_plus"] = 0.25 * profile(chain, Quantity::psi_plus, opt).at(0.5);
      r.lambda = gap.lambda;
    }
  } else {
    r.caveats.push_back("chain is not reversible: blocking-conductance and spectral bounds omitted");
  }
  return r;
}

}  // namespace mixiso
