#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "mixiso/chain.hpp"
#include "mixiso/enumerate.hpp"
#include "mixiso/error.hpp"
#include "mixiso/isoperimetry.hpp"

namespace mixiso {

enum class Sign { plus, minus };
enum class GradientOrder { one, two, infinity };

inline std::string_view to_string(Sign s) { return s == Sign::plus ? "plus" : "minus"; }
inline std::string_view to_string(GradientOrder p) {
  switch (p) {
    case GradientOrder::one: return "1";
    case GradientOrder::two: return "2";
    case GradientOrder::infinity: return "infinity";
  }
  return "?";
}

/// Discrete p-gradient h_p^{+-}(A) = Q_p / min(pi(A), pi(A^c)).
struct GradientRecord {
  GradientOrder p = GradientOrder::one;
  Sign sign = Sign::plus;
  double value = 0.0;
  double q_flow = 0.0;
  double denominator = 0.0;
};

struct GradientTriple {
  double h1 = 0.0;
  double h2 = 0.0;
  double hinf = 0.0;
};

struct ExitConstants {
  double p_star = 0.0;
  double p_min = 0.0;             // inf of positive P(u, v), u in A, v in A^c
  double p_min_normalized = 0.0;  // same inf of P(u, v) / pi(v); reported only
};

struct SandwichReport {
  Sign sign = Sign::plus;
  double upper = 0.0;       // h2^2 / 2
  double upper_h1_hinf = 0.0;  // h1 hinf / 2
  double lower_log = 0.0;
  double lower_sqrt = 0.0;
  double lower_alon = 0.0;  // P_min hinf^2 / 2
  double lower_js = 0.0;    // h1^2 / (2 P_*)
  double psi = 0.0;
  double p_star = 0.0;
  double p_min = 0.0;
  double p_min_normalized = 0.0;
  bool degenerate_log = false;

  double best_lower() const { return std::max({lower_log, lower_sqrt, lower_alon, lower_js}); }
  bool holds(double slack = tol::kSlack) const {
    return upper >= psi - slack && upper_h1_hinf >= psi - slack && psi >= best_lower() - slack;
  }
};

namespace detail {

inline double q_p(std::span<const Cell> cells, GradientOrder p) {
  double s = 0.0;
  for (const auto& c : cells) {
    switch (p) {
      case GradientOrder::one: s += c.mass * c.rate; break;
      case GradientOrder::two: s += c.mass * std::sqrt(c.rate); break;
      case GradientOrder::infinity:
        if (c.mass * c.rate != 0.0) s += c.mass;
        break;
    }
  }
  return s;
}

}  // namespace detail

inline double gradient_denominator(const SetAnalysis& sa) {
  return std::min(sa.measure(), sa.complement_measure());
}

inline GradientRecord h_p(const SetAnalysis& sa, GradientOrder p, Sign sign) {
  const auto& cells = sign == Sign::plus ? sa.inside() : sa.outside();
  GradientRecord r;
  r.p = p;
  r.sign = sign;
  r.q_flow = detail::q_p(cells, p);
  r.denominator = gradient_denominator(sa);
  r.value = r.q_flow / r.denominator;
  return r;
}

inline GradientRecord h_p(const MarkovChain& chain, const StateSet& a, GradientOrder p, Sign sign) {
  return h_p(SetAnalysis(chain, a), p, sign);
}

inline GradientTriple gradients(const SetAnalysis& sa, Sign sign) {
  return {h_p(sa, GradientOrder::one, sign).value, h_p(sa, GradientOrder::two, sign).value,
          h_p(sa, GradientOrder::infinity, sign).value};
}

/// P_* = 1 - inf_{u in A} P(u, A) and the smallest positive A -> A^c step.
inline ExitConstants exit_constants(const MarkovChain& chain, const StateSet& a) {
  detail::require_proper(chain, a);
  const auto n = chain.size();
  ExitConstants k;
  double min_stay = std::numeric_limits<double>::infinity();
  double pmin = std::numeric_limits<double>::infinity();
  double pmin_norm = std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < n; ++u) {
    if (!a.contains(u)) continue;
    double stay = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      const double p = chain.P(u, v);
      if (a.contains(v)) {
        stay += p;
      } else if (p > 0.0) {
        pmin = std::min(pmin, p);
        pmin_norm = std::min(pmin_norm, p / chain.pi(v));
      }
    }
    min_stay = std::min(min_stay, stay);
  }
  if (!std::isfinite(pmin)) throw Error(ErrorKind::NoBoundaryEdge, "no positive transition leaves the set");
  k.p_star = 1.0 - min_stay;
  k.p_min = pmin;
  k.p_min_normalized = pmin_norm;
  return k;
}

/// Gradient sandwich of the spread for pi(A) <= 1/2. The minus side works on
/// the flow A^c -> A, so its exit constants are those of A^c.
inline SandwichReport sandwich(const SetAnalysis& sa, Sign sign) {
  if (sa.measure() > 0.5 + tol::kExact) throw Error(ErrorKind::TooBig, "sandwich needs pi(A) <= 1/2");
  const auto k = exit_constants(sa.chain(), sign == Sign::plus ? sa.set() : sa.set().complement());
  const auto h = gradients(sa, sign);

  SandwichReport r;
  r.sign = sign;
  r.psi = sign == Sign::plus ? sa.spread_plus() : sa.spread_minus();
  r.p_star = k.p_star;
  r.p_min = k.p_min;
  r.p_min_normalized = k.p_min_normalized;

  const double h2sq = h.h2 * h.h2;
  r.upper = 0.5 * h2sq;
  r.upper_h1_hinf = 0.5 * h.h1 * h.hinf;
  const double ratio = 12.0 * h.h1 * h.hinf / h2sq;
  double denom = std::log(ratio);
  if (!(ratio > std::numbers::e)) {
    r.degenerate_log = true;
    denom = 1.0;
  }
  r.lower_log = 0.5 * h2sq / denom;
  r.lower_sqrt = 0.5 * h2sq * std::sqrt(k.p_min / k.p_star);
  r.lower_alon = 0.5 * k.p_min * h.hinf * h.hinf;
  r.lower_js = 0.5 * h.h1 * h.h1 / k.p_star;
  return r;
}

inline SandwichReport sandwich(const MarkovChain& chain, const StateSet& a, Sign sign) {
  return sandwich(SetAnalysis(chain, a), sign);
}

/// Murali's constant: beta^+ = sqrt(inf_A Q(A, A^c)^2 / (pi(A) pi(A^c))), by
/// exhaustive enumeration.
inline double beta_plus(const MarkovChain& chain, const EnumerationOptions& opt = {}) {
  const auto n = chain.size();
  const double inf = enumerate_subsets(
      n, opt, std::numeric_limits<double>::infinity(),
      [&](double& acc, std::uint64_t mask) {
        const auto a = StateSet::from_mask(n, mask);
        double m = 0.0, q = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
          if (!a.contains(v)) continue;
          m += chain.pi(v);
          double out = 0.0;
          for (std::size_t j = 0; j < n; ++j)
            if (!a.contains(j)) out += chain.P(v, j);
          q += chain.pi(v) * out;
        }
        acc = std::min(acc, q * q / (m * (1.0 - m)));
      },
      [](double& a, double&& b) { a = std::min(a, b); });
  return std::sqrt(inf);
}

inline double talagrand_bound(std::size_t dimension, double x) {
  if (dimension < 1) throw Error(ErrorKind::DomainError, "dimension must be >= 1");
  if (!(x > 0.0 && x < 1.0)) throw Error(ErrorKind::DomainError, "x must lie in (0, 1)");
  return 0.25 * std::sqrt(-std::log(x * (1.0 - x)) / static_cast<double>(dimension));
}

/// Lower bound on h_2^+(x) for a Cartesian product, from the components' beta^+.
inline double tensor_bound_from_betas(std::span<const double> betas, double x) {
  if (betas.empty()) throw Error(ErrorKind::BadParam, "no components");
  if (!(x > 0.0 && x < 1.0)) throw Error(ErrorKind::DomainError, "x must lie in (0, 1)");
  const double bmin = *std::min_element(betas.begin(), betas.end());
  return 0.5 * bmin * std::sqrt(-std::log(x * (1.0 - x)) / static_cast<double>(betas.size()));
}

inline double tensor_bound(std::span<const MarkovChain> components, double x, const EnumerationOptions& opt = {}) {
  if (!(x > 0.0 && x < 1.0)) throw Error(ErrorKind::DomainError, "x must lie in (0, 1)");
  std::vector<double> betas;
  betas.reserve(components.size());
  for (const auto& c : components) betas.push_back(beta_plus(c, opt));
  return tensor_bound_from_betas(betas, x);
}

}  // namespace mixiso
