#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mixiso/chain.hpp"
#include "mixiso/enumerate.hpp"
#include "mixiso/gradients.hpp"
#include "mixiso/isoperimetry.hpp"

namespace mixiso {

enum class Quantity {
  conductance,
  psi_plus,
  psi_plus_reversed,
  psi_minus,
  psi_gl,
  psi_mod,
  psi_evo,
  psi_big,
  h_plus,
  h_mod,
  h_gl,
  h1_plus,
  h2_plus,
  hinf_plus,
  h1_minus,
  h2_minus,
  hinf_minus,
};

enum class Window { at_most_x, half_to_x };

inline constexpr std::pair<Quantity, std::string_view> kQuantityNames[] = {
    {Quantity::conductance, "conductance"}, {Quantity::psi_plus, "psi_plus"},
    {Quantity::psi_plus_reversed, "psi_plus_reversed"}, {Quantity::psi_minus, "psi_minus"},
    {Quantity::psi_gl, "psi_gl"},           {Quantity::psi_mod, "psi_mod"},
    {Quantity::psi_evo, "psi_evo"},         {Quantity::psi_big, "psi_big"},
    {Quantity::h_plus, "h_plus"},           {Quantity::h_mod, "h_mod"},
    {Quantity::h_gl, "h_gl"},               {Quantity::h1_plus, "h1_plus"},
    {Quantity::h2_plus, "h2_plus"},         {Quantity::hinf_plus, "hinf_plus"},
    {Quantity::h1_minus, "h1_minus"},       {Quantity::h2_minus, "h2_minus"},
    {Quantity::hinf_minus, "hinf_minus"},
};

inline std::string_view to_string(Quantity q) {
  for (const auto& [k, name] : kQuantityNames)
    if (k == q) return name;
  return "?";
}

inline std::optional<Quantity> parse_quantity(std::string_view name) {
  for (const auto& [k, n] : kQuantityNames)
    if (n == name) return k;
  return std::nullopt;
}

inline std::string_view to_string(Window w) { return w == Window::at_most_x ? "at_most_x" : "half_to_x"; }

/// h^+ conditions on x/2 <= pi(A) <= x; everything else on pi(A) <= x.
inline Window default_window(Quantity q) { return q == Quantity::h_plus ? Window::half_to_x : Window::at_most_x; }

/// Blocking-conductance h functions are suprema; everything else is an infimum.
inline bool is_supremum(Quantity q) { return q == Quantity::h_plus || q == Quantity::h_mod || q == Quantity::h_gl; }

/// h^+ and h_mod carry a 1/x factor outside the supremum.
inline int inverse_x_power(Quantity q) { return q == Quantity::h_plus || q == Quantity::h_mod ? 1 : 0; }

namespace detail {
// Set sizes closer than this are the same size up to summation rounding.
inline constexpr double kSizeTol = 1e-12;
}  // namespace detail

/// Size-indexed profile over x in [b_0, 1/2]. On each open interval
/// (b_i, b_{i+1}) the value is c_i * x^{-power}; point_values holds the value
/// at each breakpoint, where the window is closed and may admit more sets.
struct Profile {
  Quantity quantity = Quantity::conductance;
  Window window = Window::at_most_x;
  int power = 0;
  std::vector<double> breakpoints;
  std::vector<double> coefficients;
  std::vector<double> point_values;
  // Outer infima/suprema range over discrete subsets only.
  bool discrete_outer_sets = true;

  double lower() const { return breakpoints.front(); }
  double upper() const { return breakpoints.back(); }

  double value(std::size_t piece, double x) const { return coefficients[piece] * (power == 1 ? 1.0 / x : 1.0); }

  double at(double x) const {
    for (std::size_t i = 0; i < breakpoints.size(); ++i)
      if (std::abs(x - breakpoints[i]) <= detail::kSizeTol) return point_values[i];
    return value(piece_index(x), x);
  }

  /// int_lo^hi value(x) dx. Below b_0 the first piece is extended downward.
  double integral(double lo, double hi) const {
    return integrate(lo, hi, [&](std::size_t i, double a, double b) {
      const double c = coefficients[i];
      return power == 1 ? c * std::log(b / a) : c * (b - a);
    });
  }

  /// int_lo^hi dx / (x value(x)).
  double integral_inverse(double lo, double hi) const {
    return integrate(lo, hi, [&](std::size_t i, double a, double b) {
      const double c = coefficients[i];
      return power == 1 ? (b - a) / c : std::log(b / a) / c;
    });
  }

  void write_csv(std::ostream& os) const {
    os << "x,value\n";
    char buf[64];
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", breakpoints[i], point_values[i]);
      os << buf;
    }
  }

 private:
  std::size_t piece_index(double x) const {
    if (x <= breakpoints.front()) return 0;
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    const auto i = static_cast<std::size_t>(it - breakpoints.begin());
    return std::min(i - 1, coefficients.size() - 1);
  }

  template <class Piece>
  double integrate(double lo, double hi, Piece piece) const {
    double s = 0.0;
    if (lo < breakpoints.front()) s += piece(0, lo, std::min(hi, breakpoints.front()));
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
      const double a = std::max(lo, breakpoints[i]);
      const double b = std::min(hi, breakpoints[i + 1]);
      if (b > a) s += piece(i, a, b);
    }
    return s;
  }
};

namespace detail {

struct SizeExtremes {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  void add(double v) {
    min = std::min(min, v);
    max = std::max(max, v);
  }
  void merge(const SizeExtremes& o) {
    min = std::min(min, o.min);
    max = std::max(max, o.max);
  }
};

using SizeTable = std::map<double, SizeExtremes>;

/// Per-set value that the profile reduces over. For suprema this is the
/// quantity inside the sup (before the 1/x factor).
inline double base_value(Quantity q, const SetAnalysis& fwd, const SetAnalysis* rev) {
  switch (q) {
    case Quantity::conductance: return fwd.conductance();
    case Quantity::psi_plus: return fwd.spread_plus();
    case Quantity::psi_plus_reversed: return rev->spread_plus();
    case Quantity::psi_minus: return fwd.spread_minus();
    case Quantity::psi_gl: return fwd.spread_gl();
    case Quantity::psi_mod: return fwd.spread_mod();
    case Quantity::psi_evo: return fwd.psi_evo();
    case Quantity::psi_big: return fwd.psi_big();
    case Quantity::h_plus: return 1.0 / fwd.spread_plus();
    case Quantity::h_mod: return 1.0 / fwd.spread_mod();
    case Quantity::h_gl: return 1.0 / (fwd.measure() * fwd.spread_gl());
    case Quantity::h1_plus: return h_p(fwd, GradientOrder::one, Sign::plus).value;
    case Quantity::h2_plus: return h_p(fwd, GradientOrder::two, Sign::plus).value;
    case Quantity::hinf_plus: return h_p(fwd, GradientOrder::infinity, Sign::plus).value;
    case Quantity::h1_minus: return h_p(fwd, GradientOrder::one, Sign::minus).value;
    case Quantity::h2_minus: return h_p(fwd, GradientOrder::two, Sign::minus).value;
    case Quantity::hinf_minus: return h_p(fwd, GradientOrder::infinity, Sign::minus).value;
  }
  return 0.0;
}

/// Range min/max over a fixed array (sparse table).
class RangeExtremes {
 public:
  explicit RangeExtremes(const std::vector<SizeExtremes>& v) {
    levels_.push_back(v);
    for (std::size_t w = 1; 2 * w <= v.size(); w *= 2) {
      const auto& prev = levels_.back();
      std::vector<SizeExtremes> next(prev.size() - w);
      for (std::size_t i = 0; i < next.size(); ++i) {
        next[i] = prev[i];
        next[i].merge(prev[i + w]);
      }
      levels_.push_back(std::move(next));
    }
  }

  /// Extremes over [lo, hi] inclusive.
  SizeExtremes query(std::size_t lo, std::size_t hi) const {
    const std::size_t len = hi - lo + 1;
    std::size_t k = 0;
    while ((std::size_t{2} << k) <= len) ++k;
    SizeExtremes e = levels_[k][lo];
    e.merge(levels_[k][hi + 1 - (std::size_t{1} << k)]);
    return e;
  }

 private:
  std::vector<std::vector<SizeExtremes>> levels_;
};

inline std::vector<double> cluster(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (double x : xs)
    if (out.empty() || x > out.back() + kSizeTol) out.push_back(x);
  return out;
}

inline Profile assemble_profile(Quantity q, Window w, const SizeTable& table) {
  // Merge sizes that agree up to summation rounding.
  std::vector<double> sizes;
  std::vector<SizeExtremes> ext;
  for (const auto& [s, e] : table) {
    if (s > 0.5 + kSizeTol) continue;
    if (sizes.empty() || s > sizes.back() + kSizeTol) {
      sizes.push_back(s);
      ext.push_back(e);
    } else {
      ext.back().merge(e);
    }
  }
  if (sizes.empty()) throw Error(ErrorKind::BadParam, "no subset with pi(A) <= 1/2");

  std::vector<double> events = sizes;
  if (w == Window::half_to_x)
    for (double s : sizes)
      if (2.0 * s <= 0.5 + kSizeTol) events.push_back(2.0 * s);
  events.push_back(0.5);
  events = cluster(std::move(events));
  if (std::abs(events.back() - 0.5) <= kSizeTol) events.back() = 0.5;

  const RangeExtremes range(ext);
  const bool sup = is_supremum(q);
  const int power = inverse_x_power(q);

  // Index of the largest size <= x (sizes[0] <= x holds for every event).
  auto last_at_most = [&](double x) {
    const auto it = std::upper_bound(sizes.begin(), sizes.end(), x + kSizeTol);
    return static_cast<std::size_t>(it - sizes.begin()) - 1;
  };
  auto first_at_least = [&](double x) {
    const auto it = std::lower_bound(sizes.begin(), sizes.end(), x - kSizeTol);
    return static_cast<std::size_t>(it - sizes.begin());
  };
  // Family sizes in [lo_size, x]; an empty window falls back to the largest
  // achievable size below x.
  auto reduce = [&](double lo_size, double x) {
    const std::size_t hi = last_at_most(x);
    std::size_t lo = w == Window::at_most_x ? 0 : first_at_least(lo_size);
    if (lo > hi) lo = hi;
    const auto e = range.query(lo, hi);
    return sup ? e.max : e.min;
  };

  Profile p;
  p.quantity = q;
  p.window = w;
  p.power = power;
  p.breakpoints = events;
  for (std::size_t i = 0; i + 1 < events.size(); ++i)
    p.coefficients.push_back(reduce(events[i + 1] / 2.0, events[i]));
  for (double b : events) {
    const double c = reduce(b / 2.0, b);
    p.point_values.push_back(power == 1 ? c / b : c);
  }
  return p;
}

}  // namespace detail

/// Exhaustive profile over all subsets with pi(A) <= 1/2.
inline Profile profile(const MarkovChain& chain, Quantity q, Window w, const EnumerationOptions& opt = {}) {
  const auto n = chain.size();
  require_enumerable(n, opt);
  std::optional<MarkovChain> rev;
  if (q == Quantity::psi_plus_reversed) rev.emplace(time_reversal(chain));
  auto table = enumerate_subsets(
      n, opt, detail::SizeTable{},
      [&](detail::SizeTable& acc, std::uint64_t mask) {
        const auto a = StateSet::from_mask(n, mask);
        const SetAnalysis fwd(chain, a);
        if (fwd.measure() > 0.5 + detail::kSizeTol) return;
        std::optional<SetAnalysis> r;
        if (rev) r.emplace(*rev, a);
        acc[fwd.measure()].add(detail::base_value(q, fwd, r ? &*r : nullptr));
      },
      [](detail::SizeTable& into, detail::SizeTable&& from) {
        for (const auto& [s, e] : from) into[s].merge(e);
      });
  return detail::assemble_profile(q, w, table);
}

inline Profile profile(const MarkovChain& chain, Quantity q, const EnumerationOptions& opt = {}) {
  return profile(chain, q, default_window(q), opt);
}

/// Profile restricted to a caller-supplied family of sets. Useful for chains
/// with a large symmetry group, where one representative per orbit gives the
/// exhaustive answer.
inline Profile profile_over(const MarkovChain& chain, Quantity q, Window w, std::span<const StateSet> family) {
  std::optional<MarkovChain> rev;
  if (q == Quantity::psi_plus_reversed) rev.emplace(time_reversal(chain));
  detail::SizeTable table;
  for (const auto& a : family) {
    const SetAnalysis fwd(chain, a);
    if (fwd.measure() > 0.5 + detail::kSizeTol) continue;
    std::optional<SetAnalysis> r;
    if (rev) r.emplace(*rev, a);
    table[fwd.measure()].add(detail::base_value(q, fwd, r ? &*r : nullptr));
  }
  return detail::assemble_profile(q, w, table);
}

inline Profile profile_over(const MarkovChain& chain, Quantity q, std::span<const StateSet> family) {
  return profile_over(chain, q, default_window(q), family);
}

}  // namespace mixiso
