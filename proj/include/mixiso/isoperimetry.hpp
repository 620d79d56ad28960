#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "mixiso/chain.hpp"
#include "mixiso/error.hpp"
#include "mixiso/piecewise.hpp"

namespace mixiso {

enum class FlowMode { infimum, supremum };

/// All set functionals of one chain evaluated on one set.
struct SpreadRecord {
  double psi_plus = 0.0;
  double psi_minus = 0.0;
  double psi_gl = 0.0;
  double psi_mod = 0.0;
  double psi_evo = 0.0;
  double psi_big = 0.0;
  double conductance = 0.0;
  bool reversed = false;
};

namespace detail {

struct Cell {
  std::size_t state;
  double mass;  // pi(state)
  double rate;  // transition probability across the cut
};

inline void require_proper(const MarkovChain& chain, const StateSet& a) {
  if (a.universe() != chain.size()) throw Error(ErrorKind::BadParam, "set universe does not match chain size");
  const auto c = a.count();
  if (c == 0) throw Error(ErrorKind::EmptySet, "set must be nonempty");
  if (c == chain.size()) throw Error(ErrorKind::FullSet, "set must be a proper subset");
}

/// int_0^x y r(y) dy with the cells laid out on [0, x] in the given order.
inline double first_moment(const std::vector<Cell>& ordered) {
  double acc = 0.0, before = 0.0;
  for (const auto& c : ordered) {
    acc += c.rate * (before * c.mass + 0.5 * c.mass * c.mass);
    before += c.mass;
  }
  return acc;
}

template <class Less>
std::vector<Cell> sorted_by(std::vector<Cell> cells, Less less) {
  std::stable_sort(cells.begin(), cells.end(), less);
  return cells;
}

inline bool by_rate_asc(const Cell& a, const Cell& b) { return a.rate < b.rate; }
inline bool by_rate_desc(const Cell& a, const Cell& b) { return a.rate > b.rate; }

}  // namespace detail

/// Precomputed boundary data of a set A for one chain. Every functional of A
/// is derived from the exit rates P(v, A^c) of members and the entry rates
/// P(w, A) of non-members, so they are computed once here.
class SetAnalysis {
 public:
  SetAnalysis(const MarkovChain& chain, const StateSet& a) : chain_(&chain), set_(a) {
    detail::require_proper(chain, a);
    const auto n = chain.size();
    inside_.reserve(a.count());
    outside_.reserve(n - a.count());
    for (std::size_t v = 0; v < n; ++v) {
      double into_a = 0.0, into_c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (a.contains(j))
          into_a += chain.P(v, j);
        else
          into_c += chain.P(v, j);
      }
      if (a.contains(v)) {
        inside_.push_back({v, chain.pi(v), into_c});
        measure_ += chain.pi(v);
      } else {
        outside_.push_back({v, chain.pi(v), into_a});
        complement_measure_ += chain.pi(v);
      }
    }
    for (const auto& c : inside_) flow_out_ += c.mass * c.rate;
    for (const auto& c : outside_) flow_in_ += c.mass * c.rate;
  }

  const MarkovChain& chain() const noexcept { return *chain_; }
  const StateSet& set() const noexcept { return set_; }
  double measure() const noexcept { return measure_; }
  double complement_measure() const noexcept { return complement_measure_; }
  /// Q(A, A^c).
  double flow_out() const noexcept { return flow_out_; }
  /// Q(A^c, A).
  double flow_in() const noexcept { return flow_in_; }
  const std::vector<detail::Cell>& inside() const noexcept { return inside_; }
  const std::vector<detail::Cell>& outside() const noexcept { return outside_; }

  /// t -> Psi(t, A^c) (infimum) or Psi_big(t, A^c) (supremum) on [0, 1].
  PiecewiseLinear flow_profile(FlowMode mode) const {
    const auto order = mode == FlowMode::infimum ? detail::by_rate_asc : detail::by_rate_desc;
    const auto in = detail::sorted_by(inside_, order);
    const auto out = detail::sorted_by(outside_, order);

    std::vector<double> t{0.0}, y{0.0};
    double cum_t = 0.0, cum_q = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i) {
      cum_t += in[i].mass;
      cum_q += in[i].mass * in[i].rate;
      push(t, y, i + 1 == in.size() ? measure_ : cum_t, cum_q);
    }
    // Beyond pi(A) the profile is Psi(1 - t, A): fractional subsets of A^c of
    // size s = 1 - t, filled in the same rate order, read backwards in t.
    std::vector<double> s_cum(out.size() + 1, 0.0), q_cum(out.size() + 1, 0.0);
    for (std::size_t j = 0; j < out.size(); ++j) {
      s_cum[j + 1] = s_cum[j] + out[j].mass;
      q_cum[j + 1] = q_cum[j] + out[j].mass * out[j].rate;
    }
    const double total = s_cum.back();
    for (std::size_t j = out.size(); j-- > 0;) {
      const double tt = j == 0 ? 1.0 : measure_ + (total - s_cum[j]);
      push(t, y, tt, j == 0 ? 0.0 : q_cum[j]);
    }
    return PiecewiseLinear(std::move(t), std::move(y));
  }

  double conductance() const { return flow_out_ / measure_; }

  /// psi^+(A) pi(A)^2 = int_0^{pi(A)} y P(y, A^c) dy with A laid out by
  /// decreasing exit probability.
  double spread_plus() const {
    return detail::first_moment(detail::sorted_by(inside_, detail::by_rate_desc)) / (measure_ * measure_);
  }

  /// Same integral with increasing exit probability: the sup-flow profile.
  double psi_big() const {
    return detail::first_moment(detail::sorted_by(inside_, detail::by_rate_asc)) / (measure_ * measure_);
  }

  double spread_minus() const {
    return flow_profile(FlowMode::infimum).integral(measure_, 1.0) / (measure_ * measure_);
  }

  double spread_gl() const { return spread_plus() + spread_minus(); }

  /// int_0^1 Psi(t) / (pi(A) min(t, 1 - t)) dt, integrated analytically on
  /// each linear piece after splitting at t = 1/2.
  double spread_mod() const {
    const auto prof = flow_profile(FlowMode::infimum).with_breakpoint(0.5);
    const auto& x = prof.breakpoints();
    const auto& v = prof.values();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double t0 = x[i], t1 = x[i + 1];
      const double slope = (v[i + 1] - v[i]) / (t1 - t0);
      if (t1 <= 0.5) {
        // (a + b t) / t with a = Psi(t0) - b t0; a vanishes on the piece at 0.
        const double a = i == 0 ? 0.0 : v[i] - slope * t0;
        acc += slope * (t1 - t0);
        if (a != 0.0) acc += a * std::log(t1 / t0);
      } else {
        // In s = 1 - t: (alpha + beta s) / s; alpha vanishes on the piece at 1.
        const double s0 = 1.0 - t0, s1 = 1.0 - t1;
        const double beta = -slope;
        const double alpha = i + 2 == x.size() ? 0.0 : v[i + 1] - beta * s1;
        acc += beta * (s0 - s1);
        if (alpha != 0.0) acc += alpha * std::log(s0 / s1);
      }
    }
    return acc / measure_;
  }

  /// Reverse-chain probabilities P_rev(y, A) = sum_{a in A} pi(a) P(a, y) / pi(y).
  std::vector<double> reverse_entry() const {
    const auto n = chain_->size();
    std::vector<double> r(n, 0.0);
    for (std::size_t y = 0; y < n; ++y) {
      double s = 0.0;
      for (const auto& c : inside_) s += c.mass * chain_->P(c.state, y);
      r[y] = std::clamp(s / chain_->pi(y), 0.0, 1.0);
    }
    return r;
  }

  /// u -> pi(A_u), A_u = {y : P_rev(y, A) > u}, on [0, 1).
  StepFunction level_set_profile() const {
    const auto r = reverse_entry();
    std::vector<double> levels;
    for (double x : r)
      if (x > 0.0 && x < 1.0) levels.push_back(x);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    std::vector<double> b{0.0};
    b.insert(b.end(), levels.begin(), levels.end());
    b.push_back(1.0);
    std::vector<double> vals(b.size() - 1, 0.0);
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      double m = 0.0;
      for (std::size_t y = 0; y < r.size(); ++y)
        if (r[y] > b[i]) m += chain_->pi(y);
      vals[i] = m;
    }
    return StepFunction(std::move(b), std::move(vals));
  }

  /// 1 - int_0^1 sqrt(pi(A_u) / pi(A)) du.
  double psi_evo() const {
    const auto prof = level_set_profile();
    const auto& b = prof.breakpoints();
    const auto& v = prof.values();
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += (b[i + 1] - b[i]) * std::sqrt(v[i] / measure_);
    return 1.0 - s;
  }

  /// 1/2 int_{1/2}^1 ((pi(A) - pi(A_u)) / pi(A))^2 du; equals psi^+ of the
  /// time reversal for lazy chains.
  double psi_plus_via_levelsets() const {
    if (!chain_->lazy()) throw Error(ErrorKind::NotLazy, "level-set form of the spread needs a lazy chain");
    const auto prof = level_set_profile();
    const auto& b = prof.breakpoints();
    const auto& v = prof.values();
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double lo = std::max(b[i], 0.5), hi = b[i + 1];
      if (hi <= lo) continue;
      const double d = (measure_ - v[i]) / measure_;
      s += (hi - lo) * d * d;
    }
    return 0.5 * s;
  }

  /// Right-hand side of the level-set representation of the reversed flow
  /// profile at size t.
  double flow_from_levelsets(double t) const {
    if (!chain_->lazy()) throw Error(ErrorKind::NotLazy, "level-set flow identity needs a lazy chain");
    if (!(t > 0.0 && t < 1.0)) throw Error(ErrorKind::DomainError, "t must lie in (0, 1)");
    const auto prof = level_set_profile();
    const auto& b = prof.breakpoints();
    const auto& v = prof.values();
    // w(t) = inf{u : pi(A_u) <= t}; pi(A_u) is non-increasing in u.
    double w = 1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] <= t) {
        w = b[i];
        break;
      }
    }
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (t <= measure_) {
        const double lo = std::max(b[i], w), hi = b[i + 1];
        if (hi > lo) s += (hi - lo) * (t - v[i]);
      } else {
        const double lo = b[i], hi = std::min(b[i + 1], w);
        if (hi > lo) s += (hi - lo) * (v[i] - t);
      }
    }
    return s;
  }

  SpreadRecord record(bool reversed_flag) const {
    SpreadRecord r;
    r.psi_plus = spread_plus();
    r.psi_minus = spread_minus();
    r.psi_gl = r.psi_plus + r.psi_minus;
    r.psi_mod = spread_mod();
    r.psi_evo = psi_evo();
    r.psi_big = psi_big();
    r.conductance = conductance();
    r.reversed = reversed_flag;
    return r;
  }

 private:
  static void push(std::vector<double>& t, std::vector<double>& y, double tt, double yy) {
    if (tt > t.back()) {
      t.push_back(tt);
      y.push_back(yy);
    } else {
      y.back() = yy;
    }
  }

  const MarkovChain* chain_;
  StateSet set_;
  std::vector<detail::Cell> inside_;
  std::vector<detail::Cell> outside_;
  double measure_ = 0.0;
  double complement_measure_ = 0.0;
  double flow_out_ = 0.0;
  double flow_in_ = 0.0;
};

// Free-function surface.

inline PiecewiseLinear flow_profile(const MarkovChain& chain, const StateSet& a, FlowMode mode) {
  return SetAnalysis(chain, a).flow_profile(mode);
}

inline double spread_plus(const MarkovChain& chain, const StateSet& a) { return SetAnalysis(chain, a).spread_plus(); }
inline double spread_minus(const MarkovChain& chain, const StateSet& a) { return SetAnalysis(chain, a).spread_minus(); }
inline double spread_gl(const MarkovChain& chain, const StateSet& a) { return SetAnalysis(chain, a).spread_gl(); }
inline double spread_mod(const MarkovChain& chain, const StateSet& a) { return SetAnalysis(chain, a).spread_mod(); }
inline double psi_big(const MarkovChain& chain, const StateSet& a) { return SetAnalysis(chain, a).psi_big(); }
inline double psi_evo(const MarkovChain& chain, const StateSet& a) { return SetAnalysis(chain, a).psi_evo(); }
inline double conductance(const MarkovChain& chain, const StateSet& a) { return SetAnalysis(chain, a).conductance(); }

inline StepFunction level_set_profile(const MarkovChain& chain, const StateSet& a) {
  return SetAnalysis(chain, a).level_set_profile();
}

inline double psi_plus_via_levelsets(const MarkovChain& chain, const StateSet& a) {
  return SetAnalysis(chain, a).psi_plus_via_levelsets();
}

struct FlowIdentity {
  double lhs;  // reversed flow profile at t
  double rhs;  // level-set integral
};

inline FlowIdentity lemma_flow_identity(const MarkovChain& chain, const StateSet& a, double t) {
  if (!chain.lazy()) throw Error(ErrorKind::NotLazy, "level-set flow identity needs a lazy chain");
  const SetAnalysis forward(chain, a);
  const double rhs = forward.flow_from_levelsets(t);
  const auto rev = time_reversal(chain);
  const double lhs = SetAnalysis(rev, a).flow_profile(FlowMode::infimum)(t);
  return {lhs, rhs};
}

/// With reversed = true every field is computed on time_reversal(chain).
inline SpreadRecord spread_record(const MarkovChain& chain, const StateSet& a, bool reversed) {
  if (!reversed) return SetAnalysis(chain, a).record(false);
  const auto rev = time_reversal(chain);
  return SetAnalysis(rev, a).record(true);
}

}  // namespace mixiso
