#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "mixiso/chain.hpp"
#include "mixiso/enumerate.hpp"
#include "mixiso/error.hpp"
#include "mixiso/gradients.hpp"
#include "mixiso/isoperimetry.hpp"
#include "mixiso/spectral.hpp"

namespace mixiso {

/// Per-subset inequalities and identities run by verify(). Inequalities are
/// read as lhs >= rhs; identities as |lhs - rhs| <= kIdentity.
enum class Check : std::size_t {
  gl_ge_half_mod,
  half_mod_ge_evo,
  evo_ge_quarter_plus,
  levelset_spread_identity,
  big_plus_conductance_identity,
  plus_upper_h2,
  plus_upper_h1_hinf,
  plus_lower_log,
  plus_lower_sqrt,
  plus_lower_alon,
  plus_lower_js,
  minus_upper_h2,
  minus_upper_h1_hinf,
  minus_lower_log,
  minus_lower_sqrt,
  minus_lower_alon,
  minus_lower_js,
  count_
};

inline constexpr std::size_t kCheckCount = static_cast<std::size_t>(Check::count_);

inline constexpr std::array<std::string_view, kCheckCount> kCheckNames = {
    "gl_ge_half_mod",   "half_mod_ge_evo",     "evo_ge_quarter_plus", "levelset_spread_identity",
    "big_plus_conductance_identity",           "plus_upper_h2",       "plus_upper_h1_hinf",
    "plus_lower_log",   "plus_lower_sqrt",     "plus_lower_alon",     "plus_lower_js",
    "minus_upper_h2",   "minus_upper_h1_hinf", "minus_lower_log",     "minus_lower_sqrt",
    "minus_lower_alon", "minus_lower_js"};

inline std::string_view to_string(Check c) { return kCheckNames[static_cast<std::size_t>(c)]; }

inline constexpr std::uint64_t kNoMask = std::numeric_limits<std::uint64_t>::max();

struct CheckTally {
  std::uint64_t evaluated = 0;
  std::uint64_t violations = 0;
  // Largest rhs - lhs seen (|lhs - rhs| for identities); negative means slack.
  double worst_gap = -std::numeric_limits<double>::infinity();
  std::uint64_t first_violation = kNoMask;  // smallest violating mask

  void record(double gap, double slack, std::uint64_t mask) {
    ++evaluated;
    worst_gap = std::max(worst_gap, gap);
    if (gap > slack) {
      ++violations;
      first_violation = std::min(first_violation, mask);
    }
  }

  void merge(const CheckTally& o) {
    evaluated += o.evaluated;
    violations += o.violations;
    worst_gap = std::max(worst_gap, o.worst_gap);
    first_violation = std::min(first_violation, o.first_violation);
  }
};

struct ChainCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = true;
};

struct VerifyReport {
  std::size_t states = 0;
  std::uint64_t subsets = 0;
  std::uint64_t small_subsets = 0;  // pi(A) <= 1/2
  bool lazy = false;
  bool reversible = false;
  std::array<CheckTally, kCheckCount> tallies{};
  std::vector<ChainCheck> chain_checks;
  std::vector<std::string> skipped;

  std::uint64_t violations() const {
    std::uint64_t v = 0;
    for (const auto& t : tallies) v += t.violations;
    for (const auto& c : chain_checks) v += c.ok ? 0 : 1;
    return v;
  }
  bool ok() const { return violations() == 0; }
};

namespace detail {

struct VerifyAcc {
  std::array<CheckTally, kCheckCount> tallies{};
  std::uint64_t subsets = 0;
  std::uint64_t small_subsets = 0;
  double min_psi_plus = std::numeric_limits<double>::infinity();
  double min_psi_big = std::numeric_limits<double>::infinity();

  void merge(VerifyAcc&& o) {
    for (std::size_t i = 0; i < kCheckCount; ++i) tallies[i].merge(o.tallies[i]);
    subsets += o.subsets;
    small_subsets += o.small_subsets;
    min_psi_plus = std::min(min_psi_plus, o.min_psi_plus);
    min_psi_big = std::min(min_psi_big, o.min_psi_big);
  }
};

inline void tally_sandwich(VerifyAcc& acc, const SandwichReport& r, Check first, double slack, std::uint64_t mask) {
  const auto at = [&](std::size_t k) -> CheckTally& { return acc.tallies[static_cast<std::size_t>(first) + k]; };
  at(0).record(r.psi - r.upper, slack, mask);
  at(1).record(r.psi - r.upper_h1_hinf, slack, mask);
  at(2).record(r.lower_log - r.psi, slack, mask);
  at(3).record(r.lower_sqrt - r.psi, slack, mask);
  at(4).record(r.lower_alon - r.psi, slack, mask);
  at(5).record(r.lower_js - r.psi, slack, mask);
}

}  // namespace detail

/// Runs every per-subset check over all proper nonempty subsets, then the
/// chain-level spectral and mixing checks that need the resulting profiles.
inline VerifyReport verify(const MarkovChain& chain, const EnumerationOptions& opt = {}, double slack = tol::kSlack) {
  const auto n = chain.size();
  require_enumerable(n, opt);
  const auto rev = time_reversal(chain);
  const bool lazy = chain.lazy();

  auto visit = [&](detail::VerifyAcc& acc, std::uint64_t mask) {
    const auto a = StateSet::from_mask(n, mask);
    const SetAnalysis fwd(chain, a);
    const SetAnalysis back(rev, a);
    ++acc.subsets;

    const double plus = fwd.spread_plus();
    const double big = fwd.psi_big();
    acc.tallies[static_cast<std::size_t>(Check::big_plus_conductance_identity)].record(
        std::abs(big + plus - fwd.conductance()), tol::kIdentity, mask);
    if (lazy)
      acc.tallies[static_cast<std::size_t>(Check::levelset_spread_identity)].record(
          std::abs(fwd.psi_plus_via_levelsets() - back.spread_plus()), tol::kIdentity, mask);

    if (fwd.measure() > 0.5 + tol::kExact) return;
    ++acc.small_subsets;
    acc.min_psi_plus = std::min(acc.min_psi_plus, plus);
    acc.min_psi_big = std::min(acc.min_psi_big, big);

    if (lazy) {
      const double gl = back.spread_gl();
      const double half_mod = 0.5 * back.spread_mod();
      const double evo = fwd.psi_evo();
      const double quarter_plus = 0.25 * back.spread_plus();
      acc.tallies[static_cast<std::size_t>(Check::gl_ge_half_mod)].record(half_mod - gl, slack, mask);
      acc.tallies[static_cast<std::size_t>(Check::half_mod_ge_evo)].record(evo - half_mod, slack, mask);
      acc.tallies[static_cast<std::size_t>(Check::evo_ge_quarter_plus)].record(quarter_plus - evo, slack, mask);
    }
    detail::tally_sandwich(acc, sandwich(fwd, Sign::plus), Check::plus_upper_h2, slack, mask);
    detail::tally_sandwich(acc, sandwich(fwd, Sign::minus), Check::minus_upper_h2, slack, mask);
  };

  auto acc = enumerate_subsets(n, opt, detail::VerifyAcc{}, visit,
                               [](detail::VerifyAcc& a, detail::VerifyAcc&& b) { a.merge(std::move(b)); });

  VerifyReport r;
  r.states = n;
  r.subsets = acc.subsets;
  r.small_subsets = acc.small_subsets;
  r.lazy = lazy;
  r.reversible = chain.reversible();
  r.tallies = acc.tallies;
  if (!lazy) r.skipped.emplace_back("spread chain and level-set identity: chain is not lazy");

  if (lazy && r.reversible) {
    const double lambda = spectral_gap(chain).lambda;
    const double upper = 4.0 * acc.min_psi_big;
    const double lower = 0.25 * acc.min_psi_plus;
    r.chain_checks.push_back({"gap_upper_psi_big", upper, lambda, upper >= lambda - slack});
    r.chain_checks.push_back({"gap_lower_psi_plus", lambda, lower, lambda >= lower - slack});
    const double tau = static_cast<double>(exact_mixing(chain, 0.25, Metric::tv));
    const auto lb = bound_tau_lower(acc.min_psi_big, lambda, 0.25);
    r.chain_checks.push_back({"tau_lower_psi_big", tau, lb.psi_big_form, tau >= lb.psi_big_form - slack});
    r.chain_checks.push_back({"tau_lower_gap", tau, lb.gap_form, tau >= lb.gap_form - slack});
  } else {
    r.skipped.emplace_back("spectral and mixing-time checks: chain is not lazy and reversible");
  }
  return r;
}

}  // namespace mixiso
