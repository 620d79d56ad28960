#pragma once

// Independent reference computations for the test suite. Nothing here calls
// the functionals under test; each quantity is rebuilt from its definition.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "mixiso/mixiso.hpp"

namespace oracle {

using mixiso::Matrix;
using mixiso::MarkovChain;
using mixiso::StateSet;

/// Lazy chain P = (I + W) / 2 with W a random stochastic matrix; roughly a
/// third of the entries of W are zeroed, keeping a cycle so it stays
/// irreducible. Generally non-reversible.
inline MarkovChain random_lazy_chain(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto N = static_cast<Eigen::Index>(n);
  Matrix W(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = 0; j < N; ++j) W(i, j) = u(rng) < 0.35 ? 0.0 : u(rng);
    W(i, (i + 1) % N) += 0.05 + u(rng);
    W.row(i) /= W.row(i).sum();
  }
  Matrix P = 0.5 * (Matrix::Identity(N, N) + W);
  for (Eigen::Index i = 0; i < N; ++i) P(i, i) = 1.0 - (P.row(i).sum() - P(i, i));
  return mixiso::build_chain(P);
}

/// Lazy reversible chain from random symmetric conductances.
inline MarkovChain random_reversible_chain(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto N = static_cast<Eigen::Index>(n);
  Matrix C = Matrix::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = i + 1; j < N; ++j) C(i, j) = C(j, i) = (u(rng) < 0.4 ? 0.0 : u(rng)) + (j == i + 1 ? 0.1 : 0.0);
  mixiso::Vector d = C.rowwise().sum();
  Matrix P(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = 0; j < N; ++j) P(i, j) = 0.5 * C(i, j) / d[i];
    P(i, i) = 0.0;
    P(i, i) = 1.0 - P.row(i).sum();
  }
  return mixiso::build_chain(P);
}

inline StateSet random_proper_set(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> pick(1, (std::uint64_t{1} << n) - 2);
  return StateSet::from_mask(n, pick(rng));
}

/// Stationary law by power iteration of a lazy chain.
inline std::vector<double> power_stationary(const MarkovChain& c, int iters = 20000) {
  const auto n = static_cast<Eigen::Index>(c.size());
  Eigen::RowVectorXd p = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int k = 0; k < iters; ++k) p = p * c.transitions();
  return {p.data(), p.data() + n};
}

inline double exit_rate(const MarkovChain& c, std::size_t v, const StateSet& target) {
  double s = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (target.contains(j)) s += c.P(v, j);
  return s;
}

/// Minimum of sum_{b} w_b r_b over fractional weights 0 <= w_b <= pi(b) on
/// `pool` with total t, by enumerating LP vertices: a subset S taken fully
/// plus at most one partially taken state.
inline double fractional_min(const std::vector<double>& mass, const std::vector<double>& rate, double t) {
  const std::size_t k = mass.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t S = 0; S < (std::uint64_t{1} << k); ++S) {
    double m = 0.0, q = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      if ((S >> i) & 1U) {
        m += mass[i];
        q += mass[i] * rate[i];
      }
    if (std::abs(m - t) <= 1e-14) best = std::min(best, q);
    if (m > t + 1e-14) continue;
    for (std::size_t f = 0; f < k; ++f) {
      if ((S >> f) & 1U) continue;
      const double need = t - m;
      if (need <= mass[f] + 1e-14) best = std::min(best, q + need * rate[f]);
    }
  }
  return best;
}

/// Psi(t, A^c): for t <= pi(A) the least flow from a size-t fractional
/// subset of A to A^c; beyond pi(A), the least flow from a size-(1 - t)
/// fractional subset of A^c into A.
inline double Psi(const MarkovChain& c, const StateSet& a, double t) {
  const auto ac = a.complement();
  std::vector<double> mi, ri, mo, ro;
  double pa = 0.0;
  for (std::size_t v = 0; v < c.size(); ++v) {
    if (a.contains(v)) {
      mi.push_back(c.pi(v));
      ri.push_back(exit_rate(c, v, ac));
      pa += c.pi(v);
    } else {
      mo.push_back(c.pi(v));
      ro.push_back(exit_rate(c, v, a));
    }
  }
  if (t <= pa) return fractional_min(mi, ri, t);
  return fractional_min(mo, ro, 1.0 - t);
}

/// Candidate kinks of Psi: partial sums of member masses from either side.
inline std::vector<double> Psi_kinks(const MarkovChain& c, const StateSet& a) {
  std::vector<double> in, out;
  for (std::size_t v = 0; v < c.size(); ++v) (a.contains(v) ? in : out).push_back(c.pi(v));
  const double pa = c.measure(a);
  std::vector<double> ks{0.0, 1.0, pa, 0.5};
  for (std::uint64_t S = 0; S < (std::uint64_t{1} << in.size()); ++S) {
    double m = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i)
      if ((S >> i) & 1U) m += in[i];
    ks.push_back(m);
  }
  for (std::uint64_t S = 0; S < (std::uint64_t{1} << out.size()); ++S) {
    double m = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i)
      if ((S >> i) & 1U) m += out[i];
    ks.push_back(1.0 - m);
  }
  std::sort(ks.begin(), ks.end());
  std::vector<double> u;
  for (double k : ks)
    if (k >= 0.0 && k <= 1.0 && (u.empty() || k > u.back() + 1e-13)) u.push_back(k);
  return u;
}

/// 20-point Gauss-Legendre on [a, b].
template <class F>
double gauss(F f, double a, double b) {
  static constexpr std::array<double, 10> x{0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
                                            0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
                                            0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
                                            0.9931285991850949};
  static constexpr std::array<double, 10> w{0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
                                            0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
                                            0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
                                            0.0176140071391521};
  const double m = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * (f(m - h * x[i]) + f(m + h * x[i]));
  return h * s;
}

/// int_lo^hi weight(t) Psi(t) dt, Gauss-Legendre between consecutive kinks.
template <class Weight>
double Psi_integral(const MarkovChain& c, const StateSet& a, double lo, double hi, Weight weight) {
  const auto ks = Psi_kinks(c, a);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
    const double l = std::max(lo, ks[i]), r = std::min(hi, ks[i + 1]);
    if (r <= l) continue;
    s += gauss([&](double t) { return weight(t) * Psi(c, a, t); }, l, r);
  }
  return s;
}

struct Spreads {
  double plus, minus, gl, mod;
};

inline Spreads spreads(const MarkovChain& c, const StateSet& a) {
  const double pa = c.measure(a);
  Spreads s{};
  s.plus = Psi_integral(c, a, 0.0, pa, [](double) { return 1.0; }) / (pa * pa);
  s.minus = Psi_integral(c, a, pa, 1.0, [](double) { return 1.0; }) / (pa * pa);
  s.gl = s.plus + s.minus;
  s.mod = Psi_integral(c, a, 0.0, 1.0, [&](double t) { return 1.0 / (pa * std::min(t, 1.0 - t)); });
  return s;
}

/// psi_evo from the reversed chain's one-step probabilities into A.
inline double psi_evo(const MarkovChain& c, const StateSet& a) {
  const auto rev = mixiso::time_reversal(c);
  const double pa = c.measure(a);
  std::vector<std::pair<double, double>> lv;  // (level, mass)
  for (std::size_t y = 0; y < c.size(); ++y) lv.emplace_back(exit_rate(rev, y, a), c.pi(y));
  std::sort(lv.begin(), lv.end(), [](auto& x, auto& y) { return x.first > y.first; });
  // pi(A_u) is the mass of states with level > u; integrate over u in [0, 1].
  double integral = 0.0, mass = 0.0;
  for (std::size_t k = 0; k < lv.size(); ++k) {
    mass += lv[k].second;
    const double top = std::min(1.0, lv[k].first);
    const double bottom = k + 1 < lv.size() ? std::max(0.0, lv[k + 1].first) : 0.0;
    if (top > bottom) integral += (top - bottom) * std::sqrt(mass / pa);
  }
  return 1.0 - integral;
}

/// h_p^{+-}(A) straight from the definition.
inline double h(const MarkovChain& c, const StateSet& a, double p, bool plus) {
  const auto ac = a.complement();
  const auto& side = plus ? a : ac;
  const auto& target = plus ? ac : a;
  double q = 0.0;
  for (std::size_t v = 0; v < c.size(); ++v) {
    if (!side.contains(v)) continue;
    const double r = exit_rate(c, v, target);
    if (std::isinf(p))
      q += r > 0.0 ? c.pi(v) : 0.0;
    else
      q += c.pi(v) * std::pow(r, 1.0 / p);
  }
  const double pa = c.measure(a);
  return q / std::min(pa, 1.0 - pa);
}

/// Worst-start distance after t steps, by repeated vector-matrix products.
inline double worst_distance(const MarkovChain& c, std::size_t t, bool chi2) {
  const auto n = static_cast<Eigen::Index>(c.size());
  double worst = 0.0;
  for (Eigen::Index v = 0; v < n; ++v) {
    Eigen::RowVectorXd p = Eigen::RowVectorXd::Zero(n);
    p[v] = 1.0;
    for (std::size_t k = 0; k < t; ++k) p = p * c.transitions();
    double d = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double pj = c.pi(static_cast<std::size_t>(j));
      d += chi2 ? (p[j] - pj) * (p[j] - pj) / pj : 0.5 * std::abs(p[j] - pj);
    }
    worst = std::max(worst, d);
  }
  return worst;
}

/// Same scan, stepping each start forward once per t.
inline std::size_t mixing_time(const MarkovChain& c, double eps, bool chi2) {
  const auto n = static_cast<Eigen::Index>(c.size());
  Eigen::MatrixXd rows = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t t = 0;; ++t) {
    double worst = 0.0;
    for (Eigen::Index v = 0; v < n; ++v) {
      double d = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double pj = c.pi(static_cast<std::size_t>(j));
        const double x = rows(v, j);
        d += chi2 ? (x - pj) * (x - pj) / pj : 0.5 * std::abs(x - pj);
      }
      worst = std::max(worst, d);
    }
    if (worst <= eps) return t;
    for (Eigen::Index v = 0; v < n; ++v) {
      Eigen::RowVectorXd next = rows.row(v) * c.transitions();
      rows.row(v) = next;
    }
  }
}

/// Zoo chains with at most `max_states` states, one non-reversible among them.
struct Named {
  std::string name;
  MarkovChain chain;
};

inline std::vector<Named> small_zoo(std::size_t max_states) {
  std::vector<Named> z;
  auto add = [&](std::string name, auto make, std::size_t states) {
    if (states <= max_states) z.push_back({std::move(name), make()});
  };
  for (std::size_t n = 2; n <= 12; ++n) add("complete_graph_" + std::to_string(n), [&] { return mixiso::complete_graph(n); }, n);
  for (std::size_t k = 2; k <= 12; ++k) add("lazy_path_" + std::to_string(k), [&] { return mixiso::lazy_path(k); }, k);
  for (std::size_t d = 1; d <= 4; ++d)
    add("hypercube_" + std::to_string(d), [&] { return mixiso::hypercube(d); }, std::size_t{1} << d);
  add("two_state_0.3", [] { return mixiso::two_state(0.3); }, 2);
  add("grid_3_2", [] { return mixiso::grid(3, 2); }, 9);
  add("grid_2_3", [] { return mixiso::grid(2, 3); }, 8);
  add("grid_4_2", [] { return mixiso::grid(4, 2); }, 16);
  for (std::size_t m = 3; m <= 8; ++m) add("barbell_" + std::to_string(m), [&] { return mixiso::barbell(m); }, 2 * m);
  add("biased_cycle_5", [] { return mixiso::biased_cycle(5, 0.4); }, 5);
  add("biased_cycle_8", [] { return mixiso::biased_cycle(8, 0.1); }, 8);
  add("biased_cycle_12", [] { return mixiso::biased_cycle(12, 0.5); }, 12);
  add("continuous_10", [] { return mixiso::continuous_example(0.1, 0.5, 10).chain; }, 10);
  add("continuous_12", [] { return mixiso::continuous_example(0.25, 0.25, 12).chain; }, 12);
  add("two_block_8", [] { return mixiso::two_block_sharp(0.25, 1.0, 8).chain; }, 8);
  add("two_block_12", [] { return mixiso::two_block_sharp(1.0 / 3.0, 0.5, 12).chain; }, 12);
  add("two_block_16", [] { return mixiso::two_block_sharp(0.25, 0.5, 16).chain; }, 16);
  return z;
}

}  // namespace oracle
