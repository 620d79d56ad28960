#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mixiso/chain.hpp"
#include "mixiso/error.hpp"

namespace mixiso {

// Dense matrices only; the discretized continuous example needs 4000 states.
inline constexpr std::size_t kMaxDenseStates = 4096;

struct ZooChain {
  MarkovChain chain;
  std::optional<StateSet> set;  // distinguished set, when the family has one
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::BadParam, what);
}

inline void require_dense(double states) {
  if (states > static_cast<double>(kMaxDenseStates))
    throw Error(ErrorKind::TooLarge, "chain would have more than " + std::to_string(kMaxDenseStates) + " states");
}

inline Vector uniform(std::size_t n) {
  return Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
}

// Puts the row remainder on the diagonal.
inline void fill_holding(Matrix& P) {
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    P(i, i) = 0.0;
    P(i, i) = 1.0 - P.row(i).sum();
  }
}

inline std::size_t as_count(double v, const std::string& what) {
  const double r = std::round(v);
  require(std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v)) && r >= 0.0, what + " is not realizable on the grid");
  return static_cast<std::size_t>(r);
}

}  // namespace detail

/// Lazy walk on K_n: hold (1 + 1/n)/2, move to each other vertex w.p. 1/(2n).
inline MarkovChain complete_graph(std::size_t n) {
  detail::require(n >= 2, "complete_graph needs n >= 2");
  detail::require_dense(static_cast<double>(n));
  const double off = 1.0 / (2.0 * static_cast<double>(n));
  Matrix P = Matrix::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), off);
  detail::fill_holding(P);
  return build_chain_with_stationary(P, detail::uniform(n));
}

/// Lazy walk on the line [k]: steps of 1/4 each way, endpoints hold 3/4.
inline MarkovChain lazy_path(std::size_t k) {
  detail::require(k >= 2, "lazy_path needs k >= 2");
  detail::require_dense(static_cast<double>(k));
  const auto m = static_cast<Eigen::Index>(k);
  Matrix P = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i + 1 < m; ++i) P(i, i + 1) = P(i + 1, i) = 0.25;
  detail::fill_holding(P);
  return build_chain_with_stationary(P, detail::uniform(k));
}

/// Two states, each flipping with probability `flip`.
inline MarkovChain two_state(double flip) {
  detail::require(flip > 0.0 && flip <= 1.0, "two_state needs flip in (0, 1]");
  Matrix P(2, 2);
  P << 1.0 - flip, flip, flip, 1.0 - flip;
  return build_chain_with_stationary(P, detail::uniform(2));
}

/// Lazy cube walk on {0,1}^n: flip coordinate i w.p. 1/(2n), else hold.
/// State v has coordinate i in bit i.
inline MarkovChain hypercube(std::size_t n) {
  detail::require(n >= 1, "hypercube needs n >= 1");
  detail::require_dense(std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(n, 64))));
  const std::size_t N = std::size_t{1} << n;
  const double step = 1.0 / (2.0 * static_cast<double>(n));
  Matrix P = Matrix::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  for (std::size_t v = 0; v < N; ++v)
    for (std::size_t i = 0; i < n; ++i) P(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v ^ (std::size_t{1} << i))) = step;
  detail::fill_holding(P);
  return build_chain_with_stationary(P, detail::uniform(N));
}

/// Cartesian product: pick a coordinate uniformly and move it by its own
/// chain. Coordinate 0 is the fastest-varying digit of the state index.
inline MarkovChain product(std::span<const MarkovChain> components) {
  detail::require(!components.empty(), "product needs at least one component");
  double total = 1.0;
  for (const auto& c : components) total *= static_cast<double>(c.size());
  detail::require_dense(total);

  const auto N = static_cast<std::size_t>(total);
  const auto d = components.size();
  std::vector<std::size_t> stride(d, 1);
  for (std::size_t i = 1; i < d; ++i) stride[i] = stride[i - 1] * components[i - 1].size();
  const double share = 1.0 / static_cast<double>(d);

  Matrix P = Matrix::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  Vector pi(static_cast<Eigen::Index>(N));
  for (std::size_t s = 0; s < N; ++s) {
    double mass = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      const auto& c = components[i];
      const std::size_t xi = (s / stride[i]) % c.size();
      mass *= c.pi(xi);
      const std::size_t base = s - xi * stride[i];
      for (std::size_t y = 0; y < c.size(); ++y)
        P(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(base + y * stride[i])) += share * c.P(xi, y);
    }
    pi[static_cast<Eigen::Index>(s)] = mass;
  }
  return build_chain_with_stationary(P, pi);
}

/// Lazy walk on the grid [k]^n as the product of n lazy paths.
inline MarkovChain grid(std::size_t k, std::size_t n) {
  detail::require(k >= 2, "grid needs k >= 2");
  detail::require(n >= 1, "grid needs n >= 1");
  detail::require_dense(std::pow(static_cast<double>(k), static_cast<double>(n)));
  const std::vector<MarkovChain> parts(n, lazy_path(k));
  return product(parts);
}

/// Two copies of K_m joined by the edge (m-1, m). Every vertex moves to each
/// neighbor w.p. 1/(2m) and holds otherwise.
inline MarkovChain barbell(std::size_t m) {
  detail::require(m >= 3, "barbell needs m >= 3");
  detail::require_dense(2.0 * static_cast<double>(m));
  const auto M = static_cast<Eigen::Index>(m);
  const double step = 1.0 / (2.0 * static_cast<double>(m));
  Matrix P = Matrix::Zero(2 * M, 2 * M);
  for (Eigen::Index side = 0; side < 2; ++side)
    for (Eigen::Index i = 0; i < M; ++i)
      for (Eigen::Index j = 0; j < M; ++j)
        if (i != j) P(side * M + i, side * M + j) = step;
  P(M - 1, M) = P(M, M - 1) = step;
  detail::fill_holding(P);
  return build_chain_with_stationary(P, detail::uniform(2 * m));
}

/// Lazy walk on a cycle of k states stepping forward w.p. `forward` and back
/// w.p. 1/2 - forward. Doubly stochastic, so pi is uniform; reversible only
/// when forward = 1/4 (or k = 2).
inline MarkovChain biased_cycle(std::size_t k, double forward) {
  detail::require(k >= 3, "biased_cycle needs k >= 3");
  detail::require(forward >= 0.0 && forward <= 0.5, "biased_cycle needs forward in [0, 1/2]");
  detail::require_dense(static_cast<double>(k));
  const auto m = static_cast<Eigen::Index>(k);
  Matrix P = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    P(i, (i + 1) % m) += forward;
    P(i, (i + m - 1) % m) += 0.5 - forward;
  }
  detail::fill_holding(P);
  return build_chain_with_stationary(P, detail::uniform(k));
}

namespace detail {
// int_a^b g(t) dt for g = 1 on [0, eps] and (eps / t)^2 beyond.
inline double continuous_density_mass(double a, double b, double eps) {
  double s = 0.0;
  if (a < eps) s += std::min(b, eps) - a;
  const double lo = std::max(a, eps);
  if (b > lo) s += eps * eps * (1.0 / lo - 1.0 / b);
  return s;
}
}  // namespace detail

/// Discretization of the continuous sharpness example on [0, 1] into n equal
/// cells. Left cell i and right cell j exchange probability G_i, the exact
/// integral of the density over cell i; the diagonal holds the rest. The set
/// is the cells covering [0, x].
inline ZooChain continuous_example(double eps, double x, std::size_t n) {
  detail::require(eps > 0.0 && eps <= 0.5, "continuous_example needs eps in (0, 1/2]");
  detail::require(x > 0.0 && x <= 0.5, "continuous_example needs x in (0, 1/2]");
  detail::require(n >= 10 && n % 2 == 0, "continuous_example needs an even n >= 10");
  detail::require_dense(static_cast<double>(n));
  const std::size_t half = n / 2;
  const std::size_t cells = detail::as_count(x * static_cast<double>(n), "x * n");
  detail::require(cells >= 1 && cells <= half, "x must cover at least one cell");

  const double w = 1.0 / static_cast<double>(n);
  const auto N = static_cast<Eigen::Index>(n);
  const auto H = static_cast<Eigen::Index>(half);
  Matrix P = Matrix::Zero(N, N);
  for (Eigen::Index i = 0; i < H; ++i) {
    const double g = detail::continuous_density_mass(static_cast<double>(i) * w, static_cast<double>(i + 1) * w, eps);
    for (Eigen::Index j = H; j < N; ++j) P(i, j) = P(j, i) = g;
  }
  detail::fill_holding(P);
  return {build_chain_with_stationary(P, detail::uniform(n)), StateSet::range(n, 0, cells)};
}

/// Lazy reversible chain with uniform pi where every state of A = first x*n
/// states exits w.p. alpha/2. A fraction 1 - leak of that exit lands
/// uniformly on a block R of measure alpha*x right after A; the rest spreads
/// over the remaining states, which keeps the chain irreducible.
inline ZooChain two_block_sharp(double x, double alpha, std::size_t n, double leak = 1e-3) {
  detail::require(x > 0.0 && x <= 0.5, "two_block_sharp needs x in (0, 1/2]");
  detail::require(alpha > 0.0 && alpha <= 1.0, "two_block_sharp needs alpha in (0, 1]");
  detail::require(leak > 0.0 && leak < 1.0, "two_block_sharp needs leak in (0, 1)");
  detail::require(n >= 2, "two_block_sharp needs n >= 2");
  detail::require_dense(static_cast<double>(n));
  const std::size_t a = detail::as_count(x * static_cast<double>(n), "x * n");
  const std::size_t r = detail::as_count(alpha * static_cast<double>(a), "alpha * x * n");
  detail::require(a >= 1 && r >= 1, "two_block_sharp needs nonempty blocks");
  detail::require(a + r < n, "two_block_sharp needs states outside A and R");
  const std::size_t s = n - a - r;

  const auto N = static_cast<Eigen::Index>(n);
  const auto A = static_cast<Eigen::Index>(a), R = static_cast<Eigen::Index>(a + r);
  const double to_block = 0.5 * alpha * (1.0 - leak) / static_cast<double>(r);
  const double to_rest = 0.5 * alpha * leak / static_cast<double>(s);
  Matrix P = Matrix::Zero(N, N);
  for (Eigen::Index u = 0; u < A; ++u)
    for (Eigen::Index v = A; v < N; ++v) P(u, v) = P(v, u) = v < R ? to_block : to_rest;
  detail::fill_holding(P);
  return {build_chain_with_stationary(P, detail::uniform(n)), StateSet::range(n, 0, a)};
}

enum class ParamKind { integer, real };

struct ZooParam {
  std::string_view name;
  ParamKind kind;
  std::string_view constraint;
};

struct ZooFamily {
  std::string_view name;
  std::vector<ZooParam> params;
  std::string_view summary;
};

inline const std::vector<ZooFamily>& zoo_catalog() {
  static const std::vector<ZooFamily> catalog{
      {"complete_graph", {{"n", ParamKind::integer, "n >= 2"}}, "lazy walk on K_n"},
      {"lazy_path", {{"k", ParamKind::integer, "k >= 2"}}, "lazy walk on the line [k]"},
      {"hypercube", {{"n", ParamKind::integer, "n >= 1"}}, "lazy walk on {0,1}^n"},
      {"two_state", {{"flip", ParamKind::real, "0 < flip <= 1"}}, "two states flipping w.p. flip"},
      {"grid", {{"k", ParamKind::integer, "k >= 2"}, {"n", ParamKind::integer, "n >= 1"}}, "lazy walk on [k]^n"},
      {"barbell", {{"m", ParamKind::integer, "m >= 3"}}, "two K_m joined by one edge"},
      {"biased_cycle",
       {{"k", ParamKind::integer, "k >= 3"}, {"forward", ParamKind::real, "0 <= forward <= 1/2"}},
       "lazy non-reversible walk on a cycle"},
      {"continuous_example",
       {{"eps", ParamKind::real, "0 < eps <= 1/2"},
        {"x", ParamKind::real, "0 < x <= 1/2"},
        {"n", ParamKind::integer, "even, n >= 10"}},
       "discretized continuous sharpness example; set = [0, x]"},
      {"two_block_sharp",
       {{"x", ParamKind::real, "0 < x <= 1/2"},
        {"alpha", ParamKind::real, "0 < alpha <= 1"},
        {"n", ParamKind::integer, "x*n and alpha*x*n integral"}},
       "uniform exit alpha/2 from A into a block of measure alpha*x; set = A"},
  };
  return catalog;
}

namespace detail {

inline double parse_real(const std::string& s, std::string_view name) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw Error(ErrorKind::BadParam, "parameter " + std::string(name) + ": not a number: " + s);
  return v;
}

inline std::size_t parse_count(const std::string& s, std::string_view name) {
  const double v = parse_real(s, name);
  if (v < 0.0 || v != std::floor(v) || v > 1e9)
    throw Error(ErrorKind::BadParam, "parameter " + std::string(name) + ": not a nonnegative integer: " + s);
  return static_cast<std::size_t>(v);
}

}  // namespace detail

/// Builds a catalog chain from its family name and positional parameters.
inline ZooChain make_zoo(std::string_view family, const std::vector<std::string>& params) {
  const auto& cat = zoo_catalog();
  const auto it = std::find_if(cat.begin(), cat.end(), [&](const ZooFamily& f) { return f.name == family; });
  if (it == cat.end()) throw Error(ErrorKind::BadParam, "unknown zoo family: " + std::string(family));
  if (params.size() != it->params.size())
    throw Error(ErrorKind::BadParam, std::string(family) + " takes " + std::to_string(it->params.size()) +
                                         " parameter(s), got " + std::to_string(params.size()));
  auto count = [&](std::size_t i) { return detail::parse_count(params[i], it->params[i].name); };
  auto real = [&](std::size_t i) { return detail::parse_real(params[i], it->params[i].name); };

  if (family == "complete_graph") return {complete_graph(count(0)), std::nullopt};
  if (family == "lazy_path") return {lazy_path(count(0)), std::nullopt};
  if (family == "hypercube") return {hypercube(count(0)), std::nullopt};
  if (family == "two_state") return {two_state(real(0)), std::nullopt};
  if (family == "grid") return {grid(count(0), count(1)), std::nullopt};
  if (family == "barbell") return {barbell(count(0)), std::nullopt};
  if (family == "biased_cycle") return {biased_cycle(count(0), real(1)), std::nullopt};
  if (family == "continuous_example") return continuous_example(real(0), real(1), count(2));
  return two_block_sharp(real(0), real(1), count(2));
}

}  // namespace mixiso
