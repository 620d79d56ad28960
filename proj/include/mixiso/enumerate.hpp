#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mixiso/error.hpp"

namespace mixiso {

inline constexpr std::size_t kDefaultMaxStates = 22;
inline constexpr const char* kThreadsEnv = "MIXISO_THREADS";

struct EnumerationOptions {
  std::size_t max_states = kDefaultMaxStates;
  unsigned threads = 0;  // 0: MIXISO_THREADS, else hardware concurrency
};

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(kThreadsEnv)) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

inline void require_enumerable(std::size_t n, const EnumerationOptions& opt) {
  if (n > opt.max_states || n > 62)
    throw Error(ErrorKind::TooLarge, std::to_string(n) + " states exceeds the enumeration limit of " +
                                         std::to_string(std::min<std::size_t>(opt.max_states, 62)));
}

/// Visits every proper nonempty subset mask of {0..n-1}, fanning out over
/// contiguous mask ranges. Each worker folds into its own accumulator; the
/// partial results are merged in range order. Callers keep results
/// independent of the split by using order-free reductions (min, max,
/// integer counts), so the outcome does not depend on the thread count.
template <class Acc, class Visit, class Merge>
Acc enumerate_subsets(std::size_t n, const EnumerationOptions& opt, const Acc& init, Visit visit, Merge merge) {
  require_enumerable(n, opt);
  const std::uint64_t first = 1;
  const std::uint64_t last = (std::uint64_t{1} << n) - 1;  // exclusive: the full set
  const std::uint64_t total = last - first;
  const auto workers = static_cast<std::uint64_t>(std::min<std::uint64_t>(resolve_threads(opt.threads), total));

  std::vector<Acc> partial(static_cast<std::size_t>(workers), init);
  std::vector<std::exception_ptr> failure(static_cast<std::size_t>(workers));
  auto run = [&](std::uint64_t w) {
    const std::uint64_t lo = first + total * w / workers;
    const std::uint64_t hi = first + total * (w + 1) / workers;
    Acc& acc = partial[static_cast<std::size_t>(w)];
    try {
      for (std::uint64_t mask = lo; mask < hi; ++mask) visit(acc, mask);
    } catch (...) {
      failure[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::uint64_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& f : failure)
    if (f) std::rethrow_exception(f);

  Acc out = std::move(partial.front());
  for (std::size_t i = 1; i < partial.size(); ++i) merge(out, std::move(partial[i]));
  return out;
}

}  // namespace mixiso
