#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "support.hpp"

using namespace mixiso;

namespace {

const MarkovChain& k4() {
  static const auto c = complete_graph(4);
  return c;
}

const StateSet kPair(4, {0, 1});
const StateSet kSingle(4, {0});

}  // namespace

TEST(FlowProfile, CompleteGraphPairIsTent) {
  const auto f = flow_profile(k4(), kPair, FlowMode::infimum);
  for (double t : {0.0, 0.1, 0.25, 0.5, 0.7, 1.0})
    EXPECT_NEAR(f(t), t <= 0.5 ? t / 4.0 : (1.0 - t) / 4.0, 1e-15) << t;
}

TEST(FlowProfile, VanishesAtEnds) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    const auto c = oracle::random_lazy_chain(6, rng);
    const auto a = oracle::random_proper_set(6, rng);
    for (auto mode : {FlowMode::infimum, FlowMode::supremum}) {
      const auto f = flow_profile(c, a, mode);
      EXPECT_EQ(f(0.0), 0.0);
      EXPECT_NEAR(f(1.0), 0.0, 1e-15);
    }
  }
}

TEST(FlowProfile, MatchesVertexEnumerationOracle) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 30; ++rep) {
    const auto c = oracle::random_lazy_chain(3 + rep % 5, rng);
    const auto a = oracle::random_proper_set(c.size(), rng);
    const auto f = flow_profile(c, a, FlowMode::infimum);
    for (int k = 0; k <= 40; ++k) {
      const double t = k / 40.0;
      EXPECT_NEAR(f(t), oracle::Psi(c, a, t), 1e-13) << rep << " t=" << t;
    }
  }
}

TEST(FlowProfile, ConvexityAndOrdering) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto c = oracle::random_lazy_chain(7, rng);
    const auto a = oracle::random_proper_set(7, rng);
    const auto lo = flow_profile(c, a, FlowMode::infimum);
    const auto hi = flow_profile(c, a, FlowMode::supremum);
    const double pa = c.measure(a);
    for (int k = 1; k < 50; ++k) {
      const double t = pa * k / 50.0, d = pa / 100.0;
      EXPECT_LE(lo(t), 0.5 * (lo(t - d) + lo(t + d)) + 1e-14);
      EXPECT_GE(hi(t), 0.5 * (hi(t - d) + hi(t + d)) - 1e-14);
      EXPECT_GE(hi(t), lo(t) - 1e-15);
    }
  }
}

TEST(FlowProfile, TieOrderDoesNotMatter) {
  // Relabeling the states permutes tie order in the sort; spreads must agree.
  const auto c = barbell(4);
  const StateSet a(8, {0, 1, 2, 3});
  Matrix Q(8, 8);
  const std::vector<std::size_t> perm{3, 1, 2, 0, 7, 5, 6, 4};
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      Q(static_cast<Eigen::Index>(perm[i]), static_cast<Eigen::Index>(perm[j])) = c.P(i, j);
  const auto d = build_chain(Q);
  StateSet b(8);
  for (auto v : a.members()) b.insert(perm[v]);
  EXPECT_NEAR(spread_plus(c, a), spread_plus(d, b), 1e-15);
  EXPECT_NEAR(spread_mod(c, a), spread_mod(d, b), 1e-15);
  EXPECT_NEAR(psi_evo(c, a), psi_evo(d, b), 1e-15);
}

TEST(Spreads, CompleteGraphClosedForms) {
  EXPECT_NEAR(spread_plus(k4(), kPair), 0.125, 1e-15);
  EXPECT_NEAR(spread_minus(k4(), kPair), 0.125, 1e-15);
  EXPECT_NEAR(spread_gl(k4(), kPair), 0.25, 1e-15);
  EXPECT_NEAR(spread_plus(k4(), kSingle), 3.0 / 16.0, 1e-15);
  EXPECT_NEAR(spread_gl(k4(), kSingle), 0.75, 1e-15);
  EXPECT_NEAR(spread_mod(k4(), kPair), 0.5, 1e-15);
}

TEST(Spreads, ModifiedSpreadAgainstQuadrature) {
  const double q = oracle::spreads(k4(), kSingle).mod;
  EXPECT_NEAR(spread_mod(k4(), kSingle), q, 1e-12);
}

TEST(Spreads, AgreeWithQuadratureOracle) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    const auto c = oracle::random_lazy_chain(3 + rep % 5, rng);
    const auto a = oracle::random_proper_set(c.size(), rng);
    const auto o = oracle::spreads(c, a);
    const SetAnalysis sa(c, a);
    EXPECT_NEAR(sa.spread_plus(), o.plus, 1e-12);
    EXPECT_NEAR(sa.spread_minus(), o.minus, 1e-12);
    EXPECT_NEAR(sa.spread_gl(), o.gl, 1e-12);
    EXPECT_NEAR(sa.spread_mod(), o.mod, 1e-10);
  }
}

TEST(Spreads, ZeroExitGivesZeroSpread) {
  // The accumulator with every rate zeroed: nothing flows.
  std::vector<detail::Cell> cells{{0, 0.2, 0.0}, {1, 0.3, 0.0}};
  EXPECT_EQ(detail::first_moment(cells), 0.0);
}

TEST(Spreads, EmptyAndFullSetsRejected) {
  EXPECT_THROW(spread_plus(k4(), StateSet(4)), Error);
  try {
    spread_plus(k4(), StateSet::range(4, 0, 4));
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FullSet);
  }
}

TEST(LevelSets, CompleteGraphPair) {
  const auto s = level_set_profile(k4(), kPair);
  EXPECT_EQ(s(0.0), 1.0);
  EXPECT_EQ(s(0.2), 1.0);
  EXPECT_EQ(s(0.25), 0.5);
  EXPECT_EQ(s(0.7), 0.5);
  EXPECT_EQ(s(0.75), 0.0);
  EXPECT_NEAR(s.integral(0.0, 1.0), 0.5, 1e-15);
}

TEST(LevelSets, CompleteGraphSingleBreakpoints) {
  const auto s = level_set_profile(k4(), kSingle);
  EXPECT_EQ(s.breakpoints(), (std::vector<double>{0.0, 0.125, 0.625, 1.0}));
}

TEST(LevelSets, MartingaleOnSmallZoo) {
  for (const auto& [name, c] : oracle::small_zoo(10)) {
    const auto n = c.size();
    for (std::uint64_t m = 1; m + 1 < (std::uint64_t{1} << n); ++m) {
      const auto a = StateSet::from_mask(n, m);
      ASSERT_NEAR(level_set_profile(c, a).integral(0.0, 1.0), c.measure(a), 1e-12) << name << " mask " << m;
    }
  }
}

TEST(LevelSets, LazyChainsContainAForSmallU) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto c = oracle::random_lazy_chain(6, rng);
    const auto a = oracle::random_proper_set(6, rng);
    const auto r = SetAnalysis(c, a).reverse_entry();
    for (auto v : a.members()) EXPECT_GE(r[v], 0.5 - 1e-12);
  }
}

TEST(PsiEvo, CompleteGraphValues) {
  EXPECT_NEAR(psi_evo(k4(), kPair), 0.5 - std::sqrt(2.0) / 4.0, 1e-15);
  EXPECT_NEAR(psi_evo(k4(), kSingle), 0.25, 1e-15);
}

TEST(PsiEvo, MatchesSortedLevelOracle) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 30; ++rep) {
    const auto c = oracle::random_lazy_chain(3 + rep % 6, rng);
    const auto a = oracle::random_proper_set(c.size(), rng);
    EXPECT_NEAR(psi_evo(c, a), oracle::psi_evo(c, a), 1e-12);
  }
}

TEST(PsiEvo, MonteCarloEvolvingSetStep) {
  // Draw u uniformly, form A_u explicitly, and average sqrt(pi(A_u)/pi(A)).
  std::mt19937_64 rng(7);
  const auto c = oracle::random_lazy_chain(7, rng);
  const StateSet a(7, {1, 4, 5});
  const auto rev = time_reversal(c);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int samples = 100000;
  double sum = 0.0, sq = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double u = u01(rng);
    double m = 0.0;
    for (std::size_t y = 0; y < 7; ++y)
      if (oracle::exit_rate(rev, y, a) > u) m += c.pi(y);
    const double x = std::sqrt(m / c.measure(a));
    sum += x;
    sq += x * x;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sq / samples - mean * mean) / samples);
  EXPECT_NEAR(1.0 - mean, psi_evo(c, a), 3.0 * se);
}

TEST(LevelSetSpread, CompleteGraph) {
  EXPECT_NEAR(psi_plus_via_levelsets(k4(), kPair), 0.125, 1e-15);
  EXPECT_NEAR(psi_plus_via_levelsets(k4(), kSingle), spread_plus(k4(), kSingle), 1e-15);
}

TEST(LevelSetSpread, RandomReversibleChains) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const auto c = oracle::random_reversible_chain(3 + rep % 6, rng);
    const auto a = oracle::random_proper_set(c.size(), rng);
    EXPECT_NEAR(psi_plus_via_levelsets(c, a), spread_plus(c, a), 1e-10);
  }
}

TEST(LevelSetSpread, NonReversibleUsesReversal) {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    const auto c = oracle::random_lazy_chain(3 + rep % 6, rng);
    const auto a = oracle::random_proper_set(c.size(), rng);
    EXPECT_NEAR(psi_plus_via_levelsets(c, a), spread_plus(time_reversal(c), a), 1e-10);
  }
}

TEST(LevelSetSpread, NeedsLazyChain) {
  const auto c = build_chain(std::vector<std::vector<double>>{{0.2, 0.8}, {0.8, 0.2}});
  try {
    psi_plus_via_levelsets(c, StateSet(2, {0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotLazy);
  }
}

TEST(FlowIdentity, CompleteGraphQuarter) {
  const auto id = lemma_flow_identity(k4(), kPair, 0.25);
  EXPECT_NEAR(id.lhs, 1.0 / 16.0, 1e-15);
  EXPECT_NEAR(id.rhs, 1.0 / 16.0, 1e-15);
}

TEST(FlowIdentity, AtMeasureEqualsReverseFlow) {
  std::mt19937_64 rng(10);
  const auto c = oracle::random_lazy_chain(6, rng);
  const StateSet a(6, {0, 2, 3});
  const auto id = lemma_flow_identity(c, a, c.measure(a));
  EXPECT_NEAR(id.rhs, ergodic_flow(c, a.complement(), a), 1e-12);
  EXPECT_NEAR(id.lhs, id.rhs, 1e-12);
}

TEST(FlowIdentity, RandomTriples) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int rep = 0; rep < 50; ++rep) {
    const auto c = oracle::random_lazy_chain(3 + rep % 6, rng);
    const auto a = oracle::random_proper_set(c.size(), rng);
    const auto id = lemma_flow_identity(c, a, u(rng));
    EXPECT_NEAR(id.lhs, id.rhs, 1e-10);
  }
}

TEST(FlowIdentity, DomainErrors) {
  EXPECT_THROW(lemma_flow_identity(k4(), kPair, 0.0), Error);
  EXPECT_THROW(lemma_flow_identity(k4(), kPair, 1.0), Error);
}

TEST(PsiBig, CompleteGraphValues) {
  EXPECT_NEAR(psi_big(k4(), kPair), 0.125, 1e-15);
  EXPECT_NEAR(psi_big(k4(), kSingle), 3.0 / 16.0, 1e-15);
}

TEST(PsiBig, IdentityAndBracketOnSmallZoo) {
  for (const auto& [name, c] : oracle::small_zoo(12)) {
    const auto n = c.size();
    for (std::uint64_t m = 1; m + 1 < (std::uint64_t{1} << n); ++m) {
      const SetAnalysis sa(c, StateSet::from_mask(n, m));
      const double phi = sa.conductance(), big = sa.psi_big();
      ASSERT_NEAR(big + sa.spread_plus(), phi, 1e-10) << name;
      ASSERT_LE(big, phi + 1e-10) << name;
      ASSERT_GE(big, phi / 2.0 - 1e-10) << name;
    }
  }
}

TEST(Conductance, Values) {
  EXPECT_NEAR(conductance(k4(), kPair), 0.25, 1e-15);
  for (std::size_t k = 2; k <= 12; ++k) {
    const auto c = lazy_path(k);
    for (std::size_t j = 1; 2 * j <= k; ++j) {
      const double phi = conductance(c, StateSet::range(k, 0, j));
      EXPECT_NEAR(phi, 1.0 / (4.0 * static_cast<double>(j)), 1e-14);
      EXPECT_GE(phi, 1.0 / (4.0 * static_cast<double>(k) * (static_cast<double>(j) / static_cast<double>(k))) - 1e-14);
    }
  }
}

TEST(Conductance, LazyChainsSpreadDominatesSquare) {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 30; ++rep) {
    const auto c = oracle::random_lazy_chain(6, rng);
    const auto a = oracle::random_proper_set(6, rng);
    if (c.measure(a) > 0.5) continue;
    const double phi = conductance(c, a);
    EXPECT_GE(spread_plus(time_reversal(c), a), phi * phi - 1e-12);
  }
}

TEST(SpreadRecord, CompleteGraphRecord) {
  const auto r = spread_record(k4(), kPair, false);
  EXPECT_NEAR(r.psi_plus, 0.125, 1e-15);
  EXPECT_NEAR(r.psi_minus, 0.125, 1e-15);
  EXPECT_NEAR(r.psi_gl, 0.25, 1e-15);
  EXPECT_NEAR(r.psi_mod, 0.5, 1e-15);
  EXPECT_NEAR(r.psi_evo, 0.146447, 1e-6);
  EXPECT_NEAR(r.psi_big, 0.125, 1e-15);
  EXPECT_NEAR(r.conductance, 0.25, 1e-15);
  const auto rr = spread_record(k4(), kPair, true);
  EXPECT_TRUE(rr.reversed);
  EXPECT_NEAR(rr.psi_mod, r.psi_mod, 1e-15);
  EXPECT_NEAR(rr.psi_evo, r.psi_evo, 1e-15);
}

TEST(SpreadRecord, InvariantsOnRandomChains) {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 30; ++rep) {
    const auto c = oracle::random_lazy_chain(6, rng);
    const auto a = oracle::random_proper_set(6, rng);
    for (bool rev : {false, true}) {
      const auto r = spread_record(c, a, rev);
      EXPECT_NEAR(r.psi_gl, r.psi_plus + r.psi_minus, 1e-10);
      EXPECT_NEAR(r.psi_big + r.psi_plus, r.conductance, 1e-10);
    }
  }
}

TEST(SpreadChain, HoldsOnSmallZoo) {
  for (const auto& [name, c] : oracle::small_zoo(12)) {
    if (!c.lazy()) continue;
    const auto rev = time_reversal(c);
    const auto n = c.size();
    for (std::uint64_t m = 1; m + 1 < (std::uint64_t{1} << n); ++m) {
      const auto a = StateSet::from_mask(n, m);
      if (c.measure(a) > 0.5 + 1e-12) continue;
      const SetAnalysis back(rev, a);
      const double evo = psi_evo(c, a);
      ASSERT_GE(back.spread_gl(), 0.5 * back.spread_mod() - 1e-9) << name;
      ASSERT_GE(0.5 * back.spread_mod(), evo - 1e-9) << name;
      ASSERT_GE(evo, 0.25 * back.spread_plus() - 1e-9) << name;
    }
  }
}
