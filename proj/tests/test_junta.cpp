#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "monojunta/junta.hpp"

using namespace monojunta;
using monojunta::testing::fixture_family;

namespace {

FunctionHandle fixture_f() { return CounterexampleFunction(fixture_family()).handle(); }

// Best k-junta distances of f_sigma*, frozen from the brute-force oracle.
const std::vector<Dyadic> kFixtureBestK = {Dyadic(7, 4),  Dyadic(5, 4), Dyadic(1, 2), Dyadic(3, 4), Dyadic(1, 3),
                                           Dyadic(3, 5), Dyadic(1, 4), Dyadic(1, 5), Dyadic(0)};

}  // namespace

TEST(FiberMajority, Examples) {
  const auto f = fixture_f();
  EXPECT_EQ(fiber_majority_junta(f, {1, 2, 3, 4, 5, 6, 7, 8}).distance, Dyadic(0));
  const auto empty = fiber_majority_junta(f, {});
  EXPECT_EQ(empty.distance, Dyadic(7, 4));
  EXPECT_EQ(empty.spec.table, std::vector<bool>{false});

  const auto maj = fiber_majority_junta(majority(3), {1});
  EXPECT_EQ(maj.distance, Dyadic(1, 2));
  EXPECT_EQ(maj.spec.table, (std::vector<bool>{false, true}));
  EXPECT_EQ(exact_distance(maj.spec.handle(), dictator(3, 1)), Dyadic(0));

  EXPECT_THROW(fiber_majority_junta(f, {9}), CoordinateRange);
  EXPECT_THROW(fiber_majority_junta(parity(25), {1}), EnumerationTooLarge);
}

TEST(FiberMajority, TiesBreakToZero) {
  const auto r = fiber_majority_junta(parity(3), {1});
  EXPECT_EQ(r.spec.table, (std::vector<bool>{false, false}));
  EXPECT_EQ(r.distance, Dyadic(1, 1));
}

TEST(FiberMajority, DistanceIsExactAndAtMostHalf) {
  Rng rng = make_rng(21);
  for (int rep = 0; rep < 30; ++rep) {
    const auto fam = sample_family(rng, 6, 2, 5);
    const auto f = CounterexampleFunction(fam).handle();
    std::vector<std::size_t> J;
    for (std::size_t c = 1; c <= f.arity(); ++c)
      if (rng() % 3 == 0) J.push_back(c);
    const auto r = fiber_majority_junta(f, J);
    EXPECT_EQ(r.distance, exact_distance(f, r.spec.handle()));
    EXPECT_LE(r.distance, Dyadic(1, 1));
  }
}

TEST(FiberMajority, NoRandomTableOnSameSupportDoesBetter) {
  Rng rng = make_rng(22);
  for (int rep = 0; rep < 10; ++rep) {
    const auto fam = sample_family(rng, 7, 2, 6);
    const auto f = CounterexampleFunction(fam).handle();
    std::vector<std::size_t> J;
    for (std::size_t c = 1; c <= f.arity(); ++c)
      if (rng() % 3 == 0) J.push_back(c);
    const auto best = fiber_majority_junta(f, J);
    for (int r = 0; r < 100; ++r) {
      JuntaSpec g{f.arity(), J, std::vector<bool>(std::size_t{1} << J.size())};
      for (std::size_t a = 0; a < g.table.size(); ++a) g.table[a] = rng() & 1;
      EXPECT_GE(exact_distance(f, g.handle()), best.distance);
    }
  }
}

TEST(BestKJunta, FixtureCurve) {
  const auto f = fixture_f();
  for (std::size_t k = 0; k <= 8; ++k) {
    const auto r = best_k_junta(f, k);
    EXPECT_EQ(r.distance, kFixtureBestK[k]) << "k=" << k;
    EXPECT_EQ(r.spec.k(), k);
    EXPECT_EQ(r.provenance, JuntaProvenance::exhaustive);
    EXPECT_EQ(exact_distance(f, r.spec.handle()), r.distance);
    if (k > 0) { EXPECT_LE(r.distance, best_k_junta(f, k - 1).distance); }
  }
}

TEST(BestKJunta, LexicographicTieBreakAndWorkerIndependence) {
  // Parity: every 3-subset is equally bad, so the witness is {1,2,3}.
  const auto r = best_k_junta(parity(4), 3);
  EXPECT_EQ(r.distance, Dyadic(1, 1));
  EXPECT_EQ(r.spec.coords, (std::vector<std::size_t>{1, 2, 3}));

  Rng rng = make_rng(23);
  const auto f = CounterexampleFunction(sample_family(rng, 9, 3, 8)).handle();
  for (std::size_t k : {1, 2, 3}) {
    const auto one = best_k_junta(f, k, kDefaultFiberBudget, 1);
    for (std::size_t workers : {2, 3, 7}) {
      const auto many = best_k_junta(f, k, kDefaultFiberBudget, workers);
      EXPECT_EQ(many.distance, one.distance);
      EXPECT_EQ(many.spec.coords, one.spec.coords);
    }
  }
}

TEST(BestKJunta, BudgetAndArityErrors) {
  EXPECT_THROW(best_k_junta(fixture_f(), 4, 100.0), BudgetExceeded);
  try {
    best_k_junta(fixture_f(), 4, 100.0);
  } catch (const BudgetExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("top_influence_junta"), std::string::npos);
  }
  EXPECT_THROW(best_k_junta(fixture_f(), 9), InfeasibleParameters);
  EXPECT_THROW(best_k_junta(parity(25), 1), EnumerationTooLarge);
}

TEST(TopInfluenceJunta, Examples) {
  const auto r = top_influence_junta(dictator(5, 1), 1);
  EXPECT_EQ(r.spec.coords, std::vector<std::size_t>{1});
  EXPECT_EQ(r.distance, Dyadic(0));
  EXPECT_EQ(top_influence_junta(parity(4), 3).distance, Dyadic(1, 1));

  const auto f = fixture_f();
  const auto top = top_influence_junta(f, 1);
  EXPECT_EQ(top.spec.coords, std::vector<std::size_t>{1});  // x_1..x_4 tie at 3/8; lowest index wins
  EXPECT_GE(top.distance, best_k_junta(f, 1).distance);
}

TEST(TopInfluenceJunta, NeverBeatsExhaustive) {
  Rng rng = make_rng(24);
  for (int rep = 0; rep < 10; ++rep) {
    const auto f = CounterexampleFunction(sample_family(rng, 6, 2, 6)).handle();
    for (std::size_t k = 0; k <= f.arity(); ++k)
      EXPECT_GE(top_influence_junta(f, k).distance, best_k_junta(f, k).distance);
  }
}

TEST(Lemma5Bound, Examples) {
  EXPECT_DOUBLE_EQ(lemma5_lower_bound(0.25, 0, 2), 0.125);
  EXPECT_DOUBLE_EQ(lemma5_lower_bound(0.4, 128, 10), 0.1375);
  EXPECT_DOUBLE_EQ(lemma5_lower_bound(0.25, 1, 2), 0.0);
  EXPECT_DOUBLE_EQ(lemma5_lower_bound(0.25, 5, 2), 0.0);
  EXPECT_EQ(lemma5_lower_bound(Dyadic(1, 2), 0, 2), Dyadic(1, 3));
  EXPECT_EQ(lemma5_lower_bound(Dyadic(1, 2), 3, 2), Dyadic(0));
}

TEST(Lemma5Bound, DominatedByExhaustiveOptimum) {
  Rng rng = make_rng(25);
  for (int rep = 0; rep < 5; ++rep) {
    const auto fam = sample_family(rng, 9, 3, 8);
    const auto f = CounterexampleFunction(fam).handle();
    const auto p1 = exact_t_statistics(fam).p1;
    for (std::size_t k = 0; k <= 2; ++k) EXPECT_GE(best_k_junta(f, k).distance, lemma5_lower_bound(p1, k, 3));
  }
}
