#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "monojunta/montecarlo.hpp"

using namespace monojunta;
using monojunta::testing::fixture_family;

namespace {

// Exact over-sigma values from tests/oracles/brute_force.py (|T| ~ Binomial(m, C(w,t)/C(d-1,t))
// given |x| = w).
constexpr double kP1OverSigma_5_2_4 = 0.207175925926;
constexpr double kGapOverSigma_5_2_4 = -0.625;

void expect_within(const EstimateResult& e, double truth, double k_se = 4.0) {
  EXPECT_LE(std::abs(e.estimate - truth), k_se * e.std_error + 1e-12)
      << "estimate " << e.estimate << " +- " << e.std_error << " vs " << truth;
}

}  // namespace

TEST(SamplerConfig, RejectsTinySampleCounts) {
  EXPECT_THROW(estimate_t1_probability(5, 2, 4, {99, 1, 1}), InfeasibleParameters);
  EXPECT_THROW(estimate_t1_probability(5, 2, 4, {1000, 1, 0}), InfeasibleParameters);
  EXPECT_THROW(estimate_t1_probability(5, 5, 4, {1000, 1, 1}), InfeasibleParameters);
}

TEST(JointEstimates, SingleSetIsExact) {
  for (std::size_t t : {1, 3, 5}) {
    const auto [p1, gap] = estimate_t1_and_gap(12, t, 1, {100000, 31 + t, 1});
    expect_within(p1, std::ldexp(1.0, -static_cast<int>(t)));
    EXPECT_EQ(p1.estimate, gap.estimate);  // |T| in {0,1}: both scores coincide
  }
}

TEST(JointEstimates, SmallCaseMatchesOverSigmaOracle) {
  // Oracle 2: the exact p1 averaged over 10^4 random families must agree with the
  // closed-form over-sigma value before either is used as the reference.
  Rng rng = make_rng(404);
  double avg_p1 = 0, avg_gap = 0;
  constexpr int kFamilies = 10000;
  for (int i = 0; i < kFamilies; ++i) {
    const auto s = exact_t_statistics(sample_family(rng, 5, 2, 4));
    avg_p1 += s.p1.to_double() / kFamilies;
    avg_gap += s.moment_gap.to_double() / kFamilies;
  }
  EXPECT_NEAR(avg_p1, kP1OverSigma_5_2_4, 0.005);
  EXPECT_NEAR(avg_gap, kGapOverSigma_5_2_4, 0.02);

  const auto [p1, gap] = estimate_t1_and_gap(5, 2, 4, {100000, 2024, 1});
  expect_within(p1, kP1OverSigma_5_2_4);
  expect_within(gap, kGapOverSigma_5_2_4);
}

TEST(JointEstimates, PointwiseDominance) {
  for (Seed seed : {1, 2, 3}) {
    const auto [p1, gap] = estimate_t1_and_gap(17, 4, 16, {5000, seed, 1 + seed});
    EXPECT_GE(p1.estimate, gap.estimate);
    EXPECT_EQ(estimate_t1_probability(17, 4, 16, {5000, seed, 1 + seed}), p1);
    EXPECT_EQ(estimate_moment_gap(17, 4, 16, {5000, seed, 1 + seed}), gap);
  }
}

TEST(JointEstimates, DeterministicPerSeedAndWorkers) {
  const SamplerConfig cfg{20000, 77, 3};
  EXPECT_EQ(estimate_t1_and_gap(33, 5, 32, cfg), estimate_t1_and_gap(33, 5, 32, cfg));
  const SamplerConfig other{20000, 78, 3};
  EXPECT_NE(estimate_t1_probability(33, 5, 32, cfg).estimate, estimate_t1_probability(33, 5, 32, other).estimate);
}

TEST(JointEstimates, IndicatorStandardErrorBound) {
  const auto r = estimate_t1_probability(9, 3, 8, {400, 5, 1});
  EXPECT_GE(r.std_error, 0.0);
  EXPECT_LE(r.std_error, 1.0 / (2 * std::sqrt(400.0)) + 1e-12);
  EXPECT_GE(r.estimate, 0.0);
  EXPECT_LE(r.estimate, 1.0);
}

TEST(FixedFamilyEstimates, ConsistentAcrossSeeds) {
  const auto fam = fixture_family();
  const auto exact = exact_t_statistics(fam);
  int p1_hits = 0, gap_hits = 0;
  for (Seed seed = 0; seed < 100; ++seed) {
    const auto s = estimate_t_statistics(fam, {4000, seed, 1});
    p1_hits += std::abs(s.p1.estimate - exact.p1.to_double()) <= 4 * s.p1.std_error;
    gap_hits += std::abs(s.moment_gap.estimate - exact.moment_gap.to_double()) <= 4 * s.moment_gap.std_error;
  }
  EXPECT_GE(p1_hits, 95);
  EXPECT_GE(gap_hits, 95);
}

TEST(FixedFamilyEstimates, StandardErrorScaling) {
  const auto fam = sample_family(3, 17, 4, 16);
  for (Seed seed : {10, 11, 12}) {
    const auto small = estimate_t_statistics(fam, {10000, seed, 1});
    const auto large = estimate_t_statistics(fam, {40000, seed, 1});
    for (auto [a, b] : {std::pair{small.p1, large.p1}, std::pair{small.mean_T, large.mean_T}}) {
      const double ratio = a.std_error / b.std_error;
      EXPECT_GT(ratio, 2.0 / 1.5);
      EXPECT_LT(ratio, 2.0 * 1.5);
    }
  }
}

TEST(EstimateDistance, Examples) {
  const auto f = CounterexampleFunction(fixture_family()).handle();
  const auto same = estimate_distance(f, f, {1000, 1, 1});
  EXPECT_EQ(same.estimate, 0.0);
  EXPECT_EQ(same.std_error, 0.0);
  EXPECT_EQ(estimate_distance(f, complement(f), {1000, 1, 1}).estimate, 1.0);
  expect_within(estimate_distance(f, constant_function(8, false), {100000, 9, 2}), 7.0 / 16);
  EXPECT_THROW(estimate_distance(f, parity(3), {1000, 1, 1}), ArityMismatch);
}

TEST(SensitivityProfile, Examples) {
  const auto c = sensitivity_profile(constant_function(10, true), {500, 1, 1});
  EXPECT_EQ(c.histogram[0], 500u);
  EXPECT_EQ(c.mean.estimate, 0.0);

  const auto p = sensitivity_profile(parity(12), {500, 1, 2});
  EXPECT_EQ(p.histogram[12], 500u);
  EXPECT_EQ(p.mean.estimate, 12.0);

  const auto f = CounterexampleFunction(fixture_family()).handle();
  const auto prof = sensitivity_profile(f, {100000, 3, 4});
  expect_within(prof.mean, 1.75);
  std::uint64_t total = 0;
  for (auto h : prof.histogram) total += h;
  EXPECT_EQ(total, 100000u);
  EXPECT_EQ(sensitivity_profile(f, {100000, 3, 4}).histogram, prof.histogram);
}
