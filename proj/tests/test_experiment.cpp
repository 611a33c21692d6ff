#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "monojunta/experiment.hpp"

using namespace monojunta;

namespace {

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == ',')
      out.emplace_back();
    else
      out.back() += c;
  }
  return out;
}

}  // namespace

TEST(Csv, HeaderAndNullFields) {
  ResultRow r;
  r.experiment_id = "e";
  r.d = 5;
  r.t = 2;
  r.m = 4;
  r.family_ref = "fam";
  const auto exact = exact_row(r, "p1", 0.25);
  EXPECT_EQ(to_csv_line(exact), "e,5,2,4,,fam,p1,,exact,0.25,,");
  const auto mc = mc_row(r, "p1", EstimateResult{1.0 / 3, 0.001, 1000, 7, 1}, 3);
  EXPECT_EQ(to_csv_line(mc), "e,5,2,4,,fam,p1,3,mc,0.333333333333,0.001,1000");
  EXPECT_EQ(to_csv({}), std::string(kCsvHeader) + "\n");
  r.family_ref = "a,b";
  EXPECT_EQ(split(to_csv_line(exact_row(r, "p0", 1)))[5], "\"a");
}

TEST(Plan, ParsesDefaultsAndSchedule) {
  const auto p = plan_from_text(R"({"format_version":1,"experiment_id":"x","seed":3,
      "grid":[{"d":9},{"d":5,"t":2,"m":4},{"d":7,"t":2}],"families":2,"quantities":["p1"]})");
  EXPECT_EQ(p.mode, Mode::exact);
  ASSERT_EQ(p.grid.size(), 3u);
  EXPECT_EQ(p.grid[0].t, 3u);
  EXPECT_EQ(p.grid[0].m, 8u);
  EXPECT_EQ(p.grid[1].m, 4u);
  EXPECT_EQ(p.grid[2].m, 4u);
}

TEST(Plan, RejectsBadDocuments) {
  EXPECT_THROW(plan_from_text("[]"), FormatError);
  EXPECT_THROW(plan_from_text(R"({"format_version":1,"grid":[{"d":5}],"quantities":["nope"]})"), FormatError);
  EXPECT_THROW(plan_from_text(R"({"format_version":1,"grid":[{"d":5}],"quantities":[]})"), FormatError);
  EXPECT_THROW(plan_from_text(R"({"format_version":1,"grid":[{"d":5,"t":5}],"quantities":["p1"]})"),
               InfeasibleParameters);
  EXPECT_THROW(plan_from_text(R"({"format_version":1,"grid":[{"d":40,"t":3}],"quantities":["p1"]})"),
               EnumerationTooLarge);
  EXPECT_THROW(plan_from_text(R"({"format_version":1,"mode":"mc","grid":[{"d":5}],"quantities":["junta_distance"]})"),
               FormatError);
  EXPECT_THROW(plan_from_text(R"({"format_version":1,"grid":[{"d":9,"t":3,"m":8}],"k":[0,8],
      "quantities":["junta_distance"],"budget":1e6})"),
               BudgetExceeded);
  // Large d is fine in sampled mode.
  EXPECT_NO_THROW(plan_from_text(R"({"format_version":1,"mode":"mc","grid":[{"d":101}],"quantities":["p1"]})"));
}

TEST(Experiment, ExactSweepRowsAreInRange) {
  const auto p = plan_from_text(R"({"format_version":1,"experiment_id":"sweep","seed":11,
      "grid":[{"d":5},{"d":9},{"d":17}],"families":20,"quantities":["p1"]})");
  const auto rows = run_experiment(p);
  ASSERT_EQ(rows.size(), 60u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.quantity, "p1");
    EXPECT_EQ(r.mode, "exact");
    EXPECT_FALSE(r.std_error.has_value());
    EXPECT_FALSE(r.n_samples.has_value());
    EXPECT_GE(r.value, 0.0);
    EXPECT_LE(r.value, 1.0);
  }
}

TEST(Experiment, KSweepIsNonincreasingAndDominatesBound) {
  const auto fam = SetFamily(5, 2, {{1, 2}, {3, 4}, {1, 3}, {2, 4}});
  ExperimentPlan p;
  p.quantities = {"junta_distance", "lemma5_bound"};
  p.k_min = 0;
  p.k_max = 8;
  ResultRow base;
  base.family_ref = "fixture";
  const auto rows = family_rows(p, fam, base);
  std::vector<double> dist, bound;
  for (const auto& r : rows) (r.quantity == "junta_distance" ? dist : bound).push_back(r.value);
  ASSERT_EQ(dist.size(), 9u);
  ASSERT_EQ(bound.size(), 9u);
  EXPECT_DOUBLE_EQ(dist[0], 7.0 / 16);
  EXPECT_DOUBLE_EQ(bound[0], 0.125);
  for (std::size_t k = 0; k < 9; ++k) {
    if (k) { EXPECT_LE(dist[k], dist[k - 1]); }
    EXPECT_GE(dist[k], bound[k]);
  }
}

TEST(Experiment, McRowsCarryStandardErrors) {
  const auto p = plan_from_text(R"({"format_version":1,"mode":"mc","samples":2000,"seed":5,"workers":2,
      "grid":[{"d":26}],"families":2,"quantities":["p1","moment_gap","sensitivity_mean","lemma5_bound"],"k":[0,1]})");
  const auto rows = run_experiment(p);
  ASSERT_EQ(rows.size(), 2u * 5);
  for (const auto& r : rows) {
    EXPECT_EQ(r.mode, "mc");
    ASSERT_TRUE(r.std_error.has_value());
    EXPECT_EQ(r.n_samples, 2000u);
  }
}

TEST(Experiment, ByteIdenticalReruns) {
  const char* exact = R"({"format_version":1,"seed":99,"grid":[{"d":5},{"d":9}],"families":3,
      "quantities":["p0","p1","p2plus","mean_T","second_factorial","moment_gap","total_influence","sensitivity_mean"]})";
  EXPECT_EQ(to_csv(run_experiment(plan_from_text(exact))), to_csv(run_experiment(plan_from_text(exact))));
  const char* mc = R"({"format_version":1,"mode":"mc","samples":3000,"seed":99,"workers":3,"grid":[{"d":17}],
      "families":2,"quantities":["p1","sensitivity_mean"]})";
  const auto a = to_csv(run_experiment(plan_from_text(mc)));
  EXPECT_EQ(a, to_csv(run_experiment(plan_from_text(mc))));
  auto plan = plan_from_text(mc);
  plan.seed = 100;
  EXPECT_NE(a, to_csv(run_experiment(plan)));
}

TEST(Experiment, PerCellOverrides) {
  const auto p = plan_from_text(R"({"format_version":1,"mode":"mc","samples":1000,"seed":1,
      "grid":[{"d":9,"families":3,"samples":500},{"d":17}],"families":1,"quantities":["p1"]})");
  const auto rows = run_experiment(p);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].n_samples, 500u);
  EXPECT_EQ(rows[3].n_samples, 1000u);
  EXPECT_EQ(rows[3].d, 17u);
}
