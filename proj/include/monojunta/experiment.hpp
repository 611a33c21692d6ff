#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "monojunta/analysis.hpp"
#include "monojunta/functions.hpp"
#include "monojunta/junta.hpp"
#include "monojunta/montecarlo.hpp"
#include "monojunta/results.hpp"

namespace monojunta {

enum class Mode { exact, mc };
enum class JuntaSearch { exhaustive, top_influence };

struct GridCell {
  std::size_t d = 0;
  std::size_t t = 0;
  std::size_t m = 0;
  std::optional<std::size_t> samples;   ///< overrides the plan's sample count
  std::optional<std::size_t> families;  ///< overrides the plan's family count
};

/// A sweep: for each grid cell, `families` random families (or one family loaded from
/// family_path), each reported on the requested quantities.
struct ExperimentPlan {
  std::string experiment_id = "experiment";
  Mode mode = Mode::exact;
  Seed seed = 0;
  std::size_t workers = 1;
  std::size_t samples = 100000;
  std::size_t families = 1;
  std::vector<GridCell> grid;
  std::optional<std::string> family_path;
  std::vector<std::string> quantities;
  std::size_t k_min = 0;
  std::size_t k_max = 0;
  JuntaSearch junta_search = JuntaSearch::exhaustive;
  double budget = kDefaultFiberBudget;

  bool wants(std::string_view q) const { return std::ranges::find(quantities, q) != quantities.end(); }
  bool wants_k() const { return wants("junta_distance") || wants("lemma5_bound"); }
};

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SetFamily load_family(const std::string& path) { return family_from_text(read_text_file(path)); }

namespace detail {

/// Enumeration limits a cell must respect in exact mode.
inline void check_exact_cell(const ExperimentPlan& plan, std::size_t d, std::size_t m) {
  const std::size_t w = d - 1;
  const bool needs_x = plan.wants("p0") || plan.wants("p1") || plan.wants("p2plus") || plan.wants("mean_T") ||
                       plan.wants("second_factorial") || plan.wants("moment_gap") || plan.wants("total_influence") ||
                       plan.wants("sensitivity_mean") || plan.wants("lemma5_bound");
  if (needs_x && w > kAddressEnumerationCap) throw EnumerationTooLarge(w, kAddressEnumerationCap);
  if (plan.wants("junta_distance")) {
    const std::size_t n = w + m;
    if (n > kJuntaArityMax) throw EnumerationTooLarge(n, kJuntaArityMax);
    if (plan.junta_search == JuntaSearch::exhaustive)
      for (std::size_t k = plan.k_min; k <= std::min(plan.k_max, n); ++k)
        if (best_k_junta_cost(n, k) > plan.budget) throw BudgetExceeded(best_k_junta_cost(n, k), plan.budget);
  }
}

}  // namespace detail

inline void validate_plan(const ExperimentPlan& plan) {
  if (plan.quantities.empty()) throw FormatError("plan lists no quantities");
  for (const auto& q : plan.quantities)
    if (std::ranges::find(known_quantities(), q) == known_quantities().end())
      throw FormatError("unknown quantity '" + q + "'");
  if (plan.family_path && !plan.grid.empty()) throw FormatError("plan has both 'grid' and 'family_path'");
  if (!plan.family_path && plan.grid.empty()) throw FormatError("plan needs 'grid' or 'family_path'");
  if (plan.families < 1) throw FormatError("'families' must be at least 1");
  if (plan.workers < 1) throw FormatError("'workers' must be at least 1");
  if (plan.k_min > plan.k_max) throw FormatError("k range is empty");
  if (plan.mode == Mode::mc) {
    if (plan.samples < kMinSamples) throw FormatError("'samples' must be at least " + std::to_string(kMinSamples));
    if (plan.wants("junta_distance")) throw FormatError("junta_distance is exact-only");
  }
  for (const auto& c : plan.grid) {
    if (c.d < 2 || c.t < 1 || c.t > c.d - 1)
      throw InfeasibleParameters("grid cell d=" + std::to_string(c.d) + " t=" + std::to_string(c.t) +
                                 " violates 1 <= t <= d-1");
    if (c.m < 1) throw InfeasibleParameters("grid cell needs m >= 1");
    if (c.families && *c.families < 1) throw FormatError("cell 'families' must be at least 1");
    if (plan.mode == Mode::mc && c.samples && *c.samples < kMinSamples)
      throw FormatError("cell 'samples' must be at least " + std::to_string(kMinSamples));
    if (plan.mode == Mode::exact) detail::check_exact_cell(plan, c.d, c.m);
  }
}

inline ExperimentPlan plan_from_text(const std::string& doc) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(doc);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("plan document is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("plan document must be an object");
  if (j.value("format_version", 0) != 1) throw FormatError("unsupported format_version");
  ExperimentPlan p;
  try {
    p.experiment_id = j.value("experiment_id", p.experiment_id);
    const std::string mode = j.value("mode", std::string("exact"));
    if (mode == "exact")
      p.mode = Mode::exact;
    else if (mode == "mc")
      p.mode = Mode::mc;
    else
      throw FormatError("mode must be 'exact' or 'mc'");
    p.seed = j.value("seed", Seed{0});
    p.workers = j.value("workers", std::size_t{1});
    p.samples = j.value("samples", p.samples);
    p.families = j.value("families", p.families);
    p.budget = j.value("budget", p.budget);
    if (j.contains("family_path")) p.family_path = j["family_path"].get<std::string>();
    if (j.contains("grid")) {
      for (const auto& c : j["grid"]) {
        GridCell cell;
        cell.d = c.at("d").get<std::size_t>();
        const auto sched = default_schedule(cell.d);
        cell.t = c.value("t", sched.t);
        cell.m = c.value("m", c.contains("t") ? std::size_t{1} << cell.t : sched.m);
        if (c.contains("samples")) cell.samples = c["samples"].get<std::size_t>();
        if (c.contains("families")) cell.families = c["families"].get<std::size_t>();
        p.grid.push_back(cell);
      }
    }
    p.quantities = j.value("quantities", std::vector<std::string>{});
    if (j.contains("k")) {
      const auto& k = j["k"];
      if (k.is_array() && k.size() == 2) {
        p.k_min = k[0].get<std::size_t>();
        p.k_max = k[1].get<std::size_t>();
      } else {
        p.k_min = p.k_max = k.get<std::size_t>();
      }
    }
    const std::string js = j.value("junta_mode", std::string("exact"));
    if (js == "exact")
      p.junta_search = JuntaSearch::exhaustive;
    else if (js == "top-influence")
      p.junta_search = JuntaSearch::top_influence;
    else
      throw FormatError("junta_mode must be 'exact' or 'top-influence'");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed plan: ") + e.what());
  }
  validate_plan(p);
  return p;
}

/// Seed that stream `mc` sampling uses for a family; kept apart from the family's own stream.
inline Seed sampling_seed(Seed family_seed) { return mix64(family_seed ^ 0x6a09e667f3bcc909ULL); }

/// Exact or sampled rows for one family. Junta rows cover k_min..min(k_max, n).
inline std::vector<ResultRow> family_rows(const ExperimentPlan& plan, const SetFamily& family, ResultRow base) {
  std::vector<ResultRow> rows;
  const CounterexampleFunction cf(family);
  const auto f = cf.handle();
  const std::size_t n = cf.arity();

  if (plan.mode == Mode::exact) {
    std::optional<TStatistics> ts;
    auto stats = [&]() -> const TStatistics& {
      if (!ts) ts = exact_t_statistics(family);
      return *ts;
    };
    const std::pair<const char*, Dyadic TStatistics::*> fields[] = {
        {"p0", &TStatistics::p0},         {"p1", &TStatistics::p1},
        {"p2plus", &TStatistics::p2plus}, {"mean_T", &TStatistics::mean_T},
        {"second_factorial", &TStatistics::second_factorial}, {"moment_gap", &TStatistics::moment_gap}};
    for (const auto& [name, field] : fields)
      if (plan.wants(name)) rows.push_back(exact_row(base, name, (stats().*field).to_double()));
    if (plan.wants("total_influence")) rows.push_back(exact_row(base, "total_influence", total_influence(f).to_double()));
    if (plan.wants("sensitivity_mean")) {
      const Dyadic v = n <= 20 ? average_sensitivity(f) : total_influence(f);
      rows.push_back(exact_row(base, "sensitivity_mean", v.to_double()));
    }
    for (std::size_t k = plan.k_min; plan.wants_k() && k <= std::min(plan.k_max, n); ++k) {
      if (plan.wants("junta_distance")) {
        const auto r = plan.junta_search == JuntaSearch::exhaustive ? best_k_junta(f, k, plan.budget, plan.workers)
                                                                     : top_influence_junta(f, k);
        rows.push_back(exact_row(base, "junta_distance", r.distance.to_double(), k));
      }
      if (plan.wants("lemma5_bound"))
        rows.push_back(exact_row(base, "lemma5_bound", lemma5_lower_bound(stats().p1, k, family.t()).to_double(), k));
    }
    return rows;
  }

  const SamplerConfig cfg{plan.samples, sampling_seed(base.seed.value_or(plan.seed)), plan.workers};
  std::optional<SampledTStatistics> ts;
  auto stats = [&]() -> const SampledTStatistics& {
    if (!ts) ts = estimate_t_statistics(family, cfg);
    return *ts;
  };
  const std::pair<const char*, EstimateResult SampledTStatistics::*> fields[] = {
      {"p0", &SampledTStatistics::p0},         {"p1", &SampledTStatistics::p1},
      {"p2plus", &SampledTStatistics::p2plus}, {"mean_T", &SampledTStatistics::mean_T},
      {"second_factorial", &SampledTStatistics::second_factorial},
      {"moment_gap", &SampledTStatistics::moment_gap}};
  for (const auto& [name, field] : fields)
    if (plan.wants(name)) rows.push_back(mc_row(base, name, stats().*field));
  if (plan.wants("total_influence") || plan.wants("sensitivity_mean")) {
    const auto prof = sensitivity_profile(f, cfg);
    if (plan.wants("total_influence")) rows.push_back(mc_row(base, "total_influence", prof.mean));
    if (plan.wants("sensitivity_mean")) rows.push_back(mc_row(base, "sensitivity_mean", prof.mean));
  }
  for (std::size_t k = plan.k_min; plan.wants("lemma5_bound") && k <= std::min(plan.k_max, n); ++k) {
    EstimateResult e = stats().p1;
    e.estimate = lemma5_lower_bound(e.estimate, k, family.t());
    e.std_error = e.estimate > 0 ? e.std_error / 2 : 0.0;
    rows.push_back(mc_row(base, "lemma5_bound", e, k));
  }
  return rows;
}

/// Runs every cell of the plan. Output depends only on (plan, seed, workers).
inline std::vector<ResultRow> run_experiment(const ExperimentPlan& plan) {
  validate_plan(plan);
  std::vector<ResultRow> rows;
  auto append = [&](const SetFamily& family, ResultRow base, std::size_t samples) {
    ExperimentPlan cell_plan = plan;
    cell_plan.samples = samples;
    auto r = family_rows(cell_plan, family, std::move(base));
    rows.insert(rows.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  };
  if (plan.family_path) {
    const SetFamily family = load_family(*plan.family_path);
    if (plan.mode == Mode::exact) detail::check_exact_cell(plan, family.d(), family.m());
    ResultRow base;
    base.experiment_id = plan.experiment_id;
    base.d = family.d();
    base.t = family.t();
    base.m = family.m();
    base.seed = family.seed() ? family.seed() : std::optional<std::uint64_t>(plan.seed);
    base.family_ref = *plan.family_path;
    append(family, base, plan.samples);
    return rows;
  }
  for (std::size_t c = 0; c < plan.grid.size(); ++c) {
    const auto& cell = plan.grid[c];
    for (std::size_t i = 0; i < cell.families.value_or(plan.families); ++i) {
      const Seed fs = substream(substream(plan.seed, c), i);
      const SetFamily family = sample_family(fs, cell.d, cell.t, cell.m);
      ResultRow base;
      base.experiment_id = plan.experiment_id;
      base.d = cell.d;
      base.t = cell.t;
      base.m = cell.m;
      base.seed = fs;
      base.family_ref = "cell" + std::to_string(c) + "/family" + std::to_string(i);
      append(family, base, cell.samples.value_or(plan.samples));
    }
  }
  return rows;
}

}  // namespace monojunta
