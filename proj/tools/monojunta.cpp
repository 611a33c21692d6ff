// monojunta: command-line front end.
//
// Exit codes: 0 success, 1 a checked claim failed, 2 usage / infeasible input / budget.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "monojunta/monojunta.hpp"

namespace mj = monojunta;

namespace {

constexpr int kExitClaimFailed = 1;
constexpr int kExitUsage = 2;

struct Common {
  mj::Seed seed = 0;
  std::size_t workers = 1;
  std::string out;
  std::string mode = "exact";
  std::size_t samples = 100000;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "64-bit seed");
  cmd->add_option("--workers", c.workers, "worker threads; results depend on (seed, workers) only")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output path (default stdout)");
  cmd->add_option("--samples", c.samples, "Monte Carlo sample count");
}

/// Writes to --out, or stdout when empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw mj::Error("cannot write '" + path + "'");
  os << text;
  if (!os) throw mj::Error("write to '" + path + "' failed");
}

std::string csv(const std::vector<mj::ResultRow>& rows) {
  std::ostringstream os;
  mj::write_csv(os, rows);
  return os.str();
}

mj::ResultRow base_row(const std::string& id, const mj::SetFamily& fam, const std::string& ref) {
  mj::ResultRow r;
  r.experiment_id = id;
  r.d = fam.d();
  r.t = fam.t();
  r.m = fam.m();
  r.seed = fam.seed();
  r.family_ref = ref;
  return r;
}

int cmd_gen(std::size_t d, std::optional<std::size_t> t, std::optional<std::size_t> m, const Common& c) {
  if (d < 2) throw mj::InfeasibleParameters("d must be at least 2");
  const auto sched = mj::default_schedule(d);
  const std::size_t tt = t.value_or(sched.t);
  const std::size_t mm = m.value_or(t ? std::size_t{1} << tt : sched.m);
  const auto fam = mj::sample_family(c.seed, d, tt, mm);
  const auto text = mj::family_to_text(fam);
  if (c.out.empty()) {
    std::cout << text;
  } else {
    emit(c.out, text);
    std::cout << "family d=" << d << " t=" << tt << " m=" << mm << " seed=" << c.seed << " -> " << c.out << "\n";
  }
  return 0;
}

int cmd_stats(const std::string& path, const Common& c) {
  const auto fam = mj::load_family(path);
  mj::ExperimentPlan plan;
  plan.experiment_id = "stats";
  plan.mode = c.mode == "mc" ? mj::Mode::mc : mj::Mode::exact;
  plan.samples = c.samples;
  plan.workers = c.workers;
  plan.seed = c.seed;
  plan.quantities = {"p0", "p1", "p2plus", "mean_T", "second_factorial", "moment_gap"};
  auto base = base_row("stats", fam, path);
  if (plan.mode == mj::Mode::mc) base.seed = c.seed;
  emit(c.out, csv(mj::family_rows(plan, fam, base)));
  if (plan.mode == mj::Mode::exact) {
    // exact_t_statistics has already thrown if a closed form disagreed.
    std::cerr << "closed forms: mean_T = m 2^-t = " << mj::closed_form_mean_t(fam)
              << ", E|T|(|T|-1) = pair sum = " << mj::closed_form_second_factorial(fam) << " (both match)\n";
  }
  return 0;
}

int cmd_certify(const std::string& path, bool self_test) {
  const auto fam = mj::load_family(path);
  const mj::CounterexampleFunction cf(fam);
  auto f = cf.handle();
  bool ok = true;

  if (self_test) {
    // Best junta on all coordinates reproduces f; flipping its all-ones entry breaks monotonicity.
    std::vector<std::size_t> all(cf.arity());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i + 1;
    auto junta = mj::fiber_majority_junta(f, all).spec;
    junta.table.back() = !junta.table.back();
    f = junta.handle().relabel("corrupted junta of " + f.label());
    std::cout << "self-test: certifying a corrupted junta table\n";
  }

  const auto violation = mj::check_monotone(f);
  if (violation) {
    ok = false;
    std::cout << "monotone: FAIL at coordinate " << violation->coordinate << ": f(" << violation->lower.to_string()
              << ") = 1 > f(" << violation->upper.to_string() << ") = 0\n";
  } else {
    std::cout << "monotone: pass (" << f.arity() << " * 2^" << f.arity() - 1 << " edges)\n";
  }

  const auto cert = self_test ? mj::depth_certificate(f, cf.layout()) : mj::depth_certificate(cf);
  if (cert.pass) {
    std::cout << "depth: pass, depth <= " << cert.depth_bound << " (" << cert.constant_restrictions << " constant, "
              << cert.dictator_restrictions << " single-leaf restrictions, "
              << (cert.exhaustive_leaves ? "exhaustive" : "probe") << " leaf check)\n";
  } else {
    ok = false;
    std::cout << "depth: FAIL at x = " << cert.failing_x->to_string() << "\n";
  }
  return ok ? 0 : kExitClaimFailed;
}

int cmd_junta(const std::string& path, std::size_t k, const std::string& mode, double budget, const Common& c) {
  const auto fam = mj::load_family(path);
  const mj::CounterexampleFunction cf(fam);
  const auto f = cf.handle();
  const auto r = mode == "top-influence" ? mj::top_influence_junta(f, k) : mj::best_k_junta(f, k, budget, c.workers);
  const auto p1 = mj::exact_t_statistics(fam).p1;
  const auto bound = mj::lemma5_lower_bound(p1, k, fam.t());
  auto base = base_row("junta", fam, path);
  std::vector<mj::ResultRow> rows = {mj::exact_row(base, "junta_distance", r.distance.to_double(), k),
                                     mj::exact_row(base, "lemma5_bound", bound.to_double(), k)};
  emit(c.out, csv(rows));
  std::cerr << mj::to_string(r.provenance) << " " << k << "-junta on {";
  for (std::size_t i = 0; i < r.spec.coords.size(); ++i) std::cerr << (i ? "," : "") << r.spec.coords[i];
  std::cerr << "}: distance " << r.distance << ", lower bound " << bound << "\n";
  if (r.distance < bound) {
    std::cerr << "DOMINANCE VIOLATED: distance below the lower bound\n";
    return kExitClaimFailed;
  }
  return 0;
}

int cmd_bound(double p1, std::size_t k, std::size_t t) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw mj::InfeasibleParameters("p1 must lie in [0, 1]");
  std::cout << mj::format_real(mj::lemma5_lower_bound(p1, k, t)) << "\n";
  return 0;
}

/// min / quartiles / max per (cell, quantity, k); gives the over-sigma distribution of p1.
void print_summary(const std::vector<mj::ResultRow>& rows) {
  std::map<std::string, std::vector<double>> groups;
  for (const auto& r : rows) {
    std::string key = "d=" + std::to_string(r.d) + " t=" + std::to_string(r.t) + " m=" + std::to_string(r.m) + " " +
                      r.quantity + (r.k ? " k=" + std::to_string(*r.k) : "");
    groups[key].push_back(r.value);
  }
  for (auto& [key, v] : groups) {
    std::ranges::sort(v);
    auto q = [&](double p) { return v[static_cast<std::size_t>(p * static_cast<double>(v.size() - 1) + 0.5)]; };
    std::cerr << key << ": n=" << v.size() << " min=" << mj::format_real(v.front()) << " q25=" << mj::format_real(q(0.25))
              << " median=" << mj::format_real(q(0.5)) << " q75=" << mj::format_real(q(0.75))
              << " max=" << mj::format_real(v.back()) << "\n";
  }
}

int cmd_experiment(const std::string& plan_path, std::optional<std::size_t> workers, const Common& c) {
  auto plan = mj::plan_from_text(mj::read_text_file(plan_path));
  if (workers) plan.workers = *workers;
  const auto rows = mj::run_experiment(plan);
  emit(c.out, csv(rows));
  if (!c.out.empty()) print_summary(rows);
  // Lemma 5 dominance on any (junta_distance, lemma5_bound) pair of the same family and k.
  std::map<std::pair<std::string, std::size_t>, std::pair<double, double>> pairs;
  for (const auto& r : rows) {
    if (!r.k || r.mode != "exact") continue;
    auto& p = pairs[{r.family_ref, *r.k}];
    if (r.quantity == "junta_distance") p.first = r.value;
    if (r.quantity == "lemma5_bound") p.second = r.value + 0.0;
  }
  if (plan.wants("junta_distance") && plan.wants("lemma5_bound"))
    for (const auto& [key, p] : pairs)
      if (p.first < p.second) {
        std::cerr << "DOMINANCE VIOLATED for " << key.first << " k=" << key.second << "\n";
        return kExitClaimFailed;
      }
  return 0;
}

int cmd_sensitivity(const std::string& path, const Common& c) {
  const auto fam = mj::load_family(path);
  const mj::CounterexampleFunction cf(fam);
  const auto f = cf.handle();
  const mj::SamplerConfig cfg{c.samples, c.seed, c.workers};
  const auto prof = mj::sensitivity_profile(f, cfg);
  auto base = base_row("sensitivity", fam, path);
  base.seed = c.seed;
  emit(c.out, csv({mj::mc_row(base, "sensitivity_mean", prof.mean)}));
  std::cerr << "sensitivity histogram (value: count)\n";
  for (std::size_t s = 0; s < prof.histogram.size(); ++s)
    if (prof.histogram[s]) std::cerr << "  " << s << ": " << prof.histogram[s] << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monotone low-depth functions far from every small junta: construction and checks"};
  app.require_subcommand(1);
  Common c;

  std::size_t d = 0;
  std::optional<std::size_t> t;
  std::optional<std::size_t> m;
  auto* gen = app.add_subcommand("gen", "sample a set family and write its document");
  gen->add_option("--d", d, "address dimension (d-1 address bits)")->required();
  gen->add_option("--t", t, "set size (default ceil(sqrt(d)))");
  gen->add_option("--m", m, "family size (default 2^t)");
  add_common(gen, c);

  std::string family;
  auto* stats = app.add_subcommand("stats", "T-statistics of a family");
  stats->add_option("family", family, "family document")->required();
  stats->add_option("--mode", c.mode)->check(CLI::IsMember({"exact", "mc"}));
  add_common(stats, c);

  bool self_test = false;
  auto* certify = app.add_subcommand("certify", "monotonicity and depth certificates; exit 0 iff both pass");
  certify->add_option("family", family)->required();
  certify->add_flag("--self-test", self_test, "certify a deliberately corrupted junta instead (must fail)");

  std::size_t k = 0;
  double budget = mj::kDefaultFiberBudget;
  std::string junta_mode = "exact";
  auto* junta = app.add_subcommand("junta", "best k-junta distance and the lower bound");
  junta->add_option("family", family)->required();
  junta->add_option("--k", k)->required();
  junta->add_option("--mode", junta_mode)->check(CLI::IsMember({"exact", "top-influence"}));
  junta->add_option("--budget", budget, "fiber-visit budget for exhaustive search");
  add_common(junta, c);

  double p1 = 0;
  auto* bound = app.add_subcommand("bound", "max(0, (p1 - k 2^-t) / 2)");
  bound->add_option("--p1", p1)->required();
  bound->add_option("--k", k)->required();
  bound->add_option("--t", t)->required();

  std::string plan;
  std::optional<std::size_t> plan_workers;
  auto* experiment = app.add_subcommand("experiment", "run a plan document, write CSV");
  experiment->add_option("plan", plan)->required();
  experiment->add_option("--out", c.out);
  experiment->add_option("--workers", plan_workers, "override the plan's worker count")->check(CLI::PositiveNumber);

  auto* sensitivity = app.add_subcommand("sensitivity", "sampled sensitivity profile of f_sigma");
  sensitivity->add_option("family", family)->required();
  add_common(sensitivity, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(d, t, m, c);
    if (*stats) return cmd_stats(family, c);
    if (*certify) return cmd_certify(family, self_test);
    if (*junta) return cmd_junta(family, k, junta_mode, budget, c);
    if (*bound) return cmd_bound(p1, k, *t);
    if (*experiment) return cmd_experiment(plan, plan_workers, c);
    if (*sensitivity) return cmd_sensitivity(family, c);
  } catch (const mj::ConsistencyFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitClaimFailed;
  } catch (const mj::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
