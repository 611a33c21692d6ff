#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "monojunta/analysis.hpp"
#include "monojunta/bitcube.hpp"
#include "monojunta/dyadic.hpp"
#include "monojunta/errors.hpp"
#include "monojunta/function_handle.hpp"

namespace monojunta {

inline constexpr std::size_t kJuntaArityMax = 24;
inline constexpr std::size_t kJuntaSupportMax = 20;
inline constexpr double kDefaultFiberBudget = 1e9;

/// A k-junta: sorted support J and a 2^k table indexed by the MSB-first value of w restricted to J.
struct JuntaSpec {
  std::size_t arity = 0;
  std::vector<std::size_t> coords;
  std::vector<bool> table;

  std::size_t k() const noexcept { return coords.size(); }

  std::size_t fiber_index(const InputWord& w) const {
    std::size_t a = 0;
    for (auto c : coords) a = (a << 1) | static_cast<std::size_t>(w.get(c));
    return a;
  }

  bool operator()(const InputWord& w) const {
    if (w.width() != arity) throw ArityMismatch(arity, w.width());
    return table[fiber_index(w)];
  }

  FunctionHandle handle() const {
    auto self = std::make_shared<const JuntaSpec>(*this);
    std::string label = "junta{";
    for (std::size_t i = 0; i < coords.size(); ++i) label += (i ? "," : "") + std::to_string(coords[i]);
    label += "}";
    FunctionHandle h(arity, label, [self](const InputWord& w) { return (*self)(w); });
    h.with_packed([self](std::uint64_t v) {
      std::size_t a = 0;
      for (auto c : self->coords) a = (a << 1) | static_cast<std::size_t>((v >> (self->arity - c)) & 1u);
      return static_cast<bool>(self->table[a]);
    });
    return h;
  }
};

enum class JuntaProvenance { exhaustive, fiber_given_subset, top_influence };

inline const char* to_string(JuntaProvenance p) {
  switch (p) {
    case JuntaProvenance::exhaustive: return "exhaustive";
    case JuntaProvenance::fiber_given_subset: return "fiber-given-subset";
    case JuntaProvenance::top_influence: return "top-influence";
  }
  return "?";
}

struct JuntaResult {
  JuntaSpec spec;
  Dyadic distance;
  JuntaProvenance provenance = JuntaProvenance::fiber_given_subset;
};

namespace detail {

inline void check_support(std::size_t n, const std::vector<std::size_t>& coords) {
  if (n > kJuntaArityMax) throw EnumerationTooLarge(n, kJuntaArityMax);
  if (coords.size() > kJuntaSupportMax) throw EnumerationTooLarge(coords.size(), kJuntaSupportMax);
  for (std::size_t k = 0; k < coords.size(); ++k) {
    if (coords[k] < 1 || coords[k] > n) throw CoordinateRange(coords[k], n);
    if (k > 0 && coords[k] <= coords[k - 1]) throw Error("junta support must be strictly ascending");
  }
}

/// Per-fiber count of ones of the truth table for support `coords`.
inline std::vector<std::uint32_t> fiber_ones(const TruthTable& tt, const std::vector<std::size_t>& coords) {
  const std::size_t n = tt.arity();
  std::vector<std::uint32_t> ones(std::size_t{1} << coords.size(), 0);
  const auto& blocks = tt.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    std::uint64_t bits = blocks[b];
    while (bits) {
      const std::uint64_t v = b * 64 + static_cast<std::uint64_t>(std::countr_zero(bits));
      bits &= bits - 1;
      std::size_t a = 0;
      for (auto c : coords) a = (a << 1) | static_cast<std::size_t>((v >> (n - c)) & 1u);
      ++ones[a];
    }
  }
  return ones;
}

/// Disagreement count (over 2^n words) of the fiber-majority junta on `coords`.
inline std::uint64_t fiber_majority(const TruthTable& tt, const std::vector<std::size_t>& coords,
                                    std::vector<bool>* table) {
  const auto ones = fiber_ones(tt, coords);
  const std::uint64_t fiber_size = std::uint64_t{1} << (tt.arity() - coords.size());
  std::uint64_t wrong = 0;
  if (table) table->assign(ones.size(), false);
  for (std::size_t a = 0; a < ones.size(); ++a) {
    const std::uint64_t o = ones[a];
    const std::uint64_t z = fiber_size - o;
    wrong += std::min(o, z);
    if (table) (*table)[a] = o > z;  // ties to 0
  }
  return wrong;
}

inline JuntaResult make_result(const TruthTable& tt, std::vector<std::size_t> coords, JuntaProvenance p) {
  JuntaResult r;
  r.spec.arity = tt.arity();
  const std::uint64_t wrong = fiber_majority(tt, coords, &r.spec.table);
  r.spec.coords = std::move(coords);
  r.distance = Dyadic::count_over_pow2(wrong, static_cast<unsigned>(tt.arity()));
  r.provenance = p;
  return r;
}

inline double binomial(std::size_t n, std::size_t k) {
  double r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace detail

/// Best junta on exactly the coordinates J: per-fiber majority, ties to 0.
inline JuntaResult fiber_majority_junta(const FunctionHandle& f, std::vector<std::size_t> coords) {
  std::ranges::sort(coords);
  detail::check_support(f.arity(), coords);
  const TruthTable tt(f);
  return detail::make_result(tt, std::move(coords), JuntaProvenance::fiber_given_subset);
}

/// Work needed by best_k_junta, in fiber visits: C(n, k) * 2^n.
inline double best_k_junta_cost(std::size_t n, std::size_t k) {
  return detail::binomial(n, k) * static_cast<double>(std::uint64_t{1} << n);
}

/// Exhaustive minimum over all size-k supports. Ties go to the lexicographically smallest J.
/// `workers` splits the candidate list into contiguous chunks; the result does not depend on it.
inline JuntaResult best_k_junta(const FunctionHandle& f, std::size_t k, double budget = kDefaultFiberBudget,
                                std::size_t workers = 1) {
  const std::size_t n = f.arity();
  if (n > kJuntaArityMax) throw EnumerationTooLarge(n, kJuntaArityMax);
  if (k > n) throw InfeasibleParameters("k = " + std::to_string(k) + " exceeds arity " + std::to_string(n));
  if (k > kJuntaSupportMax) throw EnumerationTooLarge(k, kJuntaSupportMax);
  const double cost = best_k_junta_cost(n, k);
  if (cost > budget) throw BudgetExceeded(cost, budget);

  const TruthTable tt(f);

  // Candidates in lexicographic order.
  std::vector<std::vector<std::size_t>> candidates;
  {
    std::vector<std::size_t> c(k);
    std::iota(c.begin(), c.end(), std::size_t{1});
    while (true) {
      candidates.push_back(c);
      std::size_t i = k;
      while (i > 0 && c[i - 1] == n - k + i) --i;
      if (i == 0) break;
      ++c[i - 1];
      for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
    }
  }

  workers = std::max<std::size_t>(1, std::min(workers, candidates.size()));
  std::vector<std::pair<std::uint64_t, std::size_t>> best(workers, {UINT64_MAX, 0});
  auto scan = [&](std::size_t w) {
    const std::size_t lo = candidates.size() * w / workers;
    const std::size_t hi = candidates.size() * (w + 1) / workers;
    for (std::size_t c = lo; c < hi; ++c) {
      const std::uint64_t wrong = detail::fiber_majority(tt, candidates[c], nullptr);
      if (wrong < best[w].first) best[w] = {wrong, c};
    }
  };
  if (workers == 1) {
    scan(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(scan, w);
  }
  auto winner = best[0];
  for (const auto& b : best)
    if (b.first < winner.first) winner = b;  // chunks are ordered, so strict < keeps the smallest J
  return detail::make_result(tt, candidates[winner.second], JuntaProvenance::exhaustive);
}

/// Fiber-majority junta on the k coordinates of largest influence (ties to the lower index).
inline JuntaResult top_influence_junta(const FunctionHandle& f, std::size_t k) {
  const std::size_t n = f.arity();
  if (k > n) throw InfeasibleParameters("k = " + std::to_string(k) + " exceeds arity " + std::to_string(n));
  const auto inf = influences(f);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{1});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return inf[a - 1] > inf[b - 1]; });
  std::vector<std::size_t> coords(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::ranges::sort(coords);
  detail::check_support(n, coords);
  const TruthTable tt(f);
  return detail::make_result(tt, std::move(coords), JuntaProvenance::top_influence);
}

/// Lower bound on the distance from f_sigma to any k-junta: max(0, (p1 - k 2^-t) / 2).
inline double lemma5_lower_bound(double p1, std::size_t k, std::size_t t) {
  const double v = (p1 - static_cast<double>(k) * std::ldexp(1.0, -static_cast<int>(t))) / 2;
  return v > 0 ? v : 0.0;
}

/// Exact form of the same bound.
inline Dyadic lemma5_lower_bound(Dyadic p1, std::size_t k, std::size_t t) {
  const Dyadic v = (p1 - Dyadic(static_cast<std::int64_t>(k), static_cast<unsigned>(t))).half();
  return v > Dyadic(0) ? v : Dyadic(0);
}

}  // namespace monojunta
