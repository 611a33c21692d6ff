#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <thread>
#include <vector>

#include "monojunta/analysis.hpp"
#include "monojunta/bitcube.hpp"
#include "monojunta/errors.hpp"
#include "monojunta/function_handle.hpp"
#include "monojunta/functions.hpp"

namespace monojunta {

inline constexpr std::size_t kMinSamples = 100;

struct SamplerConfig {
  std::size_t n_samples = 100000;
  Seed seed = 0;
  std::size_t workers = 1;

  void validate() const {
    if (n_samples < kMinSamples) throw InfeasibleParameters("n_samples must be at least " + std::to_string(kMinSamples));
    if (workers < 1) throw InfeasibleParameters("workers must be at least 1");
  }
};

struct EstimateResult {
  double estimate = 0;
  double std_error = 0;  ///< sample standard error of the mean
  std::size_t n_samples = 0;
  Seed seed = 0;
  std::size_t workers = 1;
  friend bool operator==(const EstimateResult&, const EstimateResult&) = default;
};

namespace detail {

template <std::size_t K>
struct ScoreSums {
  std::array<std::int64_t, K> sum{};
  std::array<__int128, K> sumsq{};
};

/// Runs cfg.n_samples trials; make_trial(w) builds worker w's trial functor. Worker w owns the contiguous index range
/// [N w / W, N (w+1) / W) and the stream make_rng(seed, w). Sums are integers, so the
/// result depends only on (seed, workers, n_samples).
template <std::size_t K, class Trial>
std::array<EstimateResult, K> run_trials(const SamplerConfig& cfg, Trial&& make_trial) {
  cfg.validate();
  const std::size_t workers = cfg.workers;
  std::vector<ScoreSums<K>> parts(workers);
  auto body = [&](std::size_t w) {
    Rng rng = make_rng(cfg.seed, w);
    auto trial = make_trial(w);
    const std::size_t lo = cfg.n_samples * w / workers;
    const std::size_t hi = cfg.n_samples * (w + 1) / workers;
    auto& acc = parts[w];
    for (std::size_t s = lo; s < hi; ++s) {
      const std::array<std::int64_t, K> scores = trial(rng);
      for (std::size_t q = 0; q < K; ++q) {
        acc.sum[q] += scores[q];
        acc.sumsq[q] += static_cast<__int128>(scores[q]) * scores[q];
      }
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
  }
  ScoreSums<K> total;
  for (const auto& p : parts)
    for (std::size_t q = 0; q < K; ++q) {
      total.sum[q] += p.sum[q];
      total.sumsq[q] += p.sumsq[q];
    }
  std::array<EstimateResult, K> out;
  const auto n = static_cast<double>(cfg.n_samples);
  for (std::size_t q = 0; q < K; ++q) {
    const double mean = static_cast<double>(total.sum[q]) / n;
    const double var = static_cast<double>(total.sumsq[q]) / n - mean * mean;
    out[q] = EstimateResult{mean, std::sqrt(var > 0 ? var / n : 0.0), cfg.n_samples, cfg.seed, cfg.workers};
  }
  return out;
}

/// Size-t subset of {1..universe} written as a bitmask (coordinate j at bit j-1), using the
/// same Floyd selection as sample_t_subset.
template <class Engine>
void sample_t_subset_mask(Engine& rng, std::size_t universe, std::size_t t, std::span<std::uint64_t> mask) {
  std::ranges::fill(mask, 0);
  for (std::size_t j = universe - t + 1; j <= universe; ++j) {
    std::uniform_int_distribution<std::size_t> pick(1, j);
    std::size_t r = pick(rng);
    if ((mask[(r - 1) / 64] >> ((r - 1) % 64)) & 1u) r = j;
    mask[(r - 1) / 64] |= std::uint64_t{1} << ((r - 1) % 64);
  }
}

inline bool covered(std::span<const std::uint64_t> set, std::span<const std::uint64_t> x) {
  for (std::size_t b = 0; b < set.size(); ++b)
    if (set[b] & ~x[b]) return false;
  return true;
}

inline void check_joint_params(std::size_t d, std::size_t t, std::size_t m) {
  if (d < 2 || t > d - 1)
    throw InfeasibleParameters("need t <= d-1 (d = " + std::to_string(d) + ", t = " + std::to_string(t) + ")");
  if (m < 1) throw InfeasibleParameters("need m >= 1");
}

}  // namespace detail

/// Joint (sigma, x) estimates on one stream: {Pr(|T| = 1), E[|T|(2-|T|)]}. Every trial draws
/// a fresh family and a fresh uniform x; since 1[|T|=1] >= |T|(2-|T|) per trial, the first
/// estimate is never below the second.
inline std::array<EstimateResult, 2> estimate_t1_and_gap(std::size_t d, std::size_t t, std::size_t m,
                                                         const SamplerConfig& cfg) {
  detail::check_joint_params(d, t, m);
  const std::size_t universe = d - 1;
  const std::size_t blocks = (universe + 63) / 64;
  return detail::run_trials<2>(cfg, [=](std::size_t) {
    return [=, sets = std::vector<std::uint64_t>(m * blocks)](Rng& rng) mutable {
      for (std::size_t i = 0; i < m; ++i)
        detail::sample_t_subset_mask(rng, universe, t, std::span(sets).subspan(i * blocks, blocks));
      const InputWord x = uniform_word(rng, universe);
      std::int64_t c = 0;
      for (std::size_t i = 0; i < m; ++i)
        c += detail::covered(std::span<const std::uint64_t>(sets).subspan(i * blocks, blocks), x.blocks());
      return std::array<std::int64_t, 2>{c == 1, c * (2 - c)};
    };
  });
}

inline EstimateResult estimate_t1_probability(std::size_t d, std::size_t t, std::size_t m, const SamplerConfig& cfg) {
  return estimate_t1_and_gap(d, t, m, cfg)[0];
}

inline EstimateResult estimate_moment_gap(std::size_t d, std::size_t t, std::size_t m, const SamplerConfig& cfg) {
  return estimate_t1_and_gap(d, t, m, cfg)[1];
}

/// Sampled T-statistics for one fixed family (x uniform, sigma held fixed).
struct SampledTStatistics {
  EstimateResult mean_T;
  EstimateResult second_factorial;
  EstimateResult p0;
  EstimateResult p1;
  EstimateResult p2plus;
  EstimateResult moment_gap;
};

inline SampledTStatistics estimate_t_statistics(const SetFamily& family, const SamplerConfig& cfg) {
  const std::size_t universe = family.address_width();
  const std::size_t blocks = (universe + 63) / 64;
  std::vector<std::uint64_t> masks(family.m() * blocks, 0);
  for (std::size_t i = 1; i <= family.m(); ++i)
    for (auto j : family.set(i)) masks[(i - 1) * blocks + (j - 1) / 64] |= std::uint64_t{1} << ((j - 1) % 64);
  const std::size_t m = family.m();
  auto r = detail::run_trials<6>(cfg, [&](std::size_t) {
    return [&](Rng& rng) {
      const InputWord x = uniform_word(rng, universe);
      std::int64_t c = 0;
      for (std::size_t i = 0; i < m; ++i)
        c += detail::covered(std::span<const std::uint64_t>(masks).subspan(i * blocks, blocks), x.blocks());
      return std::array<std::int64_t, 6>{c, c * (c - 1), c == 0, c == 1, c >= 2, c * (2 - c)};
    };
  });
  return {r[0], r[1], r[2], r[3], r[4], r[5]};
}

inline EstimateResult estimate_distance(const FunctionHandle& f, const FunctionHandle& g, const SamplerConfig& cfg) {
  if (f.arity() != g.arity()) throw ArityMismatch(f.arity(), g.arity());
  const std::size_t n = f.arity();
  return detail::run_trials<1>(cfg, [&](std::size_t) {
    return [&](Rng& rng) {
      const InputWord w = uniform_word(rng, n);
      return std::array<std::int64_t, 1>{f(w) != g(w)};
    };
  })[0];
}

struct SensitivityProfile {
  std::vector<std::uint64_t> histogram;  ///< histogram[s] = sampled words with sensitivity s
  EstimateResult mean;                   ///< unbiased for total influence
};

inline SensitivityProfile sensitivity_profile(const FunctionHandle& f, const SamplerConfig& cfg) {
  cfg.validate();
  const std::size_t n = f.arity();
  std::vector<std::vector<std::uint64_t>> hist(cfg.workers, std::vector<std::uint64_t>(n + 1, 0));
  SensitivityProfile out;
  out.mean = detail::run_trials<1>(cfg, [&](std::size_t w) {
    auto* h = &hist[w];
    return [&f, h, n](Rng& rng) {
      const InputWord w = uniform_word(rng, n);
      const std::size_t s = sensitivity_at(f, w);
      ++(*h)[s];
      return std::array<std::int64_t, 1>{static_cast<std::int64_t>(s)};
    };
  })[0];
  out.histogram.assign(n + 1, 0);
  for (const auto& h : hist)
    for (std::size_t s = 0; s <= n; ++s) out.histogram[s] += h[s];
  return out;
}

}  // namespace monojunta
