#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "monojunta/bitcube.hpp"
#include "monojunta/dyadic.hpp"
#include "monojunta/errors.hpp"
#include "monojunta/function_handle.hpp"
#include "monojunta/functions.hpp"

namespace monojunta {

/// Widest address block walked by the split-structured exact routes.
inline constexpr std::size_t kAddressEnumerationCap = 26;

/// An exact closed form disagreed with enumeration.
class ConsistencyFailure : public Error {
 public:
  using Error::Error;
};

/// Full truth table of an n-ary function, n <= kEnumerationCap. Entry v is f at the word whose
/// MSB-first encoding is v; entry v is stored at bit v%64 of block v/64.
class TruthTable {
 public:
  explicit TruthTable(const FunctionHandle& f) : n_(f.arity()) {
    if (n_ > kEnumerationCap) throw EnumerationTooLarge(n_, kEnumerationCap);
    const std::uint64_t size = std::uint64_t{1} << n_;
    bits_.assign((size + 63) / 64, 0);
    for (std::uint64_t v = 0; v < size; ++v)
      if (f.eval_packed(v)) bits_[v / 64] |= std::uint64_t{1} << (v % 64);
  }

  std::size_t arity() const noexcept { return n_; }
  std::uint64_t size() const noexcept { return std::uint64_t{1} << n_; }
  bool operator[](std::uint64_t v) const { return (bits_[v / 64] >> (v % 64)) & 1u; }
  const std::vector<std::uint64_t>& blocks() const noexcept { return bits_; }

  std::uint64_t ones() const {
    std::uint64_t c = 0;
    for (auto b : bits_) c += static_cast<std::uint64_t>(std::popcount(b));
    return c;
  }

  /// Number of words w with f(w) != f(w xor e_i), i.e. twice the number of sensitive edges.
  std::uint64_t flip_disagreements(std::size_t coord) const {
    if (coord < 1 || coord > n_) throw CoordinateRange(coord, n_);
    const std::size_t pos = n_ - coord;
    std::uint64_t c = 0;
    if (n_ < 6) {
      for (std::uint64_t v = 0; v < size(); ++v) c += (*this)[v] != (*this)[v ^ (std::uint64_t{1} << pos)];
      return c;
    }
    if (pos >= 6) {
      const std::size_t stride = std::size_t{1} << (pos - 6);
      for (std::size_t k = 0; k < bits_.size(); ++k)
        c += static_cast<std::uint64_t>(std::popcount(bits_[k] ^ bits_[k ^ stride]));
      return c;
    }
    const std::uint64_t low = kLowHalves[pos];
    for (auto b : bits_) c += 2 * static_cast<std::uint64_t>(std::popcount((b ^ (b >> (1u << pos))) & low));
    return c;
  }

  /// Edges (w, w + e_i) with f(w) = 1 and f(w + e_i) = 0; returns the lowest such w, if any.
  std::optional<std::uint64_t> first_decreasing_edge(std::size_t coord) const {
    const std::size_t pos = n_ - coord;
    const std::uint64_t bit = std::uint64_t{1} << pos;
    for (std::uint64_t v = 0; v < size(); ++v)
      if (!(v & bit) && (*this)[v] && !(*this)[v | bit]) return v;
    return std::nullopt;
  }

  bool has_decreasing_edge(std::size_t coord) const {
    const std::size_t pos = n_ - coord;
    if (n_ < 6) return first_decreasing_edge(coord).has_value();
    if (pos >= 6) {
      const std::size_t stride = std::size_t{1} << (pos - 6);
      for (std::size_t k = 0; k < bits_.size(); ++k)
        if (!(k & stride) && (bits_[k] & ~bits_[k | stride])) return true;
      return false;
    }
    const std::uint64_t low = kLowHalves[pos];
    for (auto b : bits_)
      if ((b & ~(b >> (1u << pos))) & low) return true;
    return false;
  }

 private:
  // Bit p of the mask is set iff bit `pos` of p is clear.
  static constexpr std::uint64_t kLowHalves[6] = {
      0x5555555555555555ULL, 0x3333333333333333ULL, 0x0F0F0F0F0F0F0F0FULL,
      0x00FF00FF00FF00FFULL, 0x0000FFFF0000FFFFULL, 0x00000000FFFFFFFFULL};

  std::size_t n_;
  std::vector<std::uint64_t> bits_;
};

// Split-structured exact routes: walk x only; y enters through the per-x restriction.

inline const SplitLayout& require_split(const FunctionHandle& f) {
  if (!f.has_split()) throw EnumerationTooLarge(f.arity(), kEnumerationCap);
  const auto& layout = *f.layout();
  if (layout.address_width() > kAddressEnumerationCap)
    throw EnumerationTooLarge(layout.address_width(), kAddressEnumerationCap);
  return layout;
}

inline Dyadic structural_distance(const FunctionHandle& f, const FunctionHandle& g) {
  const auto& layout = require_split(f);
  if (!g.has_split() || !(*g.layout() == layout)) throw ArityMismatch(layout.width(), g.arity());
  const std::size_t w = layout.address_width();
  std::uint64_t twice = 0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << w); ++x)
    twice += static_cast<std::uint64_t>(twice_disagreement(f.restrict(x), g.restrict(x)));
  return Dyadic::count_over_pow2(twice, static_cast<unsigned>(w + 1));
}

/// Inf_i for every coordinate 1..n of a split-structured function.
inline std::vector<Dyadic> structural_influences(const FunctionHandle& f) {
  const auto& layout = require_split(f);
  const std::size_t w = layout.address_width();
  const std::uint64_t size = std::uint64_t{1} << w;
  std::vector<Restriction> r;
  r.reserve(size);
  for (std::uint64_t x = 0; x < size; ++x) r.push_back(f.restrict(x));
  std::vector<Dyadic> out;
  out.reserve(layout.width());
  for (std::size_t j = 1; j <= w; ++j) {
    const std::uint64_t bit = std::uint64_t{1} << (w - j);
    std::uint64_t twice = 0;
    for (std::uint64_t x = 0; x < size; ++x) twice += static_cast<std::uint64_t>(twice_disagreement(r[x], r[x ^ bit]));
    out.push_back(Dyadic::count_over_pow2(twice, static_cast<unsigned>(w + 1)));
  }
  std::vector<std::uint64_t> pivotal(layout.m, 0);
  for (const auto& rx : r)
    if (!rx.is_constant()) ++pivotal.at(rx.leaf - 1);
  for (auto c : pivotal) out.push_back(Dyadic::count_over_pow2(c, static_cast<unsigned>(w)));
  return out;
}

// Distances, influence and sensitivity.

/// Exact disagreement fraction. Full enumeration when n <= 30, else the split route.
inline Dyadic exact_distance(const FunctionHandle& f, const FunctionHandle& g) {
  if (f.arity() != g.arity()) throw ArityMismatch(f.arity(), g.arity());
  const std::size_t n = f.arity();
  if (n > kEnumerationCap) {
    if (f.has_split() && g.has_split()) return structural_distance(f, g);
    throw EnumerationTooLarge(n, kEnumerationCap);
  }
  std::uint64_t diff = 0;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) diff += f.eval_packed(v) != g.eval_packed(v);
  return Dyadic::count_over_pow2(diff, static_cast<unsigned>(n));
}

inline std::size_t sensitivity_at(const FunctionHandle& f, const InputWord& w) {
  if (w.width() != f.arity()) throw ArityMismatch(f.arity(), w.width());
  if (f.sensitivity_fn()) return f.sensitivity_fn()(w);
  const bool here = f(w);
  InputWord probe = w;
  std::size_t s = 0;
  for (std::size_t i = 1; i <= w.width(); ++i) {
    probe.flip(i);
    s += f(probe) != here;
    probe.flip(i);
  }
  return s;
}

/// Sensitivity by brute-force flips only, ignoring any accelerator on the handle.
inline std::size_t sensitivity_by_flips(const FunctionHandle& f, const InputWord& w) {
  const bool here = f(w);
  InputWord probe = w;
  std::size_t s = 0;
  for (std::size_t i = 1; i <= w.width(); ++i) {
    probe.flip(i);
    s += f(probe) != here;
    probe.flip(i);
  }
  return s;
}

inline std::vector<Dyadic> influences(const FunctionHandle& f) {
  const std::size_t n = f.arity();
  if (n > kEnumerationCap) {
    if (f.has_split()) return structural_influences(f);
    throw EnumerationTooLarge(n, kEnumerationCap);
  }
  const TruthTable tt(f);
  std::vector<Dyadic> out;
  out.reserve(n);
  for (std::size_t i = 1; i <= n; ++i)
    out.push_back(Dyadic::count_over_pow2(tt.flip_disagreements(i), static_cast<unsigned>(n)));
  return out;
}

inline Dyadic coordinate_influence(const FunctionHandle& f, std::size_t i) {
  if (i < 1 || i > f.arity()) throw CoordinateRange(i, f.arity());
  if (f.arity() > kEnumerationCap) return influences(f).at(i - 1);
  const TruthTable tt(f);
  return Dyadic::count_over_pow2(tt.flip_disagreements(i), static_cast<unsigned>(f.arity()));
}

inline Dyadic total_influence(const FunctionHandle& f) {
  Dyadic total;
  for (auto v : influences(f)) total += v;
  return total;
}

/// Mean of sensitivity_at over all 2^n words, summed word by word.
inline Dyadic average_sensitivity(const FunctionHandle& f) {
  const std::size_t n = f.arity();
  if (n > kEnumerationCap) throw EnumerationTooLarge(n, kEnumerationCap);
  std::uint64_t total = 0;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
    const bool here = f.eval_packed(v);
    for (std::size_t pos = 0; pos < n; ++pos) total += f.eval_packed(v ^ (std::uint64_t{1} << pos)) != here;
  }
  return Dyadic::count_over_pow2(total, static_cast<unsigned>(n));
}

// Monotonicity.

struct EdgeViolation {
  InputWord lower;
  InputWord upper;
  std::size_t coordinate;
};

/// nullopt iff f is monotone. The witness is the decreasing edge with the smallest coordinate,
/// then the smallest lower word.
inline std::optional<EdgeViolation> check_monotone(const FunctionHandle& f) {
  const TruthTable tt(f);
  const std::size_t n = f.arity();
  for (std::size_t i = 1; i <= n; ++i) {
    if (!tt.has_decreasing_edge(i)) continue;
    const auto v = *tt.first_decreasing_edge(i);
    const std::uint64_t up = v | (std::uint64_t{1} << (n - i));
    return EdgeViolation{InputWord::from_integer(v, n), InputWord::from_integer(up, n), i};
  }
  return std::nullopt;
}

// Depth certificate.

struct DepthCertificate {
  bool pass = false;
  std::optional<InputWord> failing_x;
  std::uint64_t constant_restrictions = 0;
  std::uint64_t dictator_restrictions = 0;
  /// Depth of the certified tree: read all of x, then at most one leaf.
  std::size_t depth_bound = 0;
  /// Whether every restriction was checked on all 2^m leaf assignments (else on probe words).
  bool exhaustive_leaves = false;
};

namespace detail {

/// Evaluates y -> f(x, y) for fixed x; y is given as an InputWord of width m.
class Restricted {
 public:
  Restricted(const FunctionHandle& f, const SplitLayout& layout, std::uint64_t x)
      : f_(f), layout_(layout), x_(x), packed_(f.has_packed() && layout.width() <= kPackedWidthMax) {
    if (!packed_) base_ = InputWord::from_integer(x, layout.address_width()).concat(InputWord(layout.m));
  }

  bool operator()(const InputWord& y) {
    if (packed_) return f_.eval_packed((x_ << layout_.m) | y.to_integer());
    for (std::size_t i = 1; i <= layout_.m; ++i) base_.set(layout_.address_width() + i, y.get(i));
    return f_(base_);
  }

 private:
  const FunctionHandle& f_;
  const SplitLayout& layout_;
  std::uint64_t x_;
  bool packed_;
  InputWord base_;
};

inline bool matches(const Restriction& r, const InputWord& y, bool value) {
  if (r.is_constant()) return value == (r.kind == Restriction::Kind::constant1);
  return value == y.get(r.leaf);
}

}  // namespace detail

/// Largest leaf block checked exhaustively per x; wider blocks are checked on probe words
/// (all-zeros, all-ones, every unit vector and every co-unit vector).
inline constexpr std::size_t kExhaustiveLeafWidth = 12;

/// Certifies that for every x the restriction y -> f(x, y) is a constant or a single positive
/// leaf literal y_i, which gives a decision tree of depth (d-1) + 1. The restriction is
/// inferred from evaluations of f alone, then verified.
inline DepthCertificate depth_certificate(const FunctionHandle& f, const SplitLayout& layout) {
  if (f.arity() != layout.width()) throw ArityMismatch(layout.width(), f.arity());
  const std::size_t w = layout.address_width();
  const std::size_t m = layout.m;
  if (w > kAddressEnumerationCap) throw EnumerationTooLarge(w, kAddressEnumerationCap);

  DepthCertificate cert;
  cert.exhaustive_leaves = m <= kExhaustiveLeafWidth;

  std::vector<InputWord> probes;
  if (!cert.exhaustive_leaves) {
    InputWord zeros(m);
    InputWord ones(m);
    for (std::size_t i = 1; i <= m; ++i) ones.set(i, true);
    probes.push_back(zeros);
    probes.push_back(ones);
    for (std::size_t i = 1; i <= m; ++i) {
      probes.push_back(flip_coordinate(zeros, i));
      probes.push_back(flip_coordinate(ones, i));
    }
  }

  for (std::uint64_t x = 0; x < (std::uint64_t{1} << w); ++x) {
    detail::Restricted g(f, layout, x);
    InputWord y(m);
    const bool at_zero = g(y);
    Restriction claim = Restriction::constant(at_zero);
    bool ok = true;
    if (!at_zero) {
      // A positive literal y_i is 0 at y = 0 and 1 exactly at unit vectors e_i.
      std::size_t found = 0;
      for (std::size_t i = 1; i <= m && ok; ++i) {
        y.set(i, true);
        if (g(y)) {
          if (found) ok = false;
          found = i;
        }
        y.set(i, false);
      }
      if (found) claim = Restriction::dictator(found);
    }
    if (ok) {
      if (cert.exhaustive_leaves) {
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << m) && ok; ++v) {
          const auto yy = InputWord::from_integer(v, m);
          ok = detail::matches(claim, yy, g(yy));
        }
      } else {
        for (const auto& yy : probes) {
          if (!detail::matches(claim, yy, g(yy))) {
            ok = false;
            break;
          }
        }
      }
    }
    if (!ok) {
      cert.pass = false;
      cert.failing_x = InputWord::from_integer(x, w);
      return cert;
    }
    if (claim.is_constant())
      ++cert.constant_restrictions;
    else
      ++cert.dictator_restrictions;
  }
  cert.pass = true;
  cert.depth_bound = w + (cert.dictator_restrictions > 0 ? 1 : 0);
  return cert;
}

/// As above, and additionally requires every dictator restriction to read y_i with T(x) = {i}.
inline DepthCertificate depth_certificate(const CounterexampleFunction& cf) {
  auto cert = depth_certificate(cf.handle(), cf.layout());
  if (!cert.pass) return cert;
  const auto& fam = cf.family();
  const std::size_t w = fam.address_width();
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << w); ++x) {
    const auto t = t_set(fam, InputWord::from_integer(x, w));
    const auto r = cf.restrict(x);
    const bool consistent = t.size() == 1 ? (!r.is_constant() && r.leaf == t.front()) : r.is_constant();
    if (!consistent) {
      cert.pass = false;
      cert.failing_x = InputWord::from_integer(x, w);
      return cert;
    }
  }
  return cert;
}

// T-statistics.

struct TStatistics {
  Dyadic mean_T;
  Dyadic second_factorial;
  Dyadic p0;
  Dyadic p1;
  Dyadic p2plus;
  Dyadic moment_gap;
};

/// mean_T closed form m * 2^-t.
inline Dyadic closed_form_mean_t(const SetFamily& family) {
  return Dyadic(static_cast<std::int64_t>(family.m()), static_cast<unsigned>(family.t()));
}

/// Second factorial moment closed form: sum over ordered pairs i != j of 2^-|S_i u S_j|.
inline Dyadic closed_form_second_factorial(const SetFamily& family) {
  const std::size_t w = family.address_width();
  if (w > 62) throw EnumerationTooLarge(w, 62);
  const auto& masks = family.packed_masks();
  std::uint64_t scaled = 0;  // in units of 2^-w
  for (std::size_t i = 0; i < masks.size(); ++i)
    for (std::size_t j = 0; j < masks.size(); ++j)
      if (i != j) scaled += std::uint64_t{1} << (w - static_cast<std::size_t>(std::popcount(masks[i] | masks[j])));
  return Dyadic::count_over_pow2(scaled, static_cast<unsigned>(w));
}

/// Exact statistics of |T(x)| over uniform x, cross-checked against both closed forms.
inline TStatistics exact_t_statistics(const SetFamily& family) {
  const std::size_t w = family.address_width();
  if (w > kAddressEnumerationCap) throw EnumerationTooLarge(w, kAddressEnumerationCap);
  std::uint64_t sum = 0;
  std::uint64_t sum_factorial = 0;
  std::uint64_t c0 = 0;
  std::uint64_t c1 = 0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << w); ++x) {
    const std::uint64_t c = t_count_packed(family, x);
    sum += c;
    sum_factorial += c * (c - (c > 0 ? 1 : 0));
    c0 += c == 0;
    c1 += c == 1;
  }
  const auto e = static_cast<unsigned>(w);
  TStatistics s;
  s.mean_T = Dyadic::count_over_pow2(sum, e);
  s.second_factorial = Dyadic::count_over_pow2(sum_factorial, e);
  s.p0 = Dyadic::count_over_pow2(c0, e);
  s.p1 = Dyadic::count_over_pow2(c1, e);
  s.p2plus = Dyadic::count_over_pow2((std::uint64_t{1} << w) - c0 - c1, e);
  s.moment_gap = s.mean_T - s.second_factorial;

  if (s.mean_T != closed_form_mean_t(family))
    throw ConsistencyFailure("mean |T| " + s.mean_T.to_string() + " != m 2^-t = " +
                             closed_form_mean_t(family).to_string());
  if (s.second_factorial != closed_form_second_factorial(family))
    throw ConsistencyFailure("E|T|(|T|-1) " + s.second_factorial.to_string() + " != pair sum " +
                             closed_form_second_factorial(family).to_string());
  return s;
}

/// Pr_x(j in T | i in T) for fixed sets: 2^-|S_j \ S_i|.
inline Dyadic pair_conditional(const SetFamily::Set& s_i, const SetFamily::Set& s_j) {
  std::size_t outside = 0;
  for (auto a : s_j)
    if (!std::ranges::binary_search(s_i, a)) ++outside;
  return Dyadic(1, static_cast<unsigned>(outside));
}

}  // namespace monojunta
