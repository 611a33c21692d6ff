#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "monojunta/bitcube.hpp"
#include "monojunta/errors.hpp"
#include "monojunta/function_handle.hpp"

namespace monojunta {

/// Family sigma = (S_1, ..., S_m) of size-t subsets of {1..d-1}. Repeated sets are allowed.
class SetFamily {
 public:
  using Set = std::vector<std::size_t>;

  SetFamily(std::size_t d, std::size_t t, std::vector<Set> sets, std::optional<Seed> seed = {})
      : d_(d), t_(t), sets_(std::move(sets)), seed_(seed) {
    if (d_ < 2) throw FormatError("d must be at least 2");
    if (t_ > d_ - 1) throw InfeasibleParameters("t = " + std::to_string(t_) + " exceeds d-1 = " + std::to_string(d_ - 1));
    if (sets_.empty()) throw FormatError("family needs m >= 1 sets");
    for (std::size_t i = 0; i < sets_.size(); ++i) validate(sets_[i], i + 1);
    build_index();
  }

  std::size_t d() const noexcept { return d_; }
  std::size_t t() const noexcept { return t_; }
  std::size_t m() const noexcept { return sets_.size(); }
  std::size_t address_width() const noexcept { return d_ - 1; }
  const std::vector<Set>& sets() const noexcept { return sets_; }
  const Set& set(std::size_t i) const { return sets_.at(i - 1); }
  const std::optional<Seed>& seed() const noexcept { return seed_; }

  /// S_i as a packed MSB-first mask over x (coordinate j -> bit d-1-j). Requires d-1 <= 63.
  std::uint64_t packed_mask(std::size_t i) const {
    if (packed_masks_.empty()) throw EnumerationTooLarge(address_width(), kPackedWidthMax);
    return packed_masks_.at(i - 1);
  }
  const std::vector<std::uint64_t>& packed_masks() const { return packed_masks_; }
  /// Sets (1-based indices) containing address coordinate j.
  const std::vector<std::size_t>& sets_containing(std::size_t j) const { return containing_.at(j - 1); }

  friend bool operator==(const SetFamily& a, const SetFamily& b) {
    return a.d_ == b.d_ && a.t_ == b.t_ && a.sets_ == b.sets_;
  }

 private:
  void validate(const Set& s, std::size_t index) const {
    if (s.size() != t_)
      throw FormatError("has " + std::to_string(s.size()) + " elements, expected t = " + std::to_string(t_), index);
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k] < 1 || s[k] > d_ - 1)
        throw FormatError("element " + std::to_string(s[k]) + " outside 1.." + std::to_string(d_ - 1), index);
      if (k > 0 && s[k] <= s[k - 1]) throw FormatError("elements must be strictly ascending", index);
    }
  }

  void build_index() {
    containing_.assign(d_ - 1, {});
    for (std::size_t i = 0; i < sets_.size(); ++i)
      for (auto j : sets_[i]) containing_[j - 1].push_back(i + 1);
    if (d_ - 1 <= kPackedWidthMax) {
      packed_masks_.reserve(sets_.size());
      for (const auto& s : sets_) {
        std::uint64_t mask = 0;
        for (auto j : s) mask |= std::uint64_t{1} << (d_ - 1 - j);
        packed_masks_.push_back(mask);
      }
    }
  }

  std::size_t d_;
  std::size_t t_;
  std::vector<Set> sets_;
  std::optional<Seed> seed_;
  std::vector<std::uint64_t> packed_masks_;
  std::vector<std::vector<std::size_t>> containing_;
};

/// Default parameters when only d is given: t = ceil(sqrt(d)), m = 2^t.
struct Schedule {
  std::size_t t;
  std::size_t m;
};

inline Schedule default_schedule(std::size_t d) {
  std::size_t t = static_cast<std::size_t>(std::sqrt(static_cast<double>(d)));
  while (t * t < d) ++t;
  while (t > 0 && (t - 1) * (t - 1) >= d) --t;
  if (t > 62) throw InfeasibleParameters("default schedule m = 2^t overflows");
  return {t, std::size_t{1} << t};
}

inline SetFamily sample_family(Rng& rng, std::size_t d, std::size_t t, std::size_t m,
                               std::optional<Seed> provenance = {}) {
  if (d < 2 || t < 1 || t > d - 1)
    throw InfeasibleParameters("need 1 <= t <= d-1 (d = " + std::to_string(d) + ", t = " + std::to_string(t) + ")");
  if (m < 1) throw InfeasibleParameters("need m >= 1");
  std::vector<SetFamily::Set> sets;
  sets.reserve(m);
  for (std::size_t i = 0; i < m; ++i) sets.push_back(sample_t_subset(rng, d - 1, t));
  return SetFamily(d, t, std::move(sets), provenance);
}

inline SetFamily sample_family(Seed seed, std::size_t d, std::size_t t, std::size_t m) {
  Rng rng = make_rng(seed);
  return sample_family(rng, d, t, m, seed);
}

// T-sets.

inline std::size_t t_count_packed(const SetFamily& family, std::uint64_t x) {
  std::size_t c = 0;
  for (auto mask : family.packed_masks()) c += (x & mask) == mask;
  return c;
}

inline bool set_satisfied(const SetFamily::Set& s, const InputWord& x) {
  return std::ranges::all_of(s, [&](std::size_t j) { return x.get(j); });
}

/// Indices i (ascending) whose set S_i is all-ones in x.
inline std::vector<std::size_t> t_set(const SetFamily& family, const InputWord& x) {
  if (x.width() != family.address_width()) throw ArityMismatch(family.address_width(), x.width());
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i <= family.m(); ++i)
    if (set_satisfied(family.set(i), x)) out.push_back(i);
  return out;
}

inline bool eval_talagrand(const SetFamily& family, const InputWord& x) {
  if (x.width() != family.address_width()) throw ArityMismatch(family.address_width(), x.width());
  return std::ranges::any_of(family.sets(), [&](const auto& s) { return set_satisfied(s, x); });
}

/// f_sigma: 1 if |T(x)| >= 2, 0 if T(x) empty, y_i if T(x) = {i}.
class CounterexampleFunction {
 public:
  explicit CounterexampleFunction(SetFamily family)
      : family_(std::make_shared<const SetFamily>(std::move(family))),
        layout_(family_->d(), family_->m()) {}

  const SetFamily& family() const noexcept { return *family_; }
  const SplitLayout& layout() const noexcept { return layout_; }
  std::size_t arity() const noexcept { return layout_.width(); }

  bool operator()(const InputWord& w) const {
    if (w.width() != arity()) throw ArityMismatch(arity(), w.width());
    const std::size_t dm1 = family_->address_width();
    std::size_t hit = 0;
    std::size_t count = 0;
    for (std::size_t i = 1; i <= family_->m(); ++i) {
      const auto& s = family_->set(i);
      if (std::ranges::all_of(s, [&](std::size_t j) { return w.get(j); })) {
        if (++count >= 2) return true;
        hit = i;
      }
    }
    return count == 1 && w.get(dm1 + hit);
  }

  /// Packed MSB-first word: x occupies the top d-1 bits, y_i is bit m-i.
  bool eval_packed(std::uint64_t w) const {
    const std::size_t m = family_->m();
    return resolve(restrict(w >> m), w, m);
  }

  Restriction restrict(std::uint64_t x) const {
    std::size_t count = 0;
    std::size_t hit = 0;
    const auto& masks = family_->packed_masks();
    for (std::size_t i = 0; i < masks.size(); ++i) {
      if ((x & masks[i]) == masks[i]) {
        if (++count >= 2) return Restriction::constant(true);
        hit = i + 1;
      }
    }
    return count == 0 ? Restriction::constant(false) : Restriction::dictator(hit);
  }

  /// Sensitivity at w in O(sum |S_i|) using per-set miss counts instead of n re-evaluations.
  std::size_t sensitivity(const InputWord& w) const {
    if (w.width() != arity()) throw ArityMismatch(arity(), w.width());
    const auto& fam = *family_;
    const std::size_t m = fam.m();
    const std::size_t dm1 = fam.address_width();
    std::vector<std::size_t> miss(m, 0);
    std::size_t count = 0;
    std::size_t index_sum = 0;
    for (std::size_t i = 1; i <= m; ++i) {
      for (auto j : fam.set(i)) miss[i - 1] += !w.get(j);
      if (miss[i - 1] == 0) {
        ++count;
        index_sum += i;
      }
    }
    auto value = [&](std::size_t c, std::size_t sole) {
      return c >= 2 || (c == 1 && w.get(dm1 + sole));
    };
    const bool here = value(count, index_sum);
    std::size_t s = count == 1 ? 1 : 0;  // only y_{T} is pivotal, and only when |T| = 1
    for (std::size_t j = 1; j <= dm1; ++j) {
      std::size_t delta = 0;
      std::size_t delta_sum = 0;
      const bool on = w.get(j);
      for (auto i : fam.sets_containing(j)) {
        if (miss[i - 1] == (on ? 0u : 1u)) {
          ++delta;
          delta_sum += i;
        }
      }
      const bool there = on ? value(count - delta, index_sum - delta_sum)
                            : value(count + delta, index_sum + delta_sum);
      s += here != there;
    }
    return s;
  }

  FunctionHandle handle() const {
    auto self = std::make_shared<const CounterexampleFunction>(*this);
    FunctionHandle h(arity(), "f_sigma(d=" + std::to_string(family_->d()) + ",t=" +
                                  std::to_string(family_->t()) + ",m=" + std::to_string(family_->m()) + ")",
                     [self](const InputWord& w) { return (*self)(w); });
    h.with_sensitivity([self](const InputWord& w) { return self->sensitivity(w); });
    if (family_->address_width() <= kPackedWidthMax) {
      h.with_split(layout_, [self](std::uint64_t x) { return self->restrict(x); });
      h.with_packed([self](std::uint64_t w) { return self->eval_packed(w); });
    }
    return h;
  }

 private:
  static bool resolve(const Restriction& r, std::uint64_t w, std::size_t m) {
    if (r.is_constant()) return r.kind == Restriction::Kind::constant1;
    return ((w >> (m - r.leaf)) & 1u) != 0;
  }

  std::shared_ptr<const SetFamily> family_;
  SplitLayout layout_;
};

inline bool eval_counterexample(const CounterexampleFunction& cf, const InputWord& w) { return cf(w); }

inline FunctionHandle talagrand_handle(const SetFamily& family) {
  auto fam = std::make_shared<const SetFamily>(family);
  FunctionHandle h(family.address_width(), "talagrand", [fam](const InputWord& x) { return eval_talagrand(*fam, x); });
  if (family.address_width() <= kPackedWidthMax)
    h.with_packed([fam](std::uint64_t x) { return t_count_packed(*fam, x) > 0; });
  return h;
}

/// G padded with m unused leaf coordinates, so it shares f_sigma's layout.
inline FunctionHandle talagrand_with_leaves(const SetFamily& family) {
  auto fam = std::make_shared<const SetFamily>(family);
  const SplitLayout layout(family.d(), family.m());
  FunctionHandle h(layout.width(), "talagrand+leaves", [fam](const InputWord& w) {
    return eval_talagrand(*fam, w.slice(1, fam->address_width()));
  });
  if (family.address_width() <= kPackedWidthMax) {
    h.with_split(layout, [fam](std::uint64_t x) { return Restriction::constant(t_count_packed(*fam, x) > 0); });
    if (layout.width() <= kPackedWidthMax) {
      const std::size_t m = family.m();
      h.with_packed([fam, m](std::uint64_t w) { return t_count_packed(*fam, w >> m) > 0; });
    }
  }
  return h;
}

/// Monotone addressing function on d-1 address bits and 2^{d-1} leaves y_0..y_{2^{d-1}-1}:
/// 1 above the threshold floor((d-1)/2), 0 below, and on the threshold the leaf whose index
/// is the MSB-first value of (x_1..x_{d-1}).
class AddressingFunction {
 public:
  static constexpr std::size_t kMaxAddressWidth = 20;

  explicit AddressingFunction(std::size_t d) : d_(d) {
    if (d < 2) throw InfeasibleParameters("addressing function needs d >= 2");
    if (d - 1 > kMaxAddressWidth)
      throw InfeasibleParameters("addressing function limited to d-1 <= " + std::to_string(kMaxAddressWidth));
  }

  std::size_t d() const noexcept { return d_; }
  std::size_t threshold() const noexcept { return (d_ - 1) / 2; }
  std::size_t leaf_count() const noexcept { return std::size_t{1} << (d_ - 1); }
  SplitLayout layout() const { return SplitLayout(d_, leaf_count()); }
  std::size_t arity() const noexcept { return d_ - 1 + leaf_count(); }

  /// Coordinate of 0-based leaf y_index.
  std::size_t leaf_coordinate(std::size_t index) const noexcept { return d_ + index; }

  Restriction restrict(std::uint64_t x) const {
    const auto weight = static_cast<std::size_t>(std::popcount(x));
    if (weight != threshold()) return Restriction::constant(weight > threshold());
    return Restriction::dictator(static_cast<std::size_t>(x) + 1);
  }

  bool operator()(const InputWord& w) const {
    if (w.width() != arity()) throw ArityMismatch(arity(), w.width());
    const auto r = restrict(w.slice(1, d_ - 1).to_integer());
    if (r.is_constant()) return r.kind == Restriction::Kind::constant1;
    return w.get(leaf_coordinate(r.leaf - 1));
  }

  FunctionHandle handle() const {
    auto self = std::make_shared<const AddressingFunction>(*this);
    FunctionHandle h(arity(), "addressing(d=" + std::to_string(d_) + ")",
                     [self](const InputWord& w) { return (*self)(w); });
    h.with_split(layout(), [self](std::uint64_t x) { return self->restrict(x); });
    if (arity() <= kPackedWidthMax) {
      const std::size_t leaves = leaf_count();
      h.with_packed([self, leaves](std::uint64_t w) {
        const auto r = self->restrict(w >> leaves);
        if (r.is_constant()) return r.kind == Restriction::Kind::constant1;
        return ((w >> (leaves - r.leaf)) & 1u) != 0;
      });
    }
    return h;
  }

  /// The threshold function [sum x_i > floor((d-1)/2)] on the same coordinates, ignoring leaves.
  FunctionHandle threshold_extension() const {
    const std::size_t dm1 = d_ - 1;
    const std::size_t thr = threshold();
    const std::size_t leaves = leaf_count();
    FunctionHandle h(arity(), "threshold(d=" + std::to_string(d_) + ")", [dm1, thr](const InputWord& w) {
      return w.slice(1, dm1).popcount() > thr;
    });
    h.with_split(layout(), [thr](std::uint64_t x) {
      return Restriction::constant(static_cast<std::size_t>(std::popcount(x)) > thr);
    });
    if (arity() <= kPackedWidthMax)
      h.with_packed([thr, leaves](std::uint64_t w) {
        return static_cast<std::size_t>(std::popcount(w >> leaves)) > thr;
      });
    return h;
  }

 private:
  std::size_t d_;
};

inline bool eval_addressing(const AddressingFunction& af, const InputWord& w) { return af(w); }

// Family documents.

inline std::string family_to_text(const SetFamily& family) {
  std::ostringstream os;
  os << "{\n  \"format_version\": 1,\n  \"d\": " << family.d() << ",\n  \"t\": " << family.t()
     << ",\n  \"m\": " << family.m() << ",\n";
  if (family.seed()) os << "  \"seed\": " << *family.seed() << ",\n";
  os << "  \"sets\": [\n";
  for (std::size_t i = 1; i <= family.m(); ++i) {
    os << "    [";
    const auto& s = family.set(i);
    for (std::size_t k = 0; k < s.size(); ++k) os << (k ? ", " : "") << s[k];
    os << "]" << (i < family.m() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

inline SetFamily family_from_text(const std::string& doc) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(doc);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("family document is not valid JSON: ") + e.what());
  }
  auto require_uint = [&](const char* key) -> std::uint64_t {
    if (!j.contains(key) || !j[key].is_number_unsigned())
      throw FormatError(std::string("field '") + key + "' missing or not a non-negative integer");
    return j[key].get<std::uint64_t>();
  };
  if (!j.is_object()) throw FormatError("family document must be an object");
  if (require_uint("format_version") != 1) throw FormatError("unsupported format_version");
  const auto d = require_uint("d");
  if (d < 2) throw FormatError("d must be at least 2");
  const auto t = require_uint("t");
  const auto m = require_uint("m");
  std::optional<Seed> seed;
  if (j.contains("seed") && !j["seed"].is_null()) seed = require_uint("seed");
  if (!j.contains("sets") || !j["sets"].is_array()) throw FormatError("field 'sets' missing or not a list");
  const auto& arr = j["sets"];
  if (arr.size() != m)
    throw FormatError("m = " + std::to_string(m) + " but 'sets' has " + std::to_string(arr.size()) + " entries");
  std::vector<SetFamily::Set> sets;
  sets.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_array()) throw FormatError("set is not a list", i + 1);
    SetFamily::Set s;
    for (const auto& e : arr[i]) {
      if (!e.is_number_integer()) throw FormatError("non-integer element", i + 1);
      const auto v = e.get<std::int64_t>();
      if (v < 1 || static_cast<std::uint64_t>(v) > d - 1)
        throw FormatError("element " + std::to_string(v) + " outside 1.." + std::to_string(d - 1), i + 1);
      s.push_back(static_cast<std::size_t>(v));
    }
    sets.push_back(std::move(s));
  }
  return SetFamily(d, t, std::move(sets), seed);
}

}  // namespace monojunta
