#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "monojunta/bitcube.hpp"
#include "monojunta/errors.hpp"

namespace monojunta {

/// What y -> f(x, y) looks like once the address bits x are fixed, for functions that read
/// at most one leaf bit after x.
struct Restriction {
  enum class Kind { constant0, constant1, dictator };
  Kind kind = Kind::constant0;
  std::size_t leaf = 0;  ///< 1-based leaf index y_leaf when kind == dictator.

  static Restriction constant(bool v) { return {v ? Kind::constant1 : Kind::constant0, 0}; }
  static Restriction dictator(std::size_t leaf) { return {Kind::dictator, leaf}; }

  bool is_constant() const noexcept { return kind != Kind::dictator; }

  /// Twice Pr_y[a(y) != b(y)] over uniform y; an integer in {0, 1, 2}.
  friend int twice_disagreement(const Restriction& a, const Restriction& b) {
    if (a.is_constant() && b.is_constant()) return a.kind == b.kind ? 0 : 2;
    if (a.is_constant() || b.is_constant()) return 1;
    return a.leaf == b.leaf ? 0 : 1;
  }

  friend bool operator==(const Restriction&, const Restriction&) = default;
};

/// Type-erased evaluable Boolean function of fixed arity.
///
/// Besides the mandatory word evaluator a handle may carry accelerators: a packed evaluator
/// over the MSB-first integer encoding (arity <= 63), a direct sensitivity routine, and a
/// split structure (layout plus per-x restriction). Analyses use whichever is present; the
/// accelerators must agree with eval, which the test suite cross-checks.
class FunctionHandle {
 public:
  using Eval = std::function<bool(const InputWord&)>;
  using PackedEval = std::function<bool(std::uint64_t)>;
  using SensitivityFn = std::function<std::size_t(const InputWord&)>;
  using RestrictFn = std::function<Restriction(std::uint64_t)>;

  FunctionHandle(std::size_t arity, std::string label, Eval eval)
      : arity_(arity), label_(std::move(label)), eval_(std::move(eval)) {}

  std::size_t arity() const noexcept { return arity_; }
  const std::string& label() const noexcept { return label_; }

  bool operator()(const InputWord& w) const {
    if (w.width() != arity_) throw ArityMismatch(arity_, w.width());
    return eval_(w);
  }

  bool eval_packed(std::uint64_t v) const {
    if (packed_) return packed_(v);
    return eval_(InputWord::from_integer(v, arity_));
  }

  FunctionHandle& with_packed(PackedEval p) {
    if (arity_ <= kPackedWidthMax) packed_ = std::move(p);
    return *this;
  }
  FunctionHandle& with_sensitivity(SensitivityFn s) {
    sensitivity_ = std::move(s);
    return *this;
  }
  /// restrict receives the address bits x packed MSB-first (width layout.d - 1).
  FunctionHandle& with_split(SplitLayout layout, RestrictFn restrict) {
    if (layout.width() != arity_) throw ArityMismatch(arity_, layout.width());
    layout_ = layout;
    restrict_ = std::move(restrict);
    return *this;
  }
  FunctionHandle& relabel(std::string label) {
    label_ = std::move(label);
    return *this;
  }

  bool has_packed() const noexcept { return static_cast<bool>(packed_); }
  const SensitivityFn& sensitivity_fn() const noexcept { return sensitivity_; }
  const std::optional<SplitLayout>& layout() const noexcept { return layout_; }
  bool has_split() const noexcept { return layout_.has_value() && static_cast<bool>(restrict_); }
  Restriction restrict(std::uint64_t x) const { return restrict_(x); }

 private:
  std::size_t arity_;
  std::string label_;
  Eval eval_;
  PackedEval packed_;
  SensitivityFn sensitivity_;
  std::optional<SplitLayout> layout_;
  RestrictFn restrict_;
};

// Reference functions used by tests and the CLI.

inline FunctionHandle constant_function(std::size_t n, bool value) {
  return FunctionHandle(n, value ? "const1" : "const0", [value](const InputWord&) { return value; })
      .with_packed([value](std::uint64_t) { return value; });
}

inline FunctionHandle dictator(std::size_t n, std::size_t i) {
  if (i < 1 || i > n) throw CoordinateRange(i, n);
  return FunctionHandle(n, "dictator_x" + std::to_string(i), [i](const InputWord& w) { return w.get(i); })
      .with_packed([n, i](std::uint64_t v) { return ((v >> (n - i)) & 1u) != 0; });
}

inline FunctionHandle parity(std::size_t n) {
  return FunctionHandle(n, "parity" + std::to_string(n),
                        [](const InputWord& w) { return (w.popcount() & 1u) != 0; })
      .with_packed([](std::uint64_t v) { return (std::popcount(v) & 1) != 0; });
}

/// 1 iff more than half the coordinates are 1.
inline FunctionHandle majority(std::size_t n) {
  return FunctionHandle(n, "majority" + std::to_string(n),
                        [n](const InputWord& w) { return 2 * w.popcount() > n; })
      .with_packed([n](std::uint64_t v) { return 2 * static_cast<std::size_t>(std::popcount(v)) > n; });
}

inline FunctionHandle complement(FunctionHandle f) {
  auto shared = std::make_shared<FunctionHandle>(std::move(f));
  FunctionHandle out(shared->arity(), "not(" + shared->label() + ")",
                     [shared](const InputWord& w) { return !(*shared)(w); });
  if (shared->has_packed()) out.with_packed([shared](std::uint64_t v) { return !shared->eval_packed(v); });
  return out;
}

}  // namespace monojunta
