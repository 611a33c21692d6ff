#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace monojunta {

/// Base for every error raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EnumerationTooLarge : public Error {
 public:
  EnumerationTooLarge(std::size_t width, std::size_t cap)
      : Error("enumeration width " + std::to_string(width) + " exceeds cap " + std::to_string(cap) +
              "; use sampled mode"),
        width_(width),
        cap_(cap) {}
  std::size_t width() const noexcept { return width_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t width_;
  std::size_t cap_;
};

class CoordinateRange : public Error {
 public:
  CoordinateRange(std::size_t index, std::size_t width)
      : Error("coordinate " + std::to_string(index) + " outside 1.." + std::to_string(width)) {}
};

class InfeasibleParameters : public Error {
 public:
  using Error::Error;
};

class ArityMismatch : public Error {
 public:
  ArityMismatch(std::size_t expected, std::size_t got)
      : Error("arity mismatch: expected width " + std::to_string(expected) + ", got " +
              std::to_string(got)) {}
};

/// Malformed or invariant-violating family/plan document. set_index is 1-based, 0 when not
/// attributable to a single set.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what, std::size_t set_index = 0)
      : Error(set_index ? "set " + std::to_string(set_index) + ": " + what : what),
        set_index_(set_index) {}
  std::size_t set_index() const noexcept { return set_index_; }

 private:
  std::size_t set_index_;
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(double needed, double budget)
      : Error("exhaustive junta search needs " + std::to_string(needed) +
              " fiber visits, budget is " + std::to_string(budget) +
              "; try top_influence_junta (--mode top-influence)") {}
};

}  // namespace monojunta
