#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace monojunta {

/// Exact rational with a power-of-two denominator: num / 2^exp.
///
/// Every probability over the uniform hypercube is a count over 2^n, so exact-mode
/// results are carried as Dyadic and compared without rounding. Values are kept
/// normalized (odd numerator, or zero with exp 0) so equality is structural.
class Dyadic {
 public:
  constexpr Dyadic() = default;
  constexpr Dyadic(std::int64_t num, unsigned exp = 0) : num_(num), exp_(exp) { normalize(); }

  static constexpr Dyadic count_over_pow2(std::uint64_t count, unsigned exp) {
    return Dyadic(static_cast<std::int64_t>(count), exp);
  }

  constexpr std::int64_t numerator() const noexcept { return num_; }
  constexpr unsigned exponent() const noexcept { return exp_; }
  constexpr std::uint64_t denominator() const { return std::uint64_t{1} << exp_; }

  double to_double() const noexcept {
    double v = static_cast<double>(num_);
    for (unsigned i = 0; i < exp_; ++i) v *= 0.5;
    return v;
  }

  std::string to_string() const {
    if (exp_ == 0) return std::to_string(num_);
    if (exp_ < 63) return std::to_string(num_) + "/" + std::to_string(denominator());
    return std::to_string(num_) + "/2^" + std::to_string(exp_);
  }

  friend constexpr Dyadic operator+(Dyadic a, Dyadic b) {
    const unsigned e = a.exp_ > b.exp_ ? a.exp_ : b.exp_;
    return from_wide(scaled(a, e) + scaled(b, e), e);
  }
  friend constexpr Dyadic operator-(Dyadic a, Dyadic b) {
    const unsigned e = a.exp_ > b.exp_ ? a.exp_ : b.exp_;
    return from_wide(scaled(a, e) - scaled(b, e), e);
  }
  friend constexpr Dyadic operator-(Dyadic a) { return Dyadic(-a.num_, a.exp_); }
  friend constexpr Dyadic operator*(Dyadic a, std::int64_t k) {
    return from_wide(static_cast<__int128>(a.num_) * k, a.exp_);
  }
  friend constexpr Dyadic operator*(Dyadic a, Dyadic b) {
    return from_wide(static_cast<__int128>(a.num_) * b.num_, a.exp_ + b.exp_);
  }
  /// Halving; exact.
  constexpr Dyadic half() const { return Dyadic(num_, exp_ + 1); }

  Dyadic& operator+=(Dyadic o) { return *this = *this + o; }
  Dyadic& operator-=(Dyadic o) { return *this = *this - o; }

  friend constexpr bool operator==(Dyadic a, Dyadic b) = default;
  friend constexpr std::strong_ordering operator<=>(Dyadic a, Dyadic b) {
    const unsigned e = a.exp_ > b.exp_ ? a.exp_ : b.exp_;
    return scaled(a, e) <=> scaled(b, e);
  }

  friend std::ostream& operator<<(std::ostream& os, Dyadic v) { return os << v.to_string(); }

 private:
  static constexpr __int128 scaled(Dyadic v, unsigned e) {
    return static_cast<__int128>(v.num_) << (e - v.exp_);
  }
  static constexpr Dyadic from_wide(__int128 num, unsigned exp) {
    while (exp > 0 && (num & 1) == 0) {
      num >>= 1;
      --exp;
    }
    if (num > INT64_MAX || num < INT64_MIN) throw std::overflow_error("Dyadic numerator overflow");
    if (exp > 120) throw std::overflow_error("Dyadic exponent overflow");
    Dyadic out;
    out.num_ = static_cast<std::int64_t>(num);
    out.exp_ = exp;
    return out;
  }
  constexpr void normalize() {
    if (num_ == 0) {
      exp_ = 0;
      return;
    }
    const unsigned tz = static_cast<unsigned>(std::countr_zero(static_cast<std::uint64_t>(num_)));
    const unsigned drop = tz < exp_ ? tz : exp_;
    num_ >>= drop;
    exp_ -= drop;
  }

  std::int64_t num_ = 0;
  unsigned exp_ = 0;
};

}  // namespace monojunta
