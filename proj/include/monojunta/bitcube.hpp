#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <random>
#include <ranges>
#include <string>
#include <string_view>
#include <vector>

#include "monojunta/errors.hpp"

namespace monojunta {

/// Widest cube that exact (enumerating) operations will walk.
inline constexpr std::size_t kEnumerationCap = 30;
/// Widest word that fits a packed 64-bit integer.
inline constexpr std::size_t kPackedWidthMax = 63;

/// An assignment to coordinates 1..width.
///
/// Coordinates are 1-based. The integer encoding (from_integer/to_integer) is MSB-first:
/// coordinate 1 is the most significant of the width bits. Storage is unbounded so the
/// same type serves sampled mode at widths in the thousands.
class InputWord {
 public:
  InputWord() = default;
  explicit InputWord(std::size_t width) : width_(width), blocks_((width + 63) / 64, 0) {}

  static InputWord from_integer(std::uint64_t value, std::size_t width) {
    if (width > kPackedWidthMax) throw EnumerationTooLarge(width, kPackedWidthMax);
    InputWord w(width);
    for (std::size_t i = 1; i <= width; ++i) w.set(i, (value >> (width - i)) & 1u);
    return w;
  }

  /// Parses "0110"-style text; character k is coordinate k+1.
  static InputWord from_string(std::string_view bits) {
    InputWord w(bits.size());
    for (std::size_t k = 0; k < bits.size(); ++k) {
      if (bits[k] != '0' && bits[k] != '1') throw Error("bit string may only contain 0 and 1");
      w.set(k + 1, bits[k] == '1');
    }
    return w;
  }

  std::size_t width() const noexcept { return width_; }

  bool get(std::size_t i) const {
    check(i);
    return (blocks_[(i - 1) / 64] >> ((i - 1) % 64)) & 1u;
  }
  bool operator[](std::size_t i) const { return get(i); }

  void set(std::size_t i, bool v) {
    check(i);
    const std::uint64_t bit = std::uint64_t{1} << ((i - 1) % 64);
    if (v)
      blocks_[(i - 1) / 64] |= bit;
    else
      blocks_[(i - 1) / 64] &= ~bit;
  }

  void flip(std::size_t i) {
    check(i);
    blocks_[(i - 1) / 64] ^= std::uint64_t{1} << ((i - 1) % 64);
  }

  std::uint64_t to_integer() const {
    if (width_ > kPackedWidthMax) throw EnumerationTooLarge(width_, kPackedWidthMax);
    std::uint64_t v = 0;
    for (std::size_t i = 1; i <= width_; ++i) v = (v << 1) | static_cast<std::uint64_t>(get(i));
    return v;
  }

  std::size_t popcount() const noexcept {
    std::size_t c = 0;
    for (auto b : blocks_) c += static_cast<std::size_t>(std::popcount(b));
    return c;
  }

  /// Coordinates first..first+count-1 as a new word of width count.
  InputWord slice(std::size_t first, std::size_t count) const {
    if (count == 0) return InputWord(0);
    check(first);
    check(first + count - 1);
    InputWord out(count);
    for (std::size_t k = 0; k < count; ++k) out.set(k + 1, get(first + k));
    return out;
  }

  /// Concatenation: this word's coordinates followed by tail's.
  InputWord concat(const InputWord& tail) const {
    InputWord out(width_ + tail.width_);
    for (std::size_t i = 1; i <= width_; ++i) out.set(i, get(i));
    for (std::size_t i = 1; i <= tail.width_; ++i) out.set(width_ + i, tail.get(i));
    return out;
  }

  /// Raw storage: coordinate i lives at bit (i-1)%64 of block (i-1)/64; tail bits are zero.
  const std::vector<std::uint64_t>& blocks() const noexcept { return blocks_; }
  std::vector<std::uint64_t>& mutable_blocks() noexcept { return blocks_; }

  std::string to_string() const {
    std::string s(width_, '0');
    for (std::size_t i = 1; i <= width_; ++i)
      if (get(i)) s[i - 1] = '1';
    return s;
  }

  /// Coordinatewise a <= b.
  friend bool leq(const InputWord& a, const InputWord& b) {
    if (a.width_ != b.width_) throw ArityMismatch(a.width_, b.width_);
    for (std::size_t k = 0; k < a.blocks_.size(); ++k)
      if (a.blocks_[k] & ~b.blocks_[k]) return false;
    return true;
  }

  friend bool operator==(const InputWord&, const InputWord&) = default;
  /// Orders by width, then by MSB-first integer value.
  friend std::strong_ordering operator<=>(const InputWord& a, const InputWord& b) {
    if (auto c = a.width_ <=> b.width_; c != 0) return c;
    for (std::size_t i = 1; i <= a.width_; ++i)
      if (auto c = a.get(i) <=> b.get(i); c != 0) return c;
    return std::strong_ordering::equal;
  }

 private:
  void check(std::size_t i) const {
    if (i < 1 || i > width_) throw CoordinateRange(i, width_);
  }

  std::size_t width_ = 0;
  std::vector<std::uint64_t> blocks_;
};

inline InputWord flip_coordinate(InputWord w, std::size_t i) {
  w.flip(i);
  return w;
}

/// x/y split of a word: coordinates 1..d-1 are address bits x_1..x_{d-1},
/// coordinates d..d-1+m are leaf bits y_1..y_m.
struct SplitLayout {
  std::size_t d = 2;
  std::size_t m = 1;

  SplitLayout() = default;
  SplitLayout(std::size_t d_, std::size_t m_) : d(d_), m(m_) {
    if (d < 2) throw InfeasibleParameters("layout needs d >= 2");
    if (m < 1) throw InfeasibleParameters("layout needs m >= 1");
  }

  std::size_t address_width() const noexcept { return d - 1; }
  std::size_t width() const noexcept { return d - 1 + m; }
  std::size_t x_coordinate(std::size_t j) const noexcept { return j; }
  /// y_i with i 1-based.
  std::size_t y_coordinate(std::size_t i) const noexcept { return d - 1 + i; }
  bool is_address(std::size_t coord) const noexcept { return coord >= 1 && coord < d; }

  friend bool operator==(const SplitLayout&, const SplitLayout&) = default;
};

// Seeds and random streams.

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

/// Bijective 64-bit finalizer (splitmix64).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of worker `index`'s stream. Injective in `index` for a fixed seed: the affine step
/// uses an odd multiplier and mix64 is a bijection.
constexpr Seed substream(Seed seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed) + (index + 1) * 0xd1342543de82ef95ULL);
}

inline Rng make_rng(Seed seed, std::uint64_t index = 0) { return Rng(substream(seed, index)); }

/// Uniform word of the given width.
template <class Engine>
InputWord uniform_word(Engine& rng, std::size_t width) {
  InputWord w(width);
  auto& blocks = w.mutable_blocks();
  for (auto& b : blocks) b = rng();
  if (width % 64 != 0 && !blocks.empty()) blocks.back() &= (std::uint64_t{1} << (width % 64)) - 1;
  return w;
}

/// Uniform size-t subset of {1..universe}, sorted ascending (Floyd's selection).
template <class Engine>
std::vector<std::size_t> sample_t_subset(Engine& rng, std::size_t universe, std::size_t t) {
  if (t > universe)
    throw InfeasibleParameters("cannot choose " + std::to_string(t) + " distinct coordinates from " +
                               std::to_string(universe));
  std::vector<std::size_t> chosen;
  chosen.reserve(t);
  std::vector<bool> member(universe + 1, false);
  for (std::size_t j = universe - t + 1; j <= universe; ++j) {
    std::uniform_int_distribution<std::size_t> pick(1, j);
    std::size_t r = pick(rng);
    if (member[r]) r = j;
    member[r] = true;
    chosen.push_back(r);
  }
  std::ranges::sort(chosen);
  return chosen;
}

/// All 2^width words in ascending MSB-first integer order.
inline auto enumerate_points(std::size_t width) {
  if (width > kEnumerationCap) throw EnumerationTooLarge(width, kEnumerationCap);
  return std::views::iota(std::uint64_t{0}, std::uint64_t{1} << width) |
         std::views::transform([width](std::uint64_t v) { return InputWord::from_integer(v, width); });
}

}  // namespace monojunta
