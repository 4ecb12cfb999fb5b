#pragma once

#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <type_traits>

// Lanes: fixed-width machine words used as the unit of bitslice computation.
// Bit k of every lane in a vector belongs to vector element k. Widths up to
// 64 map onto one native word; wider lanes are a fixed array of 64-bit words
// operated on element-wise. There is deliberately no lane-level shift or
// add: the bits of one element live in *different* lanes, so all arithmetic
// is built from whole-lane AND/OR/XOR/NOT in circuits.hpp.

namespace bfp {

namespace detail {

template <unsigned W>
using lane_word_t =
    std::conditional_t<W == 8, std::uint8_t,
    std::conditional_t<W == 16, std::uint16_t,
    std::conditional_t<W == 32, std::uint32_t, std::uint64_t>>>;

}  // namespace detail

template <unsigned W>
class lane {
  static_assert(W >= 8 && W <= 1024 && (W & (W - 1)) == 0,
                "lane width must be a power of two in [8, 1024]");

 public:
  using word = detail::lane_word_t<W>;
  static constexpr unsigned width = W;
  static constexpr unsigned word_bits = 8 * sizeof(word);
  static constexpr unsigned word_count = (W + word_bits - 1) / word_bits;
  // 64-bit granules, for transposition and I/O
  static constexpr unsigned u64_count = (W + 63) / 64;

  constexpr lane() : w_{} {}

  static constexpr lane zeros() { return lane(); }

  static constexpr lane ones() {
    lane r;
    for (auto& x : r.w_) x = static_cast<word>(~word{0});
    return r;
  }

  friend constexpr lane operator&(const lane& a, const lane& b) {
    lane r;
    for (unsigned i = 0; i < word_count; ++i) r.w_[i] = a.w_[i] & b.w_[i];
    return r;
  }

  friend constexpr lane operator|(const lane& a, const lane& b) {
    lane r;
    for (unsigned i = 0; i < word_count; ++i) r.w_[i] = a.w_[i] | b.w_[i];
    return r;
  }

  friend constexpr lane operator^(const lane& a, const lane& b) {
    lane r;
    for (unsigned i = 0; i < word_count; ++i) r.w_[i] = a.w_[i] ^ b.w_[i];
    return r;
  }

  friend constexpr lane operator~(const lane& a) {
    lane r;
    for (unsigned i = 0; i < word_count; ++i)
      r.w_[i] = static_cast<word>(~a.w_[i]);
    return r;
  }

  friend constexpr bool operator==(const lane&, const lane&) = default;

  constexpr bool any() const {
    word acc = 0;
    for (unsigned i = 0; i < word_count; ++i) acc |= w_[i];
    return acc != 0;
  }

  constexpr bool bit(unsigned k) const {
    return (w_[k / word_bits] >> (k % word_bits)) & 1u;
  }

  constexpr void set_bit(unsigned k, bool v) {
    const word m = static_cast<word>(word{1} << (k % word_bits));
    if (v)
      w_[k / word_bits] |= m;
    else
      w_[k / word_bits] &= static_cast<word>(~m);
  }

  // i-th 64-bit granule (zero-extended for narrow lanes)
  constexpr std::uint64_t u64_at(unsigned i) const {
    if constexpr (word_bits == 64) {
      return w_[i];
    } else {
      (void)i;
      return w_[0];
    }
  }

  constexpr void set_u64(unsigned i, std::uint64_t v) {
    if constexpr (word_bits == 64) {
      w_[i] = v;
    } else {
      (void)i;
      w_[0] = static_cast<word>(v);
    }
  }

 private:
  std::array<word, word_count> w_;
};

// Tally of bitwise lane operations performed by counted lanes. Counts only
// grow during circuit evaluation; reset is explicit.
struct op_counter {
  std::uint64_t and_count = 0;
  std::uint64_t or_count = 0;
  std::uint64_t xor_count = 0;
  std::uint64_t not_count = 0;

  std::uint64_t total() const {
    return and_count + or_count + xor_count + not_count;
  }

  void reset() { *this = op_counter{}; }
};

// Drop-in lane substitute that tallies every bitwise op into a thread-local
// counter. It is selected at instantiation time, so the plain lane's hot
// path carries no counting branch, and concurrent counted evaluations in
// different threads do not interfere.
template <unsigned W>
class counted_lane {
 public:
  using plain = lane<W>;
  static constexpr unsigned width = W;
  static constexpr unsigned u64_count = plain::u64_count;

  constexpr counted_lane() = default;
  explicit constexpr counted_lane(const plain& v) : v_(v) {}

  static op_counter& counter() {
    thread_local op_counter c;
    return c;
  }

  static counted_lane zeros() { return counted_lane(plain::zeros()); }
  static counted_lane ones() { return counted_lane(plain::ones()); }

  friend counted_lane operator&(const counted_lane& a, const counted_lane& b) {
    ++counter().and_count;
    return counted_lane(a.v_ & b.v_);
  }

  friend counted_lane operator|(const counted_lane& a, const counted_lane& b) {
    ++counter().or_count;
    return counted_lane(a.v_ | b.v_);
  }

  friend counted_lane operator^(const counted_lane& a, const counted_lane& b) {
    ++counter().xor_count;
    return counted_lane(a.v_ ^ b.v_);
  }

  friend counted_lane operator~(const counted_lane& a) {
    ++counter().not_count;
    return counted_lane(~a.v_);
  }

  friend constexpr bool operator==(const counted_lane&, const counted_lane&) =
      default;

  constexpr bool any() const { return v_.any(); }
  constexpr bool bit(unsigned k) const { return v_.bit(k); }
  constexpr void set_bit(unsigned k, bool v) { v_.set_bit(k, v); }
  constexpr std::uint64_t u64_at(unsigned i) const { return v_.u64_at(i); }
  constexpr void set_u64(unsigned i, std::uint64_t v) { v_.set_u64(i, v); }
  constexpr const plain& value() const { return v_; }

 private:
  plain v_;
};

template <typename L>
concept lane_type = requires(const L& a, const L& b) {
  { a & b } -> std::same_as<L>;
  { a | b } -> std::same_as<L>;
  { a ^ b } -> std::same_as<L>;
  { ~a } -> std::same_as<L>;
  { L::zeros() } -> std::same_as<L>;
  { L::ones() } -> std::same_as<L>;
  { L::width } -> std::convertible_to<unsigned>;
};

// 2:1 multiplexer: per bit position, a where sel is set, b elsewhere.
template <lane_type L>
constexpr L mux(const L& sel, const L& a, const L& b) {
  return (sel & a) | (~sel & b);
}

}  // namespace bfp
