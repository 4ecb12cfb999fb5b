#pragma once

#include <bit>
#include <cassert>
#include <cstdint>

#include "bitfield.hpp"
#include "lane.hpp"

// Integer-level software circuits on bitslice fields. Every routine is a
// fixed sequence of whole-lane bitwise ops, so gate counts are data
// independent and each evaluation processes one full lane width of elements.
// Gate budgets follow the usual software-circuit priorities: fewest ops, not
// shortest dependency chain.

namespace bfp {

template <lane_type L>
struct sum_carry {
  bitfield<L> value;
  L carry;  // carry out (add) or borrow (sub)
};

template <lane_type L>
struct shift_sticky {
  bitfield<L> value;
  L sticky;
};

template <lane_type L>
struct normalized {
  bitfield<L> value;
  bitfield<L> count;
  L is_zero;
};

template <lane_type L>
struct quotient_rem {
  bitfield<L> quotient;
  L rem_nonzero;
};

template <lane_type L>
L or_reduce(const bitfield<L>& f) {
  if (f.size() == 0) return L::zeros();
  L acc = f[0];
  for (std::size_t i = 1; i < f.size(); ++i) acc = acc | f[i];
  return acc;
}

// Ripple-carry adder: n rounds of the half/full-adder gate pattern
//   sum   = a ^ b ^ carry
//   carry = (carry & (a ^ b)) | (a & b)
// 5 lane ops per bit.
template <lane_type L>
sum_carry<L> ripple_add(const bitfield<L>& a, const bitfield<L>& b, L carry) {
  assert(a.size() == b.size());
  const std::size_t n = a.size();
  bitfield<L> sum(n);
  for (std::size_t i = 0; i < n; ++i) {
    const L x = a[i] ^ b[i];
    const L g = a[i] & b[i];
    sum[i] = x ^ carry;
    carry = (carry & x) | g;
  }
  return {std::move(sum), carry};
}

// Two's-complement subtract: a + ~b + 1. Borrow is the complement of the
// carry out, set iff a < b.
template <lane_type L>
sum_carry<L> ripple_sub(const bitfield<L>& a, const bitfield<L>& b) {
  assert(a.size() == b.size());
  const std::size_t n = a.size();
  bitfield<L> nb(n);
  for (std::size_t i = 0; i < n; ++i) nb[i] = ~b[i];
  sum_carry<L> r = ripple_add(a, nb, L::ones());
  return {std::move(r.value), ~r.carry};
}

// Per-element unsigned a < b.
template <lane_type L>
L less_than(const bitfield<L>& a, const bitfield<L>& b) {
  return ripple_sub(a, b).carry;
}

// Log shifter, right. amount is a per-element bitslice count; stage k shifts
// by 2^k where amount bit k selects. Shifts saturate at the field width:
// stages whose distance covers the whole field clear it. Shifted-out bits
// are OR-collected into sticky when requested.
template <lane_type L>
shift_sticky<L> var_shift_right(const bitfield<L>& f, const bitfield<L>& amount,
                                bool collect_sticky) {
  const std::size_t n = f.size();
  bitfield<L> cur = f;
  L sticky = L::zeros();
  for (std::size_t k = 0; k < amount.size(); ++k) {
    const L& sel = amount[k];
    const std::size_t dist = std::size_t{1} << k;
    if (dist < n) {
      if (collect_sticky) {
        L out = cur[0];
        for (std::size_t i = 1; i < dist; ++i) out = out | cur[i];
        sticky = sticky | (sel & out);
      }
      bitfield<L> next(n);
      for (std::size_t i = 0; i < n; ++i) {
        const L hi = (i + dist < n) ? cur[i + dist] : L::zeros();
        next[i] = mux(sel, hi, cur[i]);
      }
      cur = std::move(next);
    } else {
      // whole field shifted out
      if (collect_sticky) sticky = sticky | (sel & or_reduce(cur));
      const L keep = ~sel;
      for (std::size_t i = 0; i < n; ++i) cur[i] = cur[i] & keep;
    }
    if (k >= 63) break;  // distances beyond 2^63 cannot occur
  }
  return {std::move(cur), sticky};
}

// Log shifter, left. Truncates mod 2^n; saturates like the right shifter.
template <lane_type L>
bitfield<L> var_shift_left(const bitfield<L>& f, const bitfield<L>& amount) {
  const std::size_t n = f.size();
  bitfield<L> cur = f;
  for (std::size_t k = 0; k < amount.size(); ++k) {
    const L& sel = amount[k];
    const std::size_t dist = std::size_t{1} << k;
    if (dist < n) {
      bitfield<L> next(n);
      for (std::size_t i = 0; i < n; ++i) {
        const L lo = (i >= dist) ? cur[i - dist] : L::zeros();
        next[i] = mux(sel, lo, cur[i]);
      }
      cur = std::move(next);
    } else {
      const L keep = ~sel;
      for (std::size_t i = 0; i < n; ++i) cur[i] = cur[i] & keep;
    }
    if (k >= 63) break;
  }
  return cur;
}

namespace detail {

inline unsigned ceil_log2(std::size_t n) {
  unsigned k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

}  // namespace detail

// Priority-encoder style normalizer: stage k (descending) tests whether the
// top 2^k lanes are all zero per element and conditionally shifts left by
// 2^k, recording the count bit. A zero element reports is_zero and a count
// clamped to n. count has ceil(log2 n)+1 lanes.
template <lane_type L>
normalized<L> normalize_left(const bitfield<L>& f) {
  const std::size_t n = f.size();
  assert(n >= 1);
  const unsigned m = detail::ceil_log2(n);
  bitfield<L> cur = f;
  bitfield<L> count(m + 1);
  for (unsigned k = m; k-- > 0;) {
    const std::size_t dist = std::size_t{1} << k;
    L top = cur[n - 1];
    for (std::size_t i = n - dist; i < n - 1; ++i) top = top | cur[i];
    const L sel = ~top;
    bitfield<L> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      const L lo = (i >= dist) ? cur[i - dist] : L::zeros();
      next[i] = mux(sel, lo, cur[i]);
    }
    cur = std::move(next);
    count[k] = sel;
  }
  const L is_zero = ~or_reduce(f);
  // a zero element fired every stage; clamp its count to exactly n
  const bitfield<L> clamp = constant_field<L>(m + 1, n);
  for (std::size_t i = 0; i <= m; ++i)
    count[i] = mux(is_zero, clamp[i], count[i]);
  return {std::move(cur), std::move(count), is_zero};
}

// Shift-add multiplier: n partial products, each ANDed against one lane of b
// and accumulated at its offset. The running sum above bit i+n is provably
// zero before step i, so each step is one n-bit ripple add whose carry drops
// straight into the next free lane. O(n^2) lane ops.
template <lane_type L>
bitfield<L> mul_shift_add(const bitfield<L>& a, const bitfield<L>& b) {
  assert(a.size() == b.size());
  const std::size_t n = a.size();
  bitfield<L> acc(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    bitfield<L> pp(n);
    for (std::size_t j = 0; j < n; ++j) pp[j] = a[j] & b[i];
    L carry = L::zeros();
    for (std::size_t j = 0; j < n; ++j) {
      const L x = acc[i + j] ^ pp[j];
      const L g = acc[i + j] & pp[j];
      acc[i + j] = x ^ carry;
      carry = (carry & x) | g;
    }
    acc[i + n] = carry;
  }
  return acc;
}

// Restoring divider. Computes quot = floor(num / den) in q_bits bits,
// MSB-first: left-shift the partial remainder, trial-subtract the divisor,
// keep the difference when it does not borrow. The caller guarantees the
// quotient fits (num < den * 2^q_bits), which bounds the initial remainder
// below den. rem_nonzero reports a nonzero final remainder, the sticky
// input for rounding. den = 0 elements yield all-ones quotient bits; the
// caller masks them.
template <lane_type L>
quotient_rem<L> restoring_div(const bitfield<L>& num, const bitfield<L>& den,
                              std::size_t q_bits) {
  const std::size_t p = num.size();
  const std::size_t n = den.size();
  assert(q_bits >= 1 && p >= q_bits);
  assert(p - q_bits <= n && "initial remainder must fit the divisor width");
  // n+1 wide remainder: after each restore R < den <= 2^n - 1
  bitfield<L> den1 = resized(den, n + 1);
  bitfield<L> rem(n + 1);
  for (std::size_t i = 0; i < p - q_bits; ++i) rem[i] = num[q_bits + i];
  bitfield<L> quot(q_bits);
  for (std::size_t t = q_bits; t-- > 0;) {
    // R = 2R + next dividend bit
    for (std::size_t i = n + 1; i-- > 1;) rem[i] = rem[i - 1];
    rem[0] = num[t];
    sum_carry<L> trial = ripple_sub(rem, den1);
    const L q = ~trial.carry;
    for (std::size_t i = 0; i < n + 1; ++i)
      rem[i] = mux(q, trial.value[i], rem[i]);
    quot[t] = q;
  }
  return {std::move(quot), or_reduce(rem)};
}

// Conditional +1: two gates per bit.
template <lane_type L>
sum_carry<L> increment(const bitfield<L>& f, L cond) {
  const std::size_t n = f.size();
  bitfield<L> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const L g = f[i] & cond;
    out[i] = f[i] ^ cond;
    cond = g;
  }
  return {std::move(out), cond};
}

}  // namespace bfp
