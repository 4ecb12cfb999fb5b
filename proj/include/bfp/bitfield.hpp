#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

#include "lane.hpp"

// A bitfield is one n-bit unsigned integer field spread across W elements:
// lanes[0] holds the least significant bit of every element, lanes[n-1] the
// most significant. Element k's value is sum_i (bit k of lanes[i]) << i.

namespace bfp {

template <lane_type L>
struct bitfield {
  std::vector<L> lanes;

  bitfield() = default;
  explicit bitfield(std::size_t n) : lanes(n, L::zeros()) {}

  std::size_t size() const { return lanes.size(); }
  L& operator[](std::size_t i) { return lanes[i]; }
  const L& operator[](std::size_t i) const { return lanes[i]; }

  friend bool operator==(const bitfield&, const bitfield&) = default;
};

// --- value-level accessors (data movement for tests and packing, not
// --- circuit logic; nothing here is gate-counted)

// Gather per-element values into bitslice layout, one bit per lane.
template <lane_type L>
bitfield<L> field_from_elements(std::size_t n,
                                std::span<const std::uint64_t> vals) {
  assert(vals.size() <= L::width);
  bitfield<L> f(n);
  for (std::size_t i = 0; i < n; ++i)
    for (unsigned k = 0; k < vals.size(); ++k)
      f[i].set_bit(k, (vals[k] >> i) & 1u);
  return f;
}

template <lane_type L>
std::uint64_t element_of(const bitfield<L>& f, unsigned k) {
  assert(k < L::width && f.size() <= 64);
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    v |= static_cast<std::uint64_t>(f[i].bit(k)) << i;
  return v;
}

// Broadcast one constant to all elements: lane i is all-ones iff bit i of
// value is set.
template <lane_type L>
bitfield<L> constant_field(std::size_t n, std::uint64_t value) {
  bitfield<L> f(n);
  for (std::size_t i = 0; i < n; ++i)
    if (i < 64 && ((value >> i) & 1u)) f[i] = L::ones();
  return f;
}

template <lane_type L>
bitfield<L> slice(const bitfield<L>& f, std::size_t from, std::size_t count) {
  assert(from + count <= f.size());
  bitfield<L> r(count);
  for (std::size_t i = 0; i < count; ++i) r[i] = f[from + i];
  return r;
}

template <lane_type L>
bitfield<L> concat(const bitfield<L>& lo, const bitfield<L>& hi) {
  bitfield<L> r(lo.size() + hi.size());
  for (std::size_t i = 0; i < lo.size(); ++i) r[i] = lo[i];
  for (std::size_t i = 0; i < hi.size(); ++i) r[lo.size() + i] = hi[i];
  return r;
}

// Zero-extend (or truncate) to n lanes.
template <lane_type L>
bitfield<L> resized(const bitfield<L>& f, std::size_t n) {
  bitfield<L> r(n);
  for (std::size_t i = 0; i < n && i < f.size(); ++i) r[i] = f[i];
  return r;
}

}  // namespace bfp
