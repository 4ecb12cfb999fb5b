#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "bitfield.hpp"
#include "format.hpp"
#include "lane.hpp"

// Standard <-> bitslice transposition. A packed vector stores bit j of
// element k at bit position k of lane j (lane 0 = fraction LSB, top lane =
// sign). Packing runs 64x64 blocked bit-matrix transposes instead of a
// per-bit gather; both directions use the same involution.

namespace bfp {

template <lane_type L>
struct bfp_vector {
  format_spec spec;
  bitfield<L> field;

  static constexpr unsigned width = L::width;
};

// In-place 64x64 bit-matrix transpose (recursive block swaps). Bit c of
// word r swaps with bit r of word c, LSB-first indexing.
inline void transpose64(std::array<std::uint64_t, 64>& a) {
  std::uint64_t m = 0x00000000ffffffffull;
  for (unsigned j = 32; j != 0; j >>= 1, m ^= m << j) {
    for (unsigned k = 0; k < 64; k = (k + j + 1) & ~j) {
      const std::uint64_t t = (a[k] ^ (a[k + j] >> j)) & m;
      a[k] ^= t;
      a[k + j] ^= t << j;
    }
  }
}

template <lane_type L>
bfp_vector<L> pack(std::span<const encoding> encs, const format_spec& spec) {
  if (encs.size() > L::width)
    throw std::invalid_argument("pack: more encodings than lane width");
  const unsigned n = spec.total_bits();
  bfp_vector<L> v{spec, bitfield<L>(n)};
  std::array<std::uint64_t, 64> block;
  for (unsigned blk = 0; blk < L::u64_count; ++blk) {
    const std::size_t base = std::size_t{blk} * 64;
    if (base >= encs.size() && blk > 0) break;  // rest stays zero
    block.fill(0);
    for (unsigned r = 0; r < 64 && base + r < encs.size(); ++r)
      block[r] = encs[base + r];
    transpose64(block);
    for (unsigned j = 0; j < n; ++j) v.field[j].set_u64(blk, block[j]);
  }
  return v;
}

template <lane_type L>
std::vector<encoding> unpack(const bfp_vector<L>& v, std::size_t count) {
  if (count > L::width)
    throw std::invalid_argument("unpack: count exceeds lane width");
  const unsigned n = v.spec.total_bits();
  std::vector<encoding> out(count);
  std::array<std::uint64_t, 64> block;
  for (unsigned blk = 0; blk * 64 < count; ++blk) {
    block.fill(0);
    for (unsigned j = 0; j < n; ++j) block[j] = v.field[j].u64_at(blk);
    transpose64(block);
    const std::size_t base = std::size_t{blk} * 64;
    for (unsigned r = 0; r < 64 && base + r < count; ++r)
      out[base + r] = block[r];
  }
  return out;
}

// .bfpraw: little-endian encodings of ceil(total_bits/8) bytes each, packed
// back to back with no padding.
inline std::size_t bfpraw_stride(const format_spec& spec) {
  return (spec.total_bits() + 7) / 8;
}

inline std::vector<std::uint8_t> to_bfpraw(std::span<const encoding> encs,
                                           const format_spec& spec) {
  const std::size_t stride = bfpraw_stride(spec);
  std::vector<std::uint8_t> out;
  out.reserve(encs.size() * stride);
  for (const encoding e : encs)
    for (std::size_t b = 0; b < stride; ++b)
      out.push_back(static_cast<std::uint8_t>(e >> (8 * b)));
  return out;
}

inline std::vector<encoding> from_bfpraw(std::span<const std::uint8_t> bytes,
                                         const format_spec& spec) {
  const std::size_t stride = bfpraw_stride(spec);
  if (bytes.size() % stride != 0)
    throw std::invalid_argument("bfpraw: byte count not a multiple of the "
                                "encoding stride");
  std::vector<encoding> out(bytes.size() / stride);
  for (std::size_t i = 0; i < out.size(); ++i) {
    encoding e = 0;
    for (std::size_t b = 0; b < stride; ++b)
      e |= static_cast<encoding>(bytes[i * stride + b]) << (8 * b);
    out[i] = e;
  }
  return out;
}

}  // namespace bfp
