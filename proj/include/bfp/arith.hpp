#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <stdexcept>

#include "circuits.hpp"
#include "format.hpp"
#include "pack.hpp"

// Floating-point pipelines over bitslice vectors, composed entirely from the
// integer circuits: add/sub (compare, align with sticky, add, normalize,
// round), mul (sign, exponent add, shift-add multiply, normalize, round) and
// div (sign, exponent subtract, operand normalize, restoring divide, round).
// All three deliver correctly rounded results under RZ or RN with IEEE-style
// special values. Round-toward-zero drops the whole guard/sticky machinery,
// which is where its gate-count advantage comes from.

namespace bfp {

enum class op_kind { add, mul, div };

// Guard/sticky carrier between a value-producing stage and rounding.
template <lane_type L>
struct guard_state {
  L guard;
  L sticky;
};

// Rounding of a hidden-bit significand. RZ is pure truncation: the guard
// state is dropped and no gates are spent. RN increments on guard AND
// (sticky OR lsb); the carry out signals significand overflow for the
// exponent repair.
template <lane_type L>
sum_carry<L> round_stage(const bitfield<L>& sig, const guard_state<L>& gs,
                         rounding_mode mode) {
  if (mode == rounding_mode::rz) return {sig, L::zeros()};
  const L cond = gs.guard & (gs.sticky | sig[0]);
  return increment(sig, cond);
}

namespace detail {

// Working width for internal exponent arithmetic (two's complement): wide
// enough that bias sums, normalization counts and alignment distances never
// wrap for any legal format.
inline unsigned exp_work_bits(const format_spec& f) {
  const unsigned range = (1u << f.exp_bits) + 2 * f.sig_bits + 16;
  return std::bit_width(range) + 2;
}

template <lane_type L>
struct operand_view {
  L sign;
  bitfield<L> exp;   // e lanes, biased
  bitfield<L> frac;  // s lanes
  L exp_zero;
  L frac_zero;
  L is_zero;
  L is_inf;
  L is_nan;
};

template <lane_type L>
operand_view<L> view(const bfp_vector<L>& v) {
  const unsigned e = v.spec.exp_bits, s = v.spec.sig_bits;
  operand_view<L> o;
  o.frac = slice(v.field, 0, s);
  o.exp = slice(v.field, s, e);
  o.sign = v.field[s + e];
  o.exp_zero = ~or_reduce(o.exp);
  L ones_acc = o.exp[0];
  for (unsigned j = 1; j < e; ++j) ones_acc = ones_acc & o.exp[j];
  o.frac_zero = ~or_reduce(o.frac);
  o.is_zero = o.exp_zero & o.frac_zero;
  o.is_inf = ones_acc & o.frac_zero;
  o.is_nan = ones_acc & ~o.frac_zero;
  return o;
}

// Shared final stage: subnormal-range right shift, rounding, exponent
// repair, overflow substitution and assembly into [frac | exp | sign].
// principal holds the hidden-bit significand (s+1 lanes, MSB at lane s for
// in-range elements); ezf the biased result exponent in two's complement.
template <lane_type L>
bitfield<L> round_pack(const bitfield<L>& principal,
                       const guard_state<L>& gs, const bitfield<L>& ezf,
                       const L& sign, const format_spec& spec) {
  const unsigned e = spec.exp_bits, s = spec.sig_bits;
  const unsigned ew = static_cast<unsigned>(ezf.size());
  const bool rn = spec.rounding == rounding_mode::rn;

  // subnormal range: biased exponent <= 0
  const L ez_neg = ezf[ew - 1];
  const L ez_zero = ~or_reduce(ezf);
  const L sub_range = ez_neg | ez_zero;

  // shift distance 1 - ez, live only on subnormal-range elements
  bitfield<L> amt = ripple_sub(constant_field<L>(ew, 1), ezf).value;
  for (unsigned j = 0; j < ew; ++j) amt[j] = amt[j] & sub_range;

  bitfield<L> rounded(s + 1);
  L carry = L::zeros();
  if (rn) {
    // [sticky | guard | principal]; the sticky lane rides along as a jam
    // bit so shifted-out information keeps breaking ties correctly
    bitfield<L> rs(s + 3);
    rs[0] = gs.sticky;
    rs[1] = gs.guard;
    for (unsigned j = 0; j <= s; ++j) rs[2 + j] = principal[j];
    shift_sticky<L> sh = var_shift_right(rs, amt, true);
    const guard_state<L> g2{sh.value[1], sh.value[0] | sh.sticky};
    sum_carry<L> rr = round_stage(slice(sh.value, 2, s + 1), g2,
                                  rounding_mode::rn);
    rounded = std::move(rr.value);
    carry = rr.carry;
  } else {
    shift_sticky<L> sh = var_shift_right(principal, amt, false);
    rounded = std::move(sh.value);
  }

  // exponent: 0 in the subnormal range, else ez; +1 when rounding carried
  // out or lifted a subnormal back up to the smallest normal
  const L keep = ~sub_range;
  bitfield<L> expw(ew);
  for (unsigned j = 0; j < ew; ++j) expw[j] = ezf[j] & keep;
  if (rn) {
    const L exp_inc = carry | (rounded[s] & sub_range);
    expw = increment(expw, exp_inc).value;
  }

  const L ovf = ~less_than(expw, constant_field<L>(ew, (1ull << e) - 1));

  L flush = L::zeros();
  if (spec.subnormals == subnormal_policy::ftz) {
    // anything still below the smallest normal flushes to signed zero
    L sub_result = sub_range;
    if (rn) sub_result = sub_range & ~rounded[s];
    flush = sub_result;
  }

  // overflow encodings: Inf under RN, max finite under RZ
  const std::uint64_t ovf_frac = rn ? 0 : spec.frac_mask();
  const std::uint64_t ovf_exp = rn ? spec.exp_field_max()
                                   : spec.exp_field_max() - 1;

  bitfield<L> out(1 + e + s);
  const L nflush = ~flush;
  for (unsigned j = 0; j < s; ++j) {
    const L c = ((ovf_frac >> j) & 1u) ? L::ones() : L::zeros();
    out[j] = mux(ovf, c, rounded[j] & nflush);
  }
  for (unsigned j = 0; j < e; ++j) {
    const L c = ((ovf_exp >> j) & 1u) ? L::ones() : L::zeros();
    out[s + j] = mux(ovf, c, expw[j]);
  }
  out[s + e] = sign;
  return out;
}

inline void check_shapes(const bfp_vector_spec_pair_tag&) = delete;

}  // namespace detail

// Final per-element overwrite of IEEE special cases: elements whose
// operands mandate NaN/Inf/zero results get the canonical encodings muxed
// over the arithmetic result; all others pass through.
template <lane_type L>
bfp_vector<L> apply_special_masks(bfp_vector<L> result,
                                  const bfp_vector<L>& x,
                                  const bfp_vector<L>& y, op_kind kind) {
  const format_spec& spec = result.spec;
  const unsigned e = spec.exp_bits, s = spec.sig_bits;
  const detail::operand_view<L> vx = detail::view(x);
  const detail::operand_view<L> vy = detail::view(y);

  L use_nan = vx.is_nan | vy.is_nan;
  L use_inf = L::zeros();
  L use_zero = L::zeros();
  L inf_sign = L::zeros();
  L zero_sign = L::zeros();
  bool has_zero_rule = true;

  switch (kind) {
    case op_kind::add: {
      use_nan = use_nan | (vx.is_inf & vy.is_inf & (vx.sign ^ vy.sign));
      use_inf = (vx.is_inf | vy.is_inf) & ~use_nan;
      inf_sign = mux(vx.is_inf, vx.sign, vy.sign);
      has_zero_rule = false;
      break;
    }
    case op_kind::mul: {
      use_nan = use_nan | (vx.is_inf & vy.is_zero) | (vx.is_zero & vy.is_inf);
      use_inf = (vx.is_inf | vy.is_inf) & ~use_nan;
      use_zero = (vx.is_zero | vy.is_zero) & ~use_nan;
      inf_sign = zero_sign = vx.sign ^ vy.sign;
      break;
    }
    case op_kind::div: {
      use_nan = use_nan | (vx.is_zero & vy.is_zero) | (vx.is_inf & vy.is_inf);
      use_inf = (vx.is_inf | vy.is_zero) & ~use_nan;
      use_zero = (vx.is_zero | vy.is_inf) & ~use_nan;
      inf_sign = zero_sign = vx.sign ^ vy.sign;
      break;
    }
  }

  const encoding nan_enc = spec.canonical_nan();
  const encoding inf_enc = spec.inf(0);
  for (unsigned j = 0; j < e + s; ++j) {
    const L cn = ((nan_enc >> j) & 1u) ? L::ones() : L::zeros();
    const L ci = ((inf_enc >> j) & 1u) ? L::ones() : L::zeros();
    L v = result.field[j];
    if (has_zero_rule) v = v & ~use_zero;
    v = mux(use_inf, ci, v);
    result.field[j] = mux(use_nan, cn, v);
  }
  L sgn = result.field[e + s];
  if (has_zero_rule) sgn = mux(use_zero, zero_sign, sgn);
  sgn = mux(use_inf, inf_sign, sgn);
  result.field[e + s] = sgn & ~use_nan;  // canonical NaN is positive
  return result;
}

namespace detail {

inline void require_same_shape(const format_spec& a, const format_spec& b) {
  if (!(a == b))
    throw std::invalid_argument("operands must share one format spec");
}

}  // namespace detail

template <lane_type L>
bfp_vector<L> bfp_add(const bfp_vector<L>& x, const bfp_vector<L>& y) {
  detail::require_same_shape(x.spec, y.spec);
  const format_spec& spec = x.spec;
  const unsigned e = spec.exp_bits, s = spec.sig_bits;
  const unsigned ew = detail::exp_work_bits(spec);
  const bool rn = spec.rounding == rounding_mode::rn;

  const detail::operand_view<L> vx = detail::view(x);
  const detail::operand_view<L> vy = detail::view(y);

  // order by encoding magnitude (biased encodings compare like magnitudes,
  // subnormals included), so the aligned subtraction never borrows
  const L swap = less_than(slice(x.field, 0, e + s), slice(y.field, 0, e + s));
  const L sa = mux(swap, vy.sign, vx.sign);
  const L sb = mux(swap, vx.sign, vy.sign);
  bitfield<L> ea(e), eb(e), fa(s), fb(s);
  for (unsigned j = 0; j < e; ++j) {
    ea[j] = mux(swap, vy.exp[j], vx.exp[j]);
    eb[j] = mux(swap, vx.exp[j], vy.exp[j]);
  }
  for (unsigned j = 0; j < s; ++j) {
    fa[j] = mux(swap, vy.frac[j], vx.frac[j]);
    fb[j] = mux(swap, vx.frac[j], vy.frac[j]);
  }
  const L sub_a = mux(swap, vy.exp_zero, vx.exp_zero);
  const L sub_b = mux(swap, vx.exp_zero, vy.exp_zero);

  // effective exponents: subnormals live at biased exponent 1
  ea[0] = ea[0] | sub_a;
  eb[0] = eb[0] | sub_b;
  const bitfield<L> d = ripple_sub(ea, eb).value;  // never borrows

  // significands scaled by 8: three low lanes of guard/round/sticky headroom
  bitfield<L> ma(s + 4), mb(s + 4);
  for (unsigned j = 0; j < s; ++j) {
    ma[3 + j] = fa[j];
    mb[3 + j] = fb[j];
  }
  ma[s + 3] = ~sub_a;
  mb[s + 3] = ~sub_b;

  // align the smaller operand, jamming shifted-out bits into the low lane
  // so both the subtraction borrow and the tie test stay exact
  shift_sticky<L> al = var_shift_right(mb, d, true);
  bitfield<L> mbs = std::move(al.value);
  mbs[0] = mbs[0] | al.sticky;

  // one adder pass handles both effective operations: XOR with the
  // effective-subtract lane complements, the carry-in supplies the +1
  const L eff_sub = sa ^ sb;
  bitfield<L> addend(s + 4);
  for (unsigned j = 0; j < s + 4; ++j) addend[j] = mbs[j] ^ eff_sub;
  sum_carry<L> sum = ripple_add(ma, addend, eff_sub);

  bitfield<L> ext(s + 5);
  for (unsigned j = 0; j < s + 4; ++j) ext[j] = sum.value[j];
  ext[s + 4] = sum.carry & ~eff_sub;  // only an effective add truly carries

  normalized<L> nrm = normalize_left(ext);
  // step back down one: hidden bit belongs at lane s+3; the dropped lane
  // re-jams into the sticky position
  bitfield<L> m(s + 4);
  for (unsigned j = 0; j < s + 4; ++j) m[j] = nrm.value[j + 1];
  m[0] = m[0] | nrm.value[0];

  // biased result exponent: ea_eff + 1 - normalize count
  bitfield<L> ea_ext = resized(ea, ew);
  ea_ext = increment(ea_ext, L::ones()).value;
  const bitfield<L> ezf =
      ripple_sub(ea_ext, resized(nrm.count, ew)).value;

  guard_state<L> gs{L::zeros(), L::zeros()};
  if (rn) gs = {m[2], m[1] | m[0]};
  bitfield<L> packed =
      detail::round_pack(slice(m, 3, s + 1), gs, ezf, sa, spec);

  // exact-zero sums take sign AND(sa, sb): +0 from cancellation, -0 only
  // when both inputs are negative zeros
  const L nz = ~nrm.is_zero;
  for (unsigned j = 0; j < e + s; ++j) packed[j] = packed[j] & nz;
  packed[e + s] = mux(nrm.is_zero, sa & sb, packed[e + s]);

  bfp_vector<L> result{spec, std::move(packed)};
  return apply_special_masks(std::move(result), x, y, op_kind::add);
}

template <lane_type L>
bfp_vector<L> bfp_sub(const bfp_vector<L>& x, const bfp_vector<L>& y) {
  bfp_vector<L> y2 = y;
  const unsigned top = y.spec.exp_bits + y.spec.sig_bits;
  y2.field[top] = ~y2.field[top];
  return bfp_add(x, y2);
}

template <lane_type L>
bfp_vector<L> bfp_mul(const bfp_vector<L>& x, const bfp_vector<L>& y) {
  detail::require_same_shape(x.spec, y.spec);
  const format_spec& spec = x.spec;
  const unsigned e = spec.exp_bits, s = spec.sig_bits;
  const unsigned ew = detail::exp_work_bits(spec);
  const bool rn = spec.rounding == rounding_mode::rn;

  const detail::operand_view<L> vx = detail::view(x);
  const detail::operand_view<L> vy = detail::view(y);
  const L sign = vx.sign ^ vy.sign;

  bitfield<L> mx(s + 1), my(s + 1);
  for (unsigned j = 0; j < s; ++j) {
    mx[j] = vx.frac[j];
    my[j] = vy.frac[j];
  }
  mx[s] = ~vx.exp_zero;
  my[s] = ~vy.exp_zero;

  // exact 2(s+1)-bit product; one full normalize covers both the ordinary
  // [1,4) range and subnormal inputs
  const bitfield<L> prod = mul_shift_add(mx, my);
  normalized<L> nrm = normalize_left(prod);

  // ez = ex_eff + ey_eff - (bias - 1) - count
  bitfield<L> exf = resized(vx.exp, ew);
  exf[0] = exf[0] | vx.exp_zero;
  bitfield<L> eyf = resized(vy.exp, ew);
  eyf[0] = eyf[0] | vy.exp_zero;
  bitfield<L> ezf = ripple_add(exf, eyf, L::zeros()).value;
  ezf = ripple_sub(ezf, constant_field<L>(ew, static_cast<std::uint64_t>(
                                                  spec.bias() - 1))).value;
  ezf = ripple_sub(ezf, resized(nrm.count, ew)).value;

  guard_state<L> gs{L::zeros(), L::zeros()};
  if (rn)
    gs = {nrm.value[s], or_reduce(slice(nrm.value, 0, s))};
  bitfield<L> packed = detail::round_pack(slice(nrm.value, s + 1, s + 1), gs,
                                          ezf, sign, spec);

  bfp_vector<L> result{spec, std::move(packed)};
  return apply_special_masks(std::move(result), x, y, op_kind::mul);
}

template <lane_type L>
bfp_vector<L> bfp_div(const bfp_vector<L>& x, const bfp_vector<L>& y) {
  detail::require_same_shape(x.spec, y.spec);
  const format_spec& spec = x.spec;
  const unsigned e = spec.exp_bits, s = spec.sig_bits;
  const unsigned ew = detail::exp_work_bits(spec);
  const bool rn = spec.rounding == rounding_mode::rn;

  const detail::operand_view<L> vx = detail::view(x);
  const detail::operand_view<L> vy = detail::view(y);
  const L sign = vx.sign ^ vy.sign;

  bitfield<L> mx(s + 1), my(s + 1);
  for (unsigned j = 0; j < s; ++j) {
    mx[j] = vx.frac[j];
    my[j] = vy.frac[j];
  }
  mx[s] = ~vx.exp_zero;
  my[s] = ~vy.exp_zero;

  // normalize operands before dividing; subnormal significands slide up and
  // their exponents absorb the count
  normalized<L> nx = normalize_left(mx);
  normalized<L> ny = normalize_left(my);

  bitfield<L> exf = resized(vx.exp, ew);
  exf[0] = exf[0] | vx.exp_zero;
  bitfield<L> eyf = resized(vy.exp, ew);
  eyf[0] = eyf[0] | vy.exp_zero;
  exf = ripple_sub(exf, resized(nx.count, ew)).value;
  eyf = ripple_sub(eyf, resized(ny.count, ew)).value;

  // pre-scale the dividend so the quotient lands in [1, 2): one extra
  // doubling whenever the dividend significand is the smaller
  const L scale = less_than(nx.value, ny.value);
  bitfield<L> num(s + 2);
  num[0] = mux(scale, L::zeros(), nx.value[0]);
  for (unsigned j = 1; j <= s; ++j)
    num[j] = mux(scale, nx.value[j - 1], nx.value[j]);
  num[s + 1] = mux(scale, nx.value[s], L::zeros());

  // RN wants one guard bit below the s+1 significand bits; RZ truncates and
  // can skip both the extra quotient bit and the remainder test
  const unsigned q_bits = s + 1 + (rn ? 1 : 0);
  bitfield<L> dividend(q_bits - 1 + s + 2);
  for (unsigned j = 0; j < s + 2; ++j) dividend[q_bits - 1 + j] = num[j];
  quotient_rem<L> qr = restoring_div(dividend, ny.value, q_bits);

  // ez = (ex_eff - cx) - (ey_eff - cy) - scale + bias
  bitfield<L> ezf = ripple_sub(exf, eyf).value;
  ezf = ripple_add(ezf, constant_field<L>(ew, static_cast<std::uint64_t>(
                                                  spec.bias())),
                   L::zeros()).value;
  bitfield<L> scale_f(ew);
  scale_f[0] = scale;
  ezf = ripple_sub(ezf, scale_f).value;

  guard_state<L> gs{L::zeros(), L::zeros()};
  bitfield<L> principal(s + 1);
  if (rn) {
    principal = slice(qr.quotient, 1, s + 1);
    gs = {qr.quotient[0], qr.rem_nonzero};
  } else {
    principal = qr.quotient;
  }
  bitfield<L> packed = detail::round_pack(principal, gs, ezf, sign, spec);

  bfp_vector<L> result{spec, std::move(packed)};
  return apply_special_masks(std::move(result), x, y, op_kind::div);
}

}  // namespace bfp
