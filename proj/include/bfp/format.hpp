#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

// Custom floating-point format descriptors and the value-level scalar codec.
// Encodings follow IEEE-754 conventions: hidden leading bit, biased
// exponent, all-ones exponent reserved for Inf/NaN, all-zeros for
// zero/subnormal. Layout MSB to LSB is sign, exponent, fraction.

namespace bfp {

enum class rounding_mode { rz, rn };           // toward zero / nearest-even
enum class subnormal_policy { gradual, ftz };  // gradual underflow / flush

enum class value_class { zero, subnormal, normal, infinity, nan };

using encoding = std::uint64_t;

struct format_spec {
  unsigned exp_bits = 0;
  unsigned sig_bits = 0;  // stored fraction bits, hidden bit excluded
  rounding_mode rounding = rounding_mode::rn;
  subnormal_policy subnormals = subnormal_policy::gradual;
  std::string name;

  unsigned total_bits() const { return 1 + exp_bits + sig_bits; }
  int bias() const { return (1 << (exp_bits - 1)) - 1; }
  int emax() const { return bias(); }            // largest normal exponent
  int emin() const { return 1 - bias(); }        // smallest normal exponent
  std::uint64_t exp_field_max() const { return (1ull << exp_bits) - 1; }

  encoding sign_mask() const { return 1ull << (exp_bits + sig_bits); }
  encoding frac_mask() const { return (1ull << sig_bits) - 1; }

  encoding make(unsigned sign, std::uint64_t biased_exp,
                std::uint64_t fraction) const {
    return (static_cast<encoding>(sign & 1u) << (exp_bits + sig_bits)) |
           (biased_exp << sig_bits) | fraction;
  }

  encoding inf(unsigned sign) const { return make(sign, exp_field_max(), 0); }
  encoding max_finite(unsigned sign) const {
    return make(sign, exp_field_max() - 1, frac_mask());
  }
  // canonical quiet NaN: positive, fraction MSB set
  encoding canonical_nan() const {
    return make(0, exp_field_max(), 1ull << (sig_bits - 1));
  }

  friend bool operator==(const format_spec&, const format_spec&) = default;
};

inline void validate(const format_spec& f) {
  if (f.exp_bits < 2 || f.exp_bits > 11)
    throw std::invalid_argument("exp_bits must be in [2, 11]");
  if (f.sig_bits < 1 || f.sig_bits > 52)
    throw std::invalid_argument("sig_bits must be in [1, 52]");
  if (f.total_bits() > 64)
    throw std::invalid_argument("1 + exp_bits + sig_bits must not exceed 64");
}

inline format_spec make_spec(unsigned exp_bits, unsigned sig_bits,
                             rounding_mode r = rounding_mode::rn,
                             subnormal_policy sp = subnormal_policy::gradual,
                             std::string name = {}) {
  format_spec f{exp_bits, sig_bits, r, sp, std::move(name)};
  validate(f);
  return f;
}

// Value-level twin of one element, the oracle's working view.
struct scalar_custom {
  unsigned sign = 0;
  std::uint64_t biased_exp = 0;
  std::uint64_t fraction = 0;
  value_class cls = value_class::zero;
};

inline scalar_custom split(encoding enc, const format_spec& f) {
  scalar_custom s;
  s.sign = static_cast<unsigned>((enc >> (f.exp_bits + f.sig_bits)) & 1u);
  s.biased_exp = (enc >> f.sig_bits) & f.exp_field_max();
  s.fraction = enc & f.frac_mask();
  if (s.biased_exp == f.exp_field_max())
    s.cls = s.fraction ? value_class::nan : value_class::infinity;
  else if (s.biased_exp == 0)
    s.cls = s.fraction ? value_class::subnormal : value_class::zero;
  else
    s.cls = value_class::normal;
  return s;
}

inline value_class classify(encoding enc, const format_spec& f) {
  return split(enc, f).cls;
}

// Exact decode. Every finite value of a format with exp_bits <= 11 and
// sig_bits <= 52 is representable in binary64.
inline double decode_scalar(encoding enc, const format_spec& f) {
  const scalar_custom s = split(enc, f);
  const double sgn = s.sign ? -1.0 : 1.0;
  switch (s.cls) {
    case value_class::nan:
      return std::numeric_limits<double>::quiet_NaN();
    case value_class::infinity:
      return sgn * std::numeric_limits<double>::infinity();
    case value_class::zero:
      return sgn * 0.0;
    case value_class::subnormal:
      return sgn * std::ldexp(static_cast<double>(s.fraction),
                              f.emin() - static_cast<int>(f.sig_bits));
    case value_class::normal:
    default:
      return sgn * std::ldexp(static_cast<double>((1ull << f.sig_bits) |
                                                  s.fraction),
                              static_cast<int>(s.biased_exp) - f.bias() -
                                  static_cast<int>(f.sig_bits));
  }
}

// Correctly rounded binary64 -> custom conversion. Overflow gives Inf under
// RN and max finite under RZ; underflow honors the subnormal policy; NaN
// becomes the canonical quiet NaN.
inline encoding encode_scalar(double x, const format_spec& f) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  const unsigned sign = static_cast<unsigned>(bits >> 63);
  const std::uint64_t e64 = (bits >> 52) & 0x7ff;
  const std::uint64_t f64 = bits & ((1ull << 52) - 1);

  if (e64 == 0x7ff) {
    if (f64) return f.canonical_nan();
    return f.inf(sign);
  }
  if (e64 == 0 && f64 == 0) return f.make(sign, 0, 0);

  // exact value = sig * 2^exp2, sig in [1, 2^53)
  std::uint64_t sig = e64 ? (1ull << 52) | f64 : f64;
  int exp2 = e64 ? static_cast<int>(e64) - 1023 - 52 : -1022 - 52;

  const int msb = 63 - std::countl_zero(sig);
  const int unbiased = exp2 + msb;  // floor(log2 |x|)
  const int s = static_cast<int>(f.sig_bits);

  // ulp exponent of the destination: normals round at 2^(unbiased - s),
  // subnormal range rounds at the fixed 2^(emin - s)
  const int ulp_exp = (unbiased >= f.emin() ? unbiased : f.emin()) - s;
  const int shift = ulp_exp - exp2;

  std::uint64_t kept;
  bool guard = false, sticky = false;
  if (shift <= 0) {
    kept = sig << -shift;  // exact; fits: msb - shift <= s + 1 + msb bound
  } else if (shift > 64) {
    kept = 0;
    sticky = true;
  } else {
    kept = shift == 64 ? 0 : sig >> shift;
    guard = (sig >> (shift - 1)) & 1u;
    if (shift > 1) sticky = (sig & ((1ull << (shift - 1)) - 1)) != 0;
  }

  if (f.rounding == rounding_mode::rn && guard && (sticky || (kept & 1u)))
    ++kept;

  int res_exp = ulp_exp + s;  // exponent of the leading kept bit if normal
  if (kept >= (2ull << s)) {  // rounding overflowed the significand
    kept >>= 1;
    ++res_exp;
  }

  if (kept == 0) return f.make(sign, 0, 0);

  if (kept < (1ull << s)) {
    // subnormal result
    if (f.subnormals == subnormal_policy::ftz) return f.make(sign, 0, 0);
    return f.make(sign, 0, kept);
  }

  if (res_exp > f.emax()) {
    return f.rounding == rounding_mode::rn ? f.inf(sign) : f.max_finite(sign);
  }
  return f.make(sign, static_cast<std::uint64_t>(res_exp + f.bias()),
                kept & f.frac_mask());
}

}  // namespace bfp
