#pragma once

// Arbitrary-precision binary floating point backed by MPFR.
//
// Every value carries its own mantissa width. Additions and subtractions pick
// the width of their result with required_bits() so that operands separated by
// thousands of binary orders do not cancel; multiplication and division keep
// the widest operand width. The *_exact_into forms widen to the sum of the
// operand widths, so the product is never rounded. Rounding is always to nearest, ties to even.

#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swarmlab {

inline constexpr long kMinPrecisionBits = 64;

struct PrecisionPolicy {
  long initial_bits = 512;
  long guard_bits = 64;
  long growth_quantum = 256;

  /// Throws Error(ConfigError) unless initial >= 256, guard >= 64, quantum >= 64.
  void validate() const;
};

class BigReal {
 public:
  /// Zero at the minimum precision.
  BigReal();
  explicit BigReal(long precision_bits);
  BigReal(double value, long precision_bits);

  /// Parses a decimal (or "0x"-prefixed hex-float) literal, rounded to nearest.
  static BigReal from_string(std::string_view text, long precision_bits);
  static BigReal from_int(long value, long precision_bits);

  BigReal(const BigReal& other);
  BigReal(BigReal&& other) noexcept;
  BigReal& operator=(const BigReal& other);
  BigReal& operator=(BigReal&& other) noexcept;
  ~BigReal();

  long precision() const { return static_cast<long>(mpfr_get_prec(v_)); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  /// x = m * 2^e with 0.5 <= |m| < 1. Undefined for zero; callers check is_zero().
  long exponent() const { return static_cast<long>(mpfr_get_exp(v_)); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

  /// Exact widening (or correctly rounded narrowing) of the stored value.
  void set_precision(long bits);
  /// Widens to `bits` if narrower; never narrows.
  void grow_precision(long bits);

  /// Copies the value of `src` without ever narrowing this slot's precision.
  void assign_keep_width(const BigReal& src);
  /// Resets to +0 at exactly `bits` (reuses storage).
  void assign_zero(long bits);
  /// Exact for any finite double when bits >= 53.
  void assign_double(double value, long bits);

  /// Lossless text: "<prec>:<hex mantissa>@<exp>" (or "<prec>:0").
  std::string to_hex() const;
  static BigReal from_hex(std::string_view text);

  /// Raw limb encoding used by the binary Phi sidecar.
  void append_binary(std::vector<std::uint8_t>& out) const;
  static BigReal read_binary(std::span<const std::uint8_t> in, std::size_t& offset);

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

  friend bool operator==(const BigReal& a, const BigReal& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const BigReal& a, const BigReal& b);

  /// Bit-identical: same precision and same value (sign of zero included).
  bool identical(const BigReal& other) const;

 private:
  mpfr_t v_;
};

/// max(prec a, prec b, |exp a - exp b| + guard), rounded up to a multiple of
/// growth_quantum. Zero operands contribute no exponent gap.
long required_bits(const BigReal& a, const BigReal& b, const PrecisionPolicy& policy);

/// log2|x| at machine precision. Throws Error(NonPositiveLog) for x <= 0.
double log2_magnitude(const BigReal& x);

BigReal add(const BigReal& a, const BigReal& b, const PrecisionPolicy& policy);
BigReal sub(const BigReal& a, const BigReal& b, const PrecisionPolicy& policy);
BigReal mul(const BigReal& a, const BigReal& b);
/// Throws Error(DivisionByZero) when b == 0.
BigReal div(const BigReal& a, const BigReal& b);
BigReal neg(const BigReal& a);
BigReal abs(const BigReal& a);
/// Exact scaling by 2^k.
BigReal ldexp(const BigReal& a, long k);

// In-place forms used by the simulation hot loop. `dst` may alias an operand.
void add_into(BigReal& dst, const BigReal& a, const BigReal& b, const PrecisionPolicy& policy);
void sub_into(BigReal& dst, const BigReal& a, const BigReal& b, const PrecisionPolicy& policy);
void mul_into(BigReal& dst, const BigReal& a, const BigReal& b);
void sqr_into(BigReal& dst, const BigReal& a);
void mul_exact_into(BigReal& dst, const BigReal& a, const BigReal& b);
void sqr_exact_into(BigReal& dst, const BigReal& a);

}  // namespace swarmlab
