#include "swarmlab/big_real.hpp"

#include <gmp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#include "swarmlab/errors.hpp"

namespace swarmlab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveLog: return "NonPositiveLog";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyRemainder: return "EmptyRemainder";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::ZeroPotential: return "ZeroPotential";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::EmptyStagnatingSet: return "EmptyStagnatingSet";
    case ErrorKind::TauOutOfRange: return "TauOutOfRange";
    case ErrorKind::HorizonTooShort: return "HorizonTooShort";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::EmptyCohort: return "EmptyCohort";
    case ErrorKind::CorruptLog: return "CorruptLog";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string dims_message(const std::vector<int>& dims) {
  std::string msg = "potential is zero in dimension(s)";
  for (int d : dims) msg += " " + std::to_string(d);
  return msg;
}

long clamp_precision(long bits) { return std::max(bits, kMinPrecisionBits); }

// MPFR requires distinct destination precision handling when dst aliases an
// operand: growing in place is exact, shrinking never happens on that path.
void prepare_destination(BigReal& dst, const BigReal& a, const BigReal& b, long bits) {
  const bool aliased = (&dst == &a) || (&dst == &b);
  if (dst.precision() == bits) return;
  if (aliased) {
    dst.set_precision(bits);
  } else {
    mpfr_set_prec(dst.get(), bits);
  }
}

}  // namespace

ZeroPotentialError::ZeroPotentialError(std::vector<int> dims)
    : Error(ErrorKind::ZeroPotential, dims_message(dims)), dims_(std::move(dims)) {}

void PrecisionPolicy::validate() const {
  if (initial_bits < 256) throw Error(ErrorKind::ConfigError, "precision.initial_bits must be >= 256");
  if (guard_bits < 64) throw Error(ErrorKind::ConfigError, "precision.guard_bits must be >= 64");
  if (growth_quantum < 64) throw Error(ErrorKind::ConfigError, "precision.growth_quantum must be >= 64");
}

BigReal::BigReal() : BigReal(kMinPrecisionBits) {}

BigReal::BigReal(long precision_bits) {
  mpfr_init2(v_, clamp_precision(precision_bits));
  mpfr_set_zero(v_, 1);
}

BigReal::BigReal(double value, long precision_bits) {
  if (!std::isfinite(value)) throw Error(ErrorKind::DomainError, "BigReal from non-finite double");
  mpfr_init2(v_, clamp_precision(precision_bits));
  mpfr_set_d(v_, value, MPFR_RNDN);
}

BigReal BigReal::from_string(std::string_view text, long precision_bits) {
  BigReal r(precision_bits);
  std::string s(text);
  if (mpfr_set_str(r.v_, s.c_str(), 0, MPFR_RNDN) != 0 || !mpfr_number_p(r.v_)) {
    throw Error(ErrorKind::DomainError, "cannot parse real literal '" + s + "'");
  }
  return r;
}

BigReal BigReal::from_int(long value, long precision_bits) {
  BigReal r(precision_bits);
  mpfr_set_si(r.v_, value, MPFR_RNDN);
  return r;
}

BigReal::BigReal(const BigReal& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

BigReal::BigReal(BigReal&& other) noexcept {
  // Steal the limbs and leave `other` as a valid minimum-width zero.
  std::memcpy(v_, other.v_, sizeof(mpfr_t));
  mpfr_init2(other.v_, kMinPrecisionBits);
  mpfr_set_zero(other.v_, 1);
}

BigReal& BigReal::operator=(const BigReal& other) {
  if (this == &other) return *this;
  if (mpfr_get_prec(v_) != mpfr_get_prec(other.v_)) mpfr_set_prec(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator=(BigReal&& other) noexcept {
  if (this != &other) mpfr_swap(v_, other.v_);
  return *this;
}

BigReal::~BigReal() { mpfr_clear(v_); }

void BigReal::set_precision(long bits) {
  bits = clamp_precision(bits);
  if (bits != precision()) mpfr_prec_round(v_, bits, MPFR_RNDN);
}

void BigReal::grow_precision(long bits) {
  if (bits > precision()) mpfr_prec_round(v_, bits, MPFR_RNDN);
}

void BigReal::assign_keep_width(const BigReal& src) {
  if (this == &src) return;
  if (src.precision() > precision()) mpfr_set_prec(v_, src.precision());
  mpfr_set(v_, src.v_, MPFR_RNDN);  // exact: destination is at least as wide
}

void BigReal::assign_zero(long bits) {
  mpfr_set_prec(v_, clamp_precision(bits));
  mpfr_set_zero(v_, 1);
}

void BigReal::assign_double(double value, long bits) {
  if (!std::isfinite(value)) throw Error(ErrorKind::DomainError, "BigReal from non-finite double");
  mpfr_set_prec(v_, clamp_precision(bits));
  mpfr_set_d(v_, value, MPFR_RNDN);
}

std::string BigReal::to_hex() const {
  std::string out = std::to_string(precision()) + ":";
  if (is_zero()) {
    out += mpfr_signbit(v_) ? "-0" : "0";
    return out;
  }
  mpfr_exp_t exp = 0;
  const std::size_t digits = static_cast<std::size_t>(precision()) / 4 + 2;
  char* s = mpfr_get_str(nullptr, &exp, 16, digits, v_, MPFR_RNDN);
  std::string mant(s);
  mpfr_free_str(s);
  bool negative = !mant.empty() && mant[0] == '-';
  if (negative) mant.erase(0, 1);
  while (mant.size() > 1 && mant.back() == '0') mant.pop_back();
  out += negative ? "-" : "";
  out += mant + "@" + std::to_string(static_cast<long>(exp));
  return out;
}

BigReal BigReal::from_hex(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) throw Error(ErrorKind::CorruptLog, "malformed BigReal hex text");
  long prec = std::stol(std::string(text.substr(0, colon)));
  if (prec < kMinPrecisionBits) throw Error(ErrorKind::CorruptLog, "BigReal precision below minimum");
  std::string body(text.substr(colon + 1));
  BigReal r(prec);
  if (body == "0" || body == "-0") {
    mpfr_set_zero(r.v_, body == "-0" ? -1 : 1);
    return r;
  }
  auto at = body.find('@');
  if (at == std::string::npos) throw Error(ErrorKind::CorruptLog, "malformed BigReal hex text");
  bool negative = body[0] == '-';
  std::string mant = body.substr(negative ? 1 : 0, at - (negative ? 1 : 0));
  std::string lit = std::string(negative ? "-" : "") + "0." + mant + body.substr(at);
  if (mpfr_set_str(r.v_, lit.c_str(), 16, MPFR_RNDN) != 0) {
    throw Error(ErrorKind::CorruptLog, "malformed BigReal hex mantissa");
  }
  return r;
}

namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t& offset) {
  if (offset + 8 > in.size()) throw Error(ErrorKind::CorruptLog, "truncated binary BigReal");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[offset + i]) << (8 * i);
  offset += 8;
  return v;
}

}  // namespace

void BigReal::append_binary(std::vector<std::uint8_t>& out) const {
  // Layout: prec(u64) sign(u64: 0 zero, 1 pos, 2 neg) exp2(i64) nbytes(u64) magnitude(LE bytes)
  put_u64(out, static_cast<std::uint64_t>(precision()));
  if (is_zero()) {
    put_u64(out, 0);
    put_u64(out, 0);
    put_u64(out, 0);
    return;
  }
  mpz_t z;
  mpz_init(z);
  mpfr_exp_t e = mpfr_get_z_2exp(z, v_);
  put_u64(out, sign() > 0 ? 1 : 2);
  put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(e)));
  std::size_t count = 0;
  mpz_abs(z, z);
  void* raw = mpz_export(nullptr, &count, -1, 1, -1, 0, z);
  put_u64(out, count);
  const auto* bytes = static_cast<const std::uint8_t*>(raw);
  out.insert(out.end(), bytes, bytes + count);
  void (*free_fn)(void*, std::size_t);
  mp_get_memory_functions(nullptr, nullptr, &free_fn);
  free_fn(raw, count);
  mpz_clear(z);
}

BigReal BigReal::read_binary(std::span<const std::uint8_t> in, std::size_t& offset) {
  auto prec = static_cast<long>(get_u64(in, offset));
  auto kind = get_u64(in, offset);
  auto e = static_cast<std::int64_t>(get_u64(in, offset));
  auto count = get_u64(in, offset);
  if (prec < kMinPrecisionBits || kind > 2 || offset + count > in.size()) {
    throw Error(ErrorKind::CorruptLog, "malformed binary BigReal");
  }
  BigReal r(prec);
  if (kind == 0) return r;
  mpz_t z;
  mpz_init(z);
  mpz_import(z, count, -1, 1, -1, 0, in.data() + offset);
  offset += count;
  if (kind == 2) mpz_neg(z, z);
  mpfr_set_z_2exp(r.v_, z, static_cast<mpfr_exp_t>(e), MPFR_RNDN);
  mpz_clear(z);
  return r;
}

std::partial_ordering operator<=>(const BigReal& a, const BigReal& b) {
  int c = mpfr_cmp(a.v_, b.v_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

bool BigReal::identical(const BigReal& other) const {
  return precision() == other.precision() && mpfr_equal_p(v_, other.v_) &&
         mpfr_signbit(v_) == mpfr_signbit(other.v_);
}

long required_bits(const BigReal& a, const BigReal& b, const PrecisionPolicy& policy) {
  long bits = std::max(a.precision(), b.precision());
  if (!a.is_zero() && !b.is_zero()) {
    long gap = std::labs(a.exponent() - b.exponent());
    bits = std::max(bits, gap + policy.guard_bits);
  }
  const long q = policy.growth_quantum;
  return ((bits + q - 1) / q) * q;
}

double log2_magnitude(const BigReal& x) {
  if (x.sign() <= 0) throw Error(ErrorKind::NonPositiveLog, "log2 of a non-positive value");
  long e = 0;
  double m = mpfr_get_d_2exp(&e, x.get(), MPFR_RNDN);
  return static_cast<double>(e) + std::log2(m);
}

void add_into(BigReal& dst, const BigReal& a, const BigReal& b, const PrecisionPolicy& policy) {
  prepare_destination(dst, a, b, required_bits(a, b, policy));
  mpfr_add(dst.get(), a.get(), b.get(), MPFR_RNDN);
}

void sub_into(BigReal& dst, const BigReal& a, const BigReal& b, const PrecisionPolicy& policy) {
  prepare_destination(dst, a, b, required_bits(a, b, policy));
  mpfr_sub(dst.get(), a.get(), b.get(), MPFR_RNDN);
}

void mul_into(BigReal& dst, const BigReal& a, const BigReal& b) {
  prepare_destination(dst, a, b, std::max(a.precision(), b.precision()));
  mpfr_mul(dst.get(), a.get(), b.get(), MPFR_RNDN);
}

void sqr_into(BigReal& dst, const BigReal& a) {
  prepare_destination(dst, a, a, a.precision());
  mpfr_sqr(dst.get(), a.get(), MPFR_RNDN);
}

void mul_exact_into(BigReal& dst, const BigReal& a, const BigReal& b) {
  prepare_destination(dst, a, b, a.precision() + b.precision());
  mpfr_mul(dst.get(), a.get(), b.get(), MPFR_RNDN);
}

void sqr_exact_into(BigReal& dst, const BigReal& a) {
  prepare_destination(dst, a, a, 2 * a.precision());
  mpfr_sqr(dst.get(), a.get(), MPFR_RNDN);
}

BigReal add(const BigReal& a, const BigReal& b, const PrecisionPolicy& policy) {
  BigReal r(required_bits(a, b, policy));
  mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

BigReal sub(const BigReal& a, const BigReal& b, const PrecisionPolicy& policy) {
  BigReal r(required_bits(a, b, policy));
  mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

BigReal mul(const BigReal& a, const BigReal& b) {
  BigReal r(std::max(a.precision(), b.precision()));
  mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

BigReal div(const BigReal& a, const BigReal& b) {
  if (b.is_zero()) throw Error(ErrorKind::DivisionByZero, "BigReal division by zero");
  BigReal r(std::max(a.precision(), b.precision()));
  mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

BigReal neg(const BigReal& a) {
  BigReal r(a.precision());
  mpfr_neg(r.get(), a.get(), MPFR_RNDN);
  return r;
}

BigReal abs(const BigReal& a) {
  BigReal r(a.precision());
  mpfr_abs(r.get(), a.get(), MPFR_RNDN);
  return r;
}

BigReal ldexp(const BigReal& a, long k) {
  BigReal r(a.precision());
  mpfr_mul_2si(r.get(), a.get(), k, MPFR_RNDN);
  return r;
}

}  // namespace swarmlab
