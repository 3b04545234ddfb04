#pragma once

// Arbitrary-precision reals on top of MPFR.
//
// A BigScalar owns one mpfr_t. Binary operations round to the larger of the
// two operand precisions, so a value computed under a Precision never silently
// loses bits by mixing with a narrower one.

#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace prinest {

struct Precision {
  static constexpr long kMinBits = 64;
  static constexpr long kDefaultBits = 128;

  long bits = kDefaultBits;

  constexpr Precision() = default;
  explicit Precision(long b);

  Precision doubled() const { return Precision(bits * 2); }

  friend constexpr bool operator==(Precision, Precision) = default;
  friend constexpr auto operator<=>(Precision a, Precision b) { return a.bits <=> b.bits; }
};

class BigScalar {
 public:
  explicit BigScalar(Precision prec = Precision{});
  BigScalar(long value, Precision prec);
  BigScalar(double value, Precision prec);

  /// Parses a decimal literal ("1.87", "-3e-5"). Throws ParseError.
  static BigScalar parse(std::string_view text, Precision prec);
  /// 2^e exactly.
  static BigScalar pow2(long e, Precision prec);

  BigScalar(const BigScalar& other);
  BigScalar(BigScalar&& other) noexcept;
  BigScalar& operator=(const BigScalar& other);
  BigScalar& operator=(BigScalar&& other) noexcept;
  ~BigScalar();

  Precision prec() const { return Precision(mpfr_get_prec(v_)); }
  /// Copy rounded (or exactly widened) to another precision.
  BigScalar at(Precision p) const;

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  /// log2|x|, -infinity for zero. Accurate to double rounding.
  double log2_abs() const;
  /// Shortest decimal string that parses back to the same value at prec().
  std::string to_string() const;
  /// Fixed-point decimal with `decimals` digits after the point.
  std::string to_fixed(int decimals) const;

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  BigScalar& operator+=(const BigScalar& o);
  BigScalar& operator-=(const BigScalar& o);
  BigScalar& operator*=(const BigScalar& o);
  BigScalar& operator/=(const BigScalar& o);

  friend BigScalar operator+(const BigScalar& a, const BigScalar& b);
  friend BigScalar operator-(const BigScalar& a, const BigScalar& b);
  friend BigScalar operator*(const BigScalar& a, const BigScalar& b);
  friend BigScalar operator/(const BigScalar& a, const BigScalar& b);
  friend BigScalar operator-(const BigScalar& a);

  friend BigScalar operator*(const BigScalar& a, long b);
  friend BigScalar operator*(long a, const BigScalar& b) { return b * a; }
  friend BigScalar operator+(const BigScalar& a, long b);
  friend BigScalar operator-(const BigScalar& a, long b);
  friend BigScalar operator-(long a, const BigScalar& b);

  friend bool operator==(const BigScalar& a, const BigScalar& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const BigScalar& a, const BigScalar& b);
  friend bool operator==(const BigScalar& a, long b) { return mpfr_cmp_si(a.v_, b) == 0; }
  friend std::partial_ordering operator<=>(const BigScalar& a, long b);

  mpfr_srcptr raw() const { return v_; }
  mpfr_ptr raw() { return v_; }

 private:
  mpfr_t v_;
};

BigScalar abs(const BigScalar& x);
BigScalar sqrt(const BigScalar& x);
BigScalar log(const BigScalar& x);
BigScalar exp(const BigScalar& x);
const BigScalar& max(const BigScalar& a, const BigScalar& b);
const BigScalar& min(const BigScalar& a, const BigScalar& b);

/// Relative difference |a-b| / max(|a|,|b|); 0 when both are zero.
double relative_difference(const BigScalar& a, const BigScalar& b);

/// Closed interval [lo, hi] with lo < hi.
class RInterval {
 public:
  RInterval(BigScalar lo, BigScalar hi);
  /// [-r, r]
  static RInterval symmetric(const BigScalar& r);

  const BigScalar& lo() const { return lo_; }
  const BigScalar& hi() const { return hi_; }
  BigScalar length() const { return hi_ - lo_; }
  BigScalar midpoint() const;
  Precision prec() const { return std::max(lo_.prec(), hi_.prec()); }

  bool contains(const BigScalar& x) const { return lo_ <= x && x <= hi_; }
  bool contains_interior(const BigScalar& x) const { return lo_ < x && x < hi_; }
  bool contains(const RInterval& other) const { return lo_ <= other.lo_ && other.hi_ <= hi_; }
  bool contains_interior(const RInterval& other) const { return lo_ < other.lo_ && other.hi_ < hi_; }
  /// Distance from x to the nearer endpoint.
  BigScalar boundary_distance(const BigScalar& x) const;
  /// |lo + hi| <= 2^-(bits-16) * (hi - lo)
  bool is_symmetric() const;
  RInterval mirrored() const { return RInterval(-hi_, -lo_); }

  friend bool operator==(const RInterval&, const RInterval&) = default;
  /// Image under x -> |x|; only meaningful for intervals not containing 0.
  RInterval folded() const;

 private:
  BigScalar lo_;
  BigScalar hi_;
};

}  // namespace prinest
