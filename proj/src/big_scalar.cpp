#include "prinest/big_scalar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "prinest/error.hpp"

namespace prinest {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NoPreimage: return "NoPreimage";
    case ErrorCode::SingularAtCritical: return "SingularAtCritical";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::PullbackEscapes: return "PullbackEscapes";
    case ErrorCode::NotBuilt: return "NotBuilt";
    case ErrorCode::Ambiguous: return "Ambiguous";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::EscapeNotFound: return "EscapeNotFound";
    case ErrorCode::NotInDomain: return "NotInDomain";
    case ErrorCode::NoFixedPoint: return "NoFixedPoint";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NotRealized: return "NotRealized";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Precision::Precision(long b) : bits(b) {
  if (b < kMinBits) throw Error(ErrorCode::ConfigError, "precision below 64 bits: " + std::to_string(b));
  if (b > MPFR_PREC_MAX) throw Error(ErrorCode::ConfigError, "precision too large");
}

BigScalar::BigScalar(Precision prec) {
  mpfr_init2(v_, prec.bits);
  mpfr_set_zero(v_, 1);
}

BigScalar::BigScalar(long value, Precision prec) {
  mpfr_init2(v_, prec.bits);
  mpfr_set_si(v_, value, MPFR_RNDN);
}

BigScalar::BigScalar(double value, Precision prec) {
  mpfr_init2(v_, prec.bits);
  mpfr_set_d(v_, value, MPFR_RNDN);
}

BigScalar BigScalar::parse(std::string_view text, Precision prec) {
  std::string s(text);
  auto trimmed_begin = s.find_first_not_of(" \t\n\r");
  auto trimmed_end = s.find_last_not_of(" \t\n\r");
  if (trimmed_begin == std::string::npos) throw Error(ErrorCode::ParseError, "empty number");
  s = s.substr(trimmed_begin, trimmed_end - trimmed_begin + 1);
  // Accept only plain decimal literals; MPFR would also take "nan", hex, etc.
  bool digit_seen = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    bool ok = (c >= '0' && c <= '9') || c == '.' || c == 'e' || c == 'E' ||
              ((c == '-' || c == '+') && (i == 0 || s[i - 1] == 'e' || s[i - 1] == 'E'));
    if (!ok) throw Error(ErrorCode::ParseError, "malformed decimal '" + s + "'");
    digit_seen |= (c >= '0' && c <= '9');
  }
  if (!digit_seen) throw Error(ErrorCode::ParseError, "malformed decimal '" + s + "'");
  BigScalar out(prec);
  char* end = nullptr;
  if (mpfr_strtofr(out.v_, s.c_str(), &end, 10, MPFR_RNDN), end == nullptr || *end != '\0')
    throw Error(ErrorCode::ParseError, "malformed decimal '" + s + "'");
  return out;
}

BigScalar BigScalar::pow2(long e, Precision prec) {
  BigScalar out(1L, prec);
  mpfr_mul_2si(out.v_, out.v_, e, MPFR_RNDN);
  return out;
}

BigScalar::BigScalar(const BigScalar& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

BigScalar::BigScalar(BigScalar&& other) noexcept {
  // Steal by swapping with a minimal placeholder.
  mpfr_init2(v_, MPFR_PREC_MIN);
  mpfr_swap(v_, other.v_);
}

BigScalar& BigScalar::operator=(const BigScalar& other) {
  if (this != &other) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

BigScalar& BigScalar::operator=(BigScalar&& other) noexcept {
  if (this != &other) mpfr_swap(v_, other.v_);
  return *this;
}

BigScalar::~BigScalar() { mpfr_clear(v_); }

BigScalar BigScalar::at(Precision p) const {
  BigScalar out(p);
  mpfr_set(out.v_, v_, MPFR_RNDN);
  return out;
}

double BigScalar::log2_abs() const {
  if (mpfr_zero_p(v_)) return -std::numeric_limits<double>::infinity();
  long e = 0;
  double m = mpfr_get_d_2exp(&e, v_, MPFR_RNDN);
  return std::log2(std::fabs(m)) + static_cast<double>(e);
}

namespace {

struct MpfrString {
  char* p;
  ~MpfrString() {
    if (p) mpfr_free_str(p);
  }
};

}  // namespace

std::string BigScalar::to_string() const {
  if (mpfr_zero_p(v_)) return "0";
  if (!mpfr_number_p(v_)) return mpfr_nan_p(v_) ? "nan" : (mpfr_sgn(v_) > 0 ? "inf" : "-inf");
  mpfr_exp_t exp10 = 0;
  // Digits sufficient for an exact round trip at this precision.
  std::size_t digits = mpfr_get_str_ndigits(10, mpfr_get_prec(v_));
  MpfrString s{mpfr_get_str(nullptr, &exp10, 10, digits, v_, MPFR_RNDN)};
  std::string mant(s.p);
  bool neg = !mant.empty() && mant[0] == '-';
  if (neg) mant.erase(0, 1);
  while (mant.size() > 1 && mant.back() == '0') mant.pop_back();
  std::string out = neg ? "-" : "";
  out += mant.substr(0, 1);
  if (mant.size() > 1) out += "." + mant.substr(1);
  long e = static_cast<long>(exp10) - 1;
  if (e != 0) out += "e" + std::to_string(e);
  return out;
}

std::string BigScalar::to_fixed(int decimals) const {
  std::string fmt = "%." + std::to_string(decimals) + "RNf";
  int n = mpfr_snprintf(nullptr, 0, fmt.c_str(), v_);
  std::string out(static_cast<std::size_t>(n) + 1, '\0');
  mpfr_snprintf(out.data(), out.size(), fmt.c_str(), v_);
  out.resize(static_cast<std::size_t>(n));
  return out;
}

namespace {

mpfr_prec_t wider(mpfr_srcptr a, mpfr_srcptr b) { return std::max(mpfr_get_prec(a), mpfr_get_prec(b)); }

void widen_to(mpfr_ptr x, mpfr_prec_t p) {
  if (mpfr_get_prec(x) < p) mpfr_prec_round(x, p, MPFR_RNDN);
}

}  // namespace

BigScalar& BigScalar::operator+=(const BigScalar& o) {
  widen_to(v_, mpfr_get_prec(o.v_));
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigScalar& BigScalar::operator-=(const BigScalar& o) {
  widen_to(v_, mpfr_get_prec(o.v_));
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigScalar& BigScalar::operator*=(const BigScalar& o) {
  widen_to(v_, mpfr_get_prec(o.v_));
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigScalar& BigScalar::operator/=(const BigScalar& o) {
  widen_to(v_, mpfr_get_prec(o.v_));
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigScalar operator+(const BigScalar& a, const BigScalar& b) {
  BigScalar out(Precision(wider(a.v_, b.v_)));
  mpfr_add(out.v_, a.v_, b.v_, MPFR_RNDN);
  return out;
}

BigScalar operator-(const BigScalar& a, const BigScalar& b) {
  BigScalar out(Precision(wider(a.v_, b.v_)));
  mpfr_sub(out.v_, a.v_, b.v_, MPFR_RNDN);
  return out;
}

BigScalar operator*(const BigScalar& a, const BigScalar& b) {
  BigScalar out(Precision(wider(a.v_, b.v_)));
  mpfr_mul(out.v_, a.v_, b.v_, MPFR_RNDN);
  return out;
}

BigScalar operator/(const BigScalar& a, const BigScalar& b) {
  BigScalar out(Precision(wider(a.v_, b.v_)));
  mpfr_div(out.v_, a.v_, b.v_, MPFR_RNDN);
  return out;
}

BigScalar operator-(const BigScalar& a) {
  BigScalar out(a.prec());
  mpfr_neg(out.v_, a.v_, MPFR_RNDN);
  return out;
}

BigScalar operator*(const BigScalar& a, long b) {
  BigScalar out(a.prec());
  mpfr_mul_si(out.v_, a.v_, b, MPFR_RNDN);
  return out;
}

BigScalar operator+(const BigScalar& a, long b) {
  BigScalar out(a.prec());
  mpfr_add_si(out.v_, a.v_, b, MPFR_RNDN);
  return out;
}

BigScalar operator-(const BigScalar& a, long b) {
  BigScalar out(a.prec());
  mpfr_sub_si(out.v_, a.v_, b, MPFR_RNDN);
  return out;
}

BigScalar operator-(long a, const BigScalar& b) {
  BigScalar out(b.prec());
  mpfr_si_sub(out.v_, a, b.v_, MPFR_RNDN);
  return out;
}

std::partial_ordering operator<=>(const BigScalar& a, const BigScalar& b) {
  if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.v_, b.v_);
  return c < 0 ? std::partial_ordering::less : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
}

std::partial_ordering operator<=>(const BigScalar& a, long b) {
  if (mpfr_nan_p(a.v_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp_si(a.v_, b);
  return c < 0 ? std::partial_ordering::less : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
}

BigScalar abs(const BigScalar& x) {
  BigScalar out(x.prec());
  mpfr_abs(out.raw(), x.raw(), MPFR_RNDN);
  return out;
}

BigScalar sqrt(const BigScalar& x) {
  BigScalar out(x.prec());
  mpfr_sqrt(out.raw(), x.raw(), MPFR_RNDN);
  return out;
}

BigScalar log(const BigScalar& x) {
  BigScalar out(x.prec());
  mpfr_log(out.raw(), x.raw(), MPFR_RNDN);
  return out;
}

BigScalar exp(const BigScalar& x) {
  BigScalar out(x.prec());
  mpfr_exp(out.raw(), x.raw(), MPFR_RNDN);
  return out;
}

const BigScalar& max(const BigScalar& a, const BigScalar& b) { return a < b ? b : a; }
const BigScalar& min(const BigScalar& a, const BigScalar& b) { return b < a ? b : a; }

double relative_difference(const BigScalar& a, const BigScalar& b) {
  BigScalar scale = max(abs(a), abs(b));
  if (scale.is_zero()) return 0.0;
  return (abs(a - b) / scale).to_double();
}

RInterval::RInterval(BigScalar lo, BigScalar hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (!(lo_ < hi_)) throw Error(ErrorCode::DomainError, "interval with lo >= hi: [" + lo_.to_string() + ", " + hi_.to_string() + "]");
}

RInterval RInterval::symmetric(const BigScalar& r) { return RInterval(-abs(r), abs(r)); }

BigScalar RInterval::midpoint() const {
  BigScalar m = lo_ + hi_;
  mpfr_div_2ui(m.raw(), m.raw(), 1, MPFR_RNDN);
  return m;
}

BigScalar RInterval::boundary_distance(const BigScalar& x) const { return min(abs(x - lo_), abs(hi_ - x)); }

bool RInterval::is_symmetric() const {
  long bits = prec().bits;
  return abs(lo_ + hi_) <= BigScalar::pow2(-(bits - 16), prec()) * length();
}

RInterval RInterval::folded() const {
  if (lo_.sign() >= 0) return *this;
  if (hi_.sign() <= 0) return mirrored();
  throw Error(ErrorCode::DomainError, "folding an interval that contains 0");
}

}  // namespace prinest
