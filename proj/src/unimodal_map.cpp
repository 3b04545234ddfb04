#include "prinest/unimodal_map.hpp"

#include "prinest/error.hpp"

namespace prinest {

UnimodalMap make_map(std::string_view a, Precision prec) {
  BigScalar value = BigScalar::parse(a, prec);
  // Compare against 3/2 exactly: 2a > 3.
  if (!(value * 2 > 3L) || value > 2L)
    throw Error(ErrorCode::ParameterOutOfRange, "a = " + std::string(a) + " outside (3/2, 2]");
  return UnimodalMap(std::string(a), std::move(value));
}

UnimodalMap UnimodalMap::at_precision(Precision p) const {
  if (p == prec()) return *this;
  return UnimodalMap(text_, BigScalar::parse(text_, p));
}

BigScalar apply(const UnimodalMap& f, const BigScalar& x) {
  BigScalar y = x * x;
  y *= f.a();
  y -= f.a();
  return y + 1L;
}

BigScalar eval(const UnimodalMap& f, const BigScalar& x, int order) {
  Precision p = std::max(f.prec(), x.prec());
  if (abs(x) > BigScalar(1L, p) + BigScalar::pow2(-(p.bits - 8), p))
    throw Error(ErrorCode::DomainError, "x = " + x.to_string() + " outside [-1, 1]");
  switch (order) {
    case 0: return apply(f, x);
    case 1: return f.a() * x * 2L;
    case 2: return f.a().at(p) * 2L;
    default: throw Error(ErrorCode::DomainError, "derivative order must be 0, 1 or 2");
  }
}

BigScalar alpha_fixed_point(const UnimodalMap& f) { return (1L - f.a()) / f.a(); }

BigScalar critical_value(const UnimodalMap& f) { return 1L - f.a(); }

BigScalar branch_inverse(const UnimodalMap& f, const BigScalar& y, Lap side) {
  BigScalar v = (y - 1L + f.a()) / f.a();
  if (v.sign() < 0) {
    // Allow rounding noise right at the critical value.
    Precision p = std::max(f.prec(), y.prec());
    if (abs(v) > BigScalar::pow2(-(p.bits - 8), p))
      throw Error(ErrorCode::NoPreimage, "y = " + y.to_string() + " below the critical value");
    v = BigScalar(p);
  }
  BigScalar x = sqrt(v);
  return side == Lap::Right ? x : -x;
}

BigScalar schwarzian(const UnimodalMap& f, const BigScalar& x) {
  Precision p = std::max(f.prec(), x.prec());
  if (abs(x) < BigScalar::pow2(-(p.bits / 2), p))
    throw Error(ErrorCode::SingularAtCritical, "Schwarzian at x = " + x.to_string());
  BigScalar x2 = x * x * 2L;
  return BigScalar(-3L, p) / x2;
}

}  // namespace prinest
