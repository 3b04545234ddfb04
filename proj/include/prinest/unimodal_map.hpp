#pragma once

// The normalized quadratic family f_a(x) = 1 - a + a x^2 on [-1, 1].

#include <string>
#include <string_view>

#include "prinest/big_scalar.hpp"

namespace prinest {

enum class Lap { Left, Right };

class UnimodalMap {
 public:
  /// Parameter as written by the user; re-rounded whenever a new precision is requested.
  const std::string& parameter_text() const { return text_; }
  const BigScalar& a() const { return a_; }
  Precision prec() const { return a_.prec(); }

  /// Same map with the parameter re-read at another precision.
  UnimodalMap at_precision(Precision p) const;

  friend UnimodalMap make_map(std::string_view a, Precision prec);

 private:
  UnimodalMap(std::string text, BigScalar a) : text_(std::move(text)), a_(std::move(a)) {}

  std::string text_;
  BigScalar a_;
};

/// Throws ParseError, ParameterOutOfRange (a must lie in (3/2, 2]).
UnimodalMap make_map(std::string_view a, Precision prec = Precision{});

/// order 0: f(x), 1: f'(x), 2: f''(x). Throws DomainError for |x| > 1 beyond rounding slack.
BigScalar eval(const UnimodalMap& f, const BigScalar& x, int order = 0);

/// f(x) without the domain check; used on hot paths where x is known to be an orbit point.
BigScalar apply(const UnimodalMap& f, const BigScalar& x);

/// alpha = (1 - a)/a
BigScalar alpha_fixed_point(const UnimodalMap& f);

BigScalar critical_value(const UnimodalMap& f);

/// Preimage of y on the requested lap. Throws NoPreimage when y < f(0).
BigScalar branch_inverse(const UnimodalMap& f, const BigScalar& y, Lap side);

/// Sf(x) = -3/(2x^2). Throws SingularAtCritical near 0.
BigScalar schwarzian(const UnimodalMap& f, const BigScalar& x);

}  // namespace prinest
