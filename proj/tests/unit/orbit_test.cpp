#include <gtest/gtest.h>

#include <cmath>

#include "prinest/error.hpp"
#include "prinest/orbit.hpp"

using namespace prinest;

namespace {

double d(const BigScalar& x) { return x.to_double(); }

BigScalar num(const char* s, Precision p = Precision{}) { return BigScalar::parse(s, p); }

RInterval iv(const char* lo, const char* hi, Precision p = Precision{}) { return RInterval(num(lo, p), num(hi, p)); }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

}  // namespace

TEST(Iterate, FullMapOrbit) {
  OrbitCache c(make_map("2"));
  EXPECT_EQ(d(c.iterate(0)), 0.0);
  EXPECT_EQ(d(c.iterate(1)), -1.0);
  EXPECT_EQ(d(c.iterate(2)), 1.0);
  EXPECT_EQ(d(c.iterate(3)), 1.0);
  EXPECT_EQ(d(c.iterate(999999)), 1.0);
}

TEST(Iterate, ChaoticOrbitExhaustsPrecision) {
  // a = 1.99 has a positive Lyapunov exponent: 64 bits last for a bounded number of iterates.
  OrbitCache c(make_map("1.99", Precision(64)));
  EXPECT_EQ(code_of([&] { c.iterate(100000); }), ErrorCode::PrecisionExhausted);
  EXPECT_TRUE(c.trusted(5));
}

TEST(Iterate, ErrorEstimateBoundedInsideHorizon) {
  OrbitCache c(make_map("1.9", Precision(256)));
  for (long k = 0; k < 60; ++k) {
    if (!c.trusted(k)) break;
    EXPECT_LE(c.error_log2(k), -128.0);
  }
}

TEST(FirstLanding, Examples) {
  OrbitCache c(make_map("2"));
  LandingResult r = first_landing_time(c, iv("-0.5", "0.5"), 1000000);
  EXPECT_EQ(r.kind, LandingResult::Kind::NonRecurrent);
  r = first_landing_time(c, iv("-1", "1"), 1000000);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.time, 1);
}

TEST(FirstLanding, Minimality) {
  for (const char* a : {"1.87", "1.9", "1.95", "1.956203499571624051414212184609857869"}) {
    OrbitCache c(make_map(a, Precision(256)));
    BigScalar al = alpha_fixed_point(c.map());
    RInterval I0(al, -al);
    LandingResult r = first_landing_time(c, I0, 10000);
    ASSERT_TRUE(r.ok()) << a;
    EXPECT_TRUE(I0.contains_interior(c.iterate(r.time)));
    for (long k = 1; k < r.time; ++k) EXPECT_FALSE(I0.contains(c.iterate(k))) << a << " k=" << k;
  }
}

TEST(FirstLanding, AmbiguousAtBoundary) {
  // An interval edge placed within rounding distance of an orbit point that carries error.
  UnimodalMap f = make_map("1.9", Precision(128));
  OrbitCache c(f);
  BigScalar x3 = c.iterate(3);
  RInterval J(x3 - BigScalar(0.01, f.prec()), x3 + BigScalar::pow2(-120, f.prec()));
  LandingResult r = next_visit(c, J, 2, 10);
  EXPECT_EQ(r.kind, LandingResult::Kind::Ambiguous);
  EXPECT_EQ(r.time, 3);
  RInterval K(x3 - BigScalar(0.01, f.prec()), x3 + BigScalar::pow2(-20, f.prec()));
  r = next_visit(c, K, 2, 10);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.time, 3);
}

TEST(Pullback, Examples) {
  UnimodalMap f = make_map("2");
  OrbitCache c(f);
  RInterval I = iv("-1", "1");
  RInterval J0 = pullback_component(f, 0, I, c);
  EXPECT_TRUE(J0.lo() == I.lo() && J0.hi() == I.hi());

  RInterval J = pullback_component(f, 1, iv("-1", "0"), c);
  EXPECT_NEAR(d(J.lo()), -1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(d(J.hi()), 1 / std::sqrt(2.0), 1e-15);

  EXPECT_EQ(code_of([&] { pullback_component(f, 1, iv("-0.5", "0.5"), c); }), ErrorCode::PullbackEscapes);
}

TEST(PullbackAlongSegment, Examples) {
  UnimodalMap f = make_map("2");
  RInterval I = iv("0", "1");
  RInterval J = pullback_along_segment(f, 0, I, num("0.3"));
  EXPECT_TRUE(J.lo() == I.lo());
  J = pullback_along_segment(f, 1, I, num("-0.9"));
  EXPECT_EQ(d(J.lo()), -1.0);
  EXPECT_NEAR(d(J.hi()), -1 / std::sqrt(2.0), 1e-15);
}

TEST(PullbackAlongSegment, CompositionIdentity) {
  UnimodalMap f = make_map("1.93", Precision(192));
  Precision p = f.prec();
  BigScalar x = num("0.61", p);
  BigScalar tol = BigScalar::pow2(-(p.bits - 24), p);
  for (long r = 1; r <= 8; ++r) {
    BigScalar y = iterate_point(f, x, r);
    RInterval target(y - num("0.001", p), y + num("0.001", p));
    RInterval whole = pullback_along_segment(f, r, target, x);
    RInterval last = pullback_along_segment(f, 1, target, iterate_point(f, x, r - 1));
    RInterval split = pullback_along_segment(f, r - 1, last, x);
    EXPECT_LE(abs(whole.lo() - split.lo()), tol * whole.length()) << r;
    EXPECT_LE(abs(whole.hi() - split.hi()), tol * whole.length()) << r;
  }
}

class PullbackProperties : public ::testing::TestWithParam<const char*> {};

// Pull I^0 back along the first landing and check boundary equivariance,
// interior mapping, one-lap steps and precision stability.
TEST_P(PullbackProperties, FirstLandingPullback) {
  for (long bits : {128L, 256L}) {
    UnimodalMap f = make_map(GetParam(), Precision(bits));
    Precision p = f.prec();
    OrbitCache c(f);
    BigScalar al = alpha_fixed_point(f);
    RInterval I0(al, -al);
    LandingResult r = first_landing_time(c, I0, 10000);
    ASSERT_TRUE(r.ok());
    RInterval J = pullback_component(f, r.time, I0, c);
    EXPECT_TRUE(J.is_symmetric());
    BigScalar tol = BigScalar::pow2(-(bits - 16), p) * I0.length();
    BigScalar e1 = iterate_point(f, J.lo(), r.time);
    BigScalar e2 = iterate_point(f, J.hi(), r.time);
    EXPECT_TRUE(I0.boundary_distance(e1) <= tol);
    EXPECT_TRUE(I0.boundary_distance(e2) <= tol);
    for (int i = 1; i <= 8; ++i) {
      BigScalar x = J.lo() + J.length() * BigScalar(static_cast<long>(i), p) / BigScalar(9L, p);
      EXPECT_TRUE(I0.contains(iterate_point(f, x, r.time)));
    }
    EXPECT_TRUE(I0.contains(iterate_point(f, J.midpoint(), r.time)));

    // Each single step lies in one lap or is a symmetric interval around 0.
    RInterval K = I0;
    for (long j = r.time; j > 0; --j) {
      K = pullback_orbit_segment(c, j - 1, r.time, I0);
      EXPECT_TRUE(K.lo().sign() >= 0 || K.hi().sign() <= 0 || K.is_symmetric());
    }

    UnimodalMap g = f.at_precision(p.doubled());
    OrbitCache cg(g);
    RInterval I0g(alpha_fixed_point(g), -alpha_fixed_point(g));
    RInterval Jg = pullback_component(g, r.time, I0g, cg);
    BigScalar rel = BigScalar::pow2(-(bits - 16), p);
    EXPECT_LE(abs(Jg.hi() - J.hi()), rel * abs(J.hi()));
  }
}

INSTANTIATE_TEST_SUITE_P(Family, PullbackProperties,
                         ::testing::Values("1.87", "1.9", "1.93", "1.95", "1.956203499571624051414212184609857869",
                                           "1.99"));
