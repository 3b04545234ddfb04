#include "prinest/orbit.hpp"

#include <cmath>

#include "prinest/error.hpp"

namespace prinest {

namespace {

// 2^ceil(e) + 2 bits of headroom: a cheap upper bound for 4 * 2^e.
BigScalar error_bound(double err_log2, Precision p) {
  if (std::isinf(err_log2)) return BigScalar(p);
  return BigScalar::pow2(static_cast<long>(std::ceil(err_log2)) + 2, p);
}

BigScalar relative_slack(const RInterval& I, Precision p) {
  return BigScalar::pow2(-(p.bits - 16), p) * I.length();
}

}  // namespace

OrbitCache::OrbitCache(const UnimodalMap& f) : f_(f), shadow_(f.at_precision(f.prec().doubled())) {
  points_.emplace_back(0L, f_.prec());
  shadow_points_.emplace_back(0L, shadow_.prec());
  err_.push_back(-std::numeric_limits<double>::infinity());
}

void OrbitCache::extend_to(long k) {
  if (fixed_from_ >= 0) return;
  const long bits = f_.prec().bits;
  const double limit = -static_cast<double>(bits) / 2.0;
  while (computed() <= k && computed() <= exhausted_at_) {
    BigScalar next = apply(f_, points_.back());
    BigScalar next_shadow = apply(shadow_, shadow_points_.back());
    BigScalar diff = next_shadow - next;
    double e = diff.log2_abs();
    if (next == points_.back() && next_shadow == shadow_points_.back()) {
      fixed_from_ = computed() - 1;
      return;
    }
    points_.push_back(std::move(next));
    shadow_points_.push_back(std::move(next_shadow));
    err_.push_back(e);
    if (e > limit) exhausted_at_ = computed() - 1;
  }
}

bool OrbitCache::trusted(long k) {
  extend_to(k);
  return k < exhausted_at_;
}

const BigScalar& OrbitCache::iterate(long k) {
  if (k < 0) throw Error(ErrorCode::DomainError, "negative iterate index");
  if (!trusted(k))
    throw Error(ErrorCode::PrecisionExhausted,
                "orbit point " + std::to_string(k) + " not reliable at " + std::to_string(prec().bits) + " bits");
  return points_[static_cast<std::size_t>(stored_index(k))];
}

double OrbitCache::error_log2(long k) {
  iterate(k);
  return err_[static_cast<std::size_t>(stored_index(k))];
}

Membership OrbitCache::classify(long k, const RInterval& I) {
  const BigScalar& x = iterate(k);
  double e = err_[static_cast<std::size_t>(stored_index(k))];
  if (std::isinf(e)) return I.contains(x) ? Membership::Inside : Membership::Outside;
  Precision p = prec();
  BigScalar slack = error_bound(e, p) + relative_slack(I, p);
  if (I.boundary_distance(x) <= slack) return Membership::Ambiguous;
  return I.contains(x) ? Membership::Inside : Membership::Outside;
}

LandingResult next_visit(OrbitCache& cache, const RInterval& I, long from, long cap) {
  for (long k = from + 1; k <= cap; ++k) {
    Membership m = cache.classify(k, I);
    if (m == Membership::Inside) return LandingResult::landed(k);
    if (m == Membership::Ambiguous) return LandingResult::ambiguous(k);
    // An exactly fixed orbit repeats the same verdict forever.
    if (k > cache.computed()) break;
  }
  return LandingResult::non_recurrent();
}

LandingResult first_landing_time(OrbitCache& cache, const RInterval& I, long cap) {
  if (cap < 1) throw Error(ErrorCode::ConfigError, "landing cap must be >= 1");
  return next_visit(cache, I, 0, cap);
}

RInterval pull_back_once(const UnimodalMap& f, const RInterval& J, const BigScalar& p, const BigScalar& slack) {
  BigScalar c = critical_value(f);
  if (J.hi() < c) throw Error(ErrorCode::PullbackEscapes, "interval below the critical value has no preimage");
  if (J.lo() <= c) {
    BigScalar R = branch_inverse(f, J.hi(), Lap::Right);
    if (abs(p) > R + slack)
      throw Error(ErrorCode::PullbackEscapes, "point " + p.to_string() + " outside central preimage");
    return RInterval(-R, R);
  }
  if (p.is_zero()) throw Error(ErrorCode::PullbackEscapes, "critical point maps outside the interval");
  BigScalar a = branch_inverse(f, J.lo(), Lap::Right);
  BigScalar b = branch_inverse(f, J.hi(), Lap::Right);
  RInterval comp = p.sign() > 0 ? RInterval(std::move(a), std::move(b)) : RInterval(-b, -a);
  if (p < comp.lo() - slack || p > comp.hi() + slack)
    throw Error(ErrorCode::PullbackEscapes, "point " + p.to_string() + " outside lap preimage");
  return comp;
}

namespace {

// Backward steps near the critical value cancel about 2*log2(1/|J|) bits, so
// pullbacks run with guard bits. The result keeps them: a short interval far
// from 0 would lose its relative accuracy if rounded back to p.
long guard_bits(const RInterval& J, long steps) {
  double small = std::max(0.0, -J.length().log2_abs());
  return 64 + static_cast<long>(std::ceil(2 * small + 2 * std::log2(static_cast<double>(steps) + 1)));
}

RInterval round_to(const RInterval& J, Precision p) { return RInterval(J.lo().at(p), J.hi().at(p)); }

}  // namespace

RInterval pullback_orbit_segment(OrbitCache& cache, long k, long r, const RInterval& I) {
  if (r < k) throw Error(ErrorCode::DomainError, "pullback segment with r < k");
  Precision p = cache.prec();
  long guard = guard_bits(I, r - k);
  while (true) {
    Precision pg(std::max(p.bits + guard, I.prec().bits));
    UnimodalMap fg = cache.map().at_precision(pg);
    RInterval J = round_to(I, pg);
    for (long j = r; j > k; --j) {
      const BigScalar& x = cache.iterate(j - 1);
      BigScalar slack = error_bound(cache.error_log2(j - 1), p) + relative_slack(J, p);
      J = pull_back_once(fg, J, x, slack);
    }
    long need = guard_bits(J, r - k);
    if (need <= guard) return J;
    guard = need;
  }
}

RInterval pullback_component(const UnimodalMap& f, long r, const RInterval& I, OrbitCache& cache) {
  if (f.parameter_text() != cache.map().parameter_text())
    throw Error(ErrorCode::DomainError, "orbit cache belongs to a different map");
  return pullback_orbit_segment(cache, 0, r, I);
}

RInterval pullback_along_segment(const UnimodalMap& f, long steps, const RInterval& I, const BigScalar& p) {
  Precision prec = std::max(f.prec(), I.prec());
  long guard = guard_bits(I, steps);
  while (true) {
    Precision pg(std::max(prec.bits + guard, I.prec().bits));
    UnimodalMap fg = f.at_precision(pg);
    std::vector<BigScalar> pts;
    pts.reserve(static_cast<std::size_t>(steps));
    BigScalar x = p.at(pg);
    for (long j = 0; j < steps; ++j) {
      pts.push_back(x);
      x = apply(fg, x);
    }
    RInterval J = round_to(I, pg);
    for (long j = steps; j > 0; --j)
      J = pull_back_once(fg, J, pts[static_cast<std::size_t>(j - 1)], relative_slack(J, prec));
    long need = guard_bits(J, steps);
    if (need <= guard) return J;
    guard = need;
  }
}

BigScalar iterate_point(const UnimodalMap& f, BigScalar x, long m) {
  for (long j = 0; j < m; ++j) x = apply(f, x);
  return x;
}

BigScalar iterate_derivative(const UnimodalMap& f, BigScalar x, long m) {
  BigScalar d(1L, std::max(f.prec(), x.prec()));
  BigScalar two_a = f.a() * 2L;
  for (long j = 0; j < m; ++j) {
    d *= two_a * x;
    x = apply(f, x);
  }
  return d;
}

}  // namespace prinest
