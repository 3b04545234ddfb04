#pragma once

// Brute-force reference computations for tests. Deliberately shares no code
// with the library: Boost.Multiprecision instead of the MPFR wrapper, forward
// iteration and outward search instead of branch inverses.

#include <boost/multiprecision/mpfr.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Real = boost::multiprecision::mpfr_float;

struct Interval {
  Real lo, hi;
  bool inside(const Real& x) const { return lo < x && x < hi; }
  Real length() const { return hi - lo; }
};

class Orbit {
 public:
  Orbit(const std::string& a, unsigned digits10) : digits_(digits10) {
    Real::default_precision(digits10);
    a_ = Real(a);
    pts_.push_back(Real(0));
  }
  const Real& a() const { return a_; }
  Real f(const Real& x) const { return 1 - a_ + a_ * x * x; }
  Real fn(Real x, long m) const {
    for (long j = 0; j < m; ++j) x = f(x);
    return x;
  }
  const Real& at(long k) {
    while (static_cast<long>(pts_.size()) <= k) pts_.push_back(f(pts_.back()));
    return pts_[static_cast<std::size_t>(k)];
  }

 private:
  unsigned digits_;
  Real a_;
  std::vector<Real> pts_;
};

// y belongs to the first-return domain with return time S of I.
inline bool first_return(const Orbit& o, Real y, long S, const Interval& I) {
  for (long j = 1; j < S; ++j) {
    y = o.f(y);
    if (I.inside(y)) return false;
  }
  return I.inside(o.f(y)) || (S == 0);
}

// Endpoint of the component of {pred} containing x in direction dir (+1/-1):
// geometric outward walk, then bisection.
template <class Pred>
Real component_edge(const Real& x, int dir, const Real& scale, Pred pred) {
  Real step = scale * Real("1e-30");
  // Components thinner than the first probe: shrink until the probe is inside.
  for (int i = 0; i < 4000 && !pred(x + dir * step); ++i) step /= 16;
  Real in = x;
  Real out = x;
  for (int i = 0; i < 5000; ++i) {
    Real y = x + dir * step;
    if (!pred(y)) {
      out = y;
      break;
    }
    in = y;
    step *= Real("1.04");
  }
  for (int i = 0; i < 400; ++i) {
    Real m = (in + out) / 2;
    if (pred(m))
      in = m;
    else
      out = m;
  }
  return in;
}

struct Nest {
  std::vector<Interval> I;
  std::vector<long> r;
  std::vector<int> central;  // -1 for level 0
};

// Principal nest by naive scans. Stops early when a landing is not found.
inline Nest principal_nest(Orbit& o, int depth, long cap) {
  Nest out;
  Real al = (1 - o.a()) / o.a();
  out.I.push_back({al, -al});
  out.r.push_back(0);
  out.central.push_back(-1);
  for (int n = 1; n <= depth; ++n) {
    const Interval prev = out.I.back();
    long r = -1;
    for (long k = 1; k <= cap; ++k) {
      if (prev.inside(o.at(k))) {
        r = k;
        break;
      }
    }
    if (r < 0) break;
    // f^r is even; the component around 0 is [-R, R].
    auto pred = [&](const Real& y) { return first_return(o, y, r, prev); };
    Real R = component_edge(Real(0), +1, prev.length(), pred);
    Interval In{-R, R};
    out.I.push_back(In);
    out.r.push_back(r);
    out.central.push_back(In.inside(o.at(r)) ? 1 : 0);
  }
  return out;
}

struct Domain {
  Interval D;
  long return_time;
  long witness;  // orbit index of the first visit producing it
};

// All first-return domains of I witnessed by orbit visits 0 = t_0 < t_1 < ... <= cap,
// deduplicated.
inline std::vector<Domain> return_domains(Orbit& o, const Interval& I, long cap) {
  std::vector<long> visits{0};
  for (long k = 1; k <= cap; ++k)
    if (I.inside(o.at(k))) visits.push_back(k);
  std::vector<Domain> out;
  for (std::size_t i = 0; i + 1 < visits.size(); ++i) {
    const Real& x = o.at(visits[i]);
    bool seen = false;
    for (const Domain& d : out)
      if (d.D.lo <= x && x <= d.D.hi) seen = true;
    if (seen) continue;
    long S = visits[i + 1] - visits[i];
    auto pred = [&](const Real& y) { return first_return(o, y, S, I); };
    Real lo = component_edge(x, -1, I.length(), pred);
    Real hi = component_edge(x, +1, I.length(), pred);
    out.push_back({{lo, hi}, S, visits[i]});
  }
  return out;
}

inline double rel(const Real& a, const Real& b, const Real& scale) {
  return static_cast<double>(abs(a - b) / scale);
}

}  // namespace oracle
