#pragma once

// Critical orbit with a built-in error estimate, landing times and pullbacks.
//
// Every orbit point is computed twice: at the working precision p and on a
// shadow orbit at 2p (parameter re-read from its decimal text). Their
// difference is the error estimate used by membership tests. Once it exceeds
// 2^-(p/2) the orbit is considered exhausted at p.

#include <cstdint>
#include <limits>
#include <vector>

#include "prinest/big_scalar.hpp"
#include "prinest/unimodal_map.hpp"

namespace prinest {

enum class Membership { Outside, Inside, Ambiguous };

struct LandingResult {
  enum class Kind { Time, NonRecurrent, Ambiguous };
  Kind kind = Kind::NonRecurrent;
  long time = 0;

  static LandingResult landed(long t) { return {Kind::Time, t}; }
  static LandingResult non_recurrent() { return {Kind::NonRecurrent, 0}; }
  static LandingResult ambiguous(long t) { return {Kind::Ambiguous, t}; }
  bool ok() const { return kind == Kind::Time; }
};

class OrbitCache {
 public:
  explicit OrbitCache(const UnimodalMap& f);

  const UnimodalMap& map() const { return f_; }
  Precision prec() const { return f_.prec(); }

  /// f^k(0). Throws PrecisionExhausted past the trusted horizon.
  const BigScalar& iterate(long k);
  /// log2 of |x_k(p) - x_k(2p)|, -inf when they agree exactly.
  double error_log2(long k);
  /// True when x_k is within the trusted horizon (extends the cache as needed).
  bool trusted(long k);
  /// Number of points computed so far (or the first untrusted index once exhausted).
  long computed() const { return static_cast<long>(points_.size()); }

  /// Interior membership of x_k with boundary slack 4*err + 2^-(bits-16)|I|.
  /// Orbit points carrying no measurable error are tested exactly against the closed interval.
  Membership classify(long k, const RInterval& I);

 private:
  void extend_to(long k);
  long stored_index(long k) const { return fixed_from_ >= 0 && k > fixed_from_ ? fixed_from_ : k; }

  UnimodalMap f_;
  UnimodalMap shadow_;
  std::vector<BigScalar> points_;
  std::vector<BigScalar> shadow_points_;
  std::vector<double> err_;
  // The orbit became an exact fixed point from this index on (e.g. a = 2).
  long fixed_from_ = -1;
  // First index whose error exceeded tolerance.
  long exhausted_at_ = std::numeric_limits<long>::max();
};

/// Smallest r > from with x_r inside I, scanning up to index `cap`.
/// Ambiguous when an orbit point grazes the boundary first.
/// Throws PrecisionExhausted if the trusted horizon ends before a decision.
LandingResult next_visit(OrbitCache& cache, const RInterval& I, long from, long cap);

/// Minimal r >= 1 with f^r(0) in I (r <= cap).
LandingResult first_landing_time(OrbitCache& cache, const RInterval& I, long cap);

/// Component of f^-1(J) containing p. Throws PullbackEscapes.
/// `slack` widens the containment check of p.
RInterval pull_back_once(const UnimodalMap& f, const RInterval& J, const BigScalar& p, const BigScalar& slack);

/// Component of f^-(r-k)(I) containing x_k, pulled back along cached orbit points.
RInterval pullback_orbit_segment(OrbitCache& cache, long k, long r, const RInterval& I);

/// Component of f^-r(I) containing 0.
RInterval pullback_component(const UnimodalMap& f, long r, const RInterval& I, OrbitCache& cache);

/// Component of f^-steps(I) containing an arbitrary base point p.
RInterval pullback_along_segment(const UnimodalMap& f, long steps, const RInterval& I, const BigScalar& p);

/// f^m(x) at the precision of x and f.
BigScalar iterate_point(const UnimodalMap& f, BigScalar x, long m);

/// (f^m)'(x) by the chain rule.
BigScalar iterate_derivative(const UnimodalMap& f, BigScalar x, long m);

}  // namespace prinest
