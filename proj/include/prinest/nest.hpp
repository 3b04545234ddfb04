#pragma once

// Principal nest I^0 ⊃ I^1 ⊃ ... around the critical point.
//
// Level n stores I^n, the landing time r_n of 0 in I^{n-1} and the central
// flag g_n(0) = f^{r_n}(0) ∈ int I^n. Level 0 is [alpha, -alpha] with r = 0 and
// no flag.

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "prinest/big_scalar.hpp"
#include "prinest/orbit.hpp"
#include "prinest/unimodal_map.hpp"

namespace prinest {

enum class Termination { None, NonRecurrent, Renormalizable, PrecisionExhausted };
std::string_view to_string(Termination t);

struct NestLevel {
  long n = 0;
  RInterval T;
  long r = 0;
  std::optional<bool> central;
  Termination terminated_by = Termination::None;
};

struct NestOptions {
  long orbit_cap = 1'000'000;
  long prec_max = 4096;
  long persistence = 64;
};

struct Nest {
  UnimodalMap map;
  BigScalar alpha;
  std::vector<NestLevel> levels;
  NestOptions options;
  // Orbit at the precision the nest was finally built with.
  std::shared_ptr<OrbitCache> orbit;

  Precision prec() const { return map.prec(); }
  Termination termination() const { return levels.back().terminated_by; }
  /// Deepest level index built.
  long depth() const { return static_cast<long>(levels.size()) - 1; }
};

enum class Centrality { Central, NonCentral };

/// Builds levels 1..max_levels beyond I^0. Raises precision from f.prec() by
/// doubling on ambiguity or exhausted orbits, and whenever the level sizes ask
/// for more than 128 + 8*sum log2(1/lambda) bits.
Nest build_nest(const UnimodalMap& f, long max_levels, long cap, NestOptions options = {});
Nest build_nest(const UnimodalMap& f, long max_levels = 16);

/// Throws NotBuilt when level n was not built or carries no classification.
Centrality classify_level(const Nest& nest, long n);

/// lambda_n = |I^n| / |I^{n-1}| for n = 1..depth.
std::vector<BigScalar> scaling_factors(const Nest& nest);

/// Levels n >= 1 whose return g_n(0) is not in I^n.
std::vector<long> noncentral_levels(const Nest& nest);

/// Bits required by the precision schedule for the given levels.
long required_bits(const std::vector<NestLevel>& levels);

}  // namespace prinest
