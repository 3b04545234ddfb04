#pragma once

// Generalized renormalization of a nest level: return-map branches, the
// landing family of a central cascade, the Bernoulli map G_n and its
// combinatorics.
//
// Two labelings coexist. Branch labels follow the real line (0 = central).
// Landing-family and next-level labels live on the folded line x -> |x|: f is
// even, so an interval and its mirror image have identical dynamics and only
// one of them is usually witnessed by the critical orbit.

#include <optional>
#include <string>
#include <vector>

#include "prinest/big_scalar.hpp"
#include "prinest/nest.hpp"

namespace prinest {

struct Branch {
  int label = 0;
  RInterval domain;
  long return_time = 0;
  int orientation = 1;
  // Orbit index of the visit that witnessed this domain.
  long entry_level_point = 0;
};

inline constexpr long kInfiniteTransit = -1;

struct LandingInterval {
  int label = 0;
  RInterval domain;
  // kInfiniteTransit for the central interval of a non-cascade level.
  long transit_time = 0;
  // Real-line label of the return-map branch reached after the transit.
  int target_branch = 0;
  // Total number of f-steps of G_n on this interval.
  long f_time = 0;
  long witness = 0;
};

struct RenormOptions {
  // Largest orbit index scanned for visits; 0 means 2 * (r_1 + ... + r_depth),
  // clipped to the nest's orbit cap.
  long visit_cap = 0;
  long return_cap = 10'000;
};

/// Everything the critical orbit witnesses at one level.
struct LevelAnalysis {
  long level = 0;
  std::vector<Branch> branches;  // sorted by label
  int folded_branch_count = 0;
  long cascade_length = 0;
  std::vector<LandingInterval> family;  // sorted by label
  // Next-level domains (pullbacks of L_0 along first returns of G_n), folded labels.
  std::vector<RInterval> next_domains;
  std::vector<std::vector<int>> itineraries;
  std::vector<long> depths;
  // Visits scanned, and whether the scan stopped at the precision horizon.
  long visits = 0;
  bool truncated = false;
};

struct CombinatoricsRecord {
  long level = 0;
  long branch_count = 0;
  std::vector<int> ordering;
  std::vector<std::vector<int>> itineraries;
  std::vector<long> depths;
  std::vector<long> transit_times;

  friend bool operator==(const CombinatoricsRecord&, const CombinatoricsRecord&) = default;
};

struct EssentialBound {
  long branch_count_bound = 0;
  long depth_bound = 0;
  long return_time_bound = 0;
  bool branch_count_growing = false;
  bool depth_growing = false;
  bool return_time_growing = false;

  bool essentially_unbounded() const { return branch_count_growing || depth_growing || return_time_growing; }
};

/// Return-map domains of g_n : ∪ I^n_i -> I^{n-1} witnessed by the critical orbit.
/// Throws CapExceeded when fewer than two branches are found.
std::vector<Branch> return_map_domains(const Nest& nest, long n, long cap);
/// Same, over the default witness window (or opt.visit_cap when set).
std::vector<Branch> return_map_domains(const Nest& nest, long n, RenormOptions opt = {});

/// Length of the central cascade starting at level n and its landing family.
/// Throws EscapeNotFound when the cascade runs to the end of the nest.
std::pair<long, std::vector<LandingInterval>> cascade_structure(const Nest& nest, long n_start,
                                                                RenormOptions opt = {});

struct BernoulliStep {
  int label = 0;
  BigScalar image;
};

/// One step of G_n. Throws NotInDomain for points in gaps.
BernoulliStep bernoulli_map_apply(const Nest& nest, long n, const BigScalar& x, RenormOptions opt = {});
BernoulliStep bernoulli_map_apply(const LevelAnalysis& level, const UnimodalMap& f, const BigScalar& x);

LevelAnalysis analyze_level(const Nest& nest, long n, RenormOptions opt = {});

/// Requires level n+1 to exist. Throws CapExceeded for itineraries longer than the return cap.
CombinatoricsRecord combinatorics(const Nest& nest, long n, RenormOptions opt = {});
CombinatoricsRecord to_record(const LevelAnalysis& level);

/// Equality after deleting every label deeper than the cutoff and renumbering.
bool essentially_equivalent(const CombinatoricsRecord& k1, const CombinatoricsRecord& k2, long depth_cutoff);

/// Restriction used by essentially_equivalent.
CombinatoricsRecord essential_part(const CombinatoricsRecord& k, long depth_cutoff);

/// Componentwise maxima; a component "grows" when it strictly increases over
/// three consecutive records.
EssentialBound essential_bound(const std::vector<CombinatoricsRecord>& records);

}  // namespace prinest
