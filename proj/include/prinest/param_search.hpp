#pragma once

// Kneading sequences of the critical value, Hofbauer kneading maps, and
// parameter searches by bisection in the kneading order.

#include <string>
#include <vector>

#include "prinest/big_scalar.hpp"
#include "prinest/nest.hpp"
#include "prinest/renorm.hpp"
#include "prinest/unimodal_map.hpp"

namespace prinest {

struct KneadingSequence {
  std::string symbols;  // over {L, C, R}; C only as the last symbol
  long length() const { return static_cast<long>(symbols.size()); }
};

struct KneadingOptions {
  long prec_max = 16384;
};

/// Symbol k (k = 1..length) is the side of f^k(0). C when |f^k(0)| <= 2^-(p-8)
/// at the map's precision p; the orbit is recomputed at doubled precision while
/// its error bound covers 0. Throws PrecisionExhausted past prec_max.
KneadingSequence kneading_sequence(const UnimodalMap& f, long length, KneadingOptions opt = {});

/// Order of the points with these itineraries: -1, 0, 1. L reverses orientation.
/// A proper prefix compares equal.
int kneading_compare(std::string_view u, std::string_view v);

/// Q(k) = prefix[k-1] for k <= prefix.size(), max(k - tail, 0) afterwards.
struct KneadingMap {
  std::vector<long> prefix;
  long tail = 2;
  long operator()(long k) const;
};

/// S_0 = 1, S_k = S_{k-1} + S_{Q(k)}, while S_k <= upto.
std::vector<long> cutting_times(const KneadingMap& Q, long upto);
/// Kneading sequence of the map with kneading map Q.
std::string kneading_from_map(const KneadingMap& Q, long length);
/// Q(k) < k and the shifted-tail condition, checked for k <= horizon.
bool admissible(const KneadingMap& Q, long horizon = 64);

/// Checks labels, ordering and itineraries; the message says what is wrong.
bool admissible(const std::vector<CombinatoricsRecord>& records, std::string* why = nullptr);

struct SearchTarget {
  enum class Kind { Named, ExplicitRecords, KneadingPrefix, KneadingMap };
  Kind kind = Kind::Named;
  std::string name;                          // Named: "fibonacci"
  std::vector<CombinatoricsRecord> records;  // ExplicitRecords: levels 1..records.size()
  std::string prefix;                        // KneadingPrefix
  KneadingMap kmap;                          // KneadingMap
  long depth = 8;                            // levels verified for Named and KneadingMap

  static SearchTarget named(std::string name, long depth = 8);
  static SearchTarget kneading_prefix(std::string symbols);
  static SearchTarget kneading_map(KneadingMap q, long depth = 8);
  static SearchTarget explicit_records(std::vector<CombinatoricsRecord> r);
};

struct SearchOptions {
  long max_digits = 400;
  long symbol_cap = 1'000'000;
  KneadingOptions kneading;
  NestOptions nest;
  RenormOptions renorm;
};

struct BisectionStep {
  std::string lo, hi;
  int cmp = 0;  // kneading(mid) against the target
};

struct SearchResult {
  std::string parameter;  // decimal, `digits` places
  BigScalar a;
  std::string bracket_lo, bracket_hi;
  std::string kneading_lo, kneading_hi;  // endpoint sequences up to the first difference with the target
  std::vector<BisectionStep> steps;
  long levels_matched = 0;
  std::vector<CombinatoricsRecord> records;
};

/// Bisection of (3/2, 2] in the kneading order until the bracket is below 10^-digits
/// (a KneadingPrefix target stops at the first parameter realizing it), then
/// build_nest at the result must reproduce the target combinatorics exactly.
/// Throws NotRealized (with the deepest matching level), ConfigError, PrecisionExhausted.
SearchResult search_parameter(const SearchTarget& target, long digits, const SearchOptions& opt = {});

struct CascadeSearch {
  long min_length = 20;
  // Bracket: the cascade at lo is shorter than min_length; the nest at hi is renormalizable.
  std::string lo = "1.9";
  std::string hi = "1.91422";
  long max_levels = 72;
};

struct CascadeResult {
  std::string parameter;
  long cascade_length = 0;
  long first_level = 0;
  long steps = 0;
};

/// Bisection towards the saddle-node end of a periodic window until the nest
/// holds a run of at least min_length central levels and is not renormalizable.
CascadeResult search_cascade(const CascadeSearch& s, long digits, const SearchOptions& opt = {});

/// Longest run of consecutive central levels: (length, first level).
std::pair<long, long> longest_cascade(const Nest& nest);

/// Records of levels 1..depth of the Fibonacci combinatorics.
std::vector<CombinatoricsRecord> fibonacci_records(long depth);

}  // namespace prinest
