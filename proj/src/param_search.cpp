#include "prinest/param_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "prinest/error.hpp"
#include "prinest/orbit.hpp"

namespace prinest {

namespace {

// Symbols of the critical orbit, recomputed at doubled precision whenever a
// point cannot be placed.
class KneadingStream {
 public:
  KneadingStream(const UnimodalMap& f, long prec_max)
      : base_(f), nominal_(f.prec().bits), prec_max_(prec_max), cache_(std::make_unique<OrbitCache>(f)) {}

  char symbol(long k) {
    for (;;) {
      try {
        const BigScalar& x = cache_->iterate(k);
        if (x.is_zero() || x.log2_abs() <= -static_cast<double>(nominal_ - 8)) return 'C';
        double e = cache_->error_log2(k);
        if (std::isinf(e) || x.log2_abs() > std::ceil(e) + 2) return x.sign() < 0 ? 'L' : 'R';
      } catch (const Error& err) {
        if (err.code() != ErrorCode::PrecisionExhausted) throw;
      }
      escalate(k);
    }
  }

 private:
  void escalate(long k) {
    long bits = cache_->prec().bits * 2;
    if (bits > prec_max_)
      throw Error(ErrorCode::PrecisionExhausted,
                  "kneading symbol " + std::to_string(k) + " undecided at " + std::to_string(bits / 2) + " bits");
    cache_ = std::make_unique<OrbitCache>(base_.at_precision(Precision(bits)));
  }

  UnimodalMap base_;
  long nominal_;
  long prec_max_;
  std::unique_ptr<OrbitCache> cache_;
};

int order(char s) { return s == 'L' ? 0 : s == 'C' ? 1 : 2; }

// Target symbols on demand.
class TargetSymbols {
 public:
  explicit TargetSymbols(const SearchTarget& t) : t_(t) {
    if (t.kind == SearchTarget::Kind::KneadingPrefix) s_ = t.prefix;
  }
  bool finite() const { return t_.kind == SearchTarget::Kind::KneadingPrefix; }
  long size() const { return finite() ? static_cast<long>(s_.size()) : std::numeric_limits<long>::max(); }
  char at(long k) {
    if (!finite() && k > static_cast<long>(s_.size()))
      s_ = kneading_from_map(t_.kmap, std::max<long>(2 * k, 1024));
    return s_[static_cast<std::size_t>(k - 1)];
  }

 private:
  const SearchTarget& t_;
  std::string s_;
};

struct Comparison {
  int cmp = 0;  // 0: no difference within the cap (or the whole finite target matched)
  std::string symbols;
};

Comparison compare_to_target(const UnimodalMap& f, TargetSymbols& target, const SearchOptions& opt) {
  KneadingStream ks(f, opt.kneading.prec_max);
  Comparison c;
  int theta = 1;
  const long n = std::min(target.size(), opt.symbol_cap);
  for (long k = 1; k <= n; ++k) {
    char s = ks.symbol(k);
    char t = target.at(k);
    c.symbols.push_back(s);
    if (s != t) {
      c.cmp = (order(s) < order(t) ? -1 : 1) * theta;
      return c;
    }
    if (s == 'C') return c;
    if (s == 'L') theta = -theta;
  }
  return c;
}

long bits_for_digits(long digits) { return static_cast<long>(std::ceil(static_cast<double>(digits) * std::log2(10.0))) + 32; }

// Midpoint written with two decimals beyond the target width; the bisection continues from the rounded value.
std::string midpoint(BigScalar& mid, const BigScalar& lo, const BigScalar& hi, long digits) {
  mid = (lo + hi) * BigScalar::pow2(-1, lo.prec());
  std::string text = mid.to_fixed(static_cast<int>(digits + 2));
  while (text.size() > 1 && text.back() == '0') text.pop_back();
  if (text.back() == '.') text.pop_back();
  mid = BigScalar::parse(text, lo.prec());
  return text;
}

UnimodalMap search_map(const std::string& text, long digits) {
  return make_map(text, Precision(bits_for_digits(digits) + 64));
}

struct Bisection {
  BigScalar lo, hi;
  std::vector<BisectionStep> steps;
  std::string found;  // set when a finite target was matched
  std::string k_lo, k_hi;
};

Bisection bisect_kneading(const SearchTarget& target, long digits, const SearchOptions& opt) {
  Precision p(bits_for_digits(digits));
  TargetSymbols ts(target);
  Bisection b{BigScalar::parse("1.5", p), BigScalar::parse("2", p), {}, {}, {}, {}};
  BigScalar width = BigScalar::parse("1e-" + std::to_string(digits), p);
  const long max_steps = 4 * bits_for_digits(digits);
  for (long step = 0; step < max_steps && b.hi - b.lo >= width; ++step) {
    BigScalar mid(p);
    std::string text = midpoint(mid, b.lo, b.hi, digits);
    Comparison c = compare_to_target(search_map(text, digits), ts, opt);
    b.steps.push_back({b.lo.to_string(), b.hi.to_string(), c.cmp});
    if (c.cmp == 0) {
      if (ts.finite()) b.found = text;
      b.lo = mid;
      b.hi = mid;
      b.k_lo = b.k_hi = c.symbols;
      break;
    }
    // The kneading sequence decreases with a.
    if (c.cmp > 0) {
      b.lo = std::move(mid);
      b.k_lo = std::move(c.symbols);
    } else {
      b.hi = std::move(mid);
      b.k_hi = std::move(c.symbols);
    }
  }
  return b;
}

bool same_record(const CombinatoricsRecord& a, const CombinatoricsRecord& b) {
  return a.branch_count == b.branch_count && essentially_equivalent(a, b, std::numeric_limits<long>::max());
}

// Levels 1..want of the nest at `text` compared with `expected` (empty: only build).
long levels_matching(const std::string& text, long digits, long want, const std::vector<CombinatoricsRecord>& expected,
                     bool noncentral, const SearchOptions& opt, std::vector<CombinatoricsRecord>* out) {
  Nest nest = build_nest(search_map(text, digits), want + 1, opt.nest.orbit_cap, opt.nest);
  long matched = 0;
  for (long n = 1; n <= std::min(want, nest.depth()); ++n) {
    const NestLevel& L = nest.levels[static_cast<std::size_t>(n)];
    if (!L.central.has_value()) break;
    if (noncentral && *L.central) break;
    if (!expected.empty() || out) {
      CombinatoricsRecord k;
      try {
        k = combinatorics(nest, n, opt.renorm);
      } catch (const Error&) {
        break;
      }
      if (!expected.empty() && !same_record(k, expected[static_cast<std::size_t>(n - 1)])) break;
      if (out) out->push_back(std::move(k));
    }
    matched = n;
  }
  return matched;
}

SearchResult realize(const SearchTarget& target, long digits, const SearchOptions& opt,
                     const std::vector<CombinatoricsRecord>& expected, long want, bool noncentral) {
  Bisection b = bisect_kneading(target, digits, opt);
  SearchResult r;
  r.steps = std::move(b.steps);
  r.bracket_lo = b.lo.to_string();
  r.bracket_hi = b.hi.to_string();
  r.kneading_lo = std::move(b.k_lo);
  r.kneading_hi = std::move(b.k_hi);
  if (!b.found.empty()) {
    r.parameter = b.found;
  } else {
    BigScalar mid = (b.lo + b.hi) * BigScalar::pow2(-1, b.lo.prec());
    r.parameter = mid.to_fixed(static_cast<int>(digits));
  }
  r.a = BigScalar::parse(r.parameter, Precision(bits_for_digits(digits)));
  if (want > 0) r.levels_matched = levels_matching(r.parameter, digits, want, expected, noncentral, opt, &r.records);
  return r;
}

SearchResult checked(SearchResult r, long want) {
  if (r.levels_matched < want)
    throw Error(ErrorCode::NotRealized, "parameter " + r.parameter + " matches the target through level " +
                                            std::to_string(r.levels_matched) + " of " + std::to_string(want));
  return r;
}

}  // namespace

KneadingSequence kneading_sequence(const UnimodalMap& f, long length, KneadingOptions opt) {
  if (length < 1) throw Error(ErrorCode::DomainError, "kneading length must be positive");
  KneadingStream ks(f, opt.prec_max);
  KneadingSequence out;
  for (long k = 1; k <= length; ++k) {
    char s = ks.symbol(k);
    out.symbols.push_back(s);
    if (s == 'C') break;
  }
  return out;
}

int kneading_compare(std::string_view u, std::string_view v) {
  int theta = 1;
  for (std::size_t i = 0; i < std::min(u.size(), v.size()); ++i) {
    if (u[i] != v[i]) return (order(u[i]) < order(v[i]) ? -1 : 1) * theta;
    if (u[i] == 'C') return 0;
    if (u[i] == 'L') theta = -theta;
  }
  return 0;
}

long KneadingMap::operator()(long k) const {
  if (k >= 1 && k <= static_cast<long>(prefix.size())) return prefix[static_cast<std::size_t>(k - 1)];
  return std::max(k - tail, 0L);
}

std::vector<long> cutting_times(const KneadingMap& Q, long upto) {
  std::vector<long> S{1};
  for (long k = 1;; ++k) {
    long q = Q(k);
    if (q < 0 || q >= k) throw Error(ErrorCode::DomainError, "kneading map needs 0 <= Q(k) < k");
    long next = S.back() + S[static_cast<std::size_t>(q)];
    if (next > upto) break;
    S.push_back(next);
  }
  return S;
}

std::string kneading_from_map(const KneadingMap& Q, long length) {
  // Block S_{k-1}+1 .. S_k repeats the first S_{Q(k)} - 1 symbols and flips the next one.
  auto flip = [](char c) { return c == 'L' ? 'R' : 'L'; };
  std::string e = "L";
  std::vector<long> S{1};
  for (long k = 1; static_cast<long>(e.size()) < length; ++k) {
    long q = Q(k);
    if (q < 0 || q >= k) throw Error(ErrorCode::DomainError, "kneading map needs 0 <= Q(k) < k");
    long sq = S[static_cast<std::size_t>(q)];
    for (long j = 1; j < sq; ++j) e.push_back(e[static_cast<std::size_t>(j - 1)]);
    e.push_back(flip(e[static_cast<std::size_t>(sq - 1)]));
    S.push_back(S.back() + sq);
  }
  e.resize(static_cast<std::size_t>(length));
  return e;
}

bool admissible(const KneadingMap& Q, long horizon) {
  for (long k = 1; k <= horizon; ++k)
    if (Q(k) < 0 || Q(k) >= k) return false;
  // {Q(k + j)}_j >= {Q(Q(Q(k)) + j)}_j lexicographically.
  for (long k = 1; k <= horizon; ++k) {
    long m = Q(Q(k));
    for (long j = 1; j <= horizon; ++j) {
      long u = Q(k + j), v = Q(m + j);
      if (u > v) break;
      if (u < v) return false;
    }
  }
  return true;
}

bool admissible(const std::vector<CombinatoricsRecord>& records, std::string* why) {
  auto fail = [&](long level, const std::string& msg) {
    if (why) *why = "level " + std::to_string(level) + ": " + msg;
    return false;
  };
  if (records.empty()) return fail(0, "no records");
  for (const CombinatoricsRecord& k : records) {
    const std::size_t m = k.depths.size();
    if (m == 0 || k.ordering.size() != m) return fail(k.level, "ordering and depths disagree on the labels");
    std::vector<int> sorted = k.ordering;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < m; ++i)
      if (sorted[i] != static_cast<int>(i)) return fail(k.level, "ordering is not a permutation of the labels");
    if (k.depths[0] != 0) return fail(k.level, "label 0 must have depth 0");
    if (!k.transit_times.empty() && k.transit_times.size() != m) return fail(k.level, "transit times do not cover the labels");
    if (k.branch_count < 1 || k.itineraries.size() != static_cast<std::size_t>(k.branch_count))
      return fail(k.level, "branch count does not match the itineraries");
    for (const auto& it : k.itineraries) {
      if (it.empty() || it.front() != 0) return fail(k.level, "an itinerary does not start at the central label");
      for (std::size_t j = 0; j < it.size(); ++j) {
        if (it[j] < 0 || static_cast<std::size_t>(it[j]) >= m) return fail(k.level, "itinerary label out of range");
        if (j > 0 && it[j] == 0) return fail(k.level, "an itinerary passes the central label twice");
      }
    }
  }
  return true;
}

SearchTarget SearchTarget::named(std::string n, long depth) {
  SearchTarget t;
  t.kind = Kind::Named;
  t.name = std::move(n);
  t.depth = depth;
  return t;
}

SearchTarget SearchTarget::kneading_prefix(std::string symbols) {
  SearchTarget t;
  t.kind = Kind::KneadingPrefix;
  t.prefix = std::move(symbols);
  return t;
}

SearchTarget SearchTarget::kneading_map(KneadingMap q, long depth) {
  SearchTarget t;
  t.kind = Kind::KneadingMap;
  t.kmap = std::move(q);
  t.depth = depth;
  return t;
}

SearchTarget SearchTarget::explicit_records(std::vector<CombinatoricsRecord> r) {
  SearchTarget t;
  t.kind = Kind::ExplicitRecords;
  t.depth = static_cast<long>(r.size());
  t.records = std::move(r);
  return t;
}

std::vector<CombinatoricsRecord> fibonacci_records(long depth) {
  std::vector<CombinatoricsRecord> out;
  for (long n = 1; n <= depth; ++n) {
    CombinatoricsRecord k;
    k.level = n;
    k.branch_count = 2;
    k.ordering = {0, 1};
    k.itineraries = {{0, 1}, {0}};
    k.depths = {0, 0};
    k.transit_times = {-1, 0};
    out.push_back(std::move(k));
  }
  return out;
}

SearchResult search_parameter(const SearchTarget& target, long digits, const SearchOptions& opt) {
  if (digits < 1 || digits > opt.max_digits)
    throw Error(ErrorCode::ConfigError, "digits must lie in [1, " + std::to_string(opt.max_digits) + "]");
  switch (target.kind) {
    case SearchTarget::Kind::KneadingPrefix: {
      const std::string& s = target.prefix;
      if (s.empty() || s.find_first_not_of("LRC") != std::string::npos || (s.find('C') != std::string::npos && s.find('C') + 1 < s.size()) || s[0] != 'L')
        throw Error(ErrorCode::NotRealized, "not a kneading prefix: '" + s + "'");
      return realize(target, digits, opt, {}, 0, false);
    }
    case SearchTarget::Kind::KneadingMap:
      if (!admissible(target.kmap)) throw Error(ErrorCode::NotRealized, "kneading map is not admissible");
      return checked(realize(target, digits, opt, {}, target.depth, false), target.depth);
    case SearchTarget::Kind::Named: {
      if (target.name != "fibonacci") throw Error(ErrorCode::NotRealized, "unknown combinatorics '" + target.name + "'");
      SearchTarget t = SearchTarget::kneading_map(KneadingMap{{}, 2}, target.depth);
      return checked(realize(t, digits, opt, fibonacci_records(target.depth), target.depth, true), target.depth);
    }
    case SearchTarget::Kind::ExplicitRecords: {
      std::string why;
      if (!admissible(target.records, &why)) throw Error(ErrorCode::NotRealized, "inadmissible records: " + why);
      const long want = static_cast<long>(target.records.size());
      long best = 0;
      // Candidates: kneading maps Q(k) = max(k - d, 0).
      for (long d = 1; d <= 8; ++d) {
        SearchResult r = realize(SearchTarget::kneading_map(KneadingMap{{}, d}, want), digits, opt, target.records, want, false);
        if (r.levels_matched == want) return r;
        best = std::max(best, r.levels_matched);
      }
      throw Error(ErrorCode::NotRealized, "no candidate realizes the records; deepest level matched " + std::to_string(best));
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown target kind");
}

std::pair<long, long> longest_cascade(const Nest& nest) {
  long best = 0, first = 0, run = 0;
  for (long n = 1; n <= nest.depth(); ++n) {
    run = nest.levels[static_cast<std::size_t>(n)].central.value_or(false) ? run + 1 : 0;
    if (run > best) {
      best = run;
      first = n - run + 1;
    }
  }
  return {best, first};
}

CascadeResult search_cascade(const CascadeSearch& s, long digits, const SearchOptions& opt) {
  if (digits < 1 || digits > opt.max_digits)
    throw Error(ErrorCode::ConfigError, "digits must lie in [1, " + std::to_string(opt.max_digits) + "]");
  if (s.min_length < 1) throw Error(ErrorCode::ConfigError, "min_length must be positive");
  Precision p(bits_for_digits(digits));
  BigScalar lo = BigScalar::parse(s.lo, p), hi = BigScalar::parse(s.hi, p);
  if (!(lo < hi)) throw Error(ErrorCode::ConfigError, "cascade bracket is empty");
  BigScalar width = BigScalar::parse("1e-" + std::to_string(digits), p);

  struct Probe {
    bool renormalizable;
    long length, first;
  };
  auto probe = [&](const std::string& text) {
    Nest nest = build_nest(make_map(text), s.max_levels, opt.nest.orbit_cap, opt.nest);
    auto [len, first] = longest_cascade(nest);
    return Probe{nest.termination() == Termination::Renormalizable, len, first};
  };
  Probe plo = probe(s.lo), phi = probe(s.hi);
  if (plo.renormalizable || plo.length >= s.min_length || !phi.renormalizable)
    throw Error(ErrorCode::ConfigError, "cascade bracket [" + s.lo + ", " + s.hi + "] does not straddle the window edge");

  CascadeResult out;
  for (; hi - lo >= width; ++out.steps) {
    BigScalar mid(p);
    std::string text = midpoint(mid, lo, hi, digits);
    Probe m = probe(text);
    if (m.renormalizable) {
      hi = std::move(mid);
    } else if (m.length < s.min_length) {
      lo = std::move(mid);
    } else {
      out.parameter = text;
      out.cascade_length = m.length;
      out.first_level = m.first;
      ++out.steps;
      return out;
    }
  }
  throw Error(ErrorCode::NotRealized, "no parameter in [" + s.lo + ", " + s.hi + "] carries a cascade of length " +
                                          std::to_string(s.min_length));
}

}  // namespace prinest
