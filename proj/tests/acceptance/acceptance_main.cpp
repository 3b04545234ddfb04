// Acceptance checks. One line per criterion: "[PASS] n ..." or "[FAIL] n ...".
// Usage: acceptance [criterion...]   (no argument: all of them)
// Exit status is 0 only if every requested criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "prinest/error.hpp"
#include "prinest/geometry.hpp"
#include "prinest/io.hpp"
#include "prinest/param_search.hpp"

using namespace prinest;

namespace {

// Tolerances and budgets.
constexpr double kRuntime1 = 300, kRuntime2 = 120, kRuntime3 = 600, kRuntime4 = 300, kRuntime5 = 600, kRuntime6 = 1;
constexpr long kMinParams1 = 20;
constexpr long kMinDepth1 = 6;
constexpr double kDelta = 0.01;
constexpr long kTriggerMaxN = 15;
constexpr double kRhoMax = 0.9;
constexpr double kResidualMax = 0.5;
constexpr double kLambdaRelChange = 1e-10;
constexpr long kMinCascade = 20;
constexpr long kCascadeSearchLength = 40;
constexpr double kMultiplierTol = 0.2;
constexpr double kSyntheticRel = 1e-8;
constexpr double kOracleRel = 1e-30;

const char* kFibonacci37 = "1.956203499571624051414212184609857869";

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

oracle::Real R(const BigScalar& x) { return oracle::Real(x.to_string()); }

unsigned digits_for(long bits) { return static_cast<unsigned>(std::ceil(static_cast<double>(bits) * 0.30103)) + 10; }

const SearchResult& fibonacci60() {
  static SearchResult r = search_parameter(SearchTarget::named("fibonacci", 12), 60);
  return r;
}

// ---------------------------------------------------------------- 1

// Invariants of one nest, checked by forward iteration in Boost at twice the nest precision.
std::string nest_violation(const Nest& nest) {
  const long bits = nest.prec().bits;
  oracle::Orbit o(nest.map.parameter_text(), digits_for(2 * bits));
  for (long n = 1; n <= nest.depth(); ++n) {
    const NestLevel& L = nest.levels[static_cast<std::size_t>(n)];
    const RInterval& P = nest.levels[static_cast<std::size_t>(n - 1)].T;
    oracle::Real lo = R(L.T.lo()), hi = R(L.T.hi()), plo = R(P.lo()), phi = R(P.hi());
    oracle::Real tolI = ldexp(hi - lo, static_cast<int>(-(bits - 16)));
    oracle::Real tolP = ldexp(phi - plo, static_cast<int>(-(bits - 16)));
    if (!(plo <= lo && hi <= phi && hi - lo < phi - plo)) return fmt("level %ld not nested", n);
    if (abs(lo + hi) > tolI) return fmt("level %ld not symmetric about 0", n);
    for (const oracle::Real& e : {lo, hi}) {
      oracle::Real y = o.fn(e, L.r);
      if (std::min(abs(y - plo), abs(y - phi)) > tolP) return fmt("level %ld: f^r of an endpoint misses the boundary", n);
    }
    if (n < nest.depth()) {
      bool central = L.central.value_or(false);
      bool same = nest.levels[static_cast<std::size_t>(n + 1)].r == L.r;
      if (central != same) return fmt("level %ld: r_{n+1} = r_n is %d but central is %d", n, same, central);
    }
  }
  return "";
}

Outcome criterion1() {
  // Deterministic grid of step 2e-4 over [1.6, 2.0].
  long sampled = 0, checked = 0;
  std::vector<std::string> failures;
  std::vector<std::string> params;
  NestOptions opt;
  opt.orbit_cap = 20000;
  for (long i = 1; i < 2000; ++i) {
    std::string a = fmt("%.4f", 1.6 + 2e-4 * static_cast<double>(i));
    ++sampled;
    Nest nest = build_nest(make_map(a), kMinDepth1, opt.orbit_cap, opt);
    if (nest.depth() < kMinDepth1) continue;
    ++checked;
    params.push_back(a);
    std::string v = nest_violation(nest);
    if (!v.empty()) failures.push_back(a + ": " + v);
  }
  Outcome out;
  out.pass = checked >= kMinParams1 && failures.empty();
  out.detail = fmt("%ld of %ld grid parameters reach depth >= %ld; violations: %zu", checked, sampled, kMinDepth1,
                   failures.size());
  for (std::size_t i = 0; i < std::min<std::size_t>(3, failures.size()); ++i) out.detail += "; " + failures[i];
  return out;
}

// ---------------------------------------------------------------- 2

const std::vector<std::string> kFixtures2{kFibonacci37, "1.9125", "1.8875", "1.98",  "1.95",
                                          "1.93",       "1.97",   "1.9",    "1.935", "1.96"};

// Folded labels of the first-return domains of P, with L0 (the next level) labelled 0.
struct FoldedLabels {
  std::vector<oracle::Interval> folded;  // sorted by position on [0, 1]
  int label(const oracle::Real& x) const {
    oracle::Real ax = abs(x);
    for (std::size_t i = 0; i < folded.size(); ++i)
      if (folded[i].lo <= ax && ax <= folded[i].hi) return static_cast<int>(i);
    return -1;
  }
};

Outcome criterion2() {
  const long cap = 10000;
  const long window = 400;  // orbit window shared by the record and the oracle
  long levels = 0, domains = 0, itineraries = 0, skipped = 0, truncated = 0;
  std::vector<std::string> bad;
  for (const std::string& a : kFixtures2) {
    NestOptions opt;
    opt.orbit_cap = cap;
    Nest nest = build_nest(make_map(a), 5, cap, opt);
    oracle::Orbit o(a, digits_for(nest.prec().bits));
    oracle::Nest on = oracle::principal_nest(o, static_cast<int>(std::min<long>(nest.depth(), 5)), cap);
    const long top = std::min<long>(nest.depth(), 4);
    if (static_cast<long>(on.r.size()) <= top) {
      bad.push_back(a + ": oracle nest shorter");
      continue;
    }
    for (long n = 1; n <= top; ++n) {
      const NestLevel& L = nest.levels[static_cast<std::size_t>(n)];
      const auto& OI = on.I[static_cast<std::size_t>(n)];
      if (L.r != on.r[static_cast<std::size_t>(n)] || static_cast<int>(L.central.value_or(false)) != on.central[static_cast<std::size_t>(n)] ||
          oracle::rel(R(L.T.hi()), OI.hi, OI.length()) > kOracleRel) {
        bad.push_back(fmt("%s level %ld: nest differs (r %ld vs %ld, central %d vs %d, hi rel %.3g)", a.c_str(), n, L.r,
                          on.r[static_cast<std::size_t>(n)], static_cast<int>(L.central.value_or(false)),
                          on.central[static_cast<std::size_t>(n)], oracle::rel(R(L.T.hi()), OI.hi, OI.length())));
        continue;
      }
      ++levels;
      // Branch domains of the first return to I^{n-1}.
      const auto& P = on.I[static_cast<std::size_t>(n - 1)];
      std::vector<Branch> br;
      try {
        br = return_map_domains(nest, n, window);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::CapExceeded) {
          ++skipped;
          continue;
        }
        bad.push_back(fmt("%s level %ld: %s", a.c_str(), n, e.what()));
        continue;
      }
      // Where the library's orbit reaches its precision horizon first, the oracle
      // scans the same number of visits.
      long ocap = window;
      RenormOptions vo;
      vo.visit_cap = window;
      LevelAnalysis an = analyze_level(nest, n, vo);
      if (an.truncated) {
        long seen = 0;
        for (long k = 1; k <= window; ++k)
          if (P.inside(o.at(k)) && ++seen == an.visits - 1) {
            ocap = k;
            break;
          }
        ++truncated;
      }
      auto od = oracle::return_domains(o, P, ocap);
      if (br.size() != od.size()) {
        bad.push_back(fmt("%s level %ld: %zu branches, oracle %zu", a.c_str(), n, br.size(), od.size()));
        continue;
      }
      for (const Branch& b : br) {
        auto it = std::find_if(od.begin(), od.end(), [&](const oracle::Domain& d) { return d.witness == b.entry_level_point; });
        if (it == od.end() || it->return_time != b.return_time ||
            oracle::rel(R(b.domain.lo()), it->D.lo, P.length()) > kOracleRel ||
            oracle::rel(R(b.domain.hi()), it->D.hi, P.length()) > kOracleRel) {
          if (it == od.end())
            bad.push_back(fmt("%s level %ld: branch %d witnessed at %ld has no oracle domain", a.c_str(), n, b.label,
                              b.entry_level_point));
          else
            bad.push_back(fmt("%s level %ld: branch %d differs (S %ld vs %ld, rel %.3g %.3g)", a.c_str(), n, b.label,
                              b.return_time, it->return_time, oracle::rel(R(b.domain.lo()), it->D.lo, P.length()),
                              oracle::rel(R(b.domain.hi()), it->D.hi, P.length())));
          break;
        }
        ++domains;
      }
      // Itineraries of non-cascade levels: labels of the successive returns to I^{n-1}
      // of each witnessed visit to I^n, until it is back in I^n.
      if (L.central.value_or(false) || n >= nest.depth()) continue;
      if (n > 1 && nest.levels[static_cast<std::size_t>(n - 1)].central.value_or(false)) continue;
      CombinatoricsRecord rec;
      RenormOptions ro;
      ro.visit_cap = window;
      try {
        rec = combinatorics(nest, n, ro);
      } catch (const Error& e) {
        bad.push_back(fmt("%s level %ld: %s", a.c_str(), n, e.what()));
        continue;
      }
      FoldedLabels fl;
      std::vector<oracle::Interval> fd;
      for (const auto& d : od) {
        oracle::Interval f{d.D.lo < 0 && d.D.hi > 0 ? oracle::Real(0) : std::min(abs(d.D.lo), abs(d.D.hi)),
                           std::max(abs(d.D.lo), abs(d.D.hi))};
        bool dup = false;
        for (const auto& g : fd)
          if (oracle::rel(g.lo, f.lo, P.length()) < kOracleRel && oracle::rel(g.hi, f.hi, P.length()) < kOracleRel) dup = true;
        if (!dup) fd.push_back(f);
      }
      std::sort(fd.begin(), fd.end(), [](const oracle::Interval& x, const oracle::Interval& y) { return x.lo < y.lo; });
      fl.folded = fd;
      const auto& In = on.I[static_cast<std::size_t>(n)];
      std::set<std::vector<int>> expect;
      long visits_window = 0;
      for (long k = 0; k <= window; ++k) {
        if (!(k == 0 || In.inside(o.at(k)))) continue;
        std::vector<int> itin{0};
        long j = k + 1;
        for (; j <= window; ++j) {
          const oracle::Real& x = o.at(j);
          if (In.inside(x)) break;
          if (P.inside(x)) itin.push_back(fl.label(x));
        }
        if (j > window) break;
        expect.insert(itin);
        visits_window = j;
      }
      std::set<std::vector<int>> got(rec.itineraries.begin(), rec.itineraries.end());
      if (got != expect) {
        bad.push_back(fmt("%s level %ld: itineraries differ (%zu vs %zu, window %ld)", a.c_str(), n, got.size(),
                          expect.size(), visits_window));
        continue;
      }
      itineraries += static_cast<long>(got.size());
    }
  }
  Outcome out;
  out.pass = bad.empty();
  out.detail = fmt("%zu parameters, %ld levels, %ld branch domains, %ld itineraries matched; levels past the "
                   "%ld-step window: %ld; levels scanned to the precision horizon: %ld; mismatches: %zu",
                   kFixtures2.size(), levels, domains, itineraries, window, skipped, truncated, bad.size());
  for (std::size_t i = 0; i < (std::getenv("ACCEPTANCE_VERBOSE") ? bad.size() : std::min<std::size_t>(3, bad.size())); ++i) out.detail += "; " + bad[i];
  return out;
}

// ---------------------------------------------------------------- 3

Outcome criterion3() {
  const std::string a = fibonacci60().parameter;
  Nest n1 = build_nest(make_map(a, Precision(512)), 18);
  const long bits1 = n1.prec().bits;
  Nest n2 = build_nest(make_map(a, Precision(2 * bits1)), 18);
  std::vector<BigScalar> l1 = scaling_factors(n1), l2 = scaling_factors(n2);

  auto trig = small_factor_trigger(l1, kDelta);
  bool pa = trig && trig->N <= kTriggerMaxN;

  std::vector<BigScalar> nc;
  for (long k : noncentral_levels(n1))
    if (k + 1 <= n1.depth()) nc.push_back(l1[static_cast<std::size_t>(k)]);
  DecayFit fit = decay_fit(nc);
  bool pb = fit.rho < kRhoMax && fit.residual <= kResidualMax;

  double worst = 0;
  for (std::size_t i = 0; i < std::min(l1.size(), l2.size()); ++i) worst = std::max(worst, relative_difference(l1[i], l2[i]));
  bool pc = l1.size() == l2.size() && worst < kLambdaRelChange;

  Outcome out;
  out.pass = n1.depth() >= 12 && pa && pb && pc;
  out.detail = fmt("a = %s, depth %ld at %ld bits (start 512); (a) %s: first lambda_N < %.2g at N = %s, lambda_15 = %.5g; "
                   "(b) %s: rho = %.4f, C = %.4f, residual = %.3g over %zu points; (c) %s: max relative change %.3g "
                   "at %ld bits",
                   a.c_str(), n1.depth(), bits1, pa ? "ok" : "FAILED", kDelta, trig ? std::to_string(trig->N).c_str() : "none",
                   l1.size() >= 15 ? l1[14].to_double() : -1.0, pb ? "ok" : "FAILED", fit.rho, fit.C, fit.residual,
                   nc.size(), pc ? "ok" : "FAILED", worst, n2.prec().bits);
  return out;
}

// ---------------------------------------------------------------- 4

Outcome criterion4() {
  Nest nest = build_nest(make_map(fibonacci60().parameter), 8);
  std::vector<CombinatoricsRecord> recs;
  for (long n = 2; n <= 6; ++n) recs.push_back(combinatorics(nest, n));
  bool eq = true, two = true;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    two = two && recs[i].branch_count == 2;
    for (std::size_t j = i + 1; j < recs.size(); ++j) eq = eq && essentially_equivalent(recs[i], recs[j], 0);
  }
  Outcome out;
  out.pass = eq && two;
  std::ostringstream it;
  for (const auto& v : recs.front().itineraries) {
    it << "[";
    for (int l : v) it << l;
    it << "]";
  }
  out.detail = fmt("levels 2..6 pairwise essentially equivalent at cutoff 0: %s; branch counts all 2: %s; itineraries %s",
                   eq ? "yes" : "no", two ? "yes" : "no", it.str().c_str());
  return out;
}

// ---------------------------------------------------------------- 5

Outcome criterion5() {
  CascadeSearch s;
  s.min_length = kCascadeSearchLength;
  CascadeResult c = search_cascade(s, 20);
  Nest nest = build_nest(make_map(c.parameter), s.max_levels);
  const long bits = nest.prec().bits;
  const long first = c.first_level, len = c.cascade_length;
  bool ok = len >= kMinCascade;
  long checked = 0, ghosts = 0;
  double worst_mult = 0, worst_fd = -1e9;
  for (long n = first + len / 2; n < first + len; ++n) {
    ParabolicProximity pp = parabolic_proximity(nest, n);
    double dm = std::abs(pp.multiplier.to_double() - 1);
    double fd = (pp.multiplier - pp.multiplier_fd).log2_abs();
    worst_mult = std::max(worst_mult, dm);
    worst_fd = std::max(worst_fd, fd);
    ok = ok && pp.low_return && dm <= kMultiplierTol && fd <= -static_cast<double>(bits) / 4;
    ghosts += pp.kind == ParabolicProximity::Kind::Ghost;
    ++checked;
  }

  // Mirror parameter on the other side of the saddle-node (1 + sqrt 8)/2, where the fixed point is real.
  oracle::Real::default_precision(60);
  oracle::Real asn = (1 + boost::multiprecision::sqrt(oracle::Real(8))) / 2;
  oracle::Real aplus = 2 * asn - oracle::Real(c.parameter);
  std::string ap = aplus.str(25, std::ios_base::fixed);
  Nest np = build_nest(make_map(ap), 4);
  ParabolicProximity pp = parabolic_proximity(np, 1);
  double dm_plus = std::abs(pp.multiplier.to_double() - 1);
  double fd_plus = (pp.multiplier - pp.multiplier_fd).log2_abs();
  bool ok_plus = pp.kind == ParabolicProximity::Kind::Fixed && dm_plus <= kMultiplierTol &&
                 fd_plus <= -static_cast<double>(np.prec().bits) / 4 && pp.low_return;

  Outcome out;
  out.pass = ok && ok_plus && checked > 0;
  out.detail = fmt("a = %s: cascade of %ld central levels from level %ld; levels past the midpoint: %ld (%ld without a real "
                   "fixed point, multiplier 1 at the tangency), low_return on all: %s, max |mult - 1| = %.3g, "
                   "max log2|chain - fd| = %.1f (bound %.1f); mirror a = %s: real fixed point, multiplier %.6f, "
                   "log2|chain - fd| = %.1f, low_return %s",
                   c.parameter.c_str(), len, first, checked, ghosts, ok ? "yes" : "no", worst_mult, worst_fd,
                   -static_cast<double>(bits) / 4, ap.c_str(), pp.multiplier.to_double(), fd_plus,
                   pp.low_return ? "yes" : "no");
  return out;
}

// ---------------------------------------------------------------- 6

Outcome criterion6() {
  double worst = 0;
  for (double C0 : {0.05, 0.3, 1.0, 4.0, 25.0})
    for (double rho0 : {0.15, 0.35, 0.55, 0.75, 0.95}) {
      std::vector<double> l;
      for (int k = 1; k <= 12; ++k) l.push_back(C0 * std::pow(rho0, k));
      DecayFit f = decay_fit(l);
      worst = std::max({worst, std::abs(f.C - C0) / C0, std::abs(f.rho - rho0) / rho0});
    }
  return {worst < kSyntheticRel, fmt("5x5 grid of (C0, rho0), 12 points each; max relative error %.3g", worst)};
}

// ---------------------------------------------------------------- 7

Outcome criterion7() {
  struct Row {
    std::string a;
    long depth;
    bool growing;
    std::optional<long> N;
  };
  std::vector<std::pair<std::string, long>> fixtures;
  fixtures.emplace_back(fibonacci60().parameter, 18);
  for (const std::string& a : kFixtures2) fixtures.emplace_back(a, 24);
  std::vector<Row> rows;
  long counter = 0;
  for (const auto& [a, levels] : fixtures) {
    Nest nest = build_nest(make_map(a), levels);
    GeometryOptions go;
    go.delta = kDelta;
    GeometryReport g = geometry_report(nest, go);
    Row r{a, nest.depth(), c_geo_growing(g, 4), g.trigger ? std::optional<long>(g.trigger->N) : std::nullopt};
    if (r.growing && !r.N) ++counter;
    rows.push_back(r);
  }
  std::string table;
  long growing = 0;
  for (const Row& r : rows) {
    growing += r.growing;
    table += fmt(" | %.12s depth %ld growing %s trigger %s", r.a.c_str(), r.depth, r.growing ? "yes" : "no",
                 r.N ? std::to_string(*r.N).c_str() : "-");
  }
  return {counter == 0, fmt("%zu fixtures, %ld with C_geo growing over 4 levels, counterexamples %ld%s", rows.size(),
                            growing, counter, table.c_str())};
}

// ---------------------------------------------------------------- 8

Outcome criterion8() {
  std::vector<std::string> bad;
  RunConfig c;
  c.parameter = kFibonacci37;
  c.max_levels = 8;
  RunRecord r1 = cmd_nest(c), r2 = cmd_nest(c);
  std::string j1 = render(r1, Format::Json), j2 = render(r2, Format::Json);
  if (j1 != j2) bad.push_back("nest JSON differs between runs");
  if (render(r1, Format::Csv) != render(r2, Format::Csv)) bad.push_back("nest CSV differs between runs");
  if (!(run_record_from_json(Json::parse(j1)) == r1)) bad.push_back("run record JSON round trip");
  if (render(run_record_from_json(Json::parse(j1)), Format::Json) != j1) bad.push_back("run record JSON re-encoding");
  if (!(levels_from_csv(render(r1, Format::Csv), c.parameter) == *r1.nest)) bad.push_back("level CSV round trip");

  RunConfig cc;
  cc.parameter = "1.9136";
  cc.max_levels = 12;
  RunRecord rc = cmd_nest(cc);
  if (!(run_record_from_json(Json::parse(render(rc, Format::Json))) == rc)) bad.push_back("cascade record round trip");
  for (const ParabolicProximity& p : rc.parabolic)
    if (!(parabolic_from_json(to_json(p)) == p)) bad.push_back("parabolic round trip");
  if (!(geometry_from_json(to_json(*rc.geometry)) == *rc.geometry)) bad.push_back("geometry round trip");

  RunConfig s;
  s.range_lo = "1.9";
  s.range_hi = "2.0";
  s.grid = 12;
  s.max_levels = 6;
  setenv("PRINEST_WORKERS", "1", 1);
  auto w1 = cmd_sweep(s);
  setenv("PRINEST_WORKERS", "3", 1);
  auto w3 = cmd_sweep(s);
  unsetenv("PRINEST_WORKERS");
  if (sweep_csv(w1) != sweep_csv(w3)) bad.push_back("sweep depends on the worker count");
  if (!(sweep_from_csv(sweep_csv(w1)) == w1)) bad.push_back("sweep CSV round trip");
  for (const SweepRow& row : w1)
    if (!(sweep_row_from_json(to_json(row)) == row)) bad.push_back("sweep row JSON round trip");

  RunConfig q;
  q.target = "fibonacci";
  q.digits = 30;
  q.max_levels = 6;
  RunRecord s1 = cmd_search(q), s2 = cmd_search(q);
  if (render(s1, Format::Json) != render(s2, Format::Json)) bad.push_back("search differs between runs");
  if (!(run_record_from_json(Json::parse(render(s1, Format::Json))) == s1)) bad.push_back("search record round trip");

  auto path = std::filesystem::temp_directory_path() / "prinest_acceptance_run.json";
  write_output(path.string(), j1);
  RunConfig an;
  an.target = path.string();
  bool same = false;
  cmd_analyze(an, &same);
  if (!same) bad.push_back("analyze did not reproduce the saved record");
  std::filesystem::remove(path);

  Outcome out;
  out.pass = bad.empty();
  out.detail = fmt("nest, search and sweep records: repeated runs byte-identical, JSON and CSV round trips; failures: %zu",
                   bad.size());
  for (const std::string& b : bad) out.detail += "; " + b;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Outcome()>>> table{
      {1, {"nest invariants", criterion1}},
      {2, {"oracle equivalence", criterion2}},
      {3, {"Fibonacci decay", criterion3}},
      {4, {"Fibonacci self-similarity", criterion4}},
      {5, {"near-parabolic cascade", criterion5}},
      {6, {"synthetic decay fit", criterion6}},
      {7, {"geometry and decay", criterion7}},
      {8, {"determinism and round trips", criterion8}},
  };
  const std::map<int, double> budget{{1, kRuntime1}, {2, kRuntime2}, {3, kRuntime3}, {4, kRuntime4},
                                     {5, kRuntime5}, {6, kRuntime6}};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (const auto& [k, v] : table) which.push_back(k);

  bool all = true;
  for (int k : which) {
    auto it = table.find(k);
    if (it == table.end()) {
      std::printf("[FAIL] %d unknown criterion\n", k);
      all = false;
      continue;
    }
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    auto b = budget.find(k);
    if (b != budget.end() && sec > b->second) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s budget", b->second);
    }
    std::printf("[%s] %d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", k, it->second.first, sec, o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
