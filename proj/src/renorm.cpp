#include "prinest/renorm.hpp"

#include <algorithm>
#include <map>

#include "prinest/error.hpp"

namespace prinest {

namespace {

long default_visit_cap(const Nest& nest, const RenormOptions& opt) {
  if (opt.visit_cap > 0) return opt.visit_cap;
  // Witnesses come from a window a few times the span the nest itself
  // certifies. Further out, a decimal parameter that only approximates some
  // combinatorics visits branches the approximated map does not have.
  long span = 0;
  for (const NestLevel& L : nest.levels) span += L.r;
  return std::min(nest.options.orbit_cap, 2 * std::max(span, 1L));
}

struct Visits {
  std::vector<long> times;  // times[0] = 0
  bool truncated = false;
};

Visits collect_visits(OrbitCache& cache, const RInterval& I, long cap) {
  Visits v;
  v.times.push_back(0);
  long from = 0;
  while (true) {
    LandingResult r = LandingResult::non_recurrent();
    try {
      r = next_visit(cache, I, from, cap);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PrecisionExhausted) throw;
      v.truncated = true;
      break;
    }
    if (r.kind == LandingResult::Kind::Ambiguous) {
      v.truncated = true;
      break;
    }
    if (!r.ok()) break;
    v.times.push_back(r.time);
    from = r.time;
  }
  return v;
}

RInterval fold(const RInterval& D) {
  if (D.lo().sign() < 0 && D.hi().sign() > 0) return RInterval(BigScalar(D.prec()), max(-D.lo(), D.hi()));
  return D.folded();
}

bool same_domain(const RInterval& A, const RInterval& B) {
  Precision p = A.prec();
  BigScalar tol = BigScalar::pow2(-(p.bits - 16), p) * A.length();
  return abs(A.lo() - B.lo()) <= tol && abs(A.hi() - B.hi()) <= tol;
}

// f^m at twice the working precision, rounded back.
BigScalar forward(const UnimodalMap& f2, const BigScalar& x, long m, Precision p) {
  return iterate_point(f2, x.at(f2.prec()), m).at(p);
}

void check_diffeomorphism(const UnimodalMap& f, const RInterval& D, long S, const RInterval& target) {
  Precision p = f.prec();
  UnimodalMap f2 = f.at_precision(p.doubled());
  BigScalar tol = BigScalar::pow2(-(p.bits - 16), p) * target.length();
  BigScalar ylo = forward(f2, D.lo(), S, p);
  BigScalar yhi = forward(f2, D.hi(), S, p);
  bool onto = (abs(ylo - target.lo()) <= tol && abs(yhi - target.hi()) <= tol) ||
              (abs(ylo - target.hi()) <= tol && abs(yhi - target.lo()) <= tol);
  int dir = 0;
  BigScalar prev = ylo;
  bool monotone = true;
  for (int i = 1; i <= 17; ++i) {
    BigScalar x = i == 17 ? D.hi() : D.lo() + D.length() * BigScalar(static_cast<long>(i), p) / BigScalar(17L, p);
    BigScalar y = i == 17 ? yhi : forward(f2, x, S, p);
    int s = y > prev ? 1 : (y < prev ? -1 : 0);
    if (s == 0 || (dir != 0 && s != dir)) monotone = false;
    dir = s;
    prev = std::move(y);
  }
  if (!onto || !monotone)
    throw Error(ErrorCode::Ambiguous, "branch [" + D.lo().to_string() + ", " + D.hi().to_string() +
                                          "] fails the diffeomorphism check at " + std::to_string(p.bits) + " bits (S = " +
                                          std::to_string(S) + (onto ? "" : ", not onto") + (monotone ? "" : ", not monotone") + ")");
}

int orientation_along(OrbitCache& cache, long from, long to) {
  int s = 1;
  for (long j = from; j < to; ++j) {
    int sg = cache.iterate(j).sign();
    if (sg < 0) s = -s;
  }
  return s;
}

struct Domains {
  std::vector<RInterval> dom;
  std::vector<long> S;
  std::vector<long> witness;
  std::vector<int> orientation;
  std::vector<int> of_visit;  // -1 for the last visit
  int central = 0;
};

Domains discover_domains(const Nest& nest, long n, const Visits& v) {
  OrbitCache& cache = *nest.orbit;
  const RInterval& I = nest.levels[static_cast<std::size_t>(n - 1)].T;
  Domains d;
  std::multimap<long, int> by_time;
  d.of_visit.assign(v.times.size(), -1);
  for (std::size_t i = 0; i + 1 < v.times.size(); ++i) {
    long a = v.times[i], b = v.times[i + 1];
    long S = b - a;
    const BigScalar& x = cache.iterate(a);
    int found = -1;
    auto range = by_time.equal_range(S);
    for (auto it = range.first; it != range.second; ++it) {
      if (d.dom[static_cast<std::size_t>(it->second)].contains(x)) {
        found = it->second;
        break;
      }
    }
    if (found < 0) {
      RInterval D = i == 0 ? nest.levels[static_cast<std::size_t>(n)].T : pullback_orbit_segment(cache, a, b, I);
      if (i != 0) check_diffeomorphism(cache.map(), D, S, I);
      found = static_cast<int>(d.dom.size());
      d.dom.push_back(D);
      d.S.push_back(S);
      d.witness.push_back(a);
      d.orientation.push_back(orientation_along(cache, a == 0 ? 1 : a, b));
      by_time.emplace(S, found);
    }
    d.of_visit[i] = found;
  }
  d.central = 0;
  return d;
}

struct Member {
  RInterval domain;
  RInterval folded;
  long transit;
  int target;  // index into Domains
  long f_time;
  long witness;
};

int find_member(const std::vector<Member>& ms, const BigScalar& ax) {
  for (std::size_t k = 0; k < ms.size(); ++k)
    if (ms[k].folded.contains(ax)) return static_cast<int>(k);
  return -1;
}

}  // namespace

LevelAnalysis analyze_level(const Nest& nest, long n, RenormOptions opt) {
  if (n < 1 || n > nest.depth()) throw Error(ErrorCode::NotBuilt, "level " + std::to_string(n) + " not built");
  OrbitCache& cache = *nest.orbit;
  const RInterval& Iprev = nest.levels[static_cast<std::size_t>(n - 1)].T;
  const RInterval& In = nest.levels[static_cast<std::size_t>(n)].T;
  Visits v = collect_visits(cache, Iprev, default_visit_cap(nest, opt));
  Domains d = discover_domains(nest, n, v);
  if (d.dom.size() < 2)
    throw Error(ErrorCode::CapExceeded, "fewer than two branches witnessed at level " + std::to_string(n));

  LevelAnalysis out;
  out.level = n;
  out.visits = static_cast<long>(v.times.size());
  out.truncated = v.truncated;

  // Real-line labels, central first.
  std::vector<int> order(d.dom.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (a == d.central || b == d.central) return a == d.central && b != d.central;
    return d.dom[static_cast<std::size_t>(a)].lo() < d.dom[static_cast<std::size_t>(b)].lo();
  });
  std::vector<int> real_label(d.dom.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    int idx = order[k];
    real_label[static_cast<std::size_t>(idx)] = static_cast<int>(k);
    out.branches.push_back(Branch{static_cast<int>(k), d.dom[static_cast<std::size_t>(idx)], d.S[static_cast<std::size_t>(idx)],
                                  d.orientation[static_cast<std::size_t>(idx)], d.witness[static_cast<std::size_t>(idx)]});
  }
  {
    std::vector<RInterval> folded;
    for (const RInterval& D : d.dom) {
      RInterval F = fold(D);
      if (std::none_of(folded.begin(), folded.end(), [&](const RInterval& G) { return same_domain(G, F); }))
        folded.push_back(F);
    }
    out.folded_branch_count = static_cast<int>(folded.size());
  }

  const std::size_t nv = v.times.size();
  auto is_central = [&](std::size_t i) { return d.of_visit[i] == d.central; };
  // Central steps before the next non-central visit; -1 when unknown.
  std::vector<long> esc(nv, -1);
  for (std::size_t i = nv; i-- > 0;) {
    if (d.of_visit[i] < 0) continue;
    if (!is_central(i))
      esc[i] = 0;
    else if (i + 1 < nv && esc[i + 1] >= 0)
      esc[i] = esc[i + 1] + 1;
  }

  const bool cascade = nest.levels[static_cast<std::size_t>(n)].central.value_or(false);
  std::vector<Member> members;
  std::vector<int> member_of(nv, -1);
  std::vector<long> next_of(nv, -1);
  std::optional<RInterval> L0;

  if (!cascade) {
    members.push_back(Member{In, fold(In), kInfiniteTransit, d.central, d.S[static_cast<std::size_t>(d.central)], 0});
    for (std::size_t i = 0; i < nv; ++i) {
      if (d.of_visit[i] < 0) break;
      next_of[i] = static_cast<long>(i + 1);
      if (is_central(i)) {
        member_of[i] = 0;
        continue;
      }
      const BigScalar ax = abs(cache.iterate(v.times[i]));
      int m = find_member(members, ax);
      if (m < 0) {
        std::size_t di = static_cast<std::size_t>(d.of_visit[i]);
        m = static_cast<int>(members.size());
        members.push_back(Member{d.dom[di], fold(d.dom[di]), 0, d.of_visit[i], d.S[di], v.times[i]});
      }
      member_of[i] = m;
    }
    L0 = In;
    out.cascade_length = 0;
  } else {
    long t = esc[0];
    if (t < 0 || static_cast<std::size_t>(t + 1) >= nv)
      throw Error(ErrorCode::EscapeNotFound, "central cascade at level " + std::to_string(n) + " does not escape");
    out.cascade_length = t - 1;
    long end = v.times[static_cast<std::size_t>(t + 1)];
    L0 = pullback_orbit_segment(cache, 0, end, Iprev);
    members.push_back(Member{*L0, fold(*L0), t, d.of_visit[static_cast<std::size_t>(t)], end, 0});
    for (std::size_t i = 0; i < nv; ++i) {
      if (d.of_visit[i] < 0 || esc[i] < 0) break;
      std::size_t j = i + static_cast<std::size_t>(esc[i]) + 1;
      if (j >= nv) break;
      next_of[i] = static_cast<long>(j);
      const BigScalar& x = cache.iterate(v.times[i]);
      if (i == 0) {
        member_of[i] = 0;
        continue;
      }
      if (is_central(i)) {
        Membership in0 = cache.classify(v.times[i], *L0);
        if (in0 == Membership::Ambiguous) break;
        if (in0 == Membership::Inside) {
          member_of[i] = 0;
          continue;
        }
      }
      BigScalar ax = abs(x);
      int m = find_member(members, ax);
      if (m < 0) {
        m = static_cast<int>(members.size());
        long a = v.times[i], b = v.times[j];
        RInterval D = pullback_orbit_segment(cache, a, b, Iprev);
        members.push_back(Member{D, fold(D), esc[i], d.of_visit[j - 1], b - a, a});
      }
      member_of[i] = m;
    }
  }

  // Folded labels: L_0 first, then by folded position.
  std::vector<int> morder(members.size());
  for (std::size_t k = 0; k < morder.size(); ++k) morder[k] = static_cast<int>(k);
  std::sort(morder.begin() + 1, morder.end(), [&](int a, int b) {
    return members[static_cast<std::size_t>(a)].folded.lo() < members[static_cast<std::size_t>(b)].folded.lo();
  });
  std::vector<int> mlabel(members.size());
  for (std::size_t k = 0; k < morder.size(); ++k) mlabel[static_cast<std::size_t>(morder[k])] = static_cast<int>(k);
  for (std::size_t k = 0; k < morder.size(); ++k) {
    const Member& M = members[static_cast<std::size_t>(morder[k])];
    out.family.push_back(LandingInterval{static_cast<int>(k), M.domain, M.transit, real_label[static_cast<std::size_t>(M.target)],
                                         M.f_time, M.witness});
  }

  // k_-: the longest transit path passing through each member.
  std::vector<long> kminus(members.size(), 0);
  for (std::size_t i = 0; i < nv; ++i) {
    if (member_of[i] < 0) break;
    long tK = members[static_cast<std::size_t>(member_of[i])].transit;
    if (tK <= 0) continue;
    for (long k = 1; k <= tK && i + static_cast<std::size_t>(k) < nv; ++k) {
      int M = member_of[i + static_cast<std::size_t>(k)];
      if (M < 0) {
        // The visit after a transit path is reached even when its own member is unknown.
        if (k == tK && d.of_visit[i + static_cast<std::size_t>(k)] >= 0) {
          int target = find_member(members, abs(cache.iterate(v.times[i + static_cast<std::size_t>(k)])));
          if (target >= 0) kminus[static_cast<std::size_t>(target)] = std::max(kminus[static_cast<std::size_t>(target)], k);
        }
        break;
      }
      kminus[static_cast<std::size_t>(M)] = std::max(kminus[static_cast<std::size_t>(M)], k);
    }
  }
  out.depths.assign(members.size(), 0);
  for (std::size_t k = 0; k < members.size(); ++k) {
    long kp = members[k].transit;
    long depth = kp == kInfiniteTransit ? kminus[k] : std::min(kminus[k], kp);
    out.depths[static_cast<std::size_t>(mlabel[k])] = depth;
  }

  // G_n-chain of the critical point; every landing in L_0 starts a next-level branch.
  std::vector<std::size_t> chain;
  for (long i = 0; i >= 0 && static_cast<std::size_t>(i) < nv && member_of[static_cast<std::size_t>(i)] >= 0;
       i = next_of[static_cast<std::size_t>(i)])
    chain.push_back(static_cast<std::size_t>(i));
  struct Next {
    RInterval folded;
    RInterval domain;
    std::vector<int> itinerary;
  };
  std::vector<Next> next;
  std::size_t start = 0;
  for (std::size_t c = 1; c < chain.size(); ++c) {
    if (member_of[chain[c]] != 0) continue;
    std::vector<int> itin;
    for (std::size_t q = start; q < c; ++q) itin.push_back(mlabel[static_cast<std::size_t>(member_of[chain[q]])]);
    if (static_cast<long>(itin.size()) > opt.return_cap)
      throw Error(ErrorCode::CapExceeded, "itinerary longer than the return cap at level " + std::to_string(n));
    long a = v.times[chain[start]], b = v.times[chain[c]];
    BigScalar ax = abs(cache.iterate(a));
    bool seen = std::any_of(next.begin(), next.end(), [&](const Next& N) { return N.folded.contains(ax); });
    if (!seen) {
      RInterval D = pullback_orbit_segment(cache, a, b, *L0);
      next.push_back(Next{fold(D), D, std::move(itin)});
    }
    start = c;
  }
  std::sort(next.begin(), next.end(), [](const Next& A, const Next& B) { return A.folded.lo() < B.folded.lo(); });
  for (Next& N : next) {
    out.next_domains.push_back(N.domain);
    out.itineraries.push_back(std::move(N.itinerary));
  }
  return out;
}

std::vector<Branch> return_map_domains(const Nest& nest, long n, long cap) {
  if (n < 1 || n > nest.depth()) throw Error(ErrorCode::NotBuilt, "level " + std::to_string(n) + " not built");
  Visits v = collect_visits(*nest.orbit, nest.levels[static_cast<std::size_t>(n - 1)].T, cap);
  Domains d = discover_domains(nest, n, v);
  if (d.dom.size() < 2)
    throw Error(ErrorCode::CapExceeded, "fewer than two branches witnessed at level " + std::to_string(n));
  std::vector<int> order(d.dom.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  std::sort(order.begin() + 1, order.end(), [&](int a, int b) {
    return d.dom[static_cast<std::size_t>(a)].lo() < d.dom[static_cast<std::size_t>(b)].lo();
  });
  std::vector<Branch> out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    std::size_t i = static_cast<std::size_t>(order[k]);
    out.push_back(Branch{static_cast<int>(k), d.dom[i], d.S[i], d.orientation[i], d.witness[i]});
  }
  return out;
}

std::vector<Branch> return_map_domains(const Nest& nest, long n, RenormOptions opt) {
  return return_map_domains(nest, n, default_visit_cap(nest, opt));
}

std::pair<long, std::vector<LandingInterval>> cascade_structure(const Nest& nest, long n_start, RenormOptions opt) {
  if (classify_level(nest, n_start) == Centrality::NonCentral) return {0, {}};
  LevelAnalysis a = analyze_level(nest, n_start, opt);
  return {a.cascade_length, std::move(a.family)};
}

BernoulliStep bernoulli_map_apply(const LevelAnalysis& level, const UnimodalMap& f, const BigScalar& x) {
  BigScalar ax = abs(x);
  for (const LandingInterval& L : level.family) {
    RInterval F = fold(L.domain);
    if (!F.contains(ax)) continue;
    Precision p = std::max(f.prec(), x.prec());
    UnimodalMap f2 = f.at_precision(Precision(p.bits * 2));
    return BernoulliStep{L.label, iterate_point(f2, x.at(f2.prec()), L.f_time).at(p)};
  }
  throw Error(ErrorCode::NotInDomain, "x = " + x.to_string() + " lies in a gap of the landing family");
}

BernoulliStep bernoulli_map_apply(const Nest& nest, long n, const BigScalar& x, RenormOptions opt) {
  return bernoulli_map_apply(analyze_level(nest, n, opt), nest.map, x);
}

CombinatoricsRecord to_record(const LevelAnalysis& a) {
  CombinatoricsRecord k;
  k.level = a.level;
  k.branch_count = a.folded_branch_count;
  for (const LandingInterval& L : a.family) k.ordering.push_back(L.label);
  k.itineraries = a.itineraries;
  k.depths = a.depths;
  for (const LandingInterval& L : a.family) k.transit_times.push_back(L.transit_time);
  return k;
}

CombinatoricsRecord combinatorics(const Nest& nest, long n, RenormOptions opt) {
  if (n + 1 > nest.depth())
    throw Error(ErrorCode::NotBuilt, "combinatorics of level " + std::to_string(n) + " needs level " + std::to_string(n + 1));
  return to_record(analyze_level(nest, n, opt));
}

CombinatoricsRecord essential_part(const CombinatoricsRecord& k, long cutoff) {
  std::vector<int> renum(k.depths.size(), -1);
  int next = 0;
  for (int label : k.ordering) {
    std::size_t l = static_cast<std::size_t>(label);
    if (l < k.depths.size() && k.depths[l] <= cutoff) renum[l] = 0;
  }
  // Order-preserving renumbering by original label.
  for (std::size_t l = 0; l < renum.size(); ++l)
    if (renum[l] == 0) renum[l] = next++;
  CombinatoricsRecord out;
  out.level = k.level;
  out.branch_count = k.branch_count;
  for (int label : k.ordering) {
    std::size_t l = static_cast<std::size_t>(label);
    if (l < renum.size() && renum[l] >= 0) out.ordering.push_back(renum[l]);
  }
  for (const auto& it : k.itineraries) {
    std::vector<int> r;
    for (int label : it) {
      std::size_t l = static_cast<std::size_t>(label);
      if (l < renum.size() && renum[l] >= 0) r.push_back(renum[l]);
    }
    out.itineraries.push_back(std::move(r));
  }
  out.depths.resize(static_cast<std::size_t>(next));
  out.transit_times.resize(static_cast<std::size_t>(next));
  for (std::size_t l = 0; l < renum.size(); ++l) {
    if (renum[l] < 0) continue;
    out.depths[static_cast<std::size_t>(renum[l])] = k.depths[l];
    if (l < k.transit_times.size()) out.transit_times[static_cast<std::size_t>(renum[l])] = k.transit_times[l];
  }
  return out;
}

bool essentially_equivalent(const CombinatoricsRecord& k1, const CombinatoricsRecord& k2, long depth_cutoff) {
  CombinatoricsRecord a = essential_part(k1, depth_cutoff);
  CombinatoricsRecord b = essential_part(k2, depth_cutoff);
  return a.ordering == b.ordering && a.itineraries == b.itineraries && a.depths == b.depths;
}

EssentialBound essential_bound(const std::vector<CombinatoricsRecord>& records) {
  EssentialBound b;
  std::vector<long> bc, dp, rt;
  for (const CombinatoricsRecord& k : records) {
    long depth = 0, ret = 0;
    for (const auto& it : k.itineraries) {
      ret = std::max(ret, static_cast<long>(it.size()));
      for (int label : it)
        if (static_cast<std::size_t>(label) < k.depths.size()) depth = std::max(depth, k.depths[static_cast<std::size_t>(label)]);
    }
    bc.push_back(k.branch_count);
    dp.push_back(depth);
    rt.push_back(ret);
  }
  auto maxof = [](const std::vector<long>& v) { return v.empty() ? 0L : *std::max_element(v.begin(), v.end()); };
  auto growing = [](const std::vector<long>& v) {
    for (std::size_t i = 0; i + 2 < v.size(); ++i)
      if (v[i] < v[i + 1] && v[i + 1] < v[i + 2]) return true;
    return false;
  };
  b.branch_count_bound = maxof(bc);
  b.depth_bound = maxof(dp);
  b.return_time_bound = maxof(rt);
  b.branch_count_growing = growing(bc);
  b.depth_growing = growing(dp);
  b.return_time_growing = growing(rt);
  return b;
}

}  // namespace prinest
