#include "prinest/nest.hpp"

#include <cmath>

#include "prinest/error.hpp"

namespace prinest {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::None: return "None";
    case Termination::NonRecurrent: return "NonRecurrent";
    case Termination::Renormalizable: return "Renormalizable";
    case Termination::PrecisionExhausted: return "PrecisionExhausted";
  }
  return "None";
}

long required_bits(const std::vector<NestLevel>& levels) {
  double sum = 0;
  for (std::size_t i = 1; i < levels.size(); ++i)
    sum += levels[i - 1].T.length().log2_abs() - levels[i].T.length().log2_abs();
  long bits = 128 + static_cast<long>(std::ceil(8 * sum));
  return (bits + 63) / 64 * 64;
}

namespace {

// Signals a rebuild at a higher precision.
struct Escalate {
  long bits;
  std::string reason;
};

bool same_interval(const RInterval& A, const RInterval& B, Precision p) {
  BigScalar tol = BigScalar::pow2(-(p.bits - 16), p) * A.length();
  return abs(A.lo() - B.lo()) <= tol && abs(A.hi() - B.hi()) <= tol;
}

bool trapped(OrbitCache& cache, long r, const RInterval& I, long persistence) {
  for (long k = 1; k <= persistence; ++k) {
    Membership m = Membership::Ambiguous;
    try {
      m = cache.classify(k * r, I);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PrecisionExhausted) throw;
      throw Escalate{cache.prec().bits * 2, e.what()};
    }
    if (m == Membership::Ambiguous) throw Escalate{cache.prec().bits * 2, "trap test grazes boundary"};
    if (m == Membership::Outside) return false;
  }
  return true;
}

struct Attempt {
  std::vector<NestLevel> levels;
  std::shared_ptr<OrbitCache> cache;
};

// Builds at fixed precision. Escalate is thrown when p is not enough; the
// partially built levels are left in `out`.
void build_at(const UnimodalMap& f, long max_levels, long cap, const NestOptions& opt, Attempt& out) {
  Precision p = f.prec();
  out.cache = std::make_shared<OrbitCache>(f);
  OrbitCache& cache = *out.cache;
  BigScalar al = alpha_fixed_point(f);
  out.levels.clear();
  out.levels.push_back(NestLevel{0, RInterval(al, -al), 0, std::nullopt, Termination::None});

  for (long n = 1; n <= max_levels; ++n) {
    const RInterval prev = out.levels.back().T;
    LandingResult land = LandingResult::non_recurrent();
    try {
      land = first_landing_time(cache, prev, cap);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PrecisionExhausted) throw;
      throw Escalate{p.bits * 2, e.what()};
    }
    if (land.kind == LandingResult::Kind::Ambiguous) throw Escalate{p.bits * 2, "landing grazes boundary"};
    if (land.kind == LandingResult::Kind::NonRecurrent) {
      out.levels.back().terminated_by = Termination::NonRecurrent;
      return;
    }
    long r = land.time;
    std::optional<RInterval> In;
    try {
      In = pullback_component(f, r, prev, cache);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PrecisionExhausted && e.code() != ErrorCode::PullbackEscapes) throw;
      throw Escalate{p.bits * 2, e.what()};
    }
    Membership m = cache.classify(r, *In);
    if (m == Membership::Ambiguous) throw Escalate{p.bits * 2, "central test grazes boundary"};
    bool central = m == Membership::Inside;
    out.levels.push_back(NestLevel{n, *In, r, central, Termination::None});

    if (same_interval(prev, *In, p) || (central && trapped(cache, r, *In, opt.persistence))) {
      out.levels.back().terminated_by = Termination::Renormalizable;
      return;
    }
    long need = required_bits(out.levels);
    if (need > p.bits) throw Escalate{need, "precision schedule"};
  }
}

}  // namespace

Nest build_nest(const UnimodalMap& f, long max_levels, long cap, NestOptions opt) {
  if (max_levels < 1) throw Error(ErrorCode::ConfigError, "max_levels must be >= 1");
  if (cap < 1) throw Error(ErrorCode::ConfigError, "orbit cap must be >= 1");
  if (opt.prec_max < f.prec().bits) throw Error(ErrorCode::ConfigError, "prec_max below starting precision");
  opt.orbit_cap = cap;
  long bits = f.prec().bits;
  Attempt att;
  while (true) {
    UnimodalMap g = f.at_precision(Precision(bits));
    try {
      build_at(g, max_levels, cap, opt, att);
      return Nest{g, alpha_fixed_point(g), std::move(att.levels), opt, std::move(att.cache)};
    } catch (const Escalate& e) {
      long next = std::max(e.bits, bits * 2);
      if (next > opt.prec_max) {
        att.levels.back().terminated_by = Termination::PrecisionExhausted;
        return Nest{g, alpha_fixed_point(g), std::move(att.levels), opt, std::move(att.cache)};
      }
      bits = next;
    }
  }
}

Nest build_nest(const UnimodalMap& f, long max_levels) { return build_nest(f, max_levels, 1'000'000); }

Centrality classify_level(const Nest& nest, long n) {
  if (n < 0 || n > nest.depth()) throw Error(ErrorCode::NotBuilt, "level " + std::to_string(n) + " not built");
  const auto& c = nest.levels[static_cast<std::size_t>(n)].central;
  if (!c) throw Error(ErrorCode::NotBuilt, "level " + std::to_string(n) + " has no return to classify");
  return *c ? Centrality::Central : Centrality::NonCentral;
}

std::vector<BigScalar> scaling_factors(const Nest& nest) {
  std::vector<BigScalar> out;
  for (std::size_t i = 1; i < nest.levels.size(); ++i)
    out.push_back(nest.levels[i].T.length() / nest.levels[i - 1].T.length());
  return out;
}

std::vector<long> noncentral_levels(const Nest& nest) {
  std::vector<long> out;
  for (const NestLevel& L : nest.levels)
    if (L.central && !*L.central) out.push_back(L.n);
  return out;
}

}  // namespace prinest
