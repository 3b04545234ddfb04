#include "prinest/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "prinest/error.hpp"

namespace prinest {

PieceGeometry piece_geometry(const RInterval& T, const std::vector<RInterval>& domains) {
  if (domains.empty()) throw Error(ErrorCode::InsufficientData, "no domains to measure");
  Precision p = T.prec();
  BigScalar tol = BigScalar::pow2(-(p.bits - 16), p) * T.length();
  std::vector<RInterval> d = domains;
  std::sort(d.begin(), d.end(), [](const RInterval& a, const RInterval& b) { return a.lo() < b.lo(); });

  BigScalar smallest = T.length();
  long pieces = 0;
  auto piece = [&](const BigScalar& len) {
    if (len <= tol) return;
    ++pieces;
    if (len < smallest) smallest = len;
  };
  BigScalar edge = T.lo();
  for (const RInterval& D : d) {
    piece(D.lo() - edge);
    piece(D.length());
    if (D.hi() > edge) edge = D.hi();
  }
  piece(T.hi() - edge);

  BigScalar margin = min(d.front().lo() - T.lo(), T.hi() - edge);
  if (margin.sign() < 0) margin = BigScalar(p);
  PieceGeometry g;
  g.c_geo = (T.length() / smallest).to_double();
  g.extension_margin = (margin / T.length()).to_double();
  g.pieces = pieces;
  return g;
}

namespace {

DecayFit fit_logs(const std::vector<double>& y) {
  if (y.size() < 4) throw Error(ErrorCode::InsufficientData, "decay fit needs at least 4 points, got " + std::to_string(y.size()));
  const double n = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double x = static_cast<double>(i + 1);
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double icept = (sy - slope * sx) / n;
  double res = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    res = std::max(res, std::abs(y[i] - (icept + slope * static_cast<double>(i + 1))));
  DecayFit f;
  f.C = std::exp(icept);
  f.rho = std::exp(slope);
  f.residual = res;
  f.points = static_cast<long>(y.size());
  f.accepted = res <= 0.5 && slope < -1e-9;
  return f;
}

void check_delta(double delta) {
  if (!(delta > 0 && delta < 1)) throw Error(ErrorCode::ConfigError, "delta must lie in (0, 1)");
}

}  // namespace

DecayFit decay_fit(const std::vector<double>& lambdas) {
  std::vector<double> y;
  for (double l : lambdas) {
    if (!(l > 0)) throw Error(ErrorCode::DomainError, "scaling factors must be positive");
    y.push_back(std::log(l));
  }
  return fit_logs(y);
}

DecayFit decay_fit(const std::vector<BigScalar>& lambdas) {
  std::vector<double> y;
  for (const BigScalar& l : lambdas) {
    if (l.sign() <= 0) throw Error(ErrorCode::DomainError, "scaling factors must be positive");
    y.push_back(l.log2_abs() * std::log(2.0));
  }
  return fit_logs(y);
}

std::optional<Trigger> small_factor_trigger(const std::vector<double>& lambdas, double delta) {
  check_delta(delta);
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (lambdas[i] < delta) return Trigger{static_cast<long>(i + 1), delta};
  return std::nullopt;
}

std::optional<Trigger> small_factor_trigger(const std::vector<BigScalar>& lambdas, double delta) {
  check_delta(delta);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    BigScalar d(delta, lambdas[i].prec());
    if (lambdas[i] < d) return Trigger{static_cast<long>(i + 1), delta};
  }
  return std::nullopt;
}

GeometryReport geometry_report(const Nest& nest, const std::vector<std::vector<Branch>>& branches,
                               const GeometryOptions& opt) {
  check_delta(opt.delta);
  GeometryReport r;
  r.delta = opt.delta;
  r.indexing = "noncentral_lambdas[k-1] = lambda(n_k + 1), n_k = k-th level n with g_n(0) outside I^n";
  std::vector<BigScalar> lambdas = scaling_factors(nest);
  for (long n = 1; n <= nest.depth(); ++n) {
    const NestLevel& L = nest.levels[static_cast<std::size_t>(n)];
    LevelGeometry g;
    g.level = n;
    g.lambda = lambdas[static_cast<std::size_t>(n - 1)];
    g.central = L.central.value_or(false);
    if (static_cast<std::size_t>(n - 1) < branches.size() && !branches[static_cast<std::size_t>(n - 1)].empty()) {
      // f is even: the mirror image of a branch is a branch of the same return map.
      const RInterval& T = nest.levels[static_cast<std::size_t>(n - 1)].T;
      BigScalar tol = BigScalar::pow2(-(T.prec().bits - 16), T.prec()) * T.length();
      std::vector<RInterval> doms;
      auto add = [&](const RInterval& D) {
        for (const RInterval& E : doms)
          if (abs(E.lo() - D.lo()) <= tol && abs(E.hi() - D.hi()) <= tol) return;
        doms.push_back(D);
      };
      for (const Branch& b : branches[static_cast<std::size_t>(n - 1)]) {
        add(b.domain);
        add(b.domain.mirrored());
      }
      g.pieces = piece_geometry(T, doms);
    }
    r.levels.push_back(std::move(g));
  }
  r.noncentral_levels = noncentral_levels(nest);
  for (long nk : r.noncentral_levels)
    if (nk + 1 <= nest.depth()) r.noncentral_lambdas.push_back(lambdas[static_cast<std::size_t>(nk)]);
  try {
    r.decay = decay_fit(r.noncentral_lambdas);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
  }
  r.trigger = small_factor_trigger(lambdas, opt.delta);
  return r;
}

GeometryReport geometry_report(const Nest& nest, const GeometryOptions& opt) {
  std::vector<std::vector<Branch>> branches;
  for (long n = 1; n <= nest.depth(); ++n) {
    try {
      branches.push_back(return_map_domains(nest, n, opt.renorm));
    } catch (const Error&) {
      branches.emplace_back();
    }
  }
  return geometry_report(nest, branches, opt);
}

bool c_geo_growing(const GeometryReport& r, long run) {
  long len = 0;
  std::optional<double> prev;
  for (const LevelGeometry& g : r.levels) {
    if (!g.pieces) {
      len = 0;
      prev.reset();
      continue;
    }
    len = prev && g.pieces->c_geo > *prev ? len + 1 : 1;
    prev = g.pieces->c_geo;
    if (len >= run) return true;
  }
  return false;
}

std::string_view to_string(ParabolicProximity::Kind k) {
  return k == ParabolicProximity::Kind::Fixed ? "fixed" : "ghost";
}

namespace {

// Sign-change bisection of phi on [a, b]; phi(a) and phi(b) have opposite signs.
template <class Phi>
BigScalar bisect(BigScalar a, BigScalar b, const Phi& phi, Precision p) {
  int sa = phi(a).sign();
  BigScalar width = BigScalar::pow2(-(p.bits - 8), p) * abs(b - a);
  for (long it = 0; it < p.bits + 16 && abs(b - a) > width; ++it) {
    BigScalar m = (a + b) * BigScalar::pow2(-1, p);
    int sm = phi(m).sign();
    if (sm == 0) return m;
    if (sm == sa)
      a = std::move(m);
    else
      b = std::move(m);
  }
  return (a + b) * BigScalar::pow2(-1, p);
}

}  // namespace

ParabolicProximity parabolic_proximity(const Nest& nest, long n) {
  if (classify_level(nest, n) != Centrality::Central)
    throw Error(ErrorCode::DomainError, "level " + std::to_string(n) + " is not central");
  const UnimodalMap& f = nest.map;
  Precision p = f.prec();
  const long r = nest.levels[static_cast<std::size_t>(n)].r;
  auto g = [&](const BigScalar& x) { return iterate_point(f, x, r); };
  auto h = [&](const BigScalar& x) { return g(x) - x; };
  auto q = [&](const BigScalar& x) { return iterate_derivative(f, x, r) - 1L; };

  ParabolicProximity out;
  out.level = n;
  long lo = n, hi = n;
  while (lo > 1 && nest.levels[static_cast<std::size_t>(lo - 1)].central.value_or(false)) --lo;
  while (hi < nest.depth() && nest.levels[static_cast<std::size_t>(hi + 1)].central.value_or(false)) ++hi;
  out.cascade_length = hi - lo + 1;

  const BigScalar zero(p);
  const BigScalar g0 = g(zero);
  const BigScalar gR = g(nest.levels[static_cast<std::size_t>(n)].T.hi());
  out.low_return = g0.sign() != 0 && g0.sign() == gR.sign();
  // g_n is the same map on every level of the cascade, and late levels shrink
  // past the point where it nearly touches the diagonal, so the search runs on
  // the lap of the cascade's first level between 0 and the side of g_n(0).
  const BigScalar R = nest.levels[static_cast<std::size_t>(lo)].T.hi();
  const BigScalar b = g0.sign() < 0 ? -R : R;
  const BigScalar hb = h(b);

  BigScalar x;
  if (g0.sign() == 0) {
    x = zero;
    out.kind = ParabolicProximity::Kind::Fixed;
  } else if (g0.sign() != hb.sign()) {
    x = bisect(zero, b, h, p);
    out.kind = ParabolicProximity::Kind::Fixed;
  } else {
    // No sign change: look for the tangency g_n' = 1 on the lap.
    if (q(b).sign() <= 0)
      throw Error(ErrorCode::NoFixedPoint, "no fixed point and no tangency on the lap of level " + std::to_string(n));
    BigScalar t = bisect(zero, b, q, p);
    BigScalar ht = h(t);
    if (ht.sign() != g0.sign() && ht.sign() != 0) {
      // A saddle-node pair: report the member nearer the boundary.
      x = bisect(t, b, h, p);
      out.kind = ParabolicProximity::Kind::Fixed;
    } else {
      x = std::move(t);
      out.kind = ParabolicProximity::Kind::Ghost;
    }
  }
  out.gap = h(x);
  out.inside_level = nest.levels[static_cast<std::size_t>(n)].T.contains(x);
  out.multiplier = iterate_derivative(f, x, r);
  BigScalar step = BigScalar::pow2(-(p.bits / 2), p);
  out.multiplier_fd = (g(x + step) - g(x - step)) / (step * 2L);
  out.fixed_point = std::move(x);
  return out;
}

}  // namespace prinest
