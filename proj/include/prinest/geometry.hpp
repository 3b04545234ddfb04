#pragma once

// Scaling factors, commensurability of the pieces of each level, decay fits,
// the small-factor trigger and near-parabolic measurements of cascades.

#include <optional>
#include <string>
#include <vector>

#include "prinest/big_scalar.hpp"
#include "prinest/nest.hpp"
#include "prinest/renorm.hpp"

namespace prinest {

/// Pieces of T: the domains, their mirror images, and the gaps between them.
struct PieceGeometry {
  double c_geo = 0;             // max |T| / |piece|
  double extension_margin = 0;  // min distance from the domains to the boundary of T, over |T|
  long pieces = 0;

  friend bool operator==(const PieceGeometry&, const PieceGeometry&) = default;
};

PieceGeometry piece_geometry(const RInterval& T, const std::vector<RInterval>& domains);

struct DecayFit {
  double C = 0;
  double rho = 0;
  double residual = 0;  // max |log deviation|
  long points = 0;
  bool accepted = false;

  friend bool operator==(const DecayFit&, const DecayFit&) = default;
};

struct Trigger {
  long N = 0;
  double delta = 0;

  friend bool operator==(const Trigger&, const Trigger&) = default;
};

struct LevelGeometry {
  long level = 0;
  BigScalar lambda;
  bool central = false;
  // Unset when the level's branches could not be resolved.
  std::optional<PieceGeometry> pieces;

  friend bool operator==(const LevelGeometry&, const LevelGeometry&) = default;
};

struct GeometryOptions {
  double delta = 0.01;
  RenormOptions renorm;
};

struct GeometryReport {
  std::vector<LevelGeometry> levels;  // levels 1..depth
  std::vector<long> noncentral_levels;
  std::vector<BigScalar> noncentral_lambdas;  // lambda_{n_k + 1}
  std::optional<DecayFit> decay;              // unset: fewer than four points
  std::optional<Trigger> trigger;             // unset: not triggered
  double delta = 0.01;
  std::string indexing;

  friend bool operator==(const GeometryReport&, const GeometryReport&) = default;
};

/// Points (k, log lambda_k) with k = 1, 2, ...; least squares line, rho = exp(slope).
/// Throws InsufficientData below four points.
DecayFit decay_fit(const std::vector<double>& lambdas);
DecayFit decay_fit(const std::vector<BigScalar>& lambdas);

/// Smallest 1-based N with lambdas[N-1] < delta.
std::optional<Trigger> small_factor_trigger(const std::vector<double>& lambdas, double delta);
std::optional<Trigger> small_factor_trigger(const std::vector<BigScalar>& lambdas, double delta);

/// branches[n-1] holds the return-map domains of level n; an empty entry leaves the level unresolved.
GeometryReport geometry_report(const Nest& nest, const std::vector<std::vector<Branch>>& branches,
                               const GeometryOptions& opt = {});
GeometryReport geometry_report(const Nest& nest, const GeometryOptions& opt = {});

/// True when c_geo strictly increases over some run of `run` consecutive resolved levels.
bool c_geo_growing(const GeometryReport& r, long run = 4);

struct ParabolicProximity {
  enum class Kind { Fixed, Ghost };
  long level = 0;
  long cascade_length = 0;
  Kind kind = Kind::Fixed;
  BigScalar fixed_point;
  BigScalar multiplier;     // chain rule
  BigScalar multiplier_fd;  // central difference with step 2^-(bits/2)
  BigScalar gap;            // g_n(x) - x at the reported point (0 for a fixed point)
  bool inside_level = false;  // the point lies in I^n (not only in the cascade's first level)
  bool low_return = false;

  friend bool operator==(const ParabolicProximity&, const ParabolicProximity&) = default;
};

std::string_view to_string(ParabolicProximity::Kind k);

/// Requires level n central. The point is searched on the half of the cascade's
/// first level on the side of g_n(0): a fixed point when g_n(x) - x changes
/// sign there, otherwise the tangency g_n' = 1 (a ghost when it stays off the
/// diagonal). Throws NoFixedPoint when there is neither.
ParabolicProximity parabolic_proximity(const Nest& nest, long n);

}  // namespace prinest
