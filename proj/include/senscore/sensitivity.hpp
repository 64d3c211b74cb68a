#pragma once

#include <optional>
#include <string>
#include <vector>

#include "senscore/fitters.hpp"
#include "senscore/geometry.hpp"
#include "senscore/point_set.hpp"
#include "senscore/shapes.hpp"

namespace senscore {

/// Per-point upper (or, for the empirical estimator, lower) bounds on each
/// point's worst-case share of the instance cost. Bounds are aggregated over
/// the point's weight, so each lies in (0,1] and the totals are plain sums.
struct SensitivityProfile {
  Eigen::VectorXd bounds;        // clamped to (0,1]
  double total = 0.0;            // sum of clamped bounds
  double unclamped_total = 0.0;  // sum before clamping; what the closed forms bound
  std::string method;            // kcenters-closed-form | subspace-conditioned-basis |
                                 // empirical-adversarial | exact-oracle | uniform
  bool loose = false;            // conditioned-basis fallback with n-dependent slack
  bool lower_bound = false;      // estimator output; not a certified upper bound
  bool floor_mixed = false;      // uniform floor mixed in; safe to sample from
  double floor_gamma = 0.0;
  std::optional<FitResult> fit;  // fit the bounds were derived from
  int reduction_dim = 0;         // dimension of the reduced instance, 0 if unused
};

/// Coordinates of the projected instance in an orthonormal basis of a
/// subspace that contains it, sized so that shape-relative geometry is
/// preserved: m = min(dim span(P') + k(j+1), d).
struct ReducedInstance {
  Eigen::MatrixXd basis;   // m x d, orthonormal rows
  Eigen::MatrixXd coords;  // n x m
  Eigen::Index point_span_dim = 0;  // m1
  Eigen::Index shape_span_dim = 0;  // m2 = k(j+1)
};

/// Column basis A of a matrix M with certified entrywise z-norm (alpha) and
/// dual-norm distortion (beta): ||u||_{z'} <= beta * ||A u||_z.
struct ConditionedBasis {
  Eigen::MatrixXd A;  // n x rank, orthonormal columns
  Eigen::Index rank = 0;
  double alpha_cb = 0.0;
  double beta_cb = 0.0;
  double z = 2.0;
  bool loose = false;  // beta certified only through norm equivalence
};

// Projects P onto F and expresses the projected points in an orthonormal
// basis built from the shape's constituents, completed with principal
// directions of the projection residuals.
std::pair<Projection, ReducedInstance> reduce(const PointSet& P, const Shape& F, const DistanceConfig& cfg);

// Closed-form bounds for k-point shapes: the dimension-reduction inequality
// with the per-cluster share of the projected multiset.
SensitivityProfile sens_kcenters(const PointSet& P, const FitResult& fit, const DistanceConfig& cfg);

// Orthonormal column basis with certified (alpha, beta, z) parameters; exact
// for z = 2, norm-equivalence fallback otherwise.
ConditionedBasis conditioned_basis(const Eigen::MatrixXd& M, double z);

// Bounds for j-flat shapes: reduce, then homogeneous-coordinate row norms of
// a conditioned basis bound the hyperplane (hence flat) sensitivities.
SensitivityProfile sens_subspace(const PointSet& P, const FitResult& fit, const DistanceConfig& cfg);

struct EmpiricalOptions {
  int budget = 256;  // number of candidate shapes
  std::uint64_t seed = 0;
  int ascent_steps = 60;
  int threads = 1;
  std::vector<Shape> extra_candidates;  // caller-supplied adversarial shapes
};

// Best observed share per point over a candidate ensemble: a certified lower
// bound, flagged as such; mix a floor in before sampling from it.
SensitivityProfile sens_empirical(const PointSet& P, Family family, const FamilyParams& params,
                                  const DistanceConfig& cfg, const EmpiricalOptions& opts);

struct LowerBoundInstance {
  PointSet points;            // geometric sequence on the x-axis
  std::vector<Shape> shapes;  // one vertical/horizontal line pair per point
};

// Two-line instance family whose total sensitivity grows logarithmically.
LowerBoundInstance lowerbound_instance(int n);

// Per-term ratios dist(p_i, F_i) / dist(P, F_i), i = 1..n, evaluated in
// closed form so deep terms do not underflow.
std::vector<double> lowerbound_ratio_table(int n);
double lowerbound_total(int n);

struct OracleOptions {
  std::uint64_t seed = 0;
  int ascent_restarts = 6;
  int ascent_steps = 80;
  int threads = 1;
};

// Reference sensitivities at tiny scale: dense structured candidates
// (optimal shapes of every subset and partition, shapes through point
// tuples) plus multi-start hill climbing. Supported: n <= 12, d <= 3,
// kcenters (k <= 3, z in {1,2}), klines (k <= 2, z = 2), jflat (j <= 2, z = 2).
SensitivityProfile exact_sensitivity_oracle(const PointSet& P, Family family, const FamilyParams& params,
                                            const DistanceConfig& cfg, const OracleOptions& opts = {});

}  // namespace senscore
