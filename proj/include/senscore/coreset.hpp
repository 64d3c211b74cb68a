#pragma once

#include <cstdint>
#include <vector>

#include "senscore/point_set.hpp"
#include "senscore/sensitivity.hpp"

namespace senscore {

/// Sample-size plan: m = ceil(C * (T / epsilon)^2 * dim_estimate), capped at n.
struct CoresetPlan {
  double epsilon = 0.1;
  double total_T = 1.0;
  int dim_estimate = 1;       // defaults to (j+1)*d*k upstream
  double size_constant = 1.0;  // the constant the size bound hides
  Eigen::Index size_m = 1;
  bool capped = false;
};

/// A positively weighted sub-multiset of the instance it was drawn from.
struct Coreset {
  std::vector<Eigen::Index> indices;  // into P, with multiplicity
  Eigen::VectorXd weights;            // strictly positive
  CoresetPlan plan;
  std::uint64_t seed = 0;

  // Weighted point set view of the coreset (coordinates copied from P).
  PointSet materialize(const PointSet& P) const;
};

CoresetPlan plan_size(double epsilon, const SensitivityProfile& profile, int dim_estimate, double size_constant,
                      Eigen::Index n);

// m i.i.d. draws with probability bounds[p]/T and weight w_p*T/(m*bounds[p]).
// Unbiased for every fixed shape. Refuses raw lower-bound profiles.
Coreset draw(const PointSet& P, const SensitivityProfile& profile, Eigen::Index m, std::uint64_t seed);
Coreset draw(const PointSet& P, const SensitivityProfile& profile, const CoresetPlan& plan, std::uint64_t seed);

// s'(p) = (1-gamma)*s(p) + gamma*w_p/W; guarantees a positive floor so
// sampling weights stay bounded. Marks the profile floor_mixed.
SensitivityProfile mix_floor(const SensitivityProfile& profile, const PointSet& P, double gamma);

// Uniform profile (s = w/W): the baseline sampler.
SensitivityProfile uniform_profile(const PointSet& P);

struct EvalOptions {
  int n_random = 64;
  int n_subset_fits = 16;
  int n_adversarial = 8;
  int ascent_steps = 48;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Empirical sup of the relative cost error over a shape ensemble. Adversarial
/// members hill-climb the error itself, so the reported max is a lower bound
/// on the true sup.
struct EvalReport {
  double max_rel_error = 0.0;
  double q50 = 0.0, q90 = 0.0, q99 = 0.0;
  double max_random = 0.0, max_subset = 0.0, max_adversarial = 0.0;
  int shapes_evaluated = 0;
};

EvalReport evaluate(const PointSet& P, const PointSet& S, Family family, const FamilyParams& params,
                    const DistanceConfig& cfg, const EvalOptions& opts);

}  // namespace senscore
