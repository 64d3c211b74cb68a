#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "senscore/geometry.hpp"
#include "senscore/point_set.hpp"
#include "senscore/shapes.hpp"

namespace senscore {

enum class Family { KCenters, KLines, JFlat, KJFlats };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

struct FamilyParams {
  int k = 1;
  int j = 0;
};

struct FitOptions {
  int restarts = 10;
  int max_iters = 100;
  double rel_tol = 1e-9;
  std::uint64_t seed = 0;
  // 0 keeps the per-method default (2 for k-centers, 4 for k-lines and for
  // flats fitted at z != 2, 1 where the solver is exactly optimal).
  double approx_factor = 0.0;
  int threads = 1;
};

/// A fitted shape with the multiplicative guarantee claimed for it and enough
/// provenance to replay the run.
struct FitResult {
  Shape shape;
  double cost = 0.0;
  double approx_factor_c = 1.0;
  std::string method;
  std::uint64_t seed = 0;
  // Cost after each accepted iteration of the winning restart; used to check
  // that the alternation never increases cost.
  std::vector<double> iteration_costs;
};

FitResult fit_kcenters(const PointSet& P, int k, const DistanceConfig& cfg, const FitOptions& opts = {});
FitResult fit_jflat(const PointSet& P, int j, const DistanceConfig& cfg, const FitOptions& opts = {});
FitResult fit_klines(const PointSet& P, int k, const DistanceConfig& cfg, const FitOptions& opts = {});

FitResult fit_family(const PointSet& P, Family family, const FamilyParams& params, const DistanceConfig& cfg,
                     const FitOptions& opts = {});

// Exact optimum by exhaustive partition enumeration (centers/lines) or SVD
// (flats). Supported: kcenters with z in {1,2}, klines and jflat with z = 2,
// n <= 14. Anything else raises CapabilityError.
FitResult exact_fit(const PointSet& P, Family family, const FamilyParams& params, const DistanceConfig& cfg);

// Weighted geometric median (Fermat-Weber point) to tolerance `tol`;
// iterates from the weighted mean and never increases the objective.
Eigen::VectorXd weiszfeld_median(const Eigen::MatrixXd& pts, const Eigen::VectorXd& weights, double tol = 1e-10,
                                 int max_iters = 1000);

}  // namespace senscore
