#pragma once

#include <Eigen/Dense>

#include "senscore/point_set.hpp"
#include "senscore/shapes.hpp"

namespace senscore {

/// Result of projecting every point of an instance onto its nearest
/// constituent of a shape. `projected` keeps the source weights and ids;
/// `residuals` are z-power distances.
struct Projection {
  PointSet projected;
  Eigen::VectorXi assignment;  // index of the nearest constituent
  Eigen::VectorXd residuals;   // dist(p_i, F)
};

/// Nearest point on a single constituent together with its index.
struct NearestPoint {
  Eigen::VectorXd point;
  Eigen::Index constituent = 0;
  double sq_euclidean = 0.0;
};

// z-power distance from squared Euclidean distance (exact for z in {1,2}).
double zpow_from_squared(double sq, double z);

// Nearest constituent of F to p; ties broken by lowest constituent index.
NearestPoint nearest_on_shape(const Eigen::VectorXd& p, const Shape& F);

// min over constituents of ||p - q||^z; closed-form orthogonal projections.
double dist_point_shape(const Eigen::VectorXd& p, const Shape& F, const DistanceConfig& cfg);

Projection project_set(const PointSet& P, const Shape& F, const DistanceConfig& cfg);

// Weighted sum of residuals, pairwise-summed in point order.
double cost(const PointSet& P, const Shape& F, const DistanceConfig& cfg);
double cost(const PointSet& P, const Projection& proj);

}  // namespace senscore
