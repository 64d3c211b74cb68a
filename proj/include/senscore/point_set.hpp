#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace senscore {

/// A finite weighted point set in R^d. Rows of `coords` are points. Weights
/// default to 1 and must stay strictly positive; `ids` are stable per-point
/// identifiers that survive subsetting and serialization.
struct PointSet {
  Eigen::MatrixXd coords;            // n x d
  Eigen::VectorXd weights;           // n, all > 0
  std::vector<std::int64_t> ids;     // n

  PointSet() = default;
  explicit PointSet(Eigen::MatrixXd pts);
  PointSet(Eigen::MatrixXd pts, Eigen::VectorXd w);
  PointSet(Eigen::MatrixXd pts, Eigen::VectorXd w, std::vector<std::int64_t> point_ids);

  Eigen::Index size() const { return coords.rows(); }
  Eigen::Index dim() const { return coords.cols(); }
  double total_weight() const;

  // Throws InputError when n or d is zero, any coordinate is non-finite, or
  // any weight is not strictly positive and finite.
  void validate() const;
};

}  // namespace senscore
