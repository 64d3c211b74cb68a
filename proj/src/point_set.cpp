#include "senscore/point_set.hpp"

#include <cmath>
#include <numeric>
#include <span>

#include "senscore/errors.hpp"
#include "senscore/numerics.hpp"

namespace senscore {

PointSet::PointSet(Eigen::MatrixXd pts)
    : coords(std::move(pts)), weights(Eigen::VectorXd::Ones(coords.rows())), ids(coords.rows()) {
  std::iota(ids.begin(), ids.end(), std::int64_t{0});
  validate();
}

PointSet::PointSet(Eigen::MatrixXd pts, Eigen::VectorXd w)
    : coords(std::move(pts)), weights(std::move(w)), ids(coords.rows()) {
  std::iota(ids.begin(), ids.end(), std::int64_t{0});
  validate();
}

PointSet::PointSet(Eigen::MatrixXd pts, Eigen::VectorXd w, std::vector<std::int64_t> point_ids)
    : coords(std::move(pts)), weights(std::move(w)), ids(std::move(point_ids)) {
  validate();
}

double PointSet::total_weight() const {
  return pairwise_sum(std::span<const double>(weights.data(), static_cast<std::size_t>(weights.size())));
}

void PointSet::validate() const {
  if (coords.rows() < 1 || coords.cols() < 1) {
    throw InputError("point set must have n >= 1 and d >= 1");
  }
  if (!coords.allFinite()) {
    throw InputError("point set has non-finite coordinates");
  }
  if (weights.size() != coords.rows()) {
    throw InputError("weight vector length does not match point count");
  }
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw InputError("weights must be strictly positive and finite");
    }
  }
  if (ids.size() != static_cast<std::size_t>(coords.rows())) {
    throw InputError("id vector length does not match point count");
  }
}

}  // namespace senscore
