#pragma once

#include <functional>
#include <random>
#include <span>
#include <vector>

#include "senscore/fitters.hpp"
#include "senscore/point_set.hpp"
#include "senscore/shapes.hpp"

namespace senscore {

struct BoundingBox {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static BoundingBox of(const PointSet& P);
  Eigen::VectorXd sample(std::mt19937_64& rng) const;
  double diagonal() const;
};

// Shape of the requested family with constituents placed uniformly in the
// (slightly inflated) box and random orientations.
Shape random_shape(Family family, const FamilyParams& params, const BoundingBox& box, std::mt19937_64& rng);

// Shape anchored on randomly chosen input points: centers at k points, lines
// through point pairs, flats through j+1 points (completed when degenerate).
Shape shape_through_points(Family family, const FamilyParams& params, const PointSet& P, std::mt19937_64& rng);

// Shape fitted cheaply (single restart, few iterations) to a random subset.
Shape fitted_subset_shape(Family family, const FamilyParams& params, const PointSet& P, const DistanceConfig& cfg,
                          Eigen::Index subset_size, std::mt19937_64& rng);

// Far-offset shape giving every input point a strictly positive distance.
Shape witness_shape(Family family, const FamilyParams& params, const BoundingBox& box, double direction_sign);

// Parameter-vector view of a shape, used by the hill climbers. decode keeps
// the variant and arity of `prototype` and renormalizes directions/bases.
std::vector<double> encode_shape(const Shape& s);
Shape decode_shape(const Shape& prototype, std::span<const double> params);

// Derivative-free maximization of `objective` over shapes of the prototype's
// family: gaussian perturbations with an adaptive step, keeping the best.
Shape ascend_shape(const Shape& prototype, const std::function<double(const Shape&)>& objective,
                   std::mt19937_64& rng, int steps, double initial_step);

}  // namespace senscore
