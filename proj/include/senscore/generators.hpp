#pragma once

#include <cstdint>
#include <vector>

#include "senscore/point_set.hpp"

namespace senscore {

struct MixtureSpec {
  int components = 3;
  double separation = 10.0;   // distance scale between component means
  double spread = 1.0;        // within-component standard deviation
  double imbalance = 0.0;     // 0 = equal sizes; 1 = strongly geometric sizes
};

// Gaussian mixture with means uniform in a separation-scaled box.
PointSet generate_mixture(Eigen::Index n, Eigen::Index d, const MixtureSpec& spec, std::uint64_t seed);

// Points near k random lines, gaussian noise of the given sigma.
PointSet generate_near_lines(Eigen::Index n, Eigen::Index d, int k, double noise, std::uint64_t seed);

// Points on a random j-flat plus full-dimensional gaussian noise.
PointSet generate_flat_noise(Eigen::Index n, Eigen::Index d, int j, double noise, std::uint64_t seed);

// Integer coordinates uniform in [-n^c, n^c].
PointSet generate_integer_grid(Eigen::Index n, Eigen::Index d, double exponent_c, std::uint64_t seed);

// Isometric embedding into a higher dimension: x -> x * Q with orthonormal
// rows Q (d_in x d_out), seeded; pairwise distances are preserved.
PointSet embed_isometric(const PointSet& P, Eigen::Index d_out, std::uint64_t seed);

}  // namespace senscore
