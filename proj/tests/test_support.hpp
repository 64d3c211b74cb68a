#pragma once

#include <Eigen/Dense>
#include <random>

#include "senscore/point_set.hpp"
#include "senscore/shapes.hpp"

namespace senscore::testing {

inline Eigen::MatrixXd random_rotation(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

inline Eigen::MatrixXd random_points(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng, double scale = 5.0) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = unif(rng);
  }
  return m;
}

// A point lying exactly on the shape, for projection-optimality checks.
inline Eigen::VectorXd sample_point_on_shape(const Shape& F, std::mt19937_64& rng, double scale = 5.0) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  return std::visit(
      [&](const auto& v) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, KPointSet>) {
          std::uniform_int_distribution<Eigen::Index> pick(0, v.centers.rows() - 1);
          return v.centers.row(pick(rng)).transpose();
        } else if constexpr (std::is_same_v<T, KLineSet>) {
          std::uniform_int_distribution<std::size_t> pick(0, v.lines.size() - 1);
          const Line& line = v.lines[pick(rng)];
          return line.anchor + unif(rng) * line.direction;
        } else if constexpr (std::is_same_v<T, JFlat>) {
          Eigen::VectorXd p = v.anchor;
          for (Eigen::Index r = 0; r < v.basis.rows(); ++r) p += unif(rng) * v.basis.row(r).transpose();
          return p;
        } else {
          std::uniform_int_distribution<std::size_t> pick(0, v.flats.size() - 1);
          const JFlat& flat = v.flats[pick(rng)];
          Eigen::VectorXd p = flat.anchor;
          for (Eigen::Index r = 0; r < flat.basis.rows(); ++r) p += unif(rng) * flat.basis.row(r).transpose();
          return p;
        }
      },
      F.value);
}

}  // namespace senscore::testing
