#include "senscore/geometry.hpp"

#include <cmath>
#include <limits>
#include <span>

#include "senscore/errors.hpp"
#include "senscore/numerics.hpp"

namespace senscore {

namespace {

Eigen::VectorXd project_onto_flat(const Eigen::VectorXd& p, const JFlat& flat) {
  if (flat.basis.rows() == 0) return flat.anchor;
  const Eigen::VectorXd r = p - flat.anchor;
  return flat.anchor + flat.basis.transpose() * (flat.basis * r);
}

Eigen::VectorXd project_onto_line(const Eigen::VectorXd& p, const Line& line) {
  const Eigen::VectorXd r = p - line.anchor;
  return line.anchor + line.direction * r.dot(line.direction);
}

}  // namespace

double zpow_from_squared(double sq, double z) {
  if (sq <= 0.0) return 0.0;
  if (z == 2.0) return sq;
  if (z == 1.0) return std::sqrt(sq);
  return std::pow(sq, 0.5 * z);
}

NearestPoint nearest_on_shape(const Eigen::VectorXd& p, const Shape& F) {
  if (p.size() != F.dim()) {
    throw InputError("point dimension does not match shape dimension");
  }
  NearestPoint best;
  best.sq_euclidean = std::numeric_limits<double>::infinity();
  auto consider = [&](Eigen::Index idx, const Eigen::VectorXd& q) {
    const double sq = (p - q).squaredNorm();
    if (sq < best.sq_euclidean) {
      best.sq_euclidean = sq;
      best.constituent = idx;
      best.point = q;
    }
  };
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, KPointSet>) {
          for (Eigen::Index i = 0; i < v.centers.rows(); ++i) consider(i, v.centers.row(i).transpose());
        } else if constexpr (std::is_same_v<T, KLineSet>) {
          for (std::size_t i = 0; i < v.lines.size(); ++i) {
            consider(static_cast<Eigen::Index>(i), project_onto_line(p, v.lines[i]));
          }
        } else if constexpr (std::is_same_v<T, JFlat>) {
          consider(0, project_onto_flat(p, v));
        } else {
          for (std::size_t i = 0; i < v.flats.size(); ++i) {
            consider(static_cast<Eigen::Index>(i), project_onto_flat(p, v.flats[i]));
          }
        }
      },
      F.value);
  return best;
}

double dist_point_shape(const Eigen::VectorXd& p, const Shape& F, const DistanceConfig& cfg) {
  return zpow_from_squared(nearest_on_shape(p, F).sq_euclidean, cfg.z);
}

Projection project_set(const PointSet& P, const Shape& F, const DistanceConfig& cfg) {
  if (P.dim() != F.dim()) {
    throw InputError("instance dimension does not match shape dimension");
  }
  const Eigen::Index n = P.size();
  Projection out;
  out.projected.coords.resize(n, P.dim());
  out.projected.weights = P.weights;
  out.projected.ids = P.ids;
  out.assignment.resize(n);
  out.residuals.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const NearestPoint np = nearest_on_shape(P.coords.row(i).transpose(), F);
    out.projected.coords.row(i) = np.point.transpose();
    out.assignment[i] = static_cast<int>(np.constituent);
    out.residuals[i] = zpow_from_squared(np.sq_euclidean, cfg.z);
  }
  return out;
}

double cost(const PointSet& P, const Shape& F, const DistanceConfig& cfg) {
  const Projection proj = project_set(P, F, cfg);
  return cost(P, proj);
}

double cost(const PointSet& P, const Projection& proj) {
  const Eigen::VectorXd terms = P.weights.cwiseProduct(proj.residuals);
  return pairwise_sum(std::span<const double>(terms.data(), static_cast<std::size_t>(terms.size())));
}

}  // namespace senscore
