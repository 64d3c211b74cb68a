#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

namespace senscore {

/// Distance exponent for z-power Euclidean distances, together with the
/// constant of the relaxed triangle inequality it induces.
struct DistanceConfig {
  double z = 2.0;
  // z in (0,1) is accepted only when this is set; the bounds that assume
  // z >= 1 are not exercised there.
  bool experimental_z = false;

  DistanceConfig() = default;
  explicit DistanceConfig(double exponent, bool experimental = false);

  // 2^(z-1) for z >= 1, 1 for z in (0,1).
  double alpha() const;
};

/// A line as anchor + unit direction.
struct Line {
  Eigen::VectorXd anchor;
  Eigen::VectorXd direction;  // unit norm within 1e-12

  static Line through(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
};

/// An affine j-flat: anchor + orthonormal spanning rows (j x d). j = 0 means a
/// single point.
struct JFlat {
  Eigen::VectorXd anchor;
  Eigen::MatrixXd basis;  // j x d, rows orthonormal within 1e-12

  Eigen::Index j() const { return basis.rows(); }

  // Orthonormalizes `span_rows` (dropping dependent rows) before storing.
  static JFlat from_span(const Eigen::VectorXd& anchor, const Eigen::MatrixXd& span_rows);
};

struct KPointSet {
  Eigen::MatrixXd centers;  // k x d
};

struct KLineSet {
  std::vector<Line> lines;
};

struct KJFlatSet {
  std::vector<JFlat> flats;  // all with equal j and d
};

/// Tagged union of the supported shape families.
struct Shape {
  std::variant<KPointSet, KLineSet, JFlat, KJFlatSet> value;

  static Shape kpoints(Eigen::MatrixXd centers);
  static Shape klines(std::vector<Line> lines);
  static Shape jflat(JFlat flat);
  static Shape kjflats(std::vector<JFlat> flats);

  Eigen::Index dim() const;                // ambient d
  Eigen::Index constituent_count() const;  // k (1 for a single flat)
  Eigen::Index flat_dim() const;           // j (0 for points, 1 for lines)

  // Dimension of a linear subspace guaranteed to contain every constituent:
  // k*(j+1) for the stored family.
  Eigen::Index span_dim_bound() const;

  // Throws InputError on non-unit directions, non-orthonormal bases,
  // mismatched dimensions, k < 1 or j > d-1.
  void validate() const;
};

}  // namespace senscore
