#include "senscore/shapes.hpp"

#include <cmath>

#include "senscore/errors.hpp"

namespace senscore {

namespace {

constexpr double kUnitTol = 1e-12;

void check_unit(const Eigen::VectorXd& v, const char* what) {
  if (std::abs(v.norm() - 1.0) > kUnitTol) {
    throw InputError(std::string(what) + " is not unit norm");
  }
}

void check_orthonormal_rows(const Eigen::MatrixXd& basis) {
  if (basis.rows() == 0) return;
  const Eigen::MatrixXd gram = basis * basis.transpose();
  const double err = (gram - Eigen::MatrixXd::Identity(basis.rows(), basis.rows())).cwiseAbs().maxCoeff();
  if (err > kUnitTol) {
    throw InputError("flat basis rows are not orthonormal");
  }
}

}  // namespace

DistanceConfig::DistanceConfig(double exponent, bool experimental) : z(exponent), experimental_z(experimental) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw InputError("distance exponent z must be positive and finite");
  }
  if (z < 1.0 && !experimental_z) {
    throw InputError("z < 1 requires the experimental flag");
  }
}

double DistanceConfig::alpha() const { return z >= 1.0 ? std::exp2(z - 1.0) : 1.0; }

Line Line::through(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd diff = b - a;
  const double norm = diff.norm();
  if (!(norm > 0.0)) {
    throw InputError("cannot build a line through coincident points");
  }
  return Line{a, diff / norm};
}

JFlat JFlat::from_span(const Eigen::VectorXd& anchor, const Eigen::MatrixXd& span_rows) {
  JFlat flat;
  flat.anchor = anchor;
  if (span_rows.rows() == 0) {
    flat.basis = Eigen::MatrixXd(0, anchor.size());
    return flat;
  }
  Eigen::MatrixXd candidate(span_rows.rows(), span_rows.cols());
  Eigen::Index rank = 0;
  for (Eigen::Index r = 0; r < span_rows.rows(); ++r) {
    Eigen::VectorXd v = span_rows.row(r).transpose();
    const double scale = v.norm();
    for (Eigen::Index k = 0; k < rank; ++k) {
      v -= candidate.row(k).dot(span_rows.row(r)) * candidate.row(k).transpose();
    }
    // second Gram-Schmidt pass for numerical orthogonality
    for (Eigen::Index k = 0; k < rank; ++k) {
      v -= candidate.row(k).dot(v) * candidate.row(k).transpose();
    }
    if (v.norm() > 1e-10 * std::max(1.0, scale)) {
      candidate.row(rank++) = v.normalized().transpose();
    }
  }
  flat.basis = candidate.topRows(rank);
  return flat;
}

Shape Shape::kpoints(Eigen::MatrixXd centers) {
  Shape s{KPointSet{std::move(centers)}};
  s.validate();
  return s;
}

Shape Shape::klines(std::vector<Line> lines) {
  Shape s{KLineSet{std::move(lines)}};
  s.validate();
  return s;
}

Shape Shape::jflat(JFlat flat) {
  Shape s{JFlat{std::move(flat)}};
  s.validate();
  return s;
}

Shape Shape::kjflats(std::vector<JFlat> flats) {
  Shape s{KJFlatSet{std::move(flats)}};
  s.validate();
  return s;
}

Eigen::Index Shape::dim() const {
  return std::visit(
      [](const auto& v) -> Eigen::Index {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, KPointSet>) {
          return v.centers.cols();
        } else if constexpr (std::is_same_v<T, KLineSet>) {
          return v.lines.empty() ? 0 : v.lines.front().anchor.size();
        } else if constexpr (std::is_same_v<T, JFlat>) {
          return v.anchor.size();
        } else {
          return v.flats.empty() ? 0 : v.flats.front().anchor.size();
        }
      },
      value);
}

Eigen::Index Shape::constituent_count() const {
  return std::visit(
      [](const auto& v) -> Eigen::Index {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, KPointSet>) {
          return v.centers.rows();
        } else if constexpr (std::is_same_v<T, KLineSet>) {
          return static_cast<Eigen::Index>(v.lines.size());
        } else if constexpr (std::is_same_v<T, JFlat>) {
          return 1;
        } else {
          return static_cast<Eigen::Index>(v.flats.size());
        }
      },
      value);
}

Eigen::Index Shape::flat_dim() const {
  return std::visit(
      [](const auto& v) -> Eigen::Index {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, KPointSet>) {
          return 0;
        } else if constexpr (std::is_same_v<T, KLineSet>) {
          return 1;
        } else if constexpr (std::is_same_v<T, JFlat>) {
          return v.j();
        } else {
          return v.flats.empty() ? 0 : v.flats.front().j();
        }
      },
      value);
}

Eigen::Index Shape::span_dim_bound() const { return constituent_count() * (flat_dim() + 1); }

void Shape::validate() const {
  const Eigen::Index d = dim();
  if (constituent_count() < 1) {
    throw InputError("shape must have k >= 1 constituents");
  }
  if (d < 1) {
    throw InputError("shape has no ambient dimension");
  }
  std::visit(
      [d](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, KPointSet>) {
          if (!v.centers.allFinite()) throw InputError("center coordinates must be finite");
        } else if constexpr (std::is_same_v<T, KLineSet>) {
          for (const auto& line : v.lines) {
            if (line.anchor.size() != d || line.direction.size() != d) {
              throw InputError("line dimensions disagree");
            }
            check_unit(line.direction, "line direction");
          }
        } else if constexpr (std::is_same_v<T, JFlat>) {
          if (v.basis.cols() != d && v.basis.rows() > 0) throw InputError("flat basis dimension disagrees");
          if (v.j() > d - 1) throw InputError("flat dimension j must be <= d-1");
          check_orthonormal_rows(v.basis);
        } else {
          for (const auto& flat : v.flats) {
            if (flat.anchor.size() != d || (flat.basis.rows() > 0 && flat.basis.cols() != d)) {
              throw InputError("flat dimensions disagree");
            }
            if (flat.j() > d - 1) throw InputError("flat dimension j must be <= d-1");
            check_orthonormal_rows(flat.basis);
          }
        }
      },
      value);
}

}  // namespace senscore
