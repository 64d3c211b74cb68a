#include "senscore/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "senscore/errors.hpp"
#include "senscore/numerics.hpp"
#include "senscore/shape_sampling.hpp"

namespace senscore {

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Orthonormalizes `rows` against `basis` (rows already orthonormal) and
// appends the survivors, up to `target` total rows.
Eigen::MatrixXd append_orthonormal(Eigen::MatrixXd basis, const Eigen::MatrixXd& rows, Eigen::Index target) {
  for (Eigen::Index r = 0; r < rows.rows() && basis.rows() < target; ++r) {
    Eigen::VectorXd v = rows.row(r).transpose();
    const double scale = std::max(v.norm(), 1.0);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < basis.rows(); ++k) {
        v -= basis.row(k).dot(v.transpose()) * basis.row(k).transpose();
      }
    }
    if (v.norm() > 1e-10 * scale) {
      basis.conservativeResize(basis.rows() + 1, Eigen::NoChange);
      basis.row(basis.rows() - 1) = v.normalized().transpose();
    }
  }
  return basis;
}

Eigen::MatrixXd constituent_span_rows(const Shape& F) {
  const Eigen::Index d = F.dim();
  std::vector<Eigen::VectorXd> rows;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, KPointSet>) {
          for (Eigen::Index i = 0; i < v.centers.rows(); ++i) rows.push_back(v.centers.row(i).transpose());
        } else if constexpr (std::is_same_v<T, KLineSet>) {
          for (const auto& line : v.lines) {
            rows.push_back(line.anchor);
            rows.push_back(line.direction);
          }
        } else if constexpr (std::is_same_v<T, JFlat>) {
          rows.push_back(v.anchor);
          for (Eigen::Index r = 0; r < v.basis.rows(); ++r) rows.push_back(v.basis.row(r).transpose());
        } else {
          for (const auto& flat : v.flats) {
            rows.push_back(flat.anchor);
            for (Eigen::Index r = 0; r < flat.basis.rows(); ++r) rows.push_back(flat.basis.row(r).transpose());
          }
        }
      },
      F.value);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return out;
}

Eigen::Index numerical_rank(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0.0) return 0;
  const double tol = sv[0] * static_cast<double>(std::max(m.rows(), m.cols())) *
                     std::numeric_limits<double>::epsilon() * 16.0;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] > tol) ++rank;
  return rank;
}

}  // namespace

std::pair<Projection, ReducedInstance> reduce(const PointSet& P, const Shape& F, const DistanceConfig& cfg) {
  Projection proj = project_set(P, F, cfg);
  const Eigen::Index d = P.dim();
  const Eigen::Index m2 = F.span_dim_bound();
  const Eigen::Index m1 = numerical_rank(proj.projected.coords);
  const Eigen::Index target = std::min(m1 + m2, d);

  // constituent span covers the projected points
  Eigen::MatrixXd basis = append_orthonormal(Eigen::MatrixXd(0, d), constituent_span_rows(F), target);

  if (basis.rows() < target) {
    // complete with principal directions of the projection residuals
    Eigen::MatrixXd residual = P.coords - proj.projected.coords;
    if (residual.cwiseAbs().maxCoeff() > 0.0) {
      Eigen::BDCSVD<Eigen::MatrixXd> svd(residual, Eigen::ComputeThinV);
      basis = append_orthonormal(std::move(basis), svd.matrixV().transpose(), target);
    }
  }
  for (Eigen::Index e = 0; e < d && basis.rows() < target; ++e) {
    basis = append_orthonormal(std::move(basis), Eigen::RowVectorXd::Unit(d, e), target);
  }

  ReducedInstance red;
  red.coords = proj.projected.coords * basis.transpose();
  red.basis = std::move(basis);
  red.point_span_dim = m1;
  red.shape_span_dim = m2;
  return {std::move(proj), std::move(red)};
}

SensitivityProfile sens_kcenters(const PointSet& P, const FitResult& fit, const DistanceConfig& cfg) {
  const auto* kps = std::get_if<KPointSet>(&fit.shape.value);
  if (kps == nullptr) throw InputError("sens_kcenters requires a k-point-set fit");
  if (!(fit.approx_factor_c >= 1.0)) throw InputError("approximation factor must be >= 1");

  const Projection proj = project_set(P, fit.shape, cfg);
  const double fit_cost = cost(P, proj);
  const double c = fit.approx_factor_c;
  const double a = cfg.alpha();
  const Eigen::Index n = P.size();

  Eigen::VectorXd cluster_weight = Eigen::VectorXd::Zero(kps->centers.rows());
  for (Eigen::Index i = 0; i < n; ++i) cluster_weight[proj.assignment[i]] += P.weights[i];

  Eigen::VectorXd raw(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double share = P.weights[i] / cluster_weight[proj.assignment[i]];
    if (fit_cost == 0.0) {
      raw[i] = share;
    } else {
      raw[i] = c * a * P.weights[i] * proj.residuals[i] / fit_cost + (1.0 + c) * a * a * share;
    }
  }

  SensitivityProfile out;
  out.bounds = raw.cwiseMin(1.0);
  out.total = pairwise_sum(as_span(out.bounds));
  out.unclamped_total = pairwise_sum(as_span(raw));
  out.method = "kcenters-closed-form";
  out.fit = fit;
  return out;
}

ConditionedBasis conditioned_basis(const Eigen::MatrixXd& M, double z) {
  if (!(z >= 1.0)) throw InputError("conditioned basis requires z >= 1");
  ConditionedBasis cb;
  cb.z = z;
  if (M.rows() == 0 || M.cols() == 0 || M.cwiseAbs().maxCoeff() <= 0.0) {
    throw CapabilityError("conditioned basis of an all-zero matrix (rank 0)");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double tol = sv[0] * static_cast<double>(std::max(M.rows(), M.cols())) *
                     std::numeric_limits<double>::epsilon() * 16.0;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] > tol) ++rank;
  cb.rank = rank;
  cb.A = svd.matrixU().leftCols(rank);

  cb.alpha_cb = std::pow(cb.A.array().abs().pow(z).sum(), 1.0 / z);
  if (z == 2.0) {
    cb.beta_cb = 1.0;
    cb.loose = false;
  } else {
    // ||u||_{z'} <= rho^{max(0,1/z'-1/2)} ||u||_2 = ... ||Au||_2
    //           <= n^{max(0,1/2-1/z)} ||Au||_z  (orthonormal columns)
    const double inv_zp = 1.0 - 1.0 / z;  // 1/z'
    const double rho_exp = std::max(0.0, inv_zp - 0.5);
    const double n_exp = std::max(0.0, 0.5 - 1.0 / z);
    cb.beta_cb = std::pow(static_cast<double>(rank), rho_exp) * std::pow(static_cast<double>(M.rows()), n_exp);
    cb.loose = true;
  }
  return cb;
}

SensitivityProfile sens_subspace(const PointSet& P, const FitResult& fit, const DistanceConfig& cfg) {
  const auto* flat = std::get_if<JFlat>(&fit.shape.value);
  if (flat == nullptr) throw InputError("sens_subspace requires a j-flat fit");
  if (!(fit.approx_factor_c >= 1.0)) throw InputError("approximation factor must be >= 1");

  auto [proj, red] = reduce(P, fit.shape, cfg);
  const double fit_cost = cost(P, proj);
  const double c = fit.approx_factor_c;
  const double a = cfg.alpha();
  const Eigen::Index n = P.size();
  const Eigen::Index m = red.coords.cols();

  // homogeneous coordinates, rows scaled so weighted shares come out of the
  // row norms directly
  Eigen::MatrixXd M(n, m + 1);
  M.leftCols(m) = red.coords;
  M.col(m).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) M.row(i) *= std::pow(P.weights[i], 1.0 / cfg.z);

  const ConditionedBasis cb = conditioned_basis(M, cfg.z);
  const double beta_z = std::pow(cb.beta_cb, cfg.z);

  Eigen::VectorXd raw(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double row_norm_z = cb.A.row(i).array().abs().pow(cfg.z).sum();
    const double hyp = row_norm_z * beta_z;
    if (fit_cost == 0.0) {
      raw[i] = hyp;
    } else {
      raw[i] = c * a * P.weights[i] * proj.residuals[i] / fit_cost + (1.0 + c) * a * a * std::min(1.0, hyp);
    }
  }
  // unclamped duplicate with the raw hyperplane term, for the totals the
  // closed form promises
  Eigen::VectorXd unclamped(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double row_norm_z = cb.A.row(i).array().abs().pow(cfg.z).sum();
    const double hyp = row_norm_z * beta_z;
    unclamped[i] = fit_cost == 0.0
                       ? hyp
                       : c * a * P.weights[i] * proj.residuals[i] / fit_cost + (1.0 + c) * a * a * hyp;
  }

  SensitivityProfile out;
  out.bounds = raw.cwiseMin(1.0);
  out.total = pairwise_sum(as_span(out.bounds));
  out.unclamped_total = pairwise_sum(as_span(unclamped));
  out.method = "subspace-conditioned-basis";
  out.loose = cb.loose;
  out.fit = fit;
  out.reduction_dim = static_cast<int>(m);
  return out;
}

SensitivityProfile sens_empirical(const PointSet& P, Family family, const FamilyParams& params,
                                  const DistanceConfig& cfg, const EmpiricalOptions& opts) {
  if (opts.budget <= 0) throw InputError("empirical sensitivity needs a positive budget");
  const Eigen::Index n = P.size();
  const BoundingBox box = BoundingBox::of(P);

  std::vector<Shape> pool;
  pool.reserve(static_cast<std::size_t>(opts.budget) + opts.extra_candidates.size());
  pool.push_back(witness_shape(family, params, box, 1.0));
  if (opts.budget > 1) pool.push_back(witness_shape(family, params, box, -1.0));
  for (const Shape& s : opts.extra_candidates) pool.push_back(s);

  auto rng = make_engine(opts.seed, 0xe0f1u);
  const int remaining = std::max(0, opts.budget - static_cast<int>(pool.size()) +
                                        static_cast<int>(opts.extra_candidates.size()));
  const int n_random = remaining / 3;
  const int n_through = remaining / 3;
  const int n_ascent = remaining - n_random - n_through;
  for (int i = 0; i < n_random; ++i) pool.push_back(random_shape(family, params, box, rng));
  for (int i = 0; i < n_through; ++i) pool.push_back(shape_through_points(family, params, P, rng));

  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  std::vector<Shape> best_shape(static_cast<std::size_t>(n), pool.front());
  auto absorb = [&](const Shape& F) {
    const Projection proj = project_set(P, F, cfg);
    const double denom = cost(P, proj);
    if (!(denom > 0.0)) return;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ratio = P.weights[i] * proj.residuals[i] / denom;
      if (ratio > best[i]) {
        best[i] = ratio;
        best_shape[static_cast<std::size_t>(i)] = F;
      }
    }
  };
  for (const Shape& F : pool) absorb(F);

  // spend the rest of the budget climbing the per-point share, cycling
  // through target points
  for (int t = 0; t < n_ascent; ++t) {
    const Eigen::Index target = static_cast<Eigen::Index>(t % n);
    auto objective = [&](const Shape& F) {
      const Projection proj = project_set(P, F, cfg);
      const double denom = cost(P, proj);
      return denom > 0.0 ? P.weights[target] * proj.residuals[target] / denom : 0.0;
    };
    const Shape start = best_shape[static_cast<std::size_t>(target)];
    absorb(ascend_shape(start, objective, rng, opts.ascent_steps, 0.1 * box.diagonal()));
  }

  SensitivityProfile out;
  out.bounds = best;
  out.total = pairwise_sum(as_span(out.bounds));
  out.unclamped_total = out.total;
  out.method = "empirical-adversarial";
  out.lower_bound = true;
  return out;
}

LowerBoundInstance lowerbound_instance(int n) {
  if (n < 2) throw InputError("lower-bound instance needs n >= 2");
  LowerBoundInstance out;
  Eigen::MatrixXd coords(n, 2);
  for (int i = 1; i <= n; ++i) {
    coords(i - 1, 0) = std::exp2(1.0 - i);
    coords(i - 1, 1) = 0.0;
  }
  out.points = PointSet(std::move(coords));
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
  const Eigen::VectorXd vertical = Eigen::VectorXd::Unit(2, 1);
  const Eigen::VectorXd horizontal = Eigen::VectorXd::Unit(2, 0);
  for (int i = 1; i <= n; ++i) {
    Eigen::VectorXd height(2);
    height << 0.0, std::exp2(static_cast<double>(-i));
    out.shapes.push_back(Shape::klines({Line{origin, vertical}, Line{height, horizontal}}));
  }
  return out;
}

std::vector<double> lowerbound_ratio_table(int n) {
  if (n < 2) throw InputError("lower-bound instance needs n >= 2");
  // Scaling distances by 2^i makes term i equal to 1 / (i + 2 - 2^{i-n+1}),
  // which stays representable long after the raw coordinates underflow.
  std::vector<double> ratios(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    ratios[static_cast<std::size_t>(i - 1)] = 1.0 / (static_cast<double>(i) + 2.0 - std::exp2(i - n + 1));
  }
  return ratios;
}

double lowerbound_total(int n) {
  const std::vector<double> ratios = lowerbound_ratio_table(n);
  return pairwise_sum(ratios);
}

}  // namespace senscore
