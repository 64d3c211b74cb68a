#include <bit>
#include <algorithm>
#include <cmath>
#include <limits>

#include "senscore/errors.hpp"
#include "senscore/numerics.hpp"
#include "senscore/sensitivity.hpp"
#include "senscore/shape_sampling.hpp"

namespace senscore {

namespace {

std::vector<Eigen::Index> mask_members(std::uint32_t mask, Eigen::Index n) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (mask & (1u << i)) out.push_back(i);
  }
  return out;
}

void gather(const PointSet& P, const std::vector<Eigen::Index>& members, Eigen::MatrixXd& pts, Eigen::VectorXd& w) {
  pts.resize(static_cast<Eigen::Index>(members.size()), P.dim());
  w.resize(static_cast<Eigen::Index>(members.size()));
  for (std::size_t m = 0; m < members.size(); ++m) {
    pts.row(static_cast<Eigen::Index>(m)) = P.coords.row(members[m]);
    w[static_cast<Eigen::Index>(m)] = P.weights[members[m]];
  }
}

Eigen::VectorXd block_center(const PointSet& P, std::uint32_t mask, double z) {
  Eigen::MatrixXd pts;
  Eigen::VectorXd w;
  gather(P, mask_members(mask, P.size()), pts, w);
  if (z == 2.0) return (w.transpose() * pts).transpose() / w.sum();
  return weiszfeld_median(pts, w);
}

Line block_line(const PointSet& P, std::uint32_t mask) {
  Eigen::MatrixXd pts;
  Eigen::VectorXd w;
  gather(P, mask_members(mask, P.size()), pts, w);
  const Eigen::VectorXd centroid = (w.transpose() * pts).transpose() / w.sum();
  Eigen::MatrixXd centered = pts.rowwise() - centroid.transpose();
  for (Eigen::Index i = 0; i < pts.rows(); ++i) centered.row(i) *= std::sqrt(w[i]);
  if (pts.rows() < 2 || centered.cwiseAbs().maxCoeff() < 1e-300) {
    return Line{centroid, Eigen::VectorXd::Unit(P.dim(), 0)};
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  return Line{centroid, svd.matrixV().col(0)};
}

JFlat block_flat(const PointSet& P, std::uint32_t mask, int j) {
  Eigen::MatrixXd pts;
  Eigen::VectorXd w;
  gather(P, mask_members(mask, P.size()), pts, w);
  const Eigen::VectorXd centroid = (w.transpose() * pts).transpose() / w.sum();
  Eigen::MatrixXd centered = pts.rowwise() - centroid.transpose();
  for (Eigen::Index i = 0; i < pts.rows(); ++i) centered.row(i) *= std::sqrt(w[i]);
  JFlat flat{centroid, Eigen::MatrixXd(0, P.dim())};
  if (centered.cwiseAbs().maxCoeff() > 1e-300) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    const Eigen::Index take = std::min<Eigen::Index>(j, svd.matrixV().cols());
    flat = JFlat::from_span(centroid, svd.matrixV().leftCols(take).transpose());
  }
  // pad degenerate spectra so the flat has exactly j directions
  for (Eigen::Index e = 0; e < P.dim() && flat.basis.rows() < j; ++e) {
    Eigen::MatrixXd trial(flat.basis.rows() + 1, P.dim());
    trial.topRows(flat.basis.rows()) = flat.basis;
    trial.row(flat.basis.rows()) = Eigen::RowVectorXd::Unit(P.dim(), e);
    const JFlat t = JFlat::from_span(centroid, trial);
    if (t.basis.rows() > flat.basis.rows()) flat = t;
  }
  return flat;
}

double block_cost(const PointSet& P, std::uint32_t mask, const Shape& constituent, const DistanceConfig& cfg) {
  double acc = 0.0;
  for (Eigen::Index i : mask_members(mask, P.size())) {
    acc += P.weights[i] * dist_point_shape(P.coords.row(i).transpose(), constituent, cfg);
  }
  return acc;
}

// Optimal partitions of every subset into at most k blocks, where each block
// is served by its own optimal constituent. Produces one candidate shape per
// (subset, block count).
template <typename MakeConstituent, typename MakeShape>
void optimal_subset_shapes(const PointSet& P, int k, const DistanceConfig& cfg, MakeConstituent&& make_constituent,
                           MakeShape&& make_shape, std::vector<Shape>& out) {
  const Eigen::Index n = P.size();
  const std::uint32_t full = (1u << n) - 1u;

  std::vector<Shape> constituents(full + 1);
  std::vector<double> cost1(full + 1, 0.0);
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    constituents[mask] = make_constituent(mask);
    cost1[mask] = block_cost(P, mask, constituents[mask], cfg);
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dp(static_cast<std::size_t>(k) + 1, std::vector<double>(full + 1, kInf));
  std::vector<std::vector<std::uint32_t>> choice(static_cast<std::size_t>(k) + 1,
                                                 std::vector<std::uint32_t>(full + 1, 0));
  dp[0][0] = 0.0;
  for (int b = 1; b <= k; ++b) {
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      const std::uint32_t low = mask & (~mask + 1u);
      for (std::uint32_t sub = mask; sub != 0; sub = (sub - 1) & mask) {
        if (!(sub & low)) continue;
        const double cand = dp[b - 1][mask ^ sub] + cost1[sub];
        if (cand < dp[b][mask]) {
          dp[b][mask] = cand;
          choice[b][mask] = sub;
        }
      }
    }
  }

  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    for (int b = 1; b <= std::min<int>(k, std::popcount(mask)); ++b) {
      if (!(dp[b][mask] < kInf)) continue;
      std::vector<std::uint32_t> blocks;
      std::uint32_t rest = mask;
      for (int bb = b; bb >= 1; --bb) {
        blocks.push_back(choice[bb][rest]);
        rest ^= choice[bb][rest];
      }
      out.push_back(make_shape(blocks, constituents));
    }
  }
}

}  // namespace

SensitivityProfile exact_sensitivity_oracle(const PointSet& P, Family family, const FamilyParams& params,
                                            const DistanceConfig& cfg, const OracleOptions& opts) {
  const Eigen::Index n = P.size();
  if (n > 12 || P.dim() > 3) {
    throw CapabilityError("sensitivity oracle supports n <= 12 and d <= 3");
  }
  const bool supported = (family == Family::KCenters && params.k <= 3 && (cfg.z == 1.0 || cfg.z == 2.0)) ||
                         (family == Family::KLines && params.k <= 2 && cfg.z == 2.0) ||
                         (family == Family::JFlat && params.j <= 2 && cfg.z == 2.0);
  if (!supported) {
    throw CapabilityError("sensitivity oracle does not cover this (family, params, z)");
  }

  std::vector<Shape> candidates;

  if (family == Family::KCenters) {
    optimal_subset_shapes(
        P, params.k, cfg,
        [&](std::uint32_t mask) { return Shape::kpoints(block_center(P, mask, cfg.z).transpose()); },
        [&](const std::vector<std::uint32_t>& blocks, const std::vector<Shape>& cons) {
          Eigen::MatrixXd centers(static_cast<Eigen::Index>(blocks.size()), P.dim());
          for (std::size_t i = 0; i < blocks.size(); ++i) {
            centers.row(static_cast<Eigen::Index>(i)) = std::get<KPointSet>(cons[blocks[i]].value).centers.row(0);
          }
          return Shape::kpoints(std::move(centers));
        },
        candidates);
  } else if (family == Family::KLines) {
    optimal_subset_shapes(
        P, params.k, cfg, [&](std::uint32_t mask) { return Shape::klines({block_line(P, mask)}); },
        [&](const std::vector<std::uint32_t>& blocks, const std::vector<Shape>& cons) {
          std::vector<Line> lines;
          for (std::uint32_t b : blocks) lines.push_back(std::get<KLineSet>(cons[b].value).lines.front());
          return Shape::klines(std::move(lines));
        },
        candidates);
    // lines through every point pair, and pairs of such lines
    std::vector<Line> through;
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = a + 1; b < n; ++b) {
        const Eigen::VectorXd diff = (P.coords.row(b) - P.coords.row(a)).transpose();
        if (diff.norm() > 1e-300) through.push_back(Line{P.coords.row(a).transpose(), diff.normalized()});
      }
    }
    for (const Line& l : through) candidates.push_back(Shape::klines({l}));
    if (params.k >= 2) {
      for (std::size_t a = 0; a < through.size(); ++a) {
        for (std::size_t b = a + 1; b < through.size(); ++b) {
          candidates.push_back(Shape::klines({through[a], through[b]}));
        }
      }
    }
  } else {
    const std::uint32_t full = (1u << n) - 1u;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      candidates.push_back(Shape::jflat(block_flat(P, mask, params.j)));
    }
  }

  // shapes anchored directly on point tuples
  auto rng = make_engine(opts.seed, 0x0acc1eu);
  for (int t = 0; t < 64; ++t) candidates.push_back(shape_through_points(family, params, P, rng));

  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  std::vector<Shape> best_shape(static_cast<std::size_t>(n), candidates.front());
  auto absorb = [&](const Shape& F) {
    const Projection proj = project_set(P, F, cfg);
    const double denom = cost(P, proj);
    if (!(denom > 0.0)) return;  // degenerate ratio counts as 0
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ratio = P.weights[i] * proj.residuals[i] / denom;
      if (ratio > best[i]) {
        best[i] = ratio;
        best_shape[static_cast<std::size_t>(i)] = F;
      }
    }
  };
  for (const Shape& F : candidates) absorb(F);

  // polish per point with multi-start hill climbing
  const BoundingBox box = BoundingBox::of(P);
  for (Eigen::Index target = 0; target < n; ++target) {
    auto objective = [&](const Shape& F) {
      const Projection proj = project_set(P, F, cfg);
      const double denom = cost(P, proj);
      return denom > 0.0 ? P.weights[target] * proj.residuals[target] / denom : 0.0;
    };
    for (int r = 0; r < opts.ascent_restarts; ++r) {
      const Shape start = r == 0 ? best_shape[static_cast<std::size_t>(target)]
                                 : random_shape(family, params, box, rng);
      absorb(ascend_shape(start, objective, rng, opts.ascent_steps, 0.08 * box.diagonal()));
    }
  }

  SensitivityProfile out;
  out.bounds = best;
  out.total = pairwise_sum({best.data(), static_cast<std::size_t>(best.size())});
  out.unclamped_total = out.total;
  out.method = "exact-oracle";
  return out;
}

}  // namespace senscore
