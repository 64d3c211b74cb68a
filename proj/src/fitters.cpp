#include "senscore/fitters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "senscore/errors.hpp"
#include "senscore/numerics.hpp"

namespace senscore {

std::string family_name(Family f) {
  switch (f) {
    case Family::KCenters: return "kcenters";
    case Family::KLines: return "klines";
    case Family::JFlat: return "jflat";
    case Family::KJFlats: return "kjflats";
  }
  return "unknown";
}

Family family_from_name(const std::string& name) {
  if (name == "kcenters") return Family::KCenters;
  if (name == "klines") return Family::KLines;
  if (name == "jflat") return Family::JFlat;
  if (name == "kjflats") return Family::KJFlats;
  throw InputError("unknown family: " + name);
}

Eigen::VectorXd weiszfeld_median(const Eigen::MatrixXd& pts, const Eigen::VectorXd& weights, double tol,
                                 int max_iters) {
  const Eigen::Index n = pts.rows();
  const Eigen::Index d = pts.cols();
  if (n == 1) return pts.row(0).transpose();

  auto objective = [&](const Eigen::VectorXd& x) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) acc += weights[i] * (pts.row(i).transpose() - x).norm();
    return acc;
  };

  Eigen::VectorXd x = (weights.transpose() * pts).transpose() / weights.sum();
  double fx = objective(x);
  const double scale = std::max(1.0, pts.cwiseAbs().maxCoeff());
  for (int iter = 0; iter < max_iters; ++iter) {
    Eigen::VectorXd num = Eigen::VectorXd::Zero(d);
    double den = 0.0;
    bool at_anchor = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dist = (pts.row(i).transpose() - x).norm();
      if (dist < 1e-12 * scale) {
        at_anchor = true;
        break;
      }
      const double c = weights[i] / dist;
      num += c * pts.row(i).transpose();
      den += c;
    }
    if (at_anchor) {
      // nudge off the singular point and continue
      Eigen::VectorXd xp = x;
      xp[0] += 1e-12 * scale;
      const double fxp = objective(xp);
      if (fxp >= fx) break;  // the anchor is (numerically) the minimizer
      x = xp;
      fx = fxp;
      continue;
    }
    const Eigen::VectorXd xn = num / den;
    const double fn = objective(xn);
    const double step = (xn - x).norm();
    if (fn <= fx) {
      x = xn;
      if (fx - fn <= tol * std::max(1.0, fx) && step <= tol * scale) {
        fx = fn;
        break;
      }
      fx = fn;
    } else {
      break;
    }
  }
  return x;
}

namespace {

// Weighted sampling of one index proportional to `mass`.
Eigen::Index sample_index(const Eigen::VectorXd& mass, std::mt19937_64& rng) {
  const double total = mass.sum();
  if (!(total > 0.0)) {
    return std::uniform_int_distribution<Eigen::Index>(0, mass.size() - 1)(rng);
  }
  const double target = std::uniform_real_distribution<double>(0.0, total)(rng);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mass.size(); ++i) {
    acc += mass[i];
    if (acc >= target) return i;
  }
  return mass.size() - 1;
}

Eigen::MatrixXd seed_centers_dsq(const PointSet& P, int k, const DistanceConfig& cfg, std::mt19937_64& rng) {
  const Eigen::Index n = P.size();
  Eigen::MatrixXd centers(k, P.dim());
  centers.row(0) = P.coords.row(sample_index(P.weights, rng));
  Eigen::VectorXd best(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    best[i] = zpow_from_squared((P.coords.row(i) - centers.row(0)).squaredNorm(), cfg.z);
  }
  for (int c = 1; c < k; ++c) {
    const Eigen::VectorXd mass = P.weights.cwiseProduct(best);
    centers.row(c) = P.coords.row(sample_index(mass, rng));
    for (Eigen::Index i = 0; i < n; ++i) {
      best[i] = std::min(best[i], zpow_from_squared((P.coords.row(i) - centers.row(c)).squaredNorm(), cfg.z));
    }
  }
  return centers;
}

struct Assignment {
  Eigen::VectorXi labels;
  Eigen::VectorXd residuals;  // z-power
  double total = 0.0;
};

Assignment assign_to_centers(const PointSet& P, const Eigen::MatrixXd& centers, const DistanceConfig& cfg) {
  const Eigen::Index n = P.size();
  Assignment a;
  a.labels.resize(n);
  a.residuals.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double best_sq = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double sq = (P.coords.row(i) - centers.row(c)).squaredNorm();
      if (sq < best_sq) {
        best_sq = sq;
        best_c = static_cast<int>(c);
      }
    }
    a.labels[i] = best_c;
    a.residuals[i] = zpow_from_squared(best_sq, cfg.z);
  }
  const Eigen::VectorXd terms = P.weights.cwiseProduct(a.residuals);
  a.total = pairwise_sum({terms.data(), static_cast<std::size_t>(terms.size())});
  return a;
}

// Minimizes sum_i w_i ||p_i - c||^z over c for general z by gradient descent
// with backtracking, starting from `init`; never returns a worse point.
Eigen::VectorXd descend_center(const Eigen::MatrixXd& pts, const Eigen::VectorXd& w, double z,
                               const Eigen::VectorXd& init) {
  auto objective = [&](const Eigen::VectorXd& c) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      acc += w[i] * zpow_from_squared((pts.row(i).transpose() - c).squaredNorm(), z);
    }
    return acc;
  };
  Eigen::VectorXd c = init;
  double fc = objective(c);
  const double scale = std::max(1.0, pts.cwiseAbs().maxCoeff());
  for (int iter = 0; iter < 40; ++iter) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(pts.cols());
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const Eigen::VectorXd diff = c - pts.row(i).transpose();
      const double dist = diff.norm();
      if (dist < 1e-14 * scale) continue;
      grad += w[i] * z * std::pow(dist, z - 2.0) * diff;
    }
    const double gnorm = grad.norm();
    if (gnorm < 1e-14) break;
    double step = 0.5 * scale / gnorm;
    bool moved = false;
    for (int bt = 0; bt < 30; ++bt) {
      const Eigen::VectorXd cand = c - step * grad;
      const double fcand = objective(cand);
      if (fcand < fc) {
        c = cand;
        fc = fcand;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return c;
}

Eigen::VectorXd optimal_center(const Eigen::MatrixXd& pts, const Eigen::VectorXd& w, double z,
                               const Eigen::VectorXd& prev) {
  if (z == 2.0) return (w.transpose() * pts).transpose() / w.sum();
  if (z == 1.0) {
    Eigen::VectorXd med = weiszfeld_median(pts, w);
    // keep whichever of {median, previous center} scores better
    auto obj = [&](const Eigen::VectorXd& c) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < pts.rows(); ++i) acc += w[i] * (pts.row(i).transpose() - c).norm();
      return acc;
    };
    return obj(med) <= obj(prev) ? med : prev;
  }
  return descend_center(pts, w, z, prev);
}

struct RestartOutcome {
  Eigen::MatrixXd centers;
  double cost = std::numeric_limits<double>::infinity();
  std::vector<double> iteration_costs;
};

RestartOutcome lloyd_restart(const PointSet& P, int k, const DistanceConfig& cfg, const FitOptions& opts,
                             std::mt19937_64& rng) {
  RestartOutcome out;
  out.centers = seed_centers_dsq(P, k, cfg, rng);
  Assignment a = assign_to_centers(P, out.centers, cfg);
  out.cost = a.total;
  out.iteration_costs.push_back(a.total);
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    // update step
    for (int c = 0; c < k; ++c) {
      std::vector<Eigen::Index> members;
      for (Eigen::Index i = 0; i < P.size(); ++i) {
        if (a.labels[i] == c) members.push_back(i);
      }
      if (members.empty()) {
        // re-seed on the point farthest from its assigned center
        Eigen::Index far = 0;
        double far_res = -1.0;
        for (Eigen::Index i = 0; i < P.size(); ++i) {
          if (a.residuals[i] > far_res) {
            far_res = a.residuals[i];
            far = i;
          }
        }
        out.centers.row(c) = P.coords.row(far);
        continue;
      }
      Eigen::MatrixXd pts(members.size(), P.dim());
      Eigen::VectorXd w(members.size());
      for (std::size_t m = 0; m < members.size(); ++m) {
        pts.row(static_cast<Eigen::Index>(m)) = P.coords.row(members[m]);
        w[static_cast<Eigen::Index>(m)] = P.weights[members[m]];
      }
      out.centers.row(c) = optimal_center(pts, w, cfg.z, out.centers.row(c).transpose()).transpose();
    }
    a = assign_to_centers(P, out.centers, cfg);
    const double prev = out.cost;
    out.cost = a.total;
    out.iteration_costs.push_back(a.total);
    if (prev - a.total <= opts.rel_tol * std::max(prev, 1e-300)) break;
  }
  return out;
}

}  // namespace

FitResult fit_kcenters(const PointSet& P, int k, const DistanceConfig& cfg, const FitOptions& opts) {
  if (k < 1) throw InputError("k must be >= 1");
  if (k > P.size()) throw InputError("k exceeds the number of points");

  RestartOutcome best;
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    auto rng = make_engine(opts.seed, static_cast<std::uint64_t>(r));
    RestartOutcome cand = lloyd_restart(P, k, cfg, opts, rng);
    if (cand.cost < best.cost) best = std::move(cand);
  }

  FitResult fit;
  fit.shape = Shape::kpoints(best.centers);
  fit.cost = cost(P, fit.shape, cfg);
  fit.approx_factor_c = opts.approx_factor > 0.0 ? opts.approx_factor : 2.0;
  fit.method = cfg.z == 2.0 ? "kmeanspp-lloyd" : (cfg.z == 1.0 ? "kmedian-weiszfeld" : "lloyd-local-search");
  fit.seed = opts.seed;
  fit.iteration_costs = std::move(best.iteration_costs);
  return fit;
}

FitResult fit_jflat(const PointSet& P, int j, const DistanceConfig& cfg, const FitOptions& opts) {
  if (j < 0 || j > P.dim() - 1) throw InputError("flat dimension j must satisfy 0 <= j <= d-1");

  const Eigen::VectorXd centroid = (P.weights.transpose() * P.coords).transpose() / P.weights.sum();
  Eigen::MatrixXd centered = P.coords.rowwise() - centroid.transpose();
  for (Eigen::Index i = 0; i < P.size(); ++i) centered.row(i) *= std::sqrt(P.weights[i]);

  FitResult fit;
  JFlat flat;
  flat.anchor = centroid;
  if (j == 0) {
    flat.basis = Eigen::MatrixXd(0, P.dim());
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    const Eigen::Index take = std::min<Eigen::Index>(j, svd.matrixV().cols());
    Eigen::MatrixXd basis = svd.matrixV().leftCols(take).transpose();
    if (take < j) {
      // degenerate spectrum: complete with coordinate directions
      JFlat padded = JFlat::from_span(centroid, basis);
      Eigen::MatrixXd rows = padded.basis;
      for (Eigen::Index e = 0; e < P.dim() && rows.rows() < j; ++e) {
        Eigen::MatrixXd trial(rows.rows() + 1, P.dim());
        trial.topRows(rows.rows()) = rows;
        trial.row(rows.rows()) = Eigen::RowVectorXd::Unit(P.dim(), e);
        JFlat t = JFlat::from_span(centroid, trial);
        if (t.basis.rows() > rows.rows()) rows = t.basis;
      }
      basis = rows;
    }
    flat.basis = JFlat::from_span(centroid, basis).basis;
  }
  fit.shape = Shape::jflat(flat);
  fit.cost = cost(P, fit.shape, cfg);
  if (opts.approx_factor > 0.0) {
    fit.approx_factor_c = opts.approx_factor;
  } else {
    fit.approx_factor_c = cfg.z == 2.0 ? 1.0 : 4.0;
  }
  fit.method = "centered-svd";
  fit.seed = opts.seed;
  fit.iteration_costs = {fit.cost};
  return fit;
}

namespace {

Line fit_cluster_line(const Eigen::MatrixXd& pts, const Eigen::VectorXd& w, const Line& prev) {
  if (pts.rows() < 2) return prev;
  const Eigen::VectorXd centroid = (w.transpose() * pts).transpose() / w.sum();
  Eigen::MatrixXd centered = pts.rowwise() - centroid.transpose();
  for (Eigen::Index i = 0; i < pts.rows(); ++i) centered.row(i) *= std::sqrt(w[i]);
  if (centered.cwiseAbs().maxCoeff() < 1e-300) {
    return Line{centroid, Eigen::VectorXd::Unit(pts.cols(), 0)};
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  return Line{centroid, svd.matrixV().col(0)};
}

double line_cluster_cost(const Eigen::MatrixXd& pts, const Eigen::VectorXd& w, const Line& line, double z) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const Eigen::VectorXd r = pts.row(i).transpose() - line.anchor;
    const double along = r.dot(line.direction);
    acc += w[i] * zpow_from_squared(r.squaredNorm() - along * along, z);
  }
  return acc;
}

std::vector<Line> seed_lines(const PointSet& P, int k, std::mt19937_64& rng) {
  std::vector<Line> lines;
  std::uniform_int_distribution<Eigen::Index> pick(0, P.size() - 1);
  for (int c = 0; c < k; ++c) {
    Line line{P.coords.row(pick(rng)).transpose(), Eigen::VectorXd::Unit(P.dim(), 0)};
    for (int attempt = 0; attempt < 16; ++attempt) {
      const Eigen::Index a = pick(rng);
      const Eigen::Index b = pick(rng);
      const Eigen::VectorXd diff = (P.coords.row(b) - P.coords.row(a)).transpose();
      if (diff.norm() > 1e-300) {
        line = Line{P.coords.row(a).transpose(), diff.normalized()};
        break;
      }
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

FitResult fit_klines(const PointSet& P, int k, const DistanceConfig& cfg, const FitOptions& opts) {
  if (k < 1) throw InputError("k must be >= 1");
  if (k > P.size()) throw InputError("k exceeds the number of points");

  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<Line> best_lines;
  std::vector<double> best_history;

  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    auto rng = make_engine(opts.seed, 0x10000u + static_cast<std::uint64_t>(r));
    std::vector<Line> lines = seed_lines(P, k, rng);
    Shape shape = Shape::klines(lines);
    Projection proj = project_set(P, shape, cfg);
    double current = cost(P, proj);
    std::vector<double> history{current};

    for (int iter = 0; iter < opts.max_iters; ++iter) {
      for (int c = 0; c < k; ++c) {
        std::vector<Eigen::Index> members;
        for (Eigen::Index i = 0; i < P.size(); ++i) {
          if (proj.assignment[i] == c) members.push_back(i);
        }
        if (members.size() < 2) continue;  // keep the previous line
        Eigen::MatrixXd pts(members.size(), P.dim());
        Eigen::VectorXd w(members.size());
        for (std::size_t m = 0; m < members.size(); ++m) {
          pts.row(static_cast<Eigen::Index>(m)) = P.coords.row(members[m]);
          w[static_cast<Eigen::Index>(m)] = P.weights[members[m]];
        }
        const Line refit = fit_cluster_line(pts, w, lines[c]);
        if (line_cluster_cost(pts, w, refit, cfg.z) <= line_cluster_cost(pts, w, lines[c], cfg.z)) {
          lines[c] = refit;
        }
      }
      shape = Shape::klines(lines);
      proj = project_set(P, shape, cfg);
      const double next = cost(P, proj);
      history.push_back(next);
      const double prev = current;
      current = next;
      if (prev - next <= opts.rel_tol * std::max(prev, 1e-300)) break;
    }
    if (current < best_cost) {
      best_cost = current;
      best_lines = lines;
      best_history = std::move(history);
    }
  }

  FitResult fit;
  fit.shape = Shape::klines(best_lines);
  fit.cost = cost(P, fit.shape, cfg);
  fit.approx_factor_c = opts.approx_factor > 0.0 ? opts.approx_factor : 4.0;
  fit.method = "pair-seeded-alternation";
  fit.seed = opts.seed;
  fit.iteration_costs = std::move(best_history);
  return fit;
}

FitResult fit_family(const PointSet& P, Family family, const FamilyParams& params, const DistanceConfig& cfg,
                     const FitOptions& opts) {
  switch (family) {
    case Family::KCenters: return fit_kcenters(P, params.k, cfg, opts);
    case Family::KLines: return fit_klines(P, params.k, cfg, opts);
    case Family::JFlat: return fit_jflat(P, params.j, cfg, opts);
    case Family::KJFlats:
      throw CapabilityError("no direct fitter for k-tuples of j-flats; use the empirical sensitivity path");
  }
  throw InputError("unknown family");
}

namespace {

// Cost of the optimal single center/line for the points selected by `mask`,
// along with that optimum. Masks index into P row-wise.
struct BlockOptimum {
  double cost = 0.0;
  Eigen::VectorXd center;  // kcenters
  Line line{Eigen::VectorXd(), Eigen::VectorXd()};
};

BlockOptimum block_center_optimum(const PointSet& P, std::uint32_t mask, const DistanceConfig& cfg) {
  std::vector<Eigen::Index> members;
  for (Eigen::Index i = 0; i < P.size(); ++i) {
    if (mask & (1u << i)) members.push_back(i);
  }
  Eigen::MatrixXd pts(members.size(), P.dim());
  Eigen::VectorXd w(members.size());
  for (std::size_t m = 0; m < members.size(); ++m) {
    pts.row(static_cast<Eigen::Index>(m)) = P.coords.row(members[m]);
    w[static_cast<Eigen::Index>(m)] = P.weights[members[m]];
  }
  BlockOptimum out;
  if (cfg.z == 2.0) {
    out.center = (w.transpose() * pts).transpose() / w.sum();
  } else {
    out.center = weiszfeld_median(pts, w);
  }
  for (Eigen::Index m = 0; m < pts.rows(); ++m) {
    out.cost += w[m] * zpow_from_squared((pts.row(m).transpose() - out.center).squaredNorm(), cfg.z);
  }
  return out;
}

BlockOptimum block_line_optimum(const PointSet& P, std::uint32_t mask, const DistanceConfig& cfg) {
  std::vector<Eigen::Index> members;
  for (Eigen::Index i = 0; i < P.size(); ++i) {
    if (mask & (1u << i)) members.push_back(i);
  }
  Eigen::MatrixXd pts(members.size(), P.dim());
  Eigen::VectorXd w(members.size());
  for (std::size_t m = 0; m < members.size(); ++m) {
    pts.row(static_cast<Eigen::Index>(m)) = P.coords.row(members[m]);
    w[static_cast<Eigen::Index>(m)] = P.weights[members[m]];
  }
  BlockOptimum out;
  const Line fallback{pts.row(0).transpose(), Eigen::VectorXd::Unit(P.dim(), 0)};
  out.line = pts.rows() < 2 ? fallback : fit_cluster_line(pts, w, fallback);
  out.cost = line_cluster_cost(pts, w, out.line, cfg.z);
  return out;
}

}  // namespace

FitResult exact_fit(const PointSet& P, Family family, const FamilyParams& params, const DistanceConfig& cfg) {
  const Eigen::Index n = P.size();
  if (n > 14) throw CapabilityError("exact_fit supports at most 14 points");

  if (family == Family::JFlat) {
    if (cfg.z != 2.0) throw CapabilityError("exact_fit for flats requires z = 2");
    FitOptions opts;
    FitResult fit = fit_jflat(P, params.j, cfg, opts);
    fit.approx_factor_c = 1.0;
    fit.method = "exact-svd";
    return fit;
  }
  if (family != Family::KCenters && family != Family::KLines) {
    throw CapabilityError("exact_fit supports kcenters, klines and jflat");
  }
  const bool centers_mode = family == Family::KCenters;
  if (centers_mode && cfg.z != 1.0 && cfg.z != 2.0) {
    throw CapabilityError("exact_fit for centers requires z in {1,2}");
  }
  if (!centers_mode && cfg.z != 2.0) {
    throw CapabilityError("exact_fit for lines requires z = 2");
  }
  if (params.k < 1) throw InputError("k must be >= 1");
  const int k = std::min<int>(params.k, static_cast<int>(n));
  if (k == static_cast<int>(n)) {
    // one constituent per point
    FitResult fit;
    if (centers_mode) {
      fit.shape = Shape::kpoints(P.coords);
    } else {
      std::vector<Line> lines;
      for (Eigen::Index i = 0; i < n; ++i) {
        lines.push_back(Line{P.coords.row(i).transpose(), Eigen::VectorXd::Unit(P.dim(), 0)});
      }
      fit.shape = Shape::klines(lines);
    }
    fit.cost = cost(P, fit.shape, cfg);
    fit.approx_factor_c = 1.0;
    fit.method = "exact-enumeration";
    fit.iteration_costs = {fit.cost};
    return fit;
  }

  // Optimal cost of every subset as one block, then subset DP over partitions
  // into at most k blocks.
  const std::uint32_t full = (1u << n) - 1u;
  std::vector<BlockOptimum> block(full + 1);
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    block[mask] = centers_mode ? block_center_optimum(P, mask, cfg) : block_line_optimum(P, mask, cfg);
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // dp[b][mask]: optimal cost covering `mask` with exactly b blocks.
  std::vector<std::vector<double>> dp(static_cast<std::size_t>(k) + 1,
                                      std::vector<double>(full + 1, kInf));
  std::vector<std::vector<std::uint32_t>> choice(static_cast<std::size_t>(k) + 1,
                                                 std::vector<std::uint32_t>(full + 1, 0));
  dp[0][0] = 0.0;
  for (int b = 1; b <= k; ++b) {
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      // iterate submasks that contain the lowest set bit, so each partition
      // is enumerated once
      const std::uint32_t low = mask & (~mask + 1u);
      for (std::uint32_t sub = mask; sub != 0; sub = (sub - 1) & mask) {
        if (!(sub & low)) continue;
        const double cand = dp[b - 1][mask ^ sub] + block[sub].cost;
        if (cand < dp[b][mask]) {
          dp[b][mask] = cand;
          choice[b][mask] = sub;
        }
      }
    }
  }

  int best_b = 1;
  for (int b = 2; b <= k; ++b) {
    if (dp[b][full] < dp[best_b][full]) best_b = b;
  }

  std::vector<std::uint32_t> blocks;
  std::uint32_t mask = full;
  for (int b = best_b; b >= 1; --b) {
    blocks.push_back(choice[b][mask]);
    mask ^= choice[b][mask];
  }

  FitResult fit;
  if (centers_mode) {
    Eigen::MatrixXd centers(blocks.size(), P.dim());
    for (std::size_t i = 0; i < blocks.size(); ++i) centers.row(static_cast<Eigen::Index>(i)) = block[blocks[i]].center;
    fit.shape = Shape::kpoints(centers);
  } else {
    std::vector<Line> lines;
    lines.reserve(blocks.size());
    for (std::uint32_t b : blocks) lines.push_back(block[b].line);
    fit.shape = Shape::klines(lines);
  }
  fit.cost = cost(P, fit.shape, cfg);
  fit.approx_factor_c = 1.0;
  fit.method = "exact-enumeration";
  fit.iteration_costs = {fit.cost};
  return fit;
}

}  // namespace senscore
