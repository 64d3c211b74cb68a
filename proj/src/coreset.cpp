#include "senscore/coreset.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "senscore/errors.hpp"
#include "senscore/numerics.hpp"
#include "senscore/shape_sampling.hpp"

namespace senscore {

PointSet Coreset::materialize(const PointSet& P) const {
  if (indices.empty()) throw InputError("empty coreset");
  Eigen::MatrixXd coords(static_cast<Eigen::Index>(indices.size()), P.dim());
  Eigen::VectorXd w(static_cast<Eigen::Index>(indices.size()));
  std::vector<std::int64_t> ids(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const Eigen::Index src = indices[i];
    if (src < 0 || src >= P.size()) throw InputError("coreset index out of range");
    coords.row(static_cast<Eigen::Index>(i)) = P.coords.row(src);
    w[static_cast<Eigen::Index>(i)] = weights[static_cast<Eigen::Index>(i)];
    ids[i] = P.ids[static_cast<std::size_t>(src)];
  }
  return PointSet(std::move(coords), std::move(w), std::move(ids));
}

CoresetPlan plan_size(double epsilon, const SensitivityProfile& profile, int dim_estimate, double size_constant,
                      Eigen::Index n) {
  if (!(epsilon > 0.0) || epsilon > 1.0) throw InputError("epsilon must lie in (0,1]");
  if (dim_estimate < 1) throw InputError("dimension estimate must be >= 1");
  if (!(size_constant > 0.0)) throw InputError("size constant must be positive");
  CoresetPlan plan;
  plan.epsilon = epsilon;
  plan.total_T = profile.total;
  plan.dim_estimate = dim_estimate;
  plan.size_constant = size_constant;
  const double ratio = profile.total / epsilon;
  const double raw = size_constant * ratio * ratio * static_cast<double>(dim_estimate);
  const double rounded = std::ceil(raw);
  if (rounded >= static_cast<double>(n)) {
    plan.size_m = n;
    plan.capped = true;
  } else {
    plan.size_m = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(rounded));
  }
  return plan;
}

Coreset draw(const PointSet& P, const SensitivityProfile& profile, Eigen::Index m, std::uint64_t seed) {
  if (m < 1) throw InputError("coreset size must be >= 1");
  if (profile.bounds.size() != P.size()) throw InputError("profile does not match the instance");
  if (profile.lower_bound && !profile.floor_mixed) {
    throw InputError("refusing to sample from a raw lower-bound profile; mix a floor in first");
  }
  const double total = pairwise_sum({profile.bounds.data(), static_cast<std::size_t>(profile.bounds.size())});
  if (!(total > 0.0)) throw InputError("profile has zero total");
  for (Eigen::Index i = 0; i < profile.bounds.size(); ++i) {
    if (!(profile.bounds[i] > 0.0)) throw InputError("sampling needs strictly positive bounds");
  }

  Eigen::VectorXd cdf(P.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < P.size(); ++i) {
    acc += profile.bounds[i];
    cdf[i] = acc;
  }

  Coreset out;
  out.seed = seed;
  out.indices.reserve(static_cast<std::size_t>(m));
  out.weights.resize(m);
  for (Eigen::Index t = 0; t < m; ++t) {
    const double u = counter_uniform(seed, 0xd4a11u, static_cast<std::uint64_t>(t)) * acc;
    const double* hit = std::lower_bound(cdf.data(), cdf.data() + cdf.size(), u);
    Eigen::Index idx = static_cast<Eigen::Index>(hit - cdf.data());
    if (idx >= P.size()) idx = P.size() - 1;
    out.indices.push_back(idx);
    out.weights[t] = P.weights[idx] * total / (static_cast<double>(m) * profile.bounds[idx]);
  }

  // invariants every emitted coreset must satisfy
  for (std::size_t i = 0; i < out.indices.size(); ++i) {
    if (out.indices[i] < 0 || out.indices[i] >= P.size() || !(out.weights[static_cast<Eigen::Index>(i)] > 0.0)) {
      throw std::logic_error("coreset invariant violated: S must be a positively weighted subset of P");
    }
  }
  return out;
}

Coreset draw(const PointSet& P, const SensitivityProfile& profile, const CoresetPlan& plan, std::uint64_t seed) {
  Coreset out = draw(P, profile, plan.size_m, seed);
  out.plan = plan;
  return out;
}

SensitivityProfile mix_floor(const SensitivityProfile& profile, const PointSet& P, double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0) throw InputError("floor weight gamma must lie in (0,1]");
  if (profile.bounds.size() != P.size()) throw InputError("profile does not match the instance");
  SensitivityProfile out = profile;
  const double W = P.total_weight();
  for (Eigen::Index i = 0; i < P.size(); ++i) {
    out.bounds[i] = (1.0 - gamma) * profile.bounds[i] + gamma * P.weights[i] / W;
  }
  out.total = pairwise_sum({out.bounds.data(), static_cast<std::size_t>(out.bounds.size())});
  out.unclamped_total = out.total;
  out.floor_mixed = true;
  out.floor_gamma = gamma;
  return out;
}

SensitivityProfile uniform_profile(const PointSet& P) {
  SensitivityProfile out;
  const double W = P.total_weight();
  out.bounds = P.weights / W;
  out.total = pairwise_sum({out.bounds.data(), static_cast<std::size_t>(out.bounds.size())});
  out.unclamped_total = out.total;
  out.method = "uniform";
  return out;
}

EvalReport evaluate(const PointSet& P, const PointSet& S, Family family, const FamilyParams& params,
                    const DistanceConfig& cfg, const EvalOptions& opts) {
  if (P.dim() != S.dim()) throw InputError("instance and coreset dimensions disagree");
  const BoundingBox box = BoundingBox::of(P);

  auto rel_error = [&](const Shape& F) {
    const double full = cost(P, F, cfg);
    if (!(full > 0.0)) return 0.0;  // degenerate shapes carry no constraint
    const double approx = cost(S, F, cfg);
    return std::abs(full - approx) / full;
  };

  EvalReport report;
  const std::size_t total = static_cast<std::size_t>(opts.n_random + opts.n_subset_fits + opts.n_adversarial);
  std::vector<double> errors(total, 0.0);

  // each ensemble member owns a derived stream, so thread count cannot
  // change the result
  parallel_for_index(total, opts.threads, [&](std::size_t i) {
    auto rng = make_engine(opts.seed, 0xe7a1000u + i);
    if (i < static_cast<std::size_t>(opts.n_random)) {
      errors[i] = rel_error(random_shape(family, params, box, rng));
    } else if (i < static_cast<std::size_t>(opts.n_random + opts.n_subset_fits)) {
      const Eigen::Index size = std::max<Eigen::Index>(Eigen::Index{2} * (params.k + params.j + 1),
                                                       P.size() / 20);
      errors[i] = rel_error(fitted_subset_shape(family, params, P, cfg, size, rng));
    } else {
      const Shape start = i % 2 == 0 ? shape_through_points(family, params, P, rng)
                                     : random_shape(family, params, box, rng);
      const Shape adv = ascend_shape(start, rel_error, rng, opts.ascent_steps, 0.15 * box.diagonal());
      errors[i] = rel_error(adv);
    }
  });
  for (std::size_t i = 0; i < total; ++i) {
    if (i < static_cast<std::size_t>(opts.n_random)) {
      report.max_random = std::max(report.max_random, errors[i]);
    } else if (i < static_cast<std::size_t>(opts.n_random + opts.n_subset_fits)) {
      report.max_subset = std::max(report.max_subset, errors[i]);
    } else {
      report.max_adversarial = std::max(report.max_adversarial, errors[i]);
    }
  }

  report.shapes_evaluated = static_cast<int>(errors.size());
  report.max_rel_error = errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end());
  report.q50 = quantile(errors, 0.50);
  report.q90 = quantile(errors, 0.90);
  report.q99 = quantile(errors, 0.99);
  return report;
}

}  // namespace senscore
