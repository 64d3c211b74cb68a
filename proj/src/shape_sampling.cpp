#include "senscore/shape_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "senscore/errors.hpp"

namespace senscore {

BoundingBox BoundingBox::of(const PointSet& P) {
  BoundingBox box;
  box.lo = P.coords.colwise().minCoeff().transpose();
  box.hi = P.coords.colwise().maxCoeff().transpose();
  return box;
}

Eigen::VectorXd BoundingBox::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd p(lo.size());
  // inflate by 25% per side so shapes can sit outside the hull
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    const double pad = 0.25 * (hi[i] - lo[i]);
    p[i] = lo[i] - pad + (hi[i] - lo[i] + 2.0 * pad) * unit(rng);
  }
  return p;
}

double BoundingBox::diagonal() const {
  const double d = (hi - lo).norm();
  return d > 0.0 ? d : 1.0;
}

namespace {

Eigen::VectorXd random_unit(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(d);
  do {
    for (Eigen::Index i = 0; i < d; ++i) v[i] = gauss(rng);
  } while (v.norm() < 1e-12);
  return v.normalized();
}

Eigen::MatrixXd random_orthonormal_rows(Eigen::Index j, Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (true) {
    Eigen::MatrixXd g(j, d);
    for (Eigen::Index r = 0; r < j; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) g(r, c) = gauss(rng);
    }
    const JFlat f = JFlat::from_span(Eigen::VectorXd::Zero(d), g);
    if (f.basis.rows() == j) return f.basis;
  }
}

// Extends `rows` to exactly j orthonormal rows using coordinate directions.
Eigen::MatrixXd complete_basis(Eigen::MatrixXd rows, Eigen::Index j, Eigen::Index d) {
  for (Eigen::Index e = 0; e < d && rows.rows() < j; ++e) {
    Eigen::MatrixXd trial(rows.rows() + 1, d);
    trial.topRows(rows.rows()) = rows;
    trial.row(rows.rows()) = Eigen::RowVectorXd::Unit(d, e);
    const JFlat f = JFlat::from_span(Eigen::VectorXd::Zero(d), trial);
    if (f.basis.rows() > rows.rows()) rows = f.basis;
  }
  return rows;
}

}  // namespace

Shape random_shape(Family family, const FamilyParams& params, const BoundingBox& box, std::mt19937_64& rng) {
  const Eigen::Index d = box.lo.size();
  switch (family) {
    case Family::KCenters: {
      Eigen::MatrixXd centers(params.k, d);
      for (int c = 0; c < params.k; ++c) centers.row(c) = box.sample(rng).transpose();
      return Shape::kpoints(std::move(centers));
    }
    case Family::KLines: {
      std::vector<Line> lines;
      for (int c = 0; c < params.k; ++c) lines.push_back(Line{box.sample(rng), random_unit(d, rng)});
      return Shape::klines(std::move(lines));
    }
    case Family::JFlat:
      return Shape::jflat(JFlat{box.sample(rng), random_orthonormal_rows(params.j, d, rng)});
    case Family::KJFlats: {
      std::vector<JFlat> flats;
      for (int c = 0; c < params.k; ++c) {
        flats.push_back(JFlat{box.sample(rng), random_orthonormal_rows(params.j, d, rng)});
      }
      return Shape::kjflats(std::move(flats));
    }
  }
  throw InputError("unknown family");
}

Shape shape_through_points(Family family, const FamilyParams& params, const PointSet& P, std::mt19937_64& rng) {
  const Eigen::Index d = P.dim();
  std::uniform_int_distribution<Eigen::Index> pick(0, P.size() - 1);
  auto line_through_random_pair = [&]() {
    for (int attempt = 0; attempt < 16; ++attempt) {
      const Eigen::Index a = pick(rng);
      const Eigen::Index b = pick(rng);
      const Eigen::VectorXd diff = (P.coords.row(b) - P.coords.row(a)).transpose();
      if (diff.norm() > 1e-300) return Line{P.coords.row(a).transpose(), diff.normalized()};
    }
    return Line{P.coords.row(pick(rng)).transpose(), Eigen::VectorXd::Unit(d, 0)};
  };
  auto flat_through_random_tuple = [&]() {
    const Eigen::VectorXd anchor = P.coords.row(pick(rng)).transpose();
    Eigen::MatrixXd span(params.j, d);
    for (int r = 0; r < params.j; ++r) span.row(r) = P.coords.row(pick(rng)) - anchor.transpose();
    JFlat f = JFlat::from_span(anchor, span);
    if (f.basis.rows() < params.j) f.basis = complete_basis(f.basis, params.j, d);
    return f;
  };
  switch (family) {
    case Family::KCenters: {
      Eigen::MatrixXd centers(params.k, d);
      for (int c = 0; c < params.k; ++c) centers.row(c) = P.coords.row(pick(rng));
      return Shape::kpoints(std::move(centers));
    }
    case Family::KLines: {
      std::vector<Line> lines;
      for (int c = 0; c < params.k; ++c) lines.push_back(line_through_random_pair());
      return Shape::klines(std::move(lines));
    }
    case Family::JFlat:
      return Shape::jflat(flat_through_random_tuple());
    case Family::KJFlats: {
      std::vector<JFlat> flats;
      for (int c = 0; c < params.k; ++c) flats.push_back(flat_through_random_tuple());
      return Shape::kjflats(std::move(flats));
    }
  }
  throw InputError("unknown family");
}

Shape fitted_subset_shape(Family family, const FamilyParams& params, const PointSet& P, const DistanceConfig& cfg,
                          Eigen::Index subset_size, std::mt19937_64& rng) {
  const Eigen::Index n = P.size();
  const Eigen::Index take = std::clamp<Eigen::Index>(subset_size, 1, n);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(take));

  Eigen::MatrixXd coords(take, P.dim());
  Eigen::VectorXd w(take);
  for (Eigen::Index i = 0; i < take; ++i) {
    coords.row(i) = P.coords.row(idx[static_cast<std::size_t>(i)]);
    w[i] = P.weights[idx[static_cast<std::size_t>(i)]];
  }
  PointSet sub(std::move(coords), std::move(w));

  FitOptions opts;
  opts.restarts = 1;
  opts.max_iters = 12;
  opts.seed = rng();
  const FamilyParams capped{std::min<int>(params.k, static_cast<int>(take)), params.j};
  if (family == Family::KJFlats) {
    // no direct fitter; anchor flats on subset points instead
    return shape_through_points(family, params, P, rng);
  }
  return fit_family(sub, family, capped, cfg, opts).shape;
}

Shape witness_shape(Family family, const FamilyParams& params, const BoundingBox& box, double direction_sign) {
  const Eigen::Index d = box.lo.size();
  Eigen::VectorXd anchor = direction_sign >= 0.0 ? box.hi : box.lo;
  anchor.array() += direction_sign * 3.0 * box.diagonal();
  switch (family) {
    case Family::KCenters: {
      Eigen::MatrixXd centers(params.k, d);
      for (int c = 0; c < params.k; ++c) centers.row(c) = anchor.transpose();
      return Shape::kpoints(std::move(centers));
    }
    case Family::KLines: {
      // witness lines point along e1; offset in the remaining coordinates
      // keeps them off the data for d >= 2
      std::vector<Line> lines(static_cast<std::size_t>(params.k), Line{anchor, Eigen::VectorXd::Unit(d, 0)});
      return Shape::klines(std::move(lines));
    }
    case Family::JFlat: {
      Eigen::MatrixXd basis(params.j, d);
      for (int r = 0; r < params.j; ++r) basis.row(r) = Eigen::RowVectorXd::Unit(d, r);
      return Shape::jflat(JFlat{anchor, basis});
    }
    case Family::KJFlats: {
      Eigen::MatrixXd basis(params.j, d);
      for (int r = 0; r < params.j; ++r) basis.row(r) = Eigen::RowVectorXd::Unit(d, r);
      std::vector<JFlat> flats(static_cast<std::size_t>(params.k), JFlat{anchor, basis});
      return Shape::kjflats(std::move(flats));
    }
  }
  throw InputError("unknown family");
}

std::vector<double> encode_shape(const Shape& s) {
  std::vector<double> out;
  auto push_vec = [&out](const Eigen::VectorXd& v) {
    out.insert(out.end(), v.data(), v.data() + v.size());
  };
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, KPointSet>) {
          for (Eigen::Index r = 0; r < v.centers.rows(); ++r) push_vec(v.centers.row(r).transpose());
        } else if constexpr (std::is_same_v<T, KLineSet>) {
          for (const auto& line : v.lines) {
            push_vec(line.anchor);
            push_vec(line.direction);
          }
        } else if constexpr (std::is_same_v<T, JFlat>) {
          push_vec(v.anchor);
          for (Eigen::Index r = 0; r < v.basis.rows(); ++r) push_vec(v.basis.row(r).transpose());
        } else {
          for (const auto& flat : v.flats) {
            push_vec(flat.anchor);
            for (Eigen::Index r = 0; r < flat.basis.rows(); ++r) push_vec(flat.basis.row(r).transpose());
          }
        }
      },
      s.value);
  return out;
}

Shape decode_shape(const Shape& prototype, std::span<const double> params) {
  const Eigen::Index d = prototype.dim();
  std::size_t pos = 0;
  auto take_vec = [&](Eigen::Index len) {
    Eigen::VectorXd v(len);
    for (Eigen::Index i = 0; i < len; ++i) v[i] = params[pos++];
    return v;
  };
  return std::visit(
      [&](const auto& v) -> Shape {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, KPointSet>) {
          Eigen::MatrixXd centers(v.centers.rows(), d);
          for (Eigen::Index r = 0; r < centers.rows(); ++r) centers.row(r) = take_vec(d).transpose();
          return Shape::kpoints(std::move(centers));
        } else if constexpr (std::is_same_v<T, KLineSet>) {
          std::vector<Line> lines;
          for (const auto& old : v.lines) {
            Eigen::VectorXd anchor = take_vec(d);
            Eigen::VectorXd dir = take_vec(d);
            lines.push_back(dir.norm() > 1e-12 ? Line{anchor, dir.normalized()} : Line{anchor, old.direction});
          }
          return Shape::klines(std::move(lines));
        } else if constexpr (std::is_same_v<T, JFlat>) {
          Eigen::VectorXd anchor = take_vec(d);
          Eigen::MatrixXd span(v.basis.rows(), d);
          for (Eigen::Index r = 0; r < span.rows(); ++r) span.row(r) = take_vec(d).transpose();
          JFlat f = JFlat::from_span(anchor, span);
          if (f.basis.rows() < v.basis.rows()) f.basis = complete_basis(f.basis, v.basis.rows(), d);
          return Shape::jflat(std::move(f));
        } else {
          std::vector<JFlat> flats;
          for (const auto& old : v.flats) {
            Eigen::VectorXd anchor = take_vec(d);
            Eigen::MatrixXd span(old.basis.rows(), d);
            for (Eigen::Index r = 0; r < span.rows(); ++r) span.row(r) = take_vec(d).transpose();
            JFlat f = JFlat::from_span(anchor, span);
            if (f.basis.rows() < old.basis.rows()) f.basis = complete_basis(f.basis, old.basis.rows(), d);
            flats.push_back(std::move(f));
          }
          return Shape::kjflats(std::move(flats));
        }
      },
      prototype.value);
}

Shape ascend_shape(const Shape& prototype, const std::function<double(const Shape&)>& objective,
                   std::mt19937_64& rng, int steps, double initial_step) {
  std::vector<double> params = encode_shape(prototype);
  Shape best = prototype;
  double best_val = objective(best);
  double step = initial_step;
  std::normal_distribution<double> gauss(0.0, 1.0);
  int stall = 0;
  for (int it = 0; it < steps; ++it) {
    std::vector<double> cand = params;
    for (double& x : cand) x += step * gauss(rng);
    const Shape shape = decode_shape(prototype, cand);
    const double val = objective(shape);
    if (val > best_val) {
      best_val = val;
      best = shape;
      params = std::move(cand);
      step *= 1.4;
      stall = 0;
    } else if (++stall >= 4) {
      step *= 0.6;
      stall = 0;
    }
  }
  return best;
}

}  // namespace senscore
