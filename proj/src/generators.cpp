#include "senscore/generators.hpp"

#include <cmath>
#include <random>

#include "senscore/errors.hpp"
#include "senscore/numerics.hpp"

namespace senscore {

namespace {

Eigen::MatrixXd gaussian_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = gauss(rng);
  }
  return m;
}

Eigen::MatrixXd orthonormal_rows(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  // QR of a gaussian matrix; rows of Q^T restricted to the leading block
  const Eigen::MatrixXd g = gaussian_matrix(c, r, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(c, r);
  return q.transpose();
}

}  // namespace

PointSet generate_mixture(Eigen::Index n, Eigen::Index d, const MixtureSpec& spec, std::uint64_t seed) {
  if (spec.components < 1) throw InputError("mixture needs at least one component");
  if (n < 1 || d < 1) throw InputError("mixture needs n >= 1 and d >= 1");
  auto rng = make_engine(seed, 0x6e1au);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int k = spec.components;
  Eigen::MatrixXd means(k, d);
  for (int c = 0; c < k; ++c) {
    for (Eigen::Index j = 0; j < d; ++j) means(c, j) = spec.separation * (2.0 * unit(rng) - 1.0);
  }

  // component masses, geometric when imbalance > 0
  std::vector<double> mass(static_cast<std::size_t>(k));
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    mass[static_cast<std::size_t>(c)] = std::pow(1.0 - 0.75 * spec.imbalance, c);
    total += mass[static_cast<std::size_t>(c)];
  }
  for (double& m : mass) m /= total;

  Eigen::MatrixXd coords(n, d);
  std::discrete_distribution<int> pick(mass.begin(), mass.end());
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = pick(rng);
    for (Eigen::Index j = 0; j < d; ++j) coords(i, j) = means(c, j) + spec.spread * gauss(rng);
  }
  return PointSet(std::move(coords));
}

PointSet generate_near_lines(Eigen::Index n, Eigen::Index d, int k, double noise, std::uint64_t seed) {
  if (k < 1) throw InputError("need at least one line");
  if (n < 1 || d < 1) throw InputError("need n >= 1 and d >= 1");
  auto rng = make_engine(seed, 0x11e5u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, k - 1);

  Eigen::MatrixXd anchors = 10.0 * gaussian_matrix(k, d, rng);
  Eigen::MatrixXd dirs(k, d);
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd v = gaussian_matrix(d, 1, rng).col(0);
    while (v.norm() < 1e-12) v = gaussian_matrix(d, 1, rng).col(0);
    dirs.row(c) = v.normalized().transpose();
  }

  Eigen::MatrixXd coords(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = pick(rng);
    const double t = 20.0 * (unit(rng) - 0.5);
    coords.row(i) = anchors.row(c) + t * dirs.row(c);
    for (Eigen::Index j = 0; j < d; ++j) coords(i, j) += noise * gauss(rng);
  }
  return PointSet(std::move(coords));
}

PointSet generate_flat_noise(Eigen::Index n, Eigen::Index d, int j, double noise, std::uint64_t seed) {
  if (j < 0 || j > d - 1) throw InputError("flat dimension must satisfy 0 <= j <= d-1");
  if (n < 1) throw InputError("need n >= 1");
  auto rng = make_engine(seed, 0xf1a7u);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const Eigen::MatrixXd basis = j > 0 ? orthonormal_rows(j, d, rng) : Eigen::MatrixXd(0, d);
  const Eigen::VectorXd anchor = 5.0 * gaussian_matrix(d, 1, rng).col(0);

  Eigen::MatrixXd coords(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd p = anchor;
    for (Eigen::Index r = 0; r < basis.rows(); ++r) p += 8.0 * gauss(rng) * basis.row(r).transpose();
    for (Eigen::Index c = 0; c < d; ++c) p[c] += noise * gauss(rng);
    coords.row(i) = p.transpose();
  }
  return PointSet(std::move(coords));
}

PointSet generate_integer_grid(Eigen::Index n, Eigen::Index d, double exponent_c, std::uint64_t seed) {
  if (n < 1 || d < 1) throw InputError("need n >= 1 and d >= 1");
  if (!(exponent_c > 0.0)) throw InputError("grid exponent must be positive");
  auto rng = make_engine(seed, 0x9d1du);
  const double bound = std::pow(static_cast<double>(n), exponent_c);
  const std::int64_t hi = static_cast<std::int64_t>(std::min(bound, 4.0e15));
  std::uniform_int_distribution<std::int64_t> pick(-hi, hi);

  Eigen::MatrixXd coords(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) coords(i, j) = static_cast<double>(pick(rng));
  }
  return PointSet(std::move(coords));
}

PointSet embed_isometric(const PointSet& P, Eigen::Index d_out, std::uint64_t seed) {
  if (d_out < P.dim()) throw InputError("embedding target dimension is smaller than the source");
  if (d_out == P.dim()) return P;
  auto rng = make_engine(seed, 0xe3bedu);
  const Eigen::MatrixXd q = orthonormal_rows(P.dim(), d_out, rng);  // d_in x d_out
  return PointSet(P.coords * q, P.weights, P.ids);
}

}  // namespace senscore
