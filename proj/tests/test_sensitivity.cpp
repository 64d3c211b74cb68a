#include <doctest.h>

#include <cmath>
#include <random>

#include "senscore/errors.hpp"
#include "senscore/generators.hpp"
#include "senscore/numerics.hpp"
#include "senscore/sensitivity.hpp"
#include "test_support.hpp"

using namespace senscore;

namespace {

Eigen::VectorXd v2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

}  // namespace

TEST_CASE("reduce: embedded 2-flat instance lands in 6 coordinates isometrically") {
  auto rng = std::mt19937_64(47);
  // points on a random affine 2-flat of R^100
  const Eigen::Index d = 100;
  const PointSet low(testing::random_points(25, 2, rng));
  PointSet P = embed_isometric(low, d, 3);
  // shift off the origin so the flat is genuinely affine
  Eigen::RowVectorXd shift = testing::random_points(1, d, rng).row(0);
  P = PointSet(P.coords.rowwise() + shift, P.weights, P.ids);

  const FitResult fit = fit_jflat(P, 2, DistanceConfig(2.0));
  CHECK(fit.cost == doctest::Approx(0.0).epsilon(1e-12));

  auto [proj, red] = reduce(P, fit.shape, DistanceConfig(2.0));
  CHECK(red.shape_span_dim == 3);
  CHECK(red.point_span_dim == 3);
  CHECK(red.basis.rows() == 6);  // min(m1 + m2, d)
  CHECK(red.coords.cols() == 6);

  // reconstruction reproduces the projected points
  CHECK((red.coords * red.basis - proj.projected.coords).cwiseAbs().maxCoeff() < 1e-9);

  // pairwise distances preserved
  for (int a = 0; a < 10; ++a) {
    for (int b = a + 1; b < 10; ++b) {
      const double orig = (proj.projected.coords.row(a) - proj.projected.coords.row(b)).norm();
      const double redu = (red.coords.row(a) - red.coords.row(b)).norm();
      CHECK(redu == doctest::Approx(orig).epsilon(1e-9));
    }
  }
}

TEST_CASE("reduce: small ambient dimension keeps m = d") {
  auto rng = std::mt19937_64(53);
  const PointSet P(testing::random_points(12, 2, rng));
  const FitResult fit = fit_kcenters(P, 3, DistanceConfig(2.0));
  auto [proj, red] = reduce(P, fit.shape, DistanceConfig(2.0));
  CHECK(red.basis.rows() == 2);  // m1 + m2 >= d here
  CHECK((red.coords * red.basis - proj.projected.coords).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("reduce: two centers in R^10 give an essentially 2-dimensional instance") {
  auto rng = std::mt19937_64(59);
  const PointSet P(testing::random_points(20, 10, rng));
  const FitResult fit = fit_kcenters(P, 2, DistanceConfig(2.0));
  auto [proj, red] = reduce(P, fit.shape, DistanceConfig(2.0));
  CHECK(red.shape_span_dim == 2);
  CHECK(red.basis.rows() == std::min<Eigen::Index>(red.point_span_dim + 2, 10));
  // the projected multiset has at most 2 distinct points
  Eigen::BDCSVD<Eigen::MatrixXd> svd(red.coords);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()[i] > 1e-9 * svd.singularValues()[0]) ++rank;
  }
  CHECK(rank <= 2);
  CHECK((red.coords * red.basis - proj.projected.coords).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("sens_kcenters closed forms") {
  SUBCASE("k-median total bound: alpha + 2 alpha^2 k = 2k+1 at z=1") {
    auto rng = std::mt19937_64(61);
    const PointSet P(testing::random_points(9, 2, rng));
    const DistanceConfig z1(1.0);
    const FitResult fit = exact_fit(P, Family::KCenters, FamilyParams{3, 0}, z1);
    const SensitivityProfile prof = sens_kcenters(P, fit, z1);
    CHECK(prof.unclamped_total <= 7.0 + 1e-9);
    CHECK(prof.method == "kcenters-closed-form");
  }

  SUBCASE("four-point instance: raw bound 4.5 per point, clamped to 1") {
    Eigen::MatrixXd pts(4, 2);
    pts << 0, 0, 2, 0, 10, 0, 12, 0;
    const PointSet P(pts);
    const DistanceConfig z2(2.0);
    const FitResult fit = exact_fit(P, Family::KCenters, FamilyParams{2, 0}, z2);
    REQUIRE(fit.cost == doctest::Approx(4.0));
    const SensitivityProfile prof = sens_kcenters(P, fit, z2);
    // c=1, alpha=2: 2*(1/4) + 8*(1/2) = 4.5 raw, so every bound clamps to 1
    CHECK(prof.unclamped_total == doctest::Approx(4.0 * 4.5).epsilon(1e-12));
    for (int i = 0; i < 4; ++i) CHECK(prof.bounds[i] == doctest::Approx(1.0));
    // the true sensitivities are at most 1
    const SensitivityProfile oracle =
        exact_sensitivity_oracle(P, Family::KCenters, FamilyParams{2, 0}, z2);
    for (int i = 0; i < 4; ++i) CHECK(oracle.bounds[i] <= 1.0 + 1e-12);
  }

  SUBCASE("zero-cost fit: share of the cluster weight") {
    Eigen::MatrixXd pts(2, 2);
    pts << 0, 0, 1, 0;
    const PointSet P(pts);
    const DistanceConfig z2(2.0);
    const FitResult fit = exact_fit(P, Family::KCenters, FamilyParams{2, 0}, z2);
    REQUIRE(fit.cost == 0.0);
    const SensitivityProfile prof = sens_kcenters(P, fit, z2);
    CHECK(prof.bounds[0] == doctest::Approx(1.0));
    CHECK(prof.bounds[1] == doctest::Approx(1.0));
  }

  SUBCASE("rejects non-center fits") {
    Eigen::MatrixXd pts(3, 2);
    pts << 0, 0, 1, 0, 2, 1;
    const PointSet P(pts);
    const FitResult flat = fit_jflat(P, 1, DistanceConfig(2.0));
    CHECK_THROWS_AS(sens_kcenters(P, flat, DistanceConfig(2.0)), InputError);
  }
}

TEST_CASE("kcenters totals obey the closed-form constants for z in {1,2}") {
  auto rng = std::mt19937_64(67);
  for (int t = 0; t < 20; ++t) {
    const int k = 1 + static_cast<int>(rng() % 3);
    const double z = (t % 2 == 0) ? 1.0 : 2.0;
    const DistanceConfig cfg(z);
    const int n = 6 + static_cast<int>(rng() % 5);
    Eigen::MatrixXd pts = testing::random_points(n, 3, rng);
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w[i] = 0.25 + (rng() % 100) / 25.0;
    const PointSet P(pts, w);
    const FitResult fit = exact_fit(P, Family::KCenters, FamilyParams{k, 0}, cfg);
    const SensitivityProfile prof = sens_kcenters(P, fit, cfg);
    const double alpha = cfg.alpha();
    const double bound = alpha + 2.0 * alpha * alpha * k;  // 2^{z-1} + 2^{2z-1} k
    CHECK(prof.unclamped_total <= bound + 1e-9);
    for (Eigen::Index i = 0; i < prof.bounds.size(); ++i) {
      CHECK(prof.bounds[i] > 0.0);
      CHECK(prof.bounds[i] <= 1.0);
    }
  }
}

TEST_CASE("conditioned_basis") {
  SUBCASE("rank-1 all-ones matrix") {
    Eigen::MatrixXd M(2, 2);
    M << 1, 1, 1, 1;
    const ConditionedBasis cb = conditioned_basis(M, 2.0);
    CHECK(cb.rank == 1);
    CHECK(cb.A.rows() == 2);
    CHECK(cb.A.cols() == 1);
    CHECK(std::abs(cb.A(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(cb.A(1, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(cb.alpha_cb == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cb.beta_cb == 1.0);
    CHECK_FALSE(cb.loose);
  }

  SUBCASE("orthonormal columns: alpha = sqrt(m), beta = 1") {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(5, 3);
    M(0, 0) = M(1, 1) = M(2, 2) = 1.0;
    const ConditionedBasis cb = conditioned_basis(M, 2.0);
    CHECK(cb.rank == 3);
    CHECK(cb.alpha_cb == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(cb.beta_cb == 1.0);
  }

  SUBCASE("all-zero matrix is a capability error") {
    CHECK_THROWS_AS(conditioned_basis(Eigen::MatrixXd::Zero(3, 2), 2.0), CapabilityError);
  }

  SUBCASE("row inequality at z=2 on a random matrix") {
    auto rng = std::mt19937_64(71);
    const Eigen::MatrixXd M = testing::random_points(50, 3, rng);
    const ConditionedBasis cb = conditioned_basis(M, 2.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
      Eigen::VectorXd u(3);
      for (int i = 0; i < 3; ++i) u[i] = gauss(rng);
      const Eigen::VectorXd Mu = M * u;
      const double rhs_norm = Mu.squaredNorm();
      for (int i = 0; i < 50; ++i) {
        CHECK(Mu[i] * Mu[i] <= cb.A.row(i).squaredNorm() * rhs_norm * (1.0 + 1e-9) + 1e-12);
      }
    }
  }

  SUBCASE("dual-norm distortion certificate holds for z in {1,2,3}") {
    auto rng = std::mt19937_64(73);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double z : {1.0, 2.0, 3.0}) {
      const Eigen::MatrixXd M = testing::random_points(40, 4, rng);
      const ConditionedBasis cb = conditioned_basis(M, z);
      const double zp = z == 1.0 ? std::numeric_limits<double>::infinity() : z / (z - 1.0);
      for (int t = 0; t < 1000; ++t) {
        Eigen::VectorXd u(cb.rank);
        for (Eigen::Index i = 0; i < cb.rank; ++i) u[i] = gauss(rng);
        const double lhs = std::isinf(zp) ? u.cwiseAbs().maxCoeff()
                                          : std::pow(u.cwiseAbs().array().pow(zp).sum(), 1.0 / zp);
        const double rhs = std::pow((cb.A * u).cwiseAbs().array().pow(z).sum(), 1.0 / z);
        CHECK(lhs <= cb.beta_cb * rhs * (1.0 + 1e-9));
      }
    }
  }
}

TEST_CASE("sens_subspace") {
  const DistanceConfig z2(2.0);

  SUBCASE("points on a hyperplane: row-norm total is at most rank <= m+1") {
    auto rng = std::mt19937_64(79);
    // 30 points exactly on a 2-flat (hyperplane of R^3)
    const PointSet low(testing::random_points(30, 2, rng));
    PointSet P = embed_isometric(low, 3, 11);
    Eigen::RowVectorXd shift(3);
    shift << 1.0, -2.0, 0.5;
    P = PointSet(P.coords.rowwise() + shift, P.weights, P.ids);

    const FitResult fit = fit_jflat(P, 2, z2);
    REQUIRE(fit.cost == doctest::Approx(0.0).epsilon(1e-12));
    const SensitivityProfile prof = sens_subspace(P, fit, z2);
    CHECK(prof.unclamped_total <= prof.reduction_dim + 1.0 + 1e-9);
    CHECK(prof.method == "subspace-conditioned-basis");
    CHECK_FALSE(prof.loose);
  }

  SUBCASE("single point has sensitivity exactly 1") {
    Eigen::MatrixXd pts(1, 2);
    pts << 3, -1;
    const PointSet P(pts);
    const FitResult fit = fit_jflat(P, 1, z2);
    const SensitivityProfile prof = sens_subspace(P, fit, z2);
    CHECK(prof.bounds[0] == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("bounds dominate the oracle on random 3-d instances") {
    auto rng = std::mt19937_64(83);
    const PointSet P(testing::random_points(10, 3, rng));
    const FitResult fit = fit_jflat(P, 1, z2);  // exact for z=2
    const SensitivityProfile prof = sens_subspace(P, fit, z2);
    const SensitivityProfile oracle = exact_sensitivity_oracle(P, Family::JFlat, FamilyParams{1, 1}, z2);
    for (Eigen::Index i = 0; i < P.size(); ++i) {
      CHECK(prof.bounds[i] >= oracle.bounds[i] - 1e-9);
    }
  }

  SUBCASE("rejects non-flat fits") {
    Eigen::MatrixXd pts(3, 2);
    pts << 0, 0, 1, 0, 2, 1;
    const PointSet P(pts);
    const FitResult centers = fit_kcenters(P, 1, z2);
    CHECK_THROWS_AS(sens_subspace(P, centers, z2), InputError);
  }
}

TEST_CASE("subspace totals are dimension-independent at z=2") {
  const DistanceConfig z2(2.0);
  const int j = 2;
  const PointSet base = generate_flat_noise(200, 5, j, 0.3, 7);

  std::vector<double> totals;
  for (Eigen::Index d : {5, 50, 500}) {
    const PointSet P = embed_isometric(base, d, 13);
    const FitResult fit = fit_jflat(P, j, z2);
    const SensitivityProfile prof = sens_subspace(P, fit, z2);
    totals.push_back(prof.unclamped_total);
    const double cap = 2.0 + 8.0 * (std::min<double>(static_cast<double>(d), 2.0 * (j + 1)) + 1.0);
    CHECK(prof.unclamped_total <= cap + 1e-9);
  }
  CHECK(std::abs(totals[0] - totals[1]) < 1e-9);
  CHECK(std::abs(totals[1] - totals[2]) < 1e-9);
}

TEST_CASE("row norms of the conditioned basis bound each |M_i u|^z") {
  auto rng = std::mt19937_64(89);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double z : {1.0, 2.0, 3.0}) {
    const Eigen::MatrixXd M = testing::random_points(30, 4, rng);
    const ConditionedBasis cb = conditioned_basis(M, z);
    const double beta_z = std::pow(cb.beta_cb, z);
    for (int t = 0; t < 300; ++t) {
      Eigen::VectorXd u(4);
      for (int i = 0; i < 4; ++i) u[i] = gauss(rng);
      const Eigen::VectorXd Mu = M * u;
      const double mu_norm_z = Mu.cwiseAbs().array().pow(z).sum();
      for (int i = 0; i < 30; ++i) {
        const double lhs = std::pow(std::abs(Mu[i]), z);
        const double row_z = cb.A.row(i).cwiseAbs().array().pow(z).sum();
        CHECK(lhs <= row_z * beta_z * mu_norm_z * (1.0 + 1e-9) + 1e-12);
      }
    }
  }
}

TEST_CASE("sens_empirical") {
  const DistanceConfig z2(2.0);

  SUBCASE("budget must be positive") {
    Eigen::MatrixXd pts(2, 2);
    pts << 0, 0, 1, 1;
    EmpiricalOptions opts;
    opts.budget = 0;
    CHECK_THROWS_AS(sens_empirical(PointSet(pts), Family::KCenters, FamilyParams{1, 0}, z2, opts), InputError);
  }

  SUBCASE("matches the oracle when fed the decisive candidates") {
    // two points, two centers: either point can be covered exactly while the
    // other pays everything, so both sensitivities are 1
    Eigen::MatrixXd pts(2, 2);
    pts << 0, 0, 1, 0;
    const PointSet P(pts);
    EmpiricalOptions opts;
    opts.budget = 8;
    opts.seed = 5;
    opts.extra_candidates = {Shape::kpoints(v2(0, 0).transpose()), Shape::kpoints(v2(1, 0).transpose())};
    const SensitivityProfile emp = sens_empirical(P, Family::KCenters, FamilyParams{2, 0}, z2, opts);
    const SensitivityProfile oracle = exact_sensitivity_oracle(P, Family::KCenters, FamilyParams{2, 0}, z2);
    CHECK(emp.bounds[0] == doctest::Approx(oracle.bounds[0]).epsilon(1e-6));
    CHECK(emp.bounds[1] == doctest::Approx(oracle.bounds[1]).epsilon(1e-6));
    CHECK(emp.lower_bound);
  }

  SUBCASE("coincident points: every candidate gives the same split") {
    Eigen::MatrixXd pts(2, 2);
    pts << 2, 3, 2, 3;
    const PointSet P(pts);
    EmpiricalOptions opts;
    opts.budget = 12;
    const SensitivityProfile emp = sens_empirical(P, Family::KCenters, FamilyParams{1, 0}, z2, opts);
    CHECK(emp.bounds[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(emp.bounds[1] == doctest::Approx(0.5).epsilon(1e-9));
  }

  SUBCASE("adversarial two-line shapes certify the log growth") {
    const int n = 24;
    const LowerBoundInstance inst = lowerbound_instance(n);
    EmpiricalOptions opts;
    opts.budget = 8;
    opts.seed = 9;
    opts.extra_candidates = inst.shapes;
    const DistanceConfig z1(1.0);
    const SensitivityProfile emp = sens_empirical(inst.points, Family::KLines, FamilyParams{2, 1}, z1, opts);
    double floor = 0.0;
    for (int i = 1; i <= n; ++i) floor += 1.0 / (2.0 + i);
    CHECK(emp.total >= floor);
  }

  SUBCASE("duplicates get identical estimates") {
    Eigen::MatrixXd pts(4, 2);
    pts << 0, 0, 5, 1, 5, 1, -3, 2;
    const PointSet P(pts);
    EmpiricalOptions opts;
    opts.budget = 64;
    opts.seed = 21;
    const SensitivityProfile emp = sens_empirical(P, Family::KCenters, FamilyParams{2, 0}, z2, opts);
    CHECK(emp.bounds[1] == doctest::Approx(emp.bounds[2]).epsilon(1e-12));
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(emp.bounds[i] > 0.0);
  }
}

TEST_CASE("lowerbound instance") {
  SUBCASE("n=3 first term is exactly 0.4") {
    const std::vector<double> ratios = lowerbound_ratio_table(3);
    CHECK(ratios[0] == doctest::Approx(0.4).epsilon(1e-15));

    // geometric cross-check from actual coordinates and shapes
    const LowerBoundInstance inst = lowerbound_instance(3);
    const DistanceConfig z1(1.0);
    const double num = dist_point_shape(inst.points.coords.row(0).transpose(), inst.shapes[0], z1);
    const double den = cost(inst.points, inst.shapes[0], z1);
    CHECK(num / den == doctest::Approx(0.4).epsilon(1e-12));
  }

  SUBCASE("geometric evaluation matches the closed form for moderate n") {
    const int n = 24;
    const LowerBoundInstance inst = lowerbound_instance(n);
    const std::vector<double> ratios = lowerbound_ratio_table(n);
    const DistanceConfig z1(1.0);
    for (int i = 0; i < n; ++i) {
      const double num = dist_point_shape(inst.points.coords.row(i).transpose(), inst.shapes[i], z1);
      const double den = cost(inst.points, inst.shapes[i], z1);
      CHECK(num / den == doctest::Approx(ratios[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }
  }

  SUBCASE("every ratio clears the 1/(2+i) floor, up to n=4096") {
    const int n = 4096;
    const std::vector<double> ratios = lowerbound_ratio_table(n);
    for (int i = 1; i <= n; ++i) {
      CHECK(ratios[static_cast<std::size_t>(i - 1)] >= 1.0 / (2.0 + i));
    }
  }

  SUBCASE("doubling n adds about ln 2 to the total") {
    for (int n : {64, 128, 256, 512, 1024, 2048, 4096}) {
      const double diff = lowerbound_total(2 * n) - lowerbound_total(n);
      CHECK(diff >= 0.6);
      CHECK(diff <= 0.8);
    }
  }

  SUBCASE("the total dominates its harmonic floor") {
    const int n = 512;
    double harmonic = 0.0;
    for (int i = 1; i <= n; ++i) harmonic += 1.0 / (2.0 + i);
    CHECK(lowerbound_total(n) >= harmonic);
  }

  SUBCASE("n must be at least 2") {
    CHECK_THROWS_AS(lowerbound_instance(1), InputError);
    CHECK_THROWS_AS(lowerbound_ratio_table(0), InputError);
  }
}

TEST_CASE("exact sensitivity oracle") {
  SUBCASE("coincident pair, one median center: both halves") {
    Eigen::MatrixXd pts(2, 2);
    pts << 1, 1, 1, 1;
    const SensitivityProfile prof =
        exact_sensitivity_oracle(PointSet(pts), Family::KCenters, FamilyParams{1, 0}, DistanceConfig(1.0));
    CHECK(prof.bounds[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(prof.bounds[1] == doctest::Approx(0.5).epsilon(1e-6));
  }

  SUBCASE("two points, two centers: each point is fully sensitive") {
    Eigen::MatrixXd pts(2, 2);
    pts << 0, 0, 1, 0;
    const SensitivityProfile prof =
        exact_sensitivity_oracle(PointSet(pts), Family::KCenters, FamilyParams{2, 0}, DistanceConfig(2.0));
    CHECK(prof.bounds[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(prof.bounds[1] == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("three collinear points, line family: exactly fitting lines contribute zero") {
    Eigen::MatrixXd pts(3, 2);
    pts << 0, 0, 1, 0, 2, 0;
    const PointSet P(pts);
    const DistanceConfig z2(2.0);

    // the degenerate-ratio convention: at the perfectly fitting line both
    // numerator and denominator vanish and the ratio counts as zero
    Eigen::VectorXd a(2), b(2);
    a << 0, 0;
    b << 2, 0;
    const Shape fitting = Shape::klines({Line::through(a, b)});
    CHECK(cost(P, fitting, z2) == 0.0);

    // the sup over all other lines is positive: the vertical line x = 5/3
    // gives the outer points a share of 5/6
    const SensitivityProfile prof = exact_sensitivity_oracle(P, Family::KLines, FamilyParams{1, 1}, z2);
    CHECK(prof.bounds[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-4));
    CHECK(prof.bounds[2] == doctest::Approx(5.0 / 6.0).epsilon(1e-4));
    CHECK(prof.bounds[1] >= 0.30);
    CHECK(prof.bounds[1] <= 1.0 / 3.0 + 1e-6);
  }

  SUBCASE("out-of-envelope requests raise capability errors") {
    auto rng = std::mt19937_64(97);
    const PointSet P(testing::random_points(4, 2, rng));
    CHECK_THROWS_AS(exact_sensitivity_oracle(P, Family::KCenters, FamilyParams{4, 0}, DistanceConfig(2.0)),
                    CapabilityError);
    CHECK_THROWS_AS(exact_sensitivity_oracle(P, Family::KCenters, FamilyParams{2, 0}, DistanceConfig(3.0)),
                    CapabilityError);
    const PointSet big(testing::random_points(13, 2, rng));
    CHECK_THROWS_AS(exact_sensitivity_oracle(big, Family::KCenters, FamilyParams{2, 0}, DistanceConfig(2.0)),
                    CapabilityError);
  }
}

TEST_CASE("closed-form bounds dominate the oracle") {
  auto rng = std::mt19937_64(101);
  int points_checked = 0;
  for (int t = 0; t < 12; ++t) {
    const int n = 5 + static_cast<int>(rng() % 4);
    const PointSet P(testing::random_points(n, 2, rng));

    const int k = 1 + static_cast<int>(rng() % 2);
    const double z = (t % 2 == 0) ? 1.0 : 2.0;
    const DistanceConfig cfg(z);
    const FitResult fit = exact_fit(P, Family::KCenters, FamilyParams{k, 0}, cfg);
    const SensitivityProfile bound = sens_kcenters(P, fit, cfg);
    const SensitivityProfile oracle = exact_sensitivity_oracle(P, Family::KCenters, FamilyParams{k, 0}, cfg);
    for (Eigen::Index i = 0; i < P.size(); ++i) {
      CHECK(bound.bounds[i] >= oracle.bounds[i] - 1e-9);
      ++points_checked;
    }
  }
  CHECK(points_checked > 50);
}

TEST_CASE("sensitivity ratios and closed-form bounds are scale invariant") {
  auto rng = std::mt19937_64(103);
  const int n = 8;
  Eigen::MatrixXd pts = testing::random_points(n, 2, rng);
  for (double lambda : {1e-3, 7.0, 1e4}) {
    for (double z : {1.0, 2.0}) {
      const DistanceConfig cfg(z);
      const PointSet P(pts);
      const PointSet Q(pts * lambda);
      const SensitivityProfile a = sens_kcenters(P, exact_fit(P, Family::KCenters, FamilyParams{2, 0}, cfg), cfg);
      const SensitivityProfile b = sens_kcenters(Q, exact_fit(Q, Family::KCenters, FamilyParams{2, 0}, cfg), cfg);
      for (Eigen::Index i = 0; i < n; ++i) {
        CHECK(a.bounds[i] == doctest::Approx(b.bounds[i]).epsilon(1e-9));
      }
      CHECK(a.unclamped_total == doctest::Approx(b.unclamped_total).epsilon(1e-9));
    }
    // subspace path at z=2: leverage scores do not move under scaling
    const DistanceConfig z2(2.0);
    const PointSet P(pts);
    const PointSet Q(pts * lambda);
    const SensitivityProfile a = sens_subspace(P, fit_jflat(P, 1, z2), z2);
    const SensitivityProfile b = sens_subspace(Q, fit_jflat(Q, 1, z2), z2);
    for (Eigen::Index i = 0; i < n; ++i) {
      CHECK(a.bounds[i] == doctest::Approx(b.bounds[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("profile bounds stay in (0,1] and the total dominates each bound") {
  auto rng = std::mt19937_64(107);
  const PointSet P(testing::random_points(15, 3, rng));
  const DistanceConfig z2(2.0);
  const SensitivityProfile prof = sens_kcenters(P, fit_kcenters(P, 3, z2), z2);
  double max_bound = 0.0;
  for (Eigen::Index i = 0; i < P.size(); ++i) {
    CHECK(prof.bounds[i] > 0.0);
    CHECK(prof.bounds[i] <= 1.0);
    max_bound = std::max(max_bound, prof.bounds[i]);
  }
  CHECK(prof.total >= max_bound);
  CHECK(prof.total >= 1.0 - 1e-12);  // some point always carries a full share
}
