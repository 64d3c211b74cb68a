#include <doctest.h>

#include <cmath>
#include <random>

#include "senscore/errors.hpp"
#include "senscore/geometry.hpp"
#include "senscore/numerics.hpp"
#include "senscore/shape_sampling.hpp"
#include "test_support.hpp"

using namespace senscore;

namespace {

Eigen::VectorXd v2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

Shape two_line_shape() {
  // y-axis and the horizontal line y = 1/2
  return Shape::klines({Line{v2(0, 0), v2(0, 1)}, Line{v2(0, 0.5), v2(1, 0)}});
}

}  // namespace

TEST_CASE("point-to-shape distances match closed forms") {
  const DistanceConfig z2(2.0);
  const DistanceConfig z1(1.0);

  Eigen::MatrixXd center(1, 2);
  center << 3, 4;
  CHECK(dist_point_shape(v2(0, 0), Shape::kpoints(center), z2) == doctest::Approx(25.0).epsilon(1e-12));

  CHECK(dist_point_shape(v2(1, 0), two_line_shape(), z1) == doctest::Approx(0.5).epsilon(1e-12));

  // containment
  CHECK(dist_point_shape(v2(0, 17.0), two_line_shape(), z1) == 0.0);
  CHECK(dist_point_shape(v2(3, 4), Shape::kpoints(center), z2) == 0.0);
}

TEST_CASE("distance rejects dimension mismatches") {
  Eigen::MatrixXd center(1, 3);
  center << 0, 0, 0;
  CHECK_THROWS_AS(dist_point_shape(v2(0, 0), Shape::kpoints(center), DistanceConfig(2.0)), InputError);
}

TEST_CASE("projection examples") {
  const DistanceConfig z2(2.0);

  SUBCASE("single point onto the x-axis") {
    Eigen::MatrixXd pts(1, 2);
    pts << 1, 1;
    const PointSet P(pts);
    Eigen::MatrixXd basis(1, 2);
    basis << 1, 0;
    const Shape axis = Shape::jflat(JFlat{v2(0, 0), basis});
    const Projection proj = project_set(P, axis, z2);
    CHECK(proj.projected.coords(0, 0) == doctest::Approx(1.0));
    CHECK(proj.projected.coords(0, 1) == doctest::Approx(0.0));
    CHECK(proj.residuals[0] == doctest::Approx(1.0));
  }

  SUBCASE("points already on the shape project to themselves") {
    auto rng = std::mt19937_64(7);
    const Shape F = Shape::klines({Line::through(v2(0, 0), v2(1, 2)), Line::through(v2(5, 0), v2(5, 3))});
    Eigen::MatrixXd pts(6, 2);
    for (int i = 0; i < 6; ++i) pts.row(i) = testing::sample_point_on_shape(F, rng).transpose();
    const PointSet P(pts);
    const Projection proj = project_set(P, F, z2);
    CHECK((proj.projected.coords - P.coords).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(proj.residuals.maxCoeff() < 1e-18);
    CHECK(cost(P, proj) < 1e-18);
  }

  SUBCASE("four points, two centers") {
    Eigen::MatrixXd pts(4, 2);
    pts << 0, 0, 2, 0, 10, 0, 12, 0;
    Eigen::MatrixXd centers(2, 2);
    centers << 1, 0, 11, 0;
    const PointSet P(pts);
    const Projection proj = project_set(P, Shape::kpoints(centers), z2);
    CHECK(proj.assignment[0] == 0);
    CHECK(proj.assignment[1] == 0);
    CHECK(proj.assignment[2] == 1);
    CHECK(proj.assignment[3] == 1);
    for (int i = 0; i < 4; ++i) CHECK(proj.residuals[i] == doctest::Approx(1.0));
    CHECK(cost(P, proj) == doctest::Approx(4.0));
  }
}

TEST_CASE("projection ties break toward the lowest constituent index") {
  Eigen::MatrixXd centers(2, 2);
  centers << -1, 0, 1, 0;
  Eigen::MatrixXd pts(1, 2);
  pts << 0, 0;  // equidistant
  const Projection proj = project_set(PointSet(pts), Shape::kpoints(centers), DistanceConfig(2.0));
  CHECK(proj.assignment[0] == 0);
}

TEST_CASE("cost basics") {
  const DistanceConfig z2(2.0);
  Eigen::MatrixXd pts(4, 2);
  pts << 0, 0, 2, 0, 10, 0, 12, 0;
  Eigen::MatrixXd centers(2, 2);
  centers << 1, 0, 11, 0;
  const Shape F = Shape::kpoints(centers);

  CHECK(cost(PointSet(pts), F, z2) == doctest::Approx(4.0));

  // doubling the weights doubles the cost
  const PointSet doubled(pts, Eigen::VectorXd::Constant(4, 2.0));
  CHECK(cost(doubled, F, z2) == doctest::Approx(8.0));

  // the projection invariant: residual recompute and weighted-sum identity
  const Projection proj = project_set(doubled, F, z2);
  for (int i = 0; i < 4; ++i) {
    const double direct = dist_point_shape(doubled.coords.row(i).transpose(), F, z2);
    CHECK(proj.residuals[i] == doctest::Approx(direct).epsilon(1e-9));
  }
  CHECK(cost(doubled, proj) == doctest::Approx(cost(doubled, F, z2)));
}

TEST_CASE("symmetry and identity of the point distance") {
  auto rng = std::mt19937_64(11);
  const DistanceConfig cfg(2.0);
  for (int t = 0; t < 200; ++t) {
    const Eigen::VectorXd p = testing::random_points(1, 3, rng).row(0).transpose();
    const Eigen::VectorXd q = testing::random_points(1, 3, rng).row(0).transpose();
    const Shape sp = Shape::kpoints(p.transpose());
    const Shape sq = Shape::kpoints(q.transpose());
    CHECK(dist_point_shape(p, sq, cfg) == doctest::Approx(dist_point_shape(q, sp, cfg)).epsilon(1e-12));
  }
  const Eigen::VectorXd p = v2(1.5, -2.5);
  CHECK(dist_point_shape(p, Shape::kpoints(p.transpose()), cfg) == 0.0);
  CHECK(dist_point_shape(p, Shape::kpoints(v2(1.5, -2.499999).transpose()), cfg) > 0.0);
}

TEST_CASE("relaxed triangle inequality with alpha = 2^(z-1)") {
  auto rng = std::mt19937_64(13);
  for (double z : {1.0, 2.0, 3.0}) {
    const DistanceConfig cfg(z);
    const double alpha = cfg.alpha();
    CHECK(alpha == doctest::Approx(std::exp2(z - 1.0)));
    for (int t = 0; t < 10000; ++t) {
      const Eigen::MatrixXd pts = testing::random_points(3, 3, rng);
      const double pq = zpow_from_squared((pts.row(0) - pts.row(1)).squaredNorm(), z);
      const double pr = zpow_from_squared((pts.row(0) - pts.row(2)).squaredNorm(), z);
      const double rq = zpow_from_squared((pts.row(2) - pts.row(1)).squaredNorm(), z);
      CHECK(pq <= alpha * (pr + rq) * (1.0 + 1e-12) + 1e-12);
    }
  }
}

TEST_CASE("alpha is 1 exactly when z = 1, and for experimental z < 1") {
  CHECK(DistanceConfig(1.0).alpha() == 1.0);
  CHECK(DistanceConfig(0.5, true).alpha() == 1.0);
  CHECK_THROWS_AS(DistanceConfig(0.5), InputError);
  CHECK_THROWS_AS(DistanceConfig(0.0, true), InputError);
}

TEST_CASE("projection is optimal among sampled shape points") {
  auto rng = std::mt19937_64(17);
  const FamilyParams kl{2, 1};
  const FamilyParams jf{1, 2};
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const double z = (t % 3 == 0) ? 1.0 : 2.0;
    const DistanceConfig cfg(z);
    Eigen::MatrixXd pts = testing::random_points(1, 3, rng);
    const Eigen::VectorXd p = pts.row(0).transpose();
    BoundingBox box;
    box.lo = Eigen::VectorXd::Constant(3, -5.0);
    box.hi = Eigen::VectorXd::Constant(3, 5.0);
    const Shape F = (t % 2 == 0) ? random_shape(Family::KLines, kl, box, rng)
                                 : random_shape(Family::JFlat, jf, box, rng);
    const double resid = dist_point_shape(p, F, cfg);
    for (int s = 0; s < 100; ++s) {
      const Eigen::VectorXd q = testing::sample_point_on_shape(F, rng);
      const double direct = zpow_from_squared((p - q).squaredNorm(), z);
      CHECK(resid <= direct * (1.0 + 1e-9) + 1e-12);
      ++checked;
    }
  }
  CHECK(checked == 100000);
}

TEST_CASE("cost is invariant under a joint rigid rotation") {
  auto rng = std::mt19937_64(19);
  const DistanceConfig cfg(2.0);
  const Eigen::MatrixXd pts = testing::random_points(40, 3, rng);
  const PointSet P(pts);
  Eigen::VectorXd a(3), b(3);
  a << 0, 1, 2;
  b << 3, -1, 0.5;
  const Shape lines = Shape::klines({Line::through(a, b), Line::through(b, 2 * a)});

  const Eigen::MatrixXd R = testing::random_rotation(3, rng);
  const PointSet PR(pts * R.transpose());
  std::vector<Line> rotated;
  for (const Line& l : std::get<KLineSet>(lines.value).lines) {
    rotated.push_back(Line{R * l.anchor, R * l.direction});
  }
  const Shape linesR = Shape::klines(rotated);
  const double c0 = cost(P, lines, cfg);
  const double c1 = cost(PR, linesR, cfg);
  CHECK(c1 == doctest::Approx(c0).epsilon(1e-9));
}

TEST_CASE("point set validation") {
  Eigen::MatrixXd pts(2, 2);
  pts << 0, 0, 1, 1;
  CHECK_THROWS_AS(PointSet(pts, Eigen::VectorXd::Zero(2)), InputError);
  Eigen::MatrixXd bad = pts;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(PointSet{bad}, InputError);
  CHECK_THROWS_AS(PointSet(Eigen::MatrixXd(0, 2)), InputError);
}

TEST_CASE("shape validation") {
  Eigen::VectorXd a = v2(0, 0);
  Eigen::VectorXd bad_dir = v2(1, 1);  // not unit
  CHECK_THROWS_AS(Shape::klines({Line{a, bad_dir}}), InputError);

  Eigen::MatrixXd skewed(2, 2);
  skewed << 1, 0, 1, 0;  // duplicated rows: not orthonormal
  CHECK_THROWS_AS(Shape::jflat(JFlat{a, skewed}), InputError);

  // j must stay below the ambient dimension: a 2-flat in R^2 is rejected
  Eigen::MatrixXd full(2, 2);
  full << 1, 0, 0, 1;
  CHECK_THROWS_AS(Shape::jflat(JFlat{a, full}), InputError);

  CHECK_THROWS_AS(Shape::klines({}), InputError);
}

TEST_CASE("pairwise summation is deterministic and accurate") {
  std::vector<double> xs(100001, 0.1);
  const double s = pairwise_sum(xs);
  CHECK(s == doctest::Approx(10000.1).epsilon(1e-12));
  CHECK(pairwise_sum(xs) == s);
}
