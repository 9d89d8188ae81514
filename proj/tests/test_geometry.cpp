#include "hcdefect/geometry.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "hcdefect/errors.hpp"

using namespace hcd;

namespace {

CellGeometry base_geom() {
  CellGeometry g;
  g.dimension = 2;
  g.inclusion_center = {0.5, 0.5, 0.5};
  g.inclusion_radius = 0.3;
  g.a0 = 1.0;
  g.a1 = 1.0;
  return g;
}

DefectSpec ball_defect(double R, double a2 = 1.0) {
  DefectSpec d;
  d.shape = DefectSpec::Shape::Ball;
  d.radius = R;
  d.a2 = a2;
  return d;
}

}  // namespace

TEST_CASE("classify_point: inclusion center of a far cell is Inclusion") {
  auto g = base_geom();
  auto d = ball_defect(2.0);
  CHECK(classify_point(g, d, 0.25, {10.125, 10.125, 0}) == PhaseLabel::Inclusion);
}

TEST_CASE("classify_point: defect center is Defect") {
  auto g = base_geom();
  auto d = ball_defect(2.0);
  CHECK(classify_point(g, d, 0.25, {0.0, 0.0, 0.0}) == PhaseLabel::Defect);
}

TEST_CASE("classify_point: copy straddling the defect boundary gives BoundaryInclusion") {
  auto g = base_geom();
  auto d = ball_defect(2.0);
  double eps = 0.25;
  // Copy centered at eps*(7.5, 2.5) = (1.875, 0.625); brute-force check that
  // its disk straddles |x| = 2 and that the probe point sits inside the copy
  // but outside the defect.
  double cx = 1.875, cy = 0.625, r = eps * 0.3;
  double cdist = std::hypot(cx, cy);
  REQUIRE(cdist - r < 2.0);
  REQUIRE(cdist + r > 2.0);
  Point x{1.9449, 0.625, 0.0};
  REQUIRE(std::hypot(x[0] - cx, x[1] - cy) < r);
  REQUIRE(std::hypot(x[0], x[1]) > 2.0);
  CHECK(classify_point(g, d, eps, x) == PhaseLabel::BoundaryInclusion);
}

TEST_CASE("coefficient_at: per-phase values") {
  auto g = base_geom();
  auto d = ball_defect(2.0, 3.5);
  BoundaryInclusionPolicy pol;
  double eps = 1.0 / 16.0;

  SUBCASE("inclusion point carries a0 eps^2") {
    Point x{10.125 * 4 * eps, 10.125 * 4 * eps, 0};  // rescaled far inclusion center
    Point center_far{(160 + 0.5) * eps, (160 + 0.5) * eps, 0};
    CHECK(coefficient_at(g, d, pol, eps, center_far) == doctest::Approx(1.0 / 256.0).epsilon(1e-15));
  }
  SUBCASE("matrix point carries a1") {
    Point x{(100 + 0.01) * eps, (100 + 0.01) * eps, 0};  // cell corner region
    CHECK(coefficient_at(g, d, pol, eps, x) == 1.0);
  }
  SUBCASE("defect point carries a2") {
    CHECK(coefficient_at(g, d, pol, eps, {0.1, 0.2, 0}) == 3.5);
  }
  SUBCASE("power-law boundary inclusion: A_hat0=1, theta=1 -> eps") {
    pol.mode = BoundaryInclusionPolicy::Mode::PowerLaw;
    pol.A_hat0 = 1.0;
    pol.theta = 1.0;
    CHECK(pol.value(eps) == doctest::Approx(eps).epsilon(1e-15));
  }
  SUBCASE("order-one policy returns A0") {
    pol.mode = BoundaryInclusionPolicy::Mode::OrderOne;
    pol.A0 = 1.0;
    CHECK(pol.value(eps) == 1.0);
  }
}

TEST_CASE("labels are eps-periodic away from the defect") {
  auto g = base_geom();
  auto d = ball_defect(2.0);
  double eps = 0.125;
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> u(3.0, 6.0);
  for (int i = 0; i < 500; ++i) {
    Point x{u(rng), u(rng), 0};
    Point xt{x[0] + 5 * eps, x[1] - 3 * eps, 0};
    CHECK(classify_point(g, d, eps, x) == classify_point(g, d, eps, xt));
  }
}

TEST_CASE("boundary-inclusion area decreases linearly in eps (Monte-Carlo)") {
  auto g = base_geom();
  auto d = ball_defect(2.0);
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> u(-2.6, 2.6);
  auto estimate = [&](double eps) {
    int hits = 0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
      Point x{u(rng), u(rng), 0};
      if (classify_point(g, d, eps, x) == PhaseLabel::BoundaryInclusion) ++hits;
    }
    return hits * (5.2 * 5.2) / n;
  };
  double a1 = estimate(0.2);
  double a2 = estimate(0.1);
  double a3 = estimate(0.05);
  CHECK(a2 < a1);
  CHECK(a3 < a2);
  // Halving eps should roughly halve the measure.
  CHECK(a1 / a2 == doctest::Approx(2.0).epsilon(0.45));
  CHECK(a2 / a3 == doctest::Approx(2.0).epsilon(0.45));
}

TEST_CASE("geometry validation rejects out-of-cell inclusions and bad constants") {
  auto g = base_geom();
  g.inclusion_radius = 0.55;
  CHECK_THROWS_AS(g.validate(), GeometryError);
  g = base_geom();
  g.a0 = -1.0;
  CHECK_THROWS_AS(g.validate(), GeometryError);
  g = base_geom();
  g.inclusion_center = {0.2, 0.5, 0.5};
  g.inclusion_radius = 0.25;
  CHECK_THROWS_AS(g.validate(), GeometryError);

  DefectSpec d = ball_defect(-1.0);
  CHECK_THROWS_AS(d.validate(2), GeometryError);

  BoundaryInclusionPolicy p;
  p.mode = BoundaryInclusionPolicy::Mode::PowerLaw;
  p.theta = 2.5;
  CHECK_THROWS_AS(p.validate(), GeometryError);
}

TEST_CASE("polygon defects classify points and distances") {
  auto g = base_geom();
  DefectSpec d;
  d.shape = DefectSpec::Shape::Polygon;
  d.a2 = 2.0;
  d.polygon = {{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}};
  d.validate(2);
  CHECK(classify_point(g, d, 0.125, {0.0, 0.0, 0}) == PhaseLabel::Defect);
  CHECK(d.boundary_distance({2.0, 0.0, 0}, 2) == doctest::Approx(1.0));
  CHECK(classify_point(g, d, 0.125, {5.0 + 0.0625, 5.0 + 0.0625, 0}) == PhaseLabel::Inclusion);
}
