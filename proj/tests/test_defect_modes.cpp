#include "hcdefect/defect_modes.hpp"

#include <cmath>

#include "doctest.h"
#include "hcdefect/errors.hpp"
#include "hcdefect/special.hpp"

using namespace hcd;

namespace {

// n = 3 ball cell and a defect tuned so the first gap carries a radial root.
struct Ball3D {
  BetaEvaluator beta = BetaEvaluator::explicit_ball(0.3, 1.0, 200);
  RadialParams params;
  Gap gap;
  Ball3D() {
    params.n = 3;
    params.a2 = 1.0;
    params.a_hom = 0.7;
    params.R = 0.88;
    params.beta = &beta;
    auto table = beta.find_gaps(500.0);
    REQUIRE(!table.gaps.empty());
    gap = table.gaps[0];
  }
};

// 2D disk cell with a soft ball defect; the first gap carries an m = 0 root.
struct Disk2D {
  BetaEvaluator beta = BetaEvaluator::series(ball_spectrum(0.3, 1.0, 2, 200));
  RadialParams params;
  Gap gap;
  Disk2D() {
    params.n = 2;
    params.a2 = 0.5;
    params.a_hom = 0.6;
    params.R = 0.65;
    params.beta = &beta;
    auto table = beta.find_gaps(200.0);
    REQUIRE(!table.gaps.empty());
    gap = table.gaps[0];
  }
};

}  // namespace

TEST_CASE("n=3, m=1/2: matching determinant reduces to the trigonometric condition") {
  Ball3D fx;
  for (double frac : {0.15, 0.35, 0.55, 0.75, 0.9}) {
    double lam = fx.gap.lo + frac * (fx.gap.hi - fx.gap.lo);
    auto parts = radial_matching_parts(lam, 0.5, fx.params);
    double det = parts.J * parts.FKs - parts.Ks * parts.FJ;
    double trig = radial_dispersion_trig(lam, fx.params);
    double factor = -std::sqrt(lam * fx.params.a2) * std::sin(parts.z1) /
                    std::sqrt(parts.z1 * parts.z2);
    CAPTURE(lam);
    CHECK(std::abs(det - factor * trig) <= 1e-10 * std::max({std::abs(det), std::abs(factor * trig), 1.0}));
  }
}

TEST_CASE("radsymm first two terms depend on lambda^(1/2) R only") {
  double a2 = 1.0, a_hom = 0.7;
  auto lhs2 = [&](double lam, double R) {
    double z = std::sqrt(lam / a2) * R;
    return std::cos(z) / std::sin(z) + (a_hom - a2) / (std::sqrt(lam * a2) * R);
  };
  double lam = 113.0, R = 0.88, c = 1.7;
  CHECK(lhs2(lam, R) == doctest::Approx(lhs2(lam * c * c, R / c)).epsilon(1e-12));
}

TEST_CASE("varying R over one cotangent period produces a root of radsymm") {
  Ball3D fx;
  double lam = fx.gap.lo + 0.45 * (fx.gap.hi - fx.gap.lo);
  double period = M_PI / std::sqrt(lam / fx.params.a2);
  RadialParams p = fx.params;
  int sign_changes = 0;
  double prev = 0.0;
  bool have_prev = false;
  for (int i = 0; i <= 200; ++i) {
    p.R = 0.5 + period * i / 200.0;
    double f = radial_dispersion_trig(lam, p);
    if (std::abs(f) > 50.0) {  // skip the cot pole
      have_prev = false;
      continue;
    }
    if (have_prev && prev * f < 0.0) ++sign_changes;
    prev = f;
    have_prev = true;
  }
  CHECK(sign_changes >= 1);
}

TEST_CASE("n=3, m=1/2: determinant root equals the trigonometric root to 1e-9") {
  Ball3D fx;
  auto modes = find_radial_modes(fx.params, fx.gap, {0.5});
  REQUIRE(!modes.empty());
  // Independent bisection on the trigonometric condition.
  double lo = fx.gap.lo * (1 + 1e-8), hi = fx.gap.hi * (1 - 1e-8);
  // Bracket inside the gap around the found root to isolate the same root.
  lo = std::max(lo, modes[0].lambda0 - 0.2);
  hi = std::min(hi, modes[0].lambda0 + 0.2);
  double flo = radial_dispersion_trig(lo, fx.params);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = radial_dispersion_trig(mid, fx.params);
    if (flo * fm <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  double trig_root = 0.5 * (lo + hi);
  CHECK(std::abs(modes[0].lambda0 - trig_root) <= 1e-9 * trig_root);

  // Interface residual invariants hold by construction.
  CHECK(modes[0].value_residual <= 1e-10);
  CHECK(modes[0].flux_residual <= 1e-10);
  CHECK(modes[0].multiplicity == 1);  // "m = 1/2" is the spherically symmetric branch
  CHECK(modes[0].beta0 < 0.0);
}

TEST_CASE("2D radial modes: root in the first gap, residuals, exclusion outside the gap") {
  Disk2D fx;
  auto modes = find_radial_modes(fx.params, fx.gap, {0.0, 1.0, 2.0});
  REQUIRE(!modes.empty());
  for (const auto& mode : modes) {
    CHECK(mode.lambda0 > fx.gap.lo);
    CHECK(mode.lambda0 < fx.gap.hi);
    CHECK(mode.value_residual <= 1e-10);
    CHECK(mode.flux_residual <= 1e-10);
    CHECK(mode.multiplicity == (mode.m == 0.0 ? 1 : 2));
    CHECK(mode.beta0 < 0.0);
  }
  // Extending the scan window beyond the gap must not emit out-of-gap modes.
  Gap wide = fx.gap;
  wide.hi = fx.gap.hi * 1.2;
  auto modes_wide = find_radial_modes(fx.params, wide, {0.0, 1.0, 2.0});
  for (const auto& mode : modes_wide) CHECK(fx.beta(mode.lambda0) < 0.0);
}

TEST_CASE("root count is stable under scan-grid refinement (400 vs 4000)") {
  Disk2D fx;
  RadialModeOptions a, b;
  a.scan_points = 400;
  b.scan_points = 4000;
  auto ma = find_radial_modes(fx.params, fx.gap, {0.0, 1.0}, a);
  auto mb = find_radial_modes(fx.params, fx.gap, {0.0, 1.0}, b);
  CHECK(ma.size() == mb.size());
  Ball3D f3;
  auto m3a = find_radial_modes(f3.params, f3.gap, {0.5}, a);
  auto m3b = find_radial_modes(f3.params, f3.gap, {0.5}, b);
  CHECK(m3a.size() == m3b.size());
}

TEST_CASE("dispersion requires gap membership") {
  Disk2D fx;
  CHECK_THROWS_AS(radial_dispersion(fx.gap.lo * 0.5, 0.0, fx.params), NumericError);
}

TEST_CASE("pencil matrices are symmetric and the mass splits by phase") {
  auto mesh = truncated_disk_mesh(0.65, 1.2, 0.05);
  auto pencil = assemble_defect_pencil(mesh, 0.6 * Eigen::Matrix2d::Identity(), 0.5);
  Eigen::SparseMatrix<double> P = pencil.matrix(70.0, -50.0);
  Eigen::SparseMatrix<double> PT = P.transpose();
  CHECK((P - PT).norm() == 0.0);
  // M1 + M2 equals the full mass of the Dirichlet-reduced mesh.
  double sum = 0.0;
  Eigen::SparseMatrix<double> M = pencil.M;
  for (int k = 0; k < M.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it) sum += it.value();
  CHECK(sum > 0.0);
  CHECK(sum < M_PI * 1.2 * 1.2);
}

TEST_CASE("general_defect_modes reproduces the radial mode on a ball defect (coarse)") {
  Disk2D fx;
  auto radial = find_radial_modes(fx.params, fx.gap, {0.0});
  REQUIRE(!radial.empty());
  double kappa_mid = std::sqrt(-fx.beta(0.5 * (fx.gap.lo + fx.gap.hi)) / fx.params.a_hom);
  double r_max = fx.params.R + 4.5 / kappa_mid;
  auto mesh = truncated_disk_mesh(fx.params.R, r_max, fx.params.R / 25);
  PencilOptions opts;
  opts.coarse_points = 32;
  auto fem = general_defect_modes(mesh, fx.params.a_hom * Eigen::Matrix2d::Identity(),
                                  fx.params.a2, fx.beta, fx.gap, opts);
  REQUIRE(!fem.empty());
  bool matched = false;
  for (const auto& mode : fem)
    if (std::abs(mode.lambda0 - radial[0].lambda0) <= 7e-3 * radial[0].lambda0) matched = true;
  CHECK(matched);
  for (const auto& mode : fem) {
    CHECK(mode.fem_field.size() == mesh.num_vertices());
    CHECK(mode.beta0 < 0.0);
  }
}

TEST_CASE("mode field: decay rate, zero extension, microscopic trace") {
  Disk2D fx;
  auto modes = find_radial_modes(fx.params, fx.gap, {0.0});
  REQUIRE(!modes.empty());
  auto field = assemble_mode_field(modes[0], 0.3, 1.0);
  const auto& mode = modes[0];

  SUBCASE("exterior log-slope equals -kappa within 1%") {
    double r1 = 80.0 / mode.kappa, r2 = 120.0 / mode.kappa;
    int npts = 20;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < npts; ++i) {
      double r = r1 + (r2 - r1) * i / (npts - 1);
      double y = std::log(std::abs(field.u0_radial(r)));
      sx += r;
      sy += y;
      sxx += r * r;
      sxy += r * y;
    }
    double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
    CHECK(std::abs(-slope - mode.kappa) <= 0.01 * mode.kappa);
  }
  SUBCASE("v vanishes over the defect and V vanishes on the inclusion boundary") {
    CHECK(field.v(0.1, 0.0, 0.05, 0.0) == 0.0);
    CHECK(field.V_local(0.3, 0.0) == 0.0);
    CHECK(std::abs(field.V_local(0.3 * (1 - 1e-12), 0.0)) <= 1e-9);
    CHECK(field.V_local(0.1, 0.0) != 0.0);
  }
  SUBCASE("u0 is continuous across the defect boundary") {
    double inner = field.u0_radial(mode.R * (1 - 1e-10));
    double outer = field.u0_radial(mode.R * (1 + 1e-10));
    CHECK(inner == doctest::Approx(outer).epsilon(1e-7));
  }
}
