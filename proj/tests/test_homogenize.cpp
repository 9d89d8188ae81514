#include "hcdefect/homogenize.hpp"

#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "hcdefect/errors.hpp"

using namespace hcd;

TEST_CASE("no inclusion: correctors vanish and the tensor is a1 |Q1| I") {
  auto mesh = unit_square_grid(8);  // all elements tagged matrix
  auto N0 = solve_corrector(mesh, 1.0, 0);
  CHECK(N0.cwiseAbs().maxCoeff() <= 1e-12);
  auto t = homogenized_tensor(mesh, 1.0);
  CHECK(t.q1_volume == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((t.A - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("corrector right-hand side is compatible (sums to zero)") {
  // The assembled Neumann data integrates n_j over the closed interface, so
  // the sum of the volume-form right-hand side must vanish.
  auto mesh = cell_mesh(0.3, 1.0 / 24);
  double sum = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (mesh.elem_tag[e] != kTagMatrix) continue;
    auto g = element_gradients(mesh, e);
    for (int i = 0; i < 3; ++i) sum += -1.0 * g.area * g.gx[i];
  }
  CHECK(std::abs(sum) <= 1e-12);
}

TEST_CASE("disk-cell corrector has the reflection parities of the data") {
  auto mesh = cell_mesh(0.3, 1.0 / 16);
  auto N1 = solve_corrector(mesh, 1.0, 0);
  // Index vertices by coordinates to find mirror partners.
  std::map<std::pair<double, double>, int> index;
  for (int v = 0; v < mesh.num_vertices(); ++v) index[{mesh.x(v), mesh.y(v)}] = v;
  double scale = N1.cwiseAbs().maxCoeff();
  int checked = 0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    double mx = 0.5 - (mesh.x(v) - 0.5);  // reflect x about the cell center
    auto itx = index.find({mx, mesh.y(v)});
    if (itx != index.end()) {
      CHECK(std::abs(N1[v] + N1[itx->second]) <= 1e-8 * scale);  // odd in y1
      ++checked;
    }
    double my = 0.5 - (mesh.y(v) - 0.5);
    auto ity = index.find({mesh.x(v), my});
    if (ity != index.end()) CHECK(std::abs(N1[v] - N1[ity->second]) <= 1e-8 * scale);  // even in y2
  }
  CHECK(checked > mesh.num_vertices() / 2);
}

TEST_CASE("disk cell: symmetry, isotropy, Voigt bound, variational identity") {
  double rho = 0.3, a1 = 1.0;
  auto mesh = cell_mesh(rho, 1.0 / 32);
  auto t = homogenized_tensor(mesh, a1);

  CHECK(t.asymmetry <= 1e-10);
  CHECK(t.anisotropy() <= 1e-4);
  double ahom = t.isotropic_value();
  CHECK(ahom > 0.0);
  CHECK(ahom < t.q1_volume);
  CHECK(t.q1_volume == doctest::Approx(1.0 - M_PI * rho * rho).epsilon(2e-3));

  // Voigt bound on random directions.
  std::mt19937 rng(42);
  std::normal_distribution<double> g;
  for (int i = 0; i < 32; ++i) {
    Eigen::Vector2d xi{g(rng), g(rng)};
    CHECK(xi.dot(t.A * xi) <= a1 * t.q1_volume * xi.squaredNorm() + 1e-12);
  }

  // eq-of-minimum consistency: energy of the discrete corrector equals the
  // quadrature tensor on the same mesh.
  for (int j = 0; j < 2; ++j) {
    double energy = 0.0;
    const Eigen::VectorXd& N = t.correctors[j];
    for (int e = 0; e < mesh.num_elements(); ++e) {
      if (mesh.elem_tag[e] != kTagMatrix) continue;
      auto ge = element_gradients(mesh, e);
      auto [i0, i1, i2] = mesh.element(e);
      int nodes[3] = {i0, i1, i2};
      double dx = (j == 0 ? 1.0 : 0.0), dy = (j == 1 ? 1.0 : 0.0);
      for (int i = 0; i < 3; ++i) {
        dx += ge.gx[i] * N[nodes[i]];
        dy += ge.gy[i] * N[nodes[i]];
      }
      energy += a1 * ge.area * (dx * dx + dy * dy);
    }
    CHECK(std::abs(energy - t.A(j, j)) <= 1e-10 * std::max(1.0, std::abs(energy)));
  }
}

TEST_CASE("monotonicity in the inclusion radius: larger holes soften the medium") {
  auto t2 = homogenize_disk_cell(0.2, 1.0, 1.0 / 24);
  auto t3 = homogenize_disk_cell(0.3, 1.0, 1.0 / 24);
  CHECK(t2.isotropic_value() > t3.isotropic_value());
}

TEST_CASE("mesh convergence of a_hom at rate about h^2") {
  double a16 = homogenize_disk_cell(0.3, 1.0, 1.0 / 16).isotropic_value();
  double a32 = homogenize_disk_cell(0.3, 1.0, 1.0 / 32).isotropic_value();
  double a64 = homogenize_disk_cell(0.3, 1.0, 1.0 / 64).isotropic_value();
  double slope = std::log2(std::abs(a16 - a32) / std::abs(a32 - a64));
  CHECK(slope >= 1.7);
}

TEST_CASE("disconnected matrix phase is rejected") {
  // Two interior matrix islands separated by inclusion material on the
  // torus: genuinely disconnected even through the periodic faces.
  auto mesh = unit_square_grid(8);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto bc = mesh.barycenter(e);
    bool island_a = std::hypot(bc[0] - 0.25, bc[1] - 0.5) < 0.12;
    bool island_b = std::hypot(bc[0] - 0.75, bc[1] - 0.5) < 0.12;
    mesh.elem_tag[e] = (island_a || island_b) ? kTagMatrix : kTagInclusion;
  }
  CHECK_THROWS_AS(solve_corrector(mesh, 1.0, 0), NumericError);
}
