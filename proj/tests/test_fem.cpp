#include "hcdefect/fem.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "hcdefect/errors.hpp"
#include "hcdefect/mesh.hpp"

using namespace hcd;

namespace {

// 1D Dirichlet Laplacian on [0,1] with n elements, P1: used as a pure
// matrix-level fixture for the eigensolver contract.
void laplace_1d(int n, Eigen::SparseMatrix<double>& K, Eigen::SparseMatrix<double>& M) {
  double h = 1.0 / n;
  int m = n - 1;
  std::vector<Eigen::Triplet<double>> tk, tm;
  for (int i = 0; i < m; ++i) {
    tk.emplace_back(i, i, 2.0 / h);
    tm.emplace_back(i, i, 4.0 * h / 6.0);
    if (i + 1 < m) {
      tk.emplace_back(i, i + 1, -1.0 / h);
      tk.emplace_back(i + 1, i, -1.0 / h);
      tm.emplace_back(i, i + 1, h / 6.0);
      tm.emplace_back(i + 1, i, h / 6.0);
    }
  }
  K.resize(m, m);
  M.resize(m, m);
  K.setFromTriplets(tk.begin(), tk.end());
  M.setFromTriplets(tm.begin(), tm.end());
}

double dirichlet_first_eig_unit_square(int n) {
  auto mesh = unit_square_grid(n);
  auto on_boundary = mesh.select_vertices([](double x, double y) {
    return x < 1e-12 || x > 1 - 1e-12 || y < 1e-12 || y > 1 - 1e-12;
  });
  auto map = compose_dirichlet(DofMap::identity(mesh.num_vertices()), on_boundary);
  auto K = assemble_const(mesh, 1.0, FormKind::Stiffness, map);
  auto M = assemble_const(mesh, 1.0, FormKind::Mass, map);
  auto pairs = eig_shift_invert(K.A, M.A, 1.0, 1);
  return pairs[0].lambda;
}

}  // namespace

TEST_CASE("element stiffness of the unit right triangle") {
  SimplicialMesh m;
  m.coords = {0, 0, 1, 0, 0, 1};
  m.elems = {0, 1, 2};
  m.elem_tag = {0};
  auto form = assemble_const(m, 1.0, FormKind::Stiffness, DofMap::identity(3));
  Eigen::MatrixXd A = Eigen::MatrixXd(form.A);
  Eigen::MatrixXd ref(3, 3);
  ref << 1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5;
  CHECK((A - ref).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("mass entries sum to the mesh volume; stiffness kills constants") {
  auto mesh = disk_mesh(0.0, 0.0, 0.3, 0.3 / 12, kMarkerInclusionInterface);
  mesh.check_conforming();
  auto id = DofMap::identity(mesh.num_vertices());
  auto M = assemble_const(mesh, 1.0, FormKind::Mass, id);
  double mesh_area = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) mesh_area += mesh.element_area(e);
  double mass_sum = 0.0;
  for (int k = 0; k < M.A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(M.A, k); it; ++it) mass_sum += it.value();
  CHECK(mass_sum == doctest::Approx(mesh_area).epsilon(1e-12));
  // Polygonal disk area approaches pi r^2.
  CHECK(mesh_area == doctest::Approx(M_PI * 0.09).epsilon(0.01));

  auto K = assemble_const(mesh, 1.0, FormKind::Stiffness, id);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(K.n());
  CHECK((K.A * ones).cwiseAbs().maxCoeff() <= 1e-12 * K.A.coeffs().cwiseAbs().maxCoeff());
}

TEST_CASE("assembled matrices are bitwise symmetric") {
  auto mesh = cell_mesh(0.3, 0.05);
  auto id = DofMap::identity(mesh.num_vertices());
  std::vector<double> coeff(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e)
    coeff[e] = mesh.elem_tag[e] == kTagInclusion ? 0.25 : 1.75;
  auto K = assemble(mesh, coeff, FormKind::Stiffness, id);
  Eigen::SparseMatrix<double> KT = K.A.transpose();
  CHECK((K.A - KT).norm() == 0.0);
}

TEST_CASE("degenerate element is reported by id") {
  SimplicialMesh m;
  m.coords = {0, 0, 1, 0, 0, 1, 2, 1e-18};
  m.elems = {0, 1, 2, 0, 1, 3};
  m.elem_tag = {0, 0};
  CHECK_THROWS_WITH_AS(assemble_const(m, 1.0, FormKind::Stiffness, DofMap::identity(4)),
                       doctest::Contains("element 1"), NumericError);
}

TEST_CASE("periodic_identify: 4x4 unit grid folds 25 vertices to 16 DOFs") {
  auto mesh = unit_square_grid(4);
  auto map = periodic_identify(mesh);
  CHECK(map.n_nodes == 25);
  CHECK(map.n_free == 16);
}

TEST_CASE("periodic_identify: strip mesh is a torus (Euler characteristic 0)") {
  auto mesh = rect_grid(0, 0, 1, 1, 4, 1);
  auto map = periodic_identify(mesh);
  CHECK(map.n_free == 4);
  // The quotient is a closed torus: boundary mesh edges pair up, so
  // E = E_interior + E_boundary / 2, and V - E + F = 0.
  std::map<std::pair<int, int>, int> edge_count;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto [a, b, c] = mesh.element(e);
    for (auto [u, v] : {std::pair{a, b}, {b, c}, {c, a}}) ++edge_count[std::minmax(u, v)];
  }
  int interior = 0, boundary = 0;
  for (auto& [k, n] : edge_count) (n == 2 ? interior : boundary) += 1;
  int V = map.n_free;
  int E = interior + boundary / 2;
  int F = mesh.num_elements();
  CHECK(boundary % 2 == 0);
  CHECK(V - E + F == 0);
}

TEST_CASE("periodic_identify rejects non-matching faces") {
  auto mesh = unit_square_grid(4);
  // Perturb one vertex on the x=1 face.
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (mesh.x(v) > 1 - 1e-12 && std::abs(mesh.y(v) - 0.5) < 1e-12) mesh.coords[2 * v + 1] += 1e-3;
  CHECK_THROWS_AS(periodic_identify(mesh), NumericError);
}

TEST_CASE("cell_mesh: conforming, periodic-matching, symmetric cell") {
  auto mesh = cell_mesh(0.3, 1.0 / 24);
  mesh.check_conforming();
  auto map = periodic_identify(mesh);
  CHECK(map.n_free < mesh.num_vertices());
  double area = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) area += mesh.element_area(e);
  CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
  // Inclusion region area approaches pi rho^2.
  double inc = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e)
    if (mesh.elem_tag[e] == kTagInclusion) inc += mesh.element_area(e);
  CHECK(inc == doctest::Approx(M_PI * 0.09).epsilon(0.01));
}

TEST_CASE("truncated_disk_mesh: interface ring and stable interior under enlargement") {
  auto m1 = truncated_disk_mesh(0.5, 1.0, 0.05);
  m1.check_conforming();
  auto m2 = truncated_disk_mesh(0.5, 2.0, 0.05);
  CHECK(m1.num_vertices() < m2.num_vertices());
  // Every m1 vertex below the clipped outer band exists bitwise in m2, so
  // enlarging the domain leaves the interior discretization untouched.
  std::set<std::pair<double, double>> verts2;
  for (int v = 0; v < m2.num_vertices(); ++v) verts2.insert({m2.x(v), m2.y(v)});
  for (int v = 0; v < m1.num_vertices(); ++v) {
    if (std::hypot(m1.x(v), m1.y(v)) > 0.9) continue;
    CHECK(verts2.count({m1.x(v), m1.y(v)}) == 1);
  }
}

TEST_CASE("eig_shift_invert: 1D Dirichlet Laplacian near sigma=9 finds pi^2") {
  Eigen::SparseMatrix<double> K, M;
  laplace_1d(512, K, M);
  auto pairs = eig_shift_invert(K, M, 9.0, 3);
  CHECK(pairs[0].lambda == doctest::Approx(M_PI * M_PI).epsilon(1e-3));
  // Ascending by distance from sigma.
  CHECK(std::abs(pairs[0].lambda - 9.0) <= std::abs(pairs[1].lambda - 9.0));
  CHECK(std::abs(pairs[1].lambda - 9.0) <= std::abs(pairs[2].lambda - 9.0));
  // M-orthogonality of returned eigenvectors.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < i; ++j)
      CHECK(std::abs(pairs[i].vec.dot(M * pairs[j].vec)) <= 1e-6);
  for (auto& p : pairs) CHECK(p.residual <= 1e-8);
}

TEST_CASE("eig_shift_invert: diagonal pencil picks the eigenvalue nearest sigma") {
  Eigen::SparseMatrix<double> K(3, 3), M(3, 3);
  std::vector<Eigen::Triplet<double>> tk, tm;
  for (int i = 0; i < 3; ++i) {
    tk.emplace_back(i, i, i + 1.0);
    tm.emplace_back(i, i, 1.0);
  }
  K.setFromTriplets(tk.begin(), tk.end());
  M.setFromTriplets(tm.begin(), tm.end());
  auto pairs = eig_shift_invert(K, M, 2.1, 1);
  CHECK(pairs[0].lambda == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("eig_shift_invert: sigma below the spectrum returns smallest eigenvalues in order") {
  Eigen::SparseMatrix<double> K, M;
  laplace_1d(128, K, M);
  auto pairs = eig_shift_invert(K, M, -5.0, 3);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].lambda == doctest::Approx(M_PI * M_PI).epsilon(1e-2));
  CHECK(pairs[1].lambda == doctest::Approx(4 * M_PI * M_PI).epsilon(1e-2));
  CHECK(pairs[2].lambda == doctest::Approx(9 * M_PI * M_PI).epsilon(1e-2));
  CHECK(pairs[0].lambda < pairs[1].lambda);
  CHECK(pairs[1].lambda < pairs[2].lambda);
}

TEST_CASE("Galerkin convergence: first Dirichlet eigenvalue of the unit square at rate h^2") {
  double ref = 2.0 * M_PI * M_PI;
  double e8 = dirichlet_first_eig_unit_square(8) - ref;
  double e16 = dirichlet_first_eig_unit_square(16) - ref;
  double e32 = dirichlet_first_eig_unit_square(32) - ref;
  CHECK(e8 > 0.0);  // P1 eigenvalues approach from above
  double slope1 = std::log2(e8 / e16);
  double slope2 = std::log2(e16 / e32);
  CHECK(slope1 >= 1.7);
  CHECK(slope2 >= 1.7);
}

TEST_CASE("mesh ASCII round-trip is exact") {
  auto mesh = cell_mesh(0.25, 0.1);
  std::stringstream ss;
  write_mesh(ss, mesh);
  auto back = read_mesh(ss);
  REQUIRE(back.num_vertices() == mesh.num_vertices());
  REQUIRE(back.num_elements() == mesh.num_elements());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    CHECK(back.x(v) == mesh.x(v));
    CHECK(back.y(v) == mesh.y(v));
  }
  CHECK(back.elems == mesh.elems);
  CHECK(back.elem_tag == mesh.elem_tag);
  CHECK(back.bface_marker == mesh.bface_marker);
}

TEST_CASE("COO export emits every stored entry") {
  Eigen::SparseMatrix<double> A(2, 2);
  A.insert(0, 0) = 1.5;
  A.insert(1, 0) = -2.0;
  A.makeCompressed();
  std::stringstream ss;
  write_coo(ss, A);
  int r, c, n;
  ss >> r >> c >> n;
  CHECK(r == 2);
  CHECK(n == 2);
}

TEST_CASE("cut_by_circles: fitted circle inside a grid keeps conformity") {
  auto mesh = rect_grid(-1, -1, 1, 1, 20, 20);
  std::vector<CutCircle> circles{{0.0, 0.0, 0.62, kMarkerDefectInterface}};
  cut_by_circles(mesh, circles, [](double, double, std::vector<int>& out) { out.push_back(0); });
  mesh.check_conforming();
  // Interface vertices lie exactly on the circle.
  int on_circle = 0;
  for (int f = 0; f < mesh.num_bfaces(); ++f)
    if (mesh.bface_marker[f] == kMarkerDefectInterface)
      for (int v : {mesh.bfaces[2 * f], mesh.bfaces[2 * f + 1]}) {
        double r = std::hypot(mesh.x(v), mesh.y(v));
        CHECK(std::abs(r - 0.62) <= 1e-7);
        ++on_circle;
      }
  CHECK(on_circle > 40);
  // Area split matches the disk area to the polygonal error.
  double inside = 0.0, total = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double a = mesh.element_area(e);
    total += a;
    auto bc = mesh.barycenter(e);
    if (std::hypot(bc[0], bc[1]) < 0.62) inside += a;
  }
  CHECK(total == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(inside == doctest::Approx(M_PI * 0.62 * 0.62).epsilon(0.01));
}
