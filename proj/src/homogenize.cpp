#include "hcdefect/homogenize.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "hcdefect/errors.hpp"

namespace hcd {

namespace {

// Nodes incident to at least one element of the given tag.
std::vector<bool> nodes_of_tag(const SimplicialMesh& mesh, int tag) {
  std::vector<bool> used(mesh.num_vertices(), false);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (mesh.elem_tag[e] != tag) continue;
    auto [a, b, c] = mesh.element(e);
    used[a] = used[b] = used[c] = true;
  }
  return used;
}

}  // namespace

double HomogenizedTensor::anisotropy() const {
  double a = isotropic_value();
  Eigen::Matrix2d D = A - a * Eigen::Matrix2d::Identity();
  return D.cwiseAbs().maxCoeff();
}

Eigen::VectorXd solve_corrector(const SimplicialMesh& cell, double a1, int direction) {
  if (direction < 0 || direction > 1) throw NumericError("solve_corrector: direction must be 0 or 1");
  const int nv = cell.num_vertices();
  auto matrix_node = nodes_of_tag(cell, kTagMatrix);
  auto inclusion_node = nodes_of_tag(cell, kTagInclusion);
  bool has_inclusion = false;
  for (int e = 0; e < cell.num_elements(); ++e)
    if (cell.elem_tag[e] == kTagInclusion) has_inclusion = true;
  DofMap pmap = periodic_identify(cell);
  {
    // Matrix-phase connectivity on the torus via union-find over periodic
    // DOF classes joined by matrix elements.
    std::vector<int> parent(pmap.n_free);
    for (int i = 0; i < pmap.n_free; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    int n_matrix_elems = 0;
    for (int e = 0; e < cell.num_elements(); ++e) {
      if (cell.elem_tag[e] != kTagMatrix) continue;
      ++n_matrix_elems;
      auto [a, b, c] = cell.element(e);
      parent[find(pmap.dof[b])] = find(pmap.dof[a]);
      parent[find(pmap.dof[c])] = find(pmap.dof[a]);
    }
    if (n_matrix_elems == 0) throw NumericError("solve_corrector: empty matrix phase");
    std::set<int> roots;
    for (int v = 0; v < nv; ++v)
      if (matrix_node[v]) roots.insert(find(pmap.dof[v]));
    if (roots.size() != 1)
      throw NumericError("solve_corrector: disconnected matrix phase (" +
                         std::to_string(roots.size()) + " components)");
  }
  std::vector<int> eliminated;
  for (int v = 0; v < nv; ++v)
    if (!matrix_node[v]) eliminated.push_back(v);
  int pin = -1;
  for (int v = 0; v < nv; ++v)
    if (matrix_node[v]) {
      pin = v;
      break;
    }
  eliminated.push_back(pin);
  DofMap map = compose_dirichlet(pmap, eliminated);

  // Stiffness over matrix elements and volume right-hand side
  //   f_i = -a1 int_{Q1} d_j phi_i,
  // equal to the conormal surface data by the divergence theorem.
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(map.n_free);
  for (int e = 0; e < cell.num_elements(); ++e) {
    if (cell.elem_tag[e] != kTagMatrix) continue;
    auto g = element_gradients(cell, e);
    auto [i0, i1, i2] = cell.element(e);
    int nodes[3] = {i0, i1, i2};
    const double* gj = (direction == 0) ? g.gx : g.gy;
    for (int i = 0; i < 3; ++i) {
      int di = map.dof[nodes[i]];
      if (di < 0) continue;
      rhs[di] -= a1 * g.area * gj[i];
      for (int j = 0; j < 3; ++j) {
        int dj = map.dof[nodes[j]];
        if (dj < 0) continue;
        trips.emplace_back(di, dj, a1 * g.area * (g.gx[i] * g.gx[j] + g.gy[i] * g.gy[j]));
      }
    }
  }
  Eigen::SparseMatrix<double> K(map.n_free, map.n_free);
  K.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  ldlt.compute(K);
  if (ldlt.info() != Eigen::Success)
    throw NumericError(
        "solve_corrector: singular matrix-phase system (is the matrix phase connected?)");
  Eigen::VectorXd n_free = ldlt.solve(rhs);
  Eigen::VectorXd N = expand_to_nodes(map, n_free);
  // Pinned node and its periodic copies carry the value 0 already.

  if (has_inclusion) {
    // Harmonic continuation into the inclusion with the interface trace as
    // Dirichlet data.
    std::vector<int> inner_index(nv, -1);
    int n_inner = 0;
    for (int v = 0; v < nv; ++v)
      if (inclusion_node[v] && !matrix_node[v]) inner_index[v] = n_inner++;
    if (n_inner > 0) {
      std::vector<Eigen::Triplet<double>> ti;
      Eigen::VectorXd bi = Eigen::VectorXd::Zero(n_inner);
      for (int e = 0; e < cell.num_elements(); ++e) {
        if (cell.elem_tag[e] != kTagInclusion) continue;
        auto g = element_gradients(cell, e);
        auto [i0, i1, i2] = cell.element(e);
        int nodes[3] = {i0, i1, i2};
        for (int i = 0; i < 3; ++i) {
          int ii = inner_index[nodes[i]];
          if (ii < 0) continue;
          for (int j = 0; j < 3; ++j) {
            double k = g.area * (g.gx[i] * g.gx[j] + g.gy[i] * g.gy[j]);
            int ij = inner_index[nodes[j]];
            if (ij >= 0)
              ti.emplace_back(ii, ij, k);
            else
              bi[ii] -= k * N[nodes[j]];
          }
        }
      }
      Eigen::SparseMatrix<double> Ki(n_inner, n_inner);
      Ki.setFromTriplets(ti.begin(), ti.end());
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> li;
      li.compute(Ki);
      if (li.info() != Eigen::Success)
        throw NumericError("solve_corrector: harmonic continuation failed");
      Eigen::VectorXd ui = li.solve(bi);
      for (int v = 0; v < nv; ++v)
        if (inner_index[v] >= 0) N[v] = ui[inner_index[v]];
    }
  }

  // Normalize the cell mean <N> = 0 (including the continuation).
  double mean = 0.0, vol = 0.0;
  for (int e = 0; e < cell.num_elements(); ++e) {
    auto [a, b, c] = cell.element(e);
    double area = cell.element_area(e);
    mean += area * (N[a] + N[b] + N[c]) / 3.0;
    vol += area;
  }
  N.array() -= mean / vol;
  return N;
}

HomogenizedTensor homogenized_tensor(const SimplicialMesh& cell, double a1) {
  HomogenizedTensor out;
  out.correctors = {solve_corrector(cell, a1, 0), solve_corrector(cell, a1, 1)};

  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  double q1 = 0.0, h2max = 0.0;
  for (int e = 0; e < cell.num_elements(); ++e) {
    if (cell.elem_tag[e] != kTagMatrix) continue;
    auto g = element_gradients(cell, e);
    auto [i0, i1, i2] = cell.element(e);
    int nodes[3] = {i0, i1, i2};
    q1 += g.area;
    h2max = std::max(h2max, g.area);
    for (int j = 0; j < 2; ++j) {
      const Eigen::VectorXd& N = out.correctors[j];
      double dx = 0.0, dy = 0.0;
      for (int i = 0; i < 3; ++i) {
        dx += g.gx[i] * N[nodes[i]];
        dy += g.gy[i] * N[nodes[i]];
      }
      A(0, j) += a1 * g.area * ((j == 0 ? 1.0 : 0.0) + dx);
      A(1, j) += a1 * g.area * ((j == 1 ? 1.0 : 0.0) + dy);
    }
  }
  out.q1_volume = q1;
  out.asymmetry = std::abs(A(0, 1) - A(1, 0));
  out.A = 0.5 * (A + A.transpose());
  out.mesh_h = std::sqrt(2.0 * h2max);
  return out;
}

HomogenizedTensor homogenize_disk_cell(double rho, double a1, double h) {
  auto mesh = cell_mesh(rho, h);
  auto t = homogenized_tensor(mesh, a1);
  t.mesh_h = h;
  return t;
}

}  // namespace hcd
