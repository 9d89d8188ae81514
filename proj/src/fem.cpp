#include "hcdefect/fem.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "hcdefect/errors.hpp"

namespace hcd {

DofMap DofMap::identity(int n_nodes) {
  DofMap m;
  m.n_nodes = n_nodes;
  m.n_free = n_nodes;
  m.dof.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) m.dof[i] = i;
  return m;
}

DofMap periodic_identify(const SimplicialMesh& mesh, double tol) {
  const int nv = mesh.num_vertices();
  // Canonical position of each vertex: faces x=1 / y=1 fold onto x=0 / y=0.
  std::vector<std::array<double, 2>> canon(nv);
  std::vector<bool> slave(nv, false);
  for (int v = 0; v < nv; ++v) {
    double cx = mesh.x(v), cy = mesh.y(v);
    if (std::abs(cx - 1.0) <= tol) {
      cx = 0.0;
      slave[v] = true;
    }
    if (std::abs(cy - 1.0) <= tol) {
      cy = 0.0;
      slave[v] = true;
    }
    if (std::abs(cx) <= tol) cx = 0.0;
    if (std::abs(cy) <= tol) cy = 0.0;
    canon[v] = {cx, cy};
  }
  // Sorted index over master vertices for tolerance-based lookup.
  std::vector<int> order;
  for (int v = 0; v < nv; ++v)
    if (!slave[v]) order.push_back(v);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (canon[a][0] != canon[b][0]) return canon[a][0] < canon[b][0];
    return canon[a][1] < canon[b][1];
  });
  auto find_master = [&](const std::array<double, 2>& p) -> int {
    auto lo = std::lower_bound(order.begin(), order.end(), p[0] - 2.0 * tol,
                               [&](int v, double x) { return canon[v][0] < x; });
    for (auto it = lo; it != order.end() && canon[*it][0] <= p[0] + 2.0 * tol; ++it)
      if (std::abs(canon[*it][1] - p[1]) <= 2.0 * tol) return *it;
    return -1;
  };

  DofMap map;
  map.n_nodes = nv;
  map.dof.assign(nv, -2);
  int next = 0;
  for (int v = 0; v < nv; ++v)
    if (!slave[v]) map.dof[v] = next++;
  map.n_free = next;
  for (int v = 0; v < nv; ++v) {
    if (!slave[v]) continue;
    int m = find_master(canon[v]);
    if (m < 0) {
      std::ostringstream msg;
      msg << "periodic_identify: unmatched periodic vertex at (" << mesh.x(v) << ", " << mesh.y(v)
          << "), expected master near (" << canon[v][0] << ", " << canon[v][1] << ")";
      throw NumericError(msg.str());
    }
    map.dof[v] = map.dof[m];
  }
  return map;
}

DofMap compose_dirichlet(const DofMap& map, const std::vector<int>& fixed_nodes) {
  std::vector<bool> kill(map.n_free, false);
  for (int v : fixed_nodes)
    if (map.dof[v] >= 0) kill[map.dof[v]] = true;
  std::vector<int> renum(map.n_free, -1);
  int next = 0;
  for (int d = 0; d < map.n_free; ++d)
    if (!kill[d]) renum[d] = next++;
  DofMap out;
  out.n_nodes = map.n_nodes;
  out.n_free = next;
  out.dof.resize(map.n_nodes);
  for (int v = 0; v < map.n_nodes; ++v)
    out.dof[v] = map.dof[v] >= 0 ? renum[map.dof[v]] : -1;
  return out;
}

namespace {

struct ElemGeom {
  double area;
  double b[3], c[3];  // gradient components: grad(lambda_i) = (b_i, c_i) / (2 area)
};

ElemGeom elem_geom(const SimplicialMesh& mesh, int e) {
  auto [i0, i1, i2] = mesh.element(e);
  double x0 = mesh.x(i0), y0 = mesh.y(i0);
  double x1 = mesh.x(i1), y1 = mesh.y(i1);
  double x2 = mesh.x(i2), y2 = mesh.y(i2);
  ElemGeom g;
  g.area = 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0));
  g.b[0] = y1 - y2;
  g.b[1] = y2 - y0;
  g.b[2] = y0 - y1;
  g.c[0] = x2 - x1;
  g.c[1] = x0 - x2;
  g.c[2] = x1 - x0;
  return g;
}

}  // namespace

ElementGradients element_gradients(const SimplicialMesh& mesh, int e) {
  ElemGeom g = elem_geom(mesh, e);
  ElementGradients out;
  out.area = g.area;
  for (int i = 0; i < 3; ++i) {
    out.gx[i] = g.b[i] / (2.0 * g.area);
    out.gy[i] = g.c[i] / (2.0 * g.area);
  }
  return out;
}

SymmetricForm assemble(const SimplicialMesh& mesh, const std::vector<double>& coeff, FormKind kind,
                       const DofMap& map) {
  if (static_cast<int>(coeff.size()) != mesh.num_elements())
    throw NumericError("assemble: coefficient vector size mismatch");
  double max_area = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e)
    max_area = std::max(max_area, std::abs(mesh.element_area(e)));

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(9 * mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (!(coeff[e] > 0.0))
      throw NumericError("assemble: nonpositive coefficient on element " + std::to_string(e));
    ElemGeom g = elem_geom(mesh, e);
    if (!(g.area > 1e-14 * max_area))
      throw NumericError("assemble: degenerate element " + std::to_string(e) + " (area " +
                         std::to_string(g.area) + ")");
    auto [i0, i1, i2] = mesh.element(e);
    int nodes[3] = {i0, i1, i2};
    double ke[3][3];
    if (kind == FormKind::Stiffness) {
      double f = coeff[e] / (4.0 * g.area);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ke[i][j] = f * (g.b[i] * g.b[j] + g.c[i] * g.c[j]);
    } else {
      double f = coeff[e] * g.area / 12.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ke[i][j] = (i == j) ? 2.0 * f : f;
    }
    for (int i = 0; i < 3; ++i) {
      int di = map.dof[nodes[i]];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        int dj = map.dof[nodes[j]];
        if (dj < 0) continue;
        trips.emplace_back(di, dj, ke[i][j]);
      }
    }
  }
  SymmetricForm form;
  form.map = map;
  form.A.resize(map.n_free, map.n_free);
  form.A.setFromTriplets(trips.begin(), trips.end());
  form.A.makeCompressed();
  return form;
}

SymmetricForm assemble_const(const SimplicialMesh& mesh, double coeff, FormKind kind,
                             const DofMap& map) {
  return assemble(mesh, std::vector<double>(mesh.num_elements(), coeff), kind, map);
}

Eigen::VectorXd assemble_load(const SimplicialMesh& mesh, const std::vector<double>& density,
                              const DofMap& map) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(map.n_free);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double w = density[e] * mesh.element_area(e) / 3.0;
    auto [i0, i1, i2] = mesh.element(e);
    for (int v : {i0, i1, i2})
      if (map.dof[v] >= 0) f[map.dof[v]] += w;
  }
  return f;
}

Eigen::VectorXd expand_to_nodes(const DofMap& map, const Eigen::VectorXd& free_vec) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(map.n_nodes);
  for (int v = 0; v < map.n_nodes; ++v)
    if (map.dof[v] >= 0) out[v] = free_vec[map.dof[v]];
  return out;
}

void write_coo(std::ostream& os, const Eigen::SparseMatrix<double>& A) {
  os << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  os.precision(17);
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
      os << it.row() << " " << it.col() << " " << it.value() << "\n";
}

std::vector<EigenPair> eig_shift_invert(const Eigen::SparseMatrix<double>& K,
                                        const Eigen::SparseMatrix<double>& M, double sigma, int k,
                                        const ShiftInvertOptions& opts) {
  const int n = static_cast<int>(K.rows());
  if (k < 1) throw NumericError("eig_shift_invert: k must be >= 1");
  k = std::min(k, n);
  const int b = std::min(n, k + opts.block_extra);

  Eigen::SparseMatrix<double> A = K - sigma * M;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.isSymmetric(true);
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw NumericError(
        "eig_shift_invert: factorization breakdown at shift " + std::to_string(sigma) +
        " (shift may coincide with an eigenvalue; perturb sigma)");

  // Backward-error normalization scale.
  double nK = 0.0, nM = 0.0;
  {
    Eigen::VectorXd rowK = Eigen::VectorXd::Zero(n), rowM = Eigen::VectorXd::Zero(n);
    for (int c = 0; c < K.outerSize(); ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(K, c); it; ++it)
        rowK[it.row()] += std::abs(it.value());
    for (int c = 0; c < M.outerSize(); ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(M, c); it; ++it)
        rowM[it.row()] += std::abs(it.value());
    nK = rowK.maxCoeff();
    nM = rowM.maxCoeff();
  }

  std::mt19937 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd X(n, b);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = gauss(rng);

  auto m_orthonormalize = [&](Eigen::MatrixXd& Y) {
    for (int rep = 0; rep < 2; ++rep) {
      for (int j = 0; j < Y.cols(); ++j) {
        Eigen::VectorXd My = M * Y.col(j);
        for (int i = 0; i < j; ++i) {
          double r = Y.col(i).dot(My);
          Y.col(j) -= r * Y.col(i);
          if (std::abs(r) > 1e-14) My = M * Y.col(j);
        }
        double nrm = std::sqrt(Y.col(j).dot(M * Y.col(j)));
        if (nrm < 1e-200) {
          for (int i = 0; i < n; ++i) Y(i, j) = gauss(rng);
          nrm = std::sqrt(Y.col(j).dot(M * Y.col(j)));
        }
        Y.col(j) /= nrm;
      }
    }
  };

  double worst = 1.0;
  std::vector<EigenPair> out;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    // Y = (K - sigma M)^{-1} M X
    Eigen::MatrixXd Y(n, b);
    for (int j = 0; j < b; ++j) Y.col(j) = lu.solve(M * X.col(j));
    m_orthonormalize(Y);

    Eigen::MatrixXd H = Y.transpose() * (K * Y).eval();
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    Eigen::MatrixXd Z = Y * es.eigenvectors();
    Eigen::VectorXd theta = es.eigenvalues();

    std::vector<int> idx(b);
    for (int i = 0; i < b; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int i, int j) {
      return std::abs(theta[i] - sigma) < std::abs(theta[j] - sigma);
    });

    out.clear();
    worst = 0.0;
    bool converged = true;
    for (int i = 0; i < k; ++i) {
      Eigen::VectorXd v = Z.col(idx[i]);
      double lam = theta[idx[i]];
      Eigen::VectorXd Kv = K * v, Mv = M * v;
      double res = (Kv - lam * Mv).norm() / ((nK + std::abs(lam) * nM) * v.norm());
      worst = std::max(worst, res);
      if (res > opts.tol) converged = false;
      out.push_back({lam, v / std::sqrt(v.dot(Mv)), res});
    }
    if (converged) return out;
    X = Z;
  }
  throw NumericError("eig_shift_invert: no convergence after " + std::to_string(opts.max_iter) +
                     " iterations (attained residual " + std::to_string(worst) + ")");
}

Inertia ldlt_inertia(const Eigen::SparseMatrix<double>& A) {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  ldlt.compute(A);
  if (ldlt.info() != Eigen::Success)
    throw NumericError("ldlt_inertia: factorization failed (perturb the evaluation point)");
  Eigen::VectorXd D = ldlt.vectorD();
  double scale = D.cwiseAbs().maxCoeff();
  Inertia in;
  for (int i = 0; i < D.size(); ++i) {
    if (std::abs(D[i]) < 1e-14 * scale)
      ++in.n_zero;
    else if (D[i] < 0.0)
      ++in.n_neg;
    else
      ++in.n_pos;
  }
  return in;
}

}  // namespace hcd
