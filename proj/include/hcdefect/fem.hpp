#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hcdefect/mesh.hpp"

namespace hcd {

// Node -> free-DOF map expressing periodic identification and Dirichlet
// elimination. dof[v] >= 0 indexes a free DOF, dof[v] == -1 marks an
// eliminated node.
struct DofMap {
  int n_nodes = 0;
  int n_free = 0;
  std::vector<int> dof;

  static DofMap identity(int n_nodes);
};

// Identifies opposite-face vertices of a mesh of the unit cell [0,1]^2.
// Vertices on x=1 / y=1 are mapped onto their translates on x=0 / y=0.
// Throws NumericError listing the coordinates of any unmatched vertex.
DofMap periodic_identify(const SimplicialMesh& mesh, double tol = 1e-10);

// Returns a copy of `map` with the given nodes (and everything identified
// with them) eliminated, renumbering the remaining free DOFs.
DofMap compose_dirichlet(const DofMap& map, const std::vector<int>& fixed_nodes);

enum class FormKind { Stiffness, Mass };

// Galerkin matrix of a piecewise-constant-coefficient form on P1 elements.
struct SymmetricForm {
  Eigen::SparseMatrix<double> A;
  DofMap map;
  int n() const { return static_cast<int>(A.rows()); }
};

SymmetricForm assemble(const SimplicialMesh& mesh, const std::vector<double>& coeff, FormKind kind,
                       const DofMap& map);
SymmetricForm assemble_const(const SimplicialMesh& mesh, double coeff, FormKind kind,
                             const DofMap& map);

// Load vector (f, phi_i) with piecewise-constant density f.
Eigen::VectorXd assemble_load(const SimplicialMesh& mesh, const std::vector<double>& density,
                              const DofMap& map);

// Area and constant P1 shape-function gradients of one element.
struct ElementGradients {
  double area = 0.0;
  double gx[3] = {0, 0, 0};
  double gy[3] = {0, 0, 0};
};
ElementGradients element_gradients(const SimplicialMesh& mesh, int e);

// Expands a free-DOF vector to a per-node field (eliminated nodes get 0).
Eigen::VectorXd expand_to_nodes(const DofMap& map, const Eigen::VectorXd& free_vec);

// Coordinate-triplet text export for debugging.
void write_coo(std::ostream& os, const Eigen::SparseMatrix<double>& A);

// ---- generalized symmetric eigensolver ------------------------------------

struct EigenPair {
  double lambda = 0.0;
  Eigen::VectorXd vec;    // unit discrete L2 (M) norm
  // Backward error ||K v - lambda M v|| / ((||K|| + |lambda| ||M||) ||v||).
  double residual = 0.0;
};

struct ShiftInvertOptions {
  double tol = 1e-8;
  int max_iter = 200;
  int block_extra = 8;
  uint32_t seed = 20240817;
};

// The k eigenpairs of K v = lambda M v nearest the shift, ascending by
// |lambda - sigma|, via sparse LU of (K - sigma M) and blocked inverse
// iteration with Rayleigh-Ritz extraction.
std::vector<EigenPair> eig_shift_invert(const Eigen::SparseMatrix<double>& K,
                                        const Eigen::SparseMatrix<double>& M, double sigma, int k,
                                        const ShiftInvertOptions& opts = {});

// Signs of the pivots of an LDL^T factorization of the symmetric matrix A:
// (#negative, #zero-ish, #positive). Used to count pencil eigenvalue
// crossings.
struct Inertia {
  int n_neg = 0, n_zero = 0, n_pos = 0;
};
Inertia ldlt_inertia(const Eigen::SparseMatrix<double>& A);

}  // namespace hcd
