#pragma once

#include <Eigen/Dense>

#include "hcdefect/fem.hpp"
#include "hcdefect/mesh.hpp"

namespace hcd {

// Perforated-cell homogenized tensor with its correctors.
struct HomogenizedTensor {
  Eigen::Matrix2d A = Eigen::Matrix2d::Identity();  // symmetrized
  double q1_volume = 1.0;                           // matrix-phase volume |Q1|
  double asymmetry = 0.0;                           // |A01 - A10| before symmetrization
  double mesh_h = 0.0;
  // Per-direction corrector node fields on the cell mesh, harmonically
  // extended into the inclusion and normalized to zero cell mean.
  std::vector<Eigen::VectorXd> correctors;

  double isotropic_value() const { return 0.5 * (A(0, 0) + A(1, 1)); }
  double anisotropy() const;  // ||A - a I|| max-norm
};

// Solves the soft-inclusion corrector in direction j (0 or 1) on the matrix
// phase of a periodic cell mesh: a1 Lap N = 0 in Q1, conormal data -a1 n_j
// on the inclusion interface, periodic on the cell boundary. The returned
// node field covers the whole mesh (harmonic continuation inside the
// inclusion) and has zero mean over the cell.
Eigen::VectorXd solve_corrector(const SimplicialMesh& cell, double a1, int direction);

// Homogenized tensor from the correctors by one-point quadrature.
HomogenizedTensor homogenized_tensor(const SimplicialMesh& cell, double a1);

// Convenience path for the disk-inclusion cell.
HomogenizedTensor homogenize_disk_cell(double rho, double a1, double h);

}  // namespace hcd
