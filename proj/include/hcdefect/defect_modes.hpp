#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "hcdefect/beta.hpp"
#include "hcdefect/fem.hpp"
#include "hcdefect/mesh.hpp"

namespace hcd {

// Inputs of the radial matching problem for a ball defect with isotropic
// homogenized exterior.
struct RadialParams {
  int n = 2;            // dimension (2 or 3)
  double a2 = 1.0;      // defect stiffness
  double a_hom = 1.0;   // isotropic homogenized coefficient
  double R = 1.0;       // defect radius
  const BetaEvaluator* beta = nullptr;
};

// One localized mode of the limit problem.
struct LocalizedMode {
  double lambda0 = 0.0;
  double m = 0.0;       // angular order: integer (2D) or half-integer (3D)
  double alpha = 0.0;   // exterior matching constant
  double kappa = 0.0;   // decay rate sqrt(|beta|/a_hom)
  int multiplicity = 1;
  double value_residual = 0.0;  // interface continuity, relative
  double flux_residual = 0.0;   // interface flux balance, relative
  int n = 2;
  double a2 = 1.0, a_hom = 1.0, R = 1.0;
  double beta0 = 0.0;           // beta(lambda0)
  Eigen::VectorXd fem_field;    // node field for FEM modes, empty otherwise
};

// Pieces of the 2x2 interface matching system, exponentially rescaled so
// the decaying exterior factor never underflows: Ks = e^{z2} K_m(z2),
// FKs = e^{z2} (sqrt(|beta| a_hom) K_m'(z2) - a_hom (n-2)/(2R) K_m(z2)).
struct RadialMatchingParts {
  double z1 = 0.0, z2 = 0.0;
  double J = 0.0, FJ = 0.0;
  double Ks = 0.0, FKs = 0.0;
};
RadialMatchingParts radial_matching_parts(double lambda, double m, const RadialParams& p);

// Row-scaled determinant of the matching system; zero iff a nontrivial
// matched mode exists. Throws when beta(lambda) >= 0 (outside a gap).
double radial_dispersion(double lambda, double m, const RadialParams& p);

// Trigonometric specialization for n = 3, m = 1/2:
//   cot(sqrt(lambda/a2) R) + (a_hom - a2)/(sqrt(lambda a2) R)
//     + sqrt(a_hom |beta| / (lambda a2)).
double radial_dispersion_trig(double lambda, const RadialParams& p);

struct RadialModeOptions {
  int scan_points = 400;
  double lambda_tol = 1e-11;  // times max(1, lambda)
};

std::vector<LocalizedMode> find_radial_modes(const RadialParams& p, const Gap& gap,
                                             const std::vector<double>& m_list,
                                             const RadialModeOptions& opts = {});

// ---- general 2D defects: symmetric pencil K - lambda M2 - beta(lambda) M1 --

struct PencilOptions {
  int coarse_points = 48;
  double lambda_tol = 1e-9;  // times max(1, lambda)
  int k_window = 6;
  double eig_tol = 1e-8;
};

// Symmetric forms of the nonlinear pencil P(lambda) = K - lambda M2
// - beta(lambda) M1 on the Dirichlet-reduced space: K carries a2 inside the
// defect and A_hom outside, M2/M1 are the defect/exterior mass pieces.
struct DefectPencil {
  Eigen::SparseMatrix<double> K, M1, M2, M;
  DofMap map;
  Eigen::SparseMatrix<double> matrix(double lambda, double beta_value) const {
    return K - lambda * M2 - beta_value * M1;
  }
};
DefectPencil assemble_defect_pencil(const SimplicialMesh& mesh, const Eigen::Matrix2d& A_hom,
                                    double a2);

// Localized modes on a truncated mesh (defect elements tagged kTagDefect,
// exterior kTagExterior, outer boundary marked kMarkerOuter = Dirichlet).
// Crossings of the pencil through zero are located by LDLT inertia jumps
// bracketed and bisected in lambda.
std::vector<LocalizedMode> general_defect_modes(const SimplicialMesh& mesh,
                                                const Eigen::Matrix2d& A_hom, double a2,
                                                const BetaEvaluator& beta, const Gap& gap,
                                                const PencilOptions& opts = {});

// ---- composite limit eigenfunction --------------------------------------

// Evaluators for the pair (u0, v = u0 V): u0 anywhere in the plane, V on the
// periodicity cell (zero-extended outside the inclusion), for ball
// inclusions via the explicit radial solution of the microscopic problem.
class ModeField {
 public:
  ModeField(const LocalizedMode& mode, double inclusion_rho, double inclusion_a0);

  const LocalizedMode& mode() const { return mode_; }
  // Macroscopic profile (cos(m theta) angular member in 2D).
  double u0(double x, double y) const;
  double u0_radial(double r) const;
  // Microscopic field on the reference cell, zero outside the inclusion;
  // y is measured from the inclusion center.
  double V_local(double yx, double yy) const;
  // v(x, y) = u0(x) V(y), zero for x inside the defect.
  double v(double x, double y, double yx, double yy) const;

 private:
  LocalizedMode mode_;
  double rho_, a0_, k_mic_, w_rho_;
};

ModeField assemble_mode_field(const LocalizedMode& mode, double inclusion_rho,
                              double inclusion_a0);

}  // namespace hcd
