#pragma once

#include <iosfwd>
#include <vector>

#include "hcdefect/fem.hpp"
#include "hcdefect/mesh.hpp"

namespace hcd {

struct SpectrumEntry {
  double lambda = 0.0;
  double mean = 0.0;  // cell average of the zero-extended, L2-normalized mode
  int multiplicity = 1;
  bool zero_mean = false;
};

// Dirichlet spectrum of -a0 Laplacian on the inclusion, together with the
// mode means entering the effective spectral function.
struct InclusionSpectrum {
  std::vector<SpectrumEntry> entries;  // ascending eigenvalues
  double a0 = 1.0;
  int k_max = 0;
  double mean_tol = 1e-8;
  double domain_volume = 0.0;  // |Q0|, used for the series tail bound
  // true when only the nonzero-mean (radial) branch is listed, as for the
  // analytic ball spectra; FEM spectra list all modes.
  bool nonzero_mean_only = false;

  std::vector<double> poles() const;  // nonzero-mean eigenvalues
  double captured_mass() const;       // sum of mean^2 over all entries

  void write_csv(std::ostream& os) const;
};

// Analytic radial Dirichlet spectrum of a ball of radius rho (n = 2 or 3),
// restricted to the nonzero-mean modes.
InclusionSpectrum ball_spectrum(double rho, double a0, int n, int k_max);

// FEM spectrum on a meshed inclusion: all modes, Dirichlet on every marked
// boundary edge, means by exact P1 quadrature.
InclusionSpectrum fem_spectrum(const SimplicialMesh& q0_mesh, double a0, int k_max,
                               double mean_tol = 1e-8, double eig_tol = 1e-8);

// Eigenpairs behind fem_spectrum, for callers that need the mode fields.
struct FemSpectrumResult {
  InclusionSpectrum spectrum;
  std::vector<EigenPair> pairs;  // free-DOF vectors on the Dirichlet map
  DofMap map;
};
FemSpectrumResult fem_spectrum_full(const SimplicialMesh& q0_mesh, double a0, int k_max,
                                    double mean_tol = 1e-8, double eig_tol = 1e-8);

}  // namespace hcd
