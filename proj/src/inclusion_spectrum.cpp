#include "hcdefect/inclusion_spectrum.hpp"

#include <cmath>
#include <ostream>

#include "hcdefect/errors.hpp"
#include "hcdefect/special.hpp"

namespace hcd {

std::vector<double> InclusionSpectrum::poles() const {
  std::vector<double> p;
  for (const auto& e : entries)
    if (!e.zero_mean) p.push_back(e.lambda);
  return p;
}

double InclusionSpectrum::captured_mass() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.mean * e.mean;
  return s;
}

void InclusionSpectrum::write_csv(std::ostream& os) const {
  os << "index,eigenvalue,mean,multiplicity,zero_mean\n";
  os.precision(17);
  for (size_t i = 0; i < entries.size(); ++i)
    os << i + 1 << "," << entries[i].lambda << "," << entries[i].mean << ","
       << entries[i].multiplicity << "," << (entries[i].zero_mean ? 1 : 0) << "\n";
}

InclusionSpectrum ball_spectrum(double rho, double a0, int n, int k_max) {
  if (!(rho > 0.0 && rho < 0.5))
    throw GeometryError("ball_spectrum: inclusion radius must satisfy 0 < rho < 1/2");
  if (!(a0 > 0.0)) throw GeometryError("ball_spectrum: a0 must be positive");
  if (k_max < 1) throw GeometryError("ball_spectrum: k_max must be >= 1");
  if (n != 2 && n != 3) throw GeometryError("ball_spectrum: dimension must be 2 or 3");

  InclusionSpectrum spec;
  spec.a0 = a0;
  spec.k_max = k_max;
  spec.nonzero_mean_only = true;
  spec.domain_volume = (n == 2) ? M_PI * rho * rho : 4.0 / 3.0 * M_PI * rho * rho * rho;
  spec.entries.reserve(k_max);
  for (int j = 1; j <= k_max; ++j) {
    SpectrumEntry e;
    if (n == 3) {
      double k = j * M_PI / rho;
      e.lambda = a0 * k * k;
      e.mean = 4.0 * std::pow(rho, 1.5) / (j * std::sqrt(2.0 * M_PI));
    } else {
      double z = special::bessel_j0_zero(j);
      e.lambda = a0 * (z / rho) * (z / rho);
      e.mean = 2.0 * std::sqrt(M_PI) * rho / z;
    }
    e.multiplicity = 1;
    e.zero_mean = false;
    spec.entries.push_back(e);
  }
  return spec;
}

FemSpectrumResult fem_spectrum_full(const SimplicialMesh& q0_mesh, double a0, int k_max,
                                    double mean_tol, double eig_tol) {
  FemSpectrumResult out;
  std::vector<int> fixed;
  {
    std::vector<bool> seen(q0_mesh.num_vertices(), false);
    for (int f = 0; f < q0_mesh.num_bfaces(); ++f)
      for (int v : {q0_mesh.bfaces[2 * f], q0_mesh.bfaces[2 * f + 1]})
        if (!seen[v]) {
          seen[v] = true;
          fixed.push_back(v);
        }
  }
  if (fixed.empty()) throw GeometryError("fem_spectrum: mesh has no marked Dirichlet boundary");
  out.map = compose_dirichlet(DofMap::identity(q0_mesh.num_vertices()), fixed);
  auto K = assemble_const(q0_mesh, a0, FormKind::Stiffness, out.map);
  auto M = assemble_const(q0_mesh, 1.0, FormKind::Mass, out.map);
  ShiftInvertOptions opts;
  opts.tol = eig_tol;
  out.pairs = eig_shift_invert(K.A, M.A, 0.0, k_max, opts);

  Eigen::VectorXd ones_load =
      assemble_load(q0_mesh, std::vector<double>(q0_mesh.num_elements(), 1.0), out.map);

  InclusionSpectrum& spec = out.spectrum;
  spec.a0 = a0;
  spec.k_max = k_max;
  spec.mean_tol = mean_tol;
  spec.nonzero_mean_only = false;
  spec.domain_volume = 0.0;
  for (int e = 0; e < q0_mesh.num_elements(); ++e) spec.domain_volume += q0_mesh.element_area(e);

  for (const auto& pair : out.pairs) {
    SpectrumEntry entry;
    entry.lambda = pair.lambda;
    entry.mean = ones_load.dot(pair.vec);
    entry.zero_mean = std::abs(entry.mean) < mean_tol;
    spec.entries.push_back(entry);
  }
  // Cluster detection for degenerate eigenspaces.
  size_t i = 0;
  while (i < spec.entries.size()) {
    size_t j = i + 1;
    while (j < spec.entries.size() &&
           spec.entries[j].lambda - spec.entries[j - 1].lambda <
               1e-6 * std::max(1.0, spec.entries[j].lambda))
      ++j;
    for (size_t k = i; k < j; ++k) spec.entries[k].multiplicity = static_cast<int>(j - i);
    i = j;
  }
  return out;
}

InclusionSpectrum fem_spectrum(const SimplicialMesh& q0_mesh, double a0, int k_max,
                               double mean_tol, double eig_tol) {
  return fem_spectrum_full(q0_mesh, a0, k_max, mean_tol, eig_tol).spectrum;
}

}  // namespace hcd
