#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "hcdefect/fem.hpp"
#include "hcdefect/inclusion_spectrum.hpp"
#include "hcdefect/mesh.hpp"

namespace hcd {

struct BetaOptions {
  double pole_guard = 1e-6;   // relative guard radius around each pole
  double tail_refuse = 1e-4;  // refuse evaluation when tail bound exceeds this
                              // times max(1, |beta|)
  double gap_tol = 1e-10;     // absolute bisection tolerance for gap endpoints
};

// beta(lambda) = lambda + lambda^2 sum <phi_j>^2 / (lambda_j - lambda) over
// nonzero-mean modes, truncated; tail_bound is the rigorous remainder bound
// from the Bessel-inequality mass.
struct BetaValue {
  double beta = 0.0;
  double tail_bound = 0.0;
};

BetaValue beta_series(const InclusionSpectrum& spectrum, double lambda,
                      const BetaOptions& opts = {});

// Microscopic field: -a0 Lap V = lambda V + lambda on Q0, V = 0 on the
// boundary, plus its cell mean (zero-extension over the unit cell).
struct VSolution {
  Eigen::VectorXd node_values;
  double mean = 0.0;
};
VSolution solve_V(const SimplicialMesh& q0_mesh, double a0, double lambda,
                  const std::vector<double>& guard_poles = {}, double pole_guard = 1e-6);

// beta by direct discrete solve: lambda (1 + <V>).
double beta_direct(const SimplicialMesh& q0_mesh, double a0, double lambda,
                   const std::vector<double>& guard_poles = {}, double pole_guard = 1e-6);

// Radial direct solve for a ball inclusion (1D weighted P1 elements); the
// discrete route used for n = 3 where no 2D mesh applies.
double beta_direct_ball_radial(double rho, double a0, int n, double lambda, int n_elems = 400,
                               double pole_guard = 1e-6);

// Closed form for a ball inclusion in 3D:
//   beta(lambda) = (1 - 4/3 pi rho^3) lambda
//                + 4 pi rho a0 (1 - rho k cot(k rho)),   k = sqrt(lambda/a0).
double beta_explicit_ball(double rho, double a0, double lambda, double pole_guard = 1e-6);

// ---- evaluator facade -------------------------------------------------------

enum class GapEndpointKind { Pole, Zero, Clipped };

struct Gap {
  double lo = 0.0, hi = 0.0;
  GapEndpointKind lo_kind = GapEndpointKind::Pole;
  GapEndpointKind hi_kind = GapEndpointKind::Zero;
};

struct GapTable {
  std::vector<Gap> gaps;
  void write_csv(std::ostream& os) const;
};

class BetaEvaluator {
 public:
  enum class Method { Series, Direct, DirectRadial, ExplicitBall };

  static BetaEvaluator series(InclusionSpectrum spectrum, BetaOptions opts = {});
  // Direct 2D solve on a meshed inclusion; the pole list comes from an
  // internal FEM spectrum with pole_k_max modes.
  static BetaEvaluator direct(SimplicialMesh q0_mesh, double a0, int pole_k_max = 20,
                              BetaOptions opts = {});
  // Direct radial solve for ball inclusions (n = 2 or 3).
  static BetaEvaluator direct_radial(double rho, double a0, int n, int n_elems = 400,
                                     BetaOptions opts = {});
  static BetaEvaluator explicit_ball(double rho, double a0, int k_max_poles = 64,
                                     BetaOptions opts = {});

  BetaValue eval(double lambda) const;
  double operator()(double lambda) const { return eval(lambda).beta; }

  Method method() const { return method_; }
  const char* method_name() const;
  const std::vector<double>& poles() const { return poles_; }
  const BetaOptions& options() const { return opts_; }
  const InclusionSpectrum* spectrum() const { return spectrum_ ? &*spectrum_ : nullptr; }

  // Band gaps {beta < 0} in (0, lambda_max): scan between consecutive poles
  // and bisect the sign change of beta to gap_tol.
  GapTable find_gaps(double lambda_max) const;

 private:
  Method method_ = Method::Series;
  BetaOptions opts_;
  std::vector<double> poles_;
  std::optional<InclusionSpectrum> spectrum_;
  std::shared_ptr<SimplicialMesh> mesh_;
  double a0_ = 1.0, rho_ = 0.0;
  int n_ = 3, n_elems_ = 400;

  void check_poles(double lambda) const;
};

GapTable find_gaps(const BetaEvaluator& evaluator, double lambda_max);

}  // namespace hcd
