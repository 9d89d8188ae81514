#include "hcdefect/beta.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hcdefect/errors.hpp"
#include "hcdefect/special.hpp"

namespace hcd {

namespace {

void guard_against_poles(double lambda, const std::vector<double>& poles, double pole_guard) {
  for (double p : poles) {
    if (std::abs(lambda - p) <= pole_guard * p) {
      std::ostringstream msg;
      msg << "beta: lambda = " << lambda << " is within the guard zone of the pole " << p;
      throw PoleProximityError(msg.str(), p);
    }
  }
}

std::vector<int> dirichlet_nodes(const SimplicialMesh& mesh) {
  std::vector<bool> seen(mesh.num_vertices(), false);
  std::vector<int> fixed;
  for (int f = 0; f < mesh.num_bfaces(); ++f)
    for (int v : {mesh.bfaces[2 * f], mesh.bfaces[2 * f + 1]})
      if (!seen[v]) {
        seen[v] = true;
        fixed.push_back(v);
      }
  return fixed;
}

}  // namespace

BetaValue beta_series(const InclusionSpectrum& spectrum, double lambda, const BetaOptions& opts) {
  if (lambda < 0.0) throw NumericError("beta_series: lambda must be >= 0");
  guard_against_poles(lambda, spectrum.poles(), opts.pole_guard);

  double sum = 0.0;
  double lambda_top = spectrum.entries.empty() ? 0.0 : spectrum.entries.back().lambda;
  for (const auto& e : spectrum.entries) {
    if (e.zero_mean) continue;
    sum += e.mean * e.mean / (e.lambda - lambda);
  }
  BetaValue out;
  out.beta = lambda + lambda * lambda * sum;
  if (lambda == 0.0) {
    out.tail_bound = 0.0;
    return out;
  }
  double mass_left = std::max(0.0, spectrum.domain_volume - spectrum.captured_mass());
  if (mass_left <= 1e-14 * std::max(spectrum.domain_volume, 1.0)) {
    out.tail_bound = 0.0;  // complete spectrum, e.g. synthetic inputs
    return out;
  }
  if (lambda >= lambda_top) {
    throw NumericError(
        "beta_series: lambda exceeds the largest computed inclusion eigenvalue; increase k_max");
  }
  out.tail_bound = lambda * lambda * mass_left / (lambda_top - lambda);
  if (out.tail_bound > opts.tail_refuse * std::max(1.0, std::abs(out.beta))) {
    std::ostringstream msg;
    msg << "beta_series: truncation tail bound " << out.tail_bound
        << " exceeds the configured threshold at lambda = " << lambda << "; increase beta.k_max";
    throw NumericError(msg.str());
  }
  return out;
}

VSolution solve_V(const SimplicialMesh& q0_mesh, double a0, double lambda,
                  const std::vector<double>& guard_poles, double pole_guard) {
  guard_against_poles(lambda, guard_poles, pole_guard);
  auto map = compose_dirichlet(DofMap::identity(q0_mesh.num_vertices()), dirichlet_nodes(q0_mesh));
  VSolution sol;
  if (lambda == 0.0) {
    sol.node_values = Eigen::VectorXd::Zero(q0_mesh.num_vertices());
    sol.mean = 0.0;
    return sol;
  }
  auto K = assemble_const(q0_mesh, a0, FormKind::Stiffness, map);
  auto M = assemble_const(q0_mesh, 1.0, FormKind::Mass, map);
  Eigen::VectorXd load =
      assemble_load(q0_mesh, std::vector<double>(q0_mesh.num_elements(), 1.0), map);
  Eigen::SparseMatrix<double> A = K.A - lambda * M.A;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.isSymmetric(true);
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw NumericError("solve_V: system is singular (lambda too close to a Dirichlet eigenvalue)");
  Eigen::VectorXd v = lu.solve(lambda * load);
  sol.mean = load.dot(v);  // |Q| = 1, zero extension outside Q0
  sol.node_values = expand_to_nodes(map, v);
  return sol;
}

double beta_direct(const SimplicialMesh& q0_mesh, double a0, double lambda,
                   const std::vector<double>& guard_poles, double pole_guard) {
  auto sol = solve_V(q0_mesh, a0, lambda, guard_poles, pole_guard);
  return lambda * (1.0 + sol.mean);
}

double beta_direct_ball_radial(double rho, double a0, int n, double lambda, int n_elems,
                               double pole_guard) {
  if (n != 2 && n != 3) throw GeometryError("beta_direct_ball_radial: n must be 2 or 3");
  if (lambda == 0.0) return 0.0;
  {
    // Guard against the radial Dirichlet eigenvalues.
    for (int j = 1; j <= 8; ++j) {
      double z = (n == 3) ? j * M_PI : special::bessel_j0_zero(j);
      double pole = a0 * (z / rho) * (z / rho);
      if (std::abs(lambda - pole) <= pole_guard * pole)
        throw PoleProximityError("beta_direct_ball_radial: lambda inside pole guard", pole);
      if (pole > 4.0 * lambda) break;
    }
  }
  // Weighted quadratic 1D elements on [0, rho]: weight r^{n-1}, Dirichlet
  // at rho. Quadratic shape functions keep the discrete poles accurate
  // enough for cross-method comparisons at coarse radial resolutions.
  const int m = n_elems;
  const double h = rho / m;
  const int n_nodes = 2 * m + 1;
  const int nn = n_nodes - 1;  // the node at r = rho is eliminated
  std::vector<Eigen::Triplet<double>> tk, tm;
  Eigen::VectorXd load = Eigen::VectorXd::Zero(nn);
  // 5-point Gauss-Legendre, exact through degree 9.
  const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                        0.9061798459386640};
  const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                        0.4786286704993665, 0.2369268850561891};
  for (int e = 0; e < m; ++e) {
    double ra = e * h, rb = ra + h;
    double kw[3][3] = {}, mw[3][3] = {}, lw[3] = {};
    for (int g = 0; g < 5; ++g) {
      double t = 0.5 * (1.0 + gx[g]);  // reference coordinate in [0, 1]
      double r = ra + t * h;
      double w = 0.5 * h * gw[g] * std::pow(r, n - 1);
      double phi[3] = {2.0 * (t - 0.5) * (t - 1.0), -4.0 * t * (t - 1.0), 2.0 * t * (t - 0.5)};
      double dphi[3] = {(4.0 * t - 3.0) / h, (4.0 - 8.0 * t) / h, (4.0 * t - 1.0) / h};
      for (int i = 0; i < 3; ++i) {
        lw[i] += w * phi[i];
        for (int j = 0; j < 3; ++j) {
          kw[i][j] += w * dphi[i] * dphi[j];
          mw[i][j] += w * phi[i] * phi[j];
        }
      }
    }
    int idx[3] = {2 * e, 2 * e + 1, 2 * e + 2};
    for (int i = 0; i < 3; ++i) {
      if (idx[i] >= nn) continue;
      load[idx[i]] += lw[i];
      for (int j = 0; j < 3; ++j) {
        if (idx[j] >= nn) continue;
        tk.emplace_back(idx[i], idx[j], a0 * kw[i][j]);
        tm.emplace_back(idx[i], idx[j], mw[i][j]);
      }
    }
  }
  Eigen::SparseMatrix<double> K(nn, nn), M(nn, nn);
  K.setFromTriplets(tk.begin(), tk.end());
  M.setFromTriplets(tm.begin(), tm.end());
  Eigen::SparseMatrix<double> A = K - lambda * M;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw NumericError("beta_direct_ball_radial: singular system near a pole");
  Eigen::VectorXd v = lu.solve(lambda * load);
  double surface = (n == 3) ? 4.0 * M_PI : 2.0 * M_PI;
  double mean = surface * load.dot(v);
  return lambda * (1.0 + mean);
}

double beta_explicit_ball(double rho, double a0, double lambda, double pole_guard) {
  if (!(rho > 0.0)) throw GeometryError("beta_explicit_ball: rho must be positive");
  if (lambda == 0.0) return 0.0;
  if (lambda < 0.0) throw NumericError("beta_explicit_ball: lambda must be >= 0");
  double k = std::sqrt(lambda / a0);
  {
    double jpi = std::round(k * rho / M_PI);
    if (jpi >= 1.0) {
      double pole = a0 * (jpi * M_PI / rho) * (jpi * M_PI / rho);
      if (std::abs(lambda - pole) <= pole_guard * pole)
        throw PoleProximityError("beta_explicit_ball: lambda inside pole guard", pole);
    }
  }
  double x = k * rho;
  double cot = std::cos(x) / std::sin(x);
  return (1.0 - 4.0 / 3.0 * M_PI * rho * rho * rho) * lambda +
         4.0 * M_PI * rho * a0 * (1.0 - rho * k * cot);
}

// ---- evaluator --------------------------------------------------------------

BetaEvaluator BetaEvaluator::series(InclusionSpectrum spectrum, BetaOptions opts) {
  BetaEvaluator ev;
  ev.method_ = Method::Series;
  ev.opts_ = opts;
  ev.poles_ = spectrum.poles();
  ev.spectrum_ = std::move(spectrum);
  return ev;
}

BetaEvaluator BetaEvaluator::direct(SimplicialMesh q0_mesh, double a0, int pole_k_max,
                                    BetaOptions opts) {
  BetaEvaluator ev;
  ev.method_ = Method::Direct;
  ev.opts_ = opts;
  ev.a0_ = a0;
  ev.mesh_ = std::make_shared<SimplicialMesh>(std::move(q0_mesh));
  ev.spectrum_ = fem_spectrum(*ev.mesh_, a0, pole_k_max);
  ev.poles_ = ev.spectrum_->poles();
  return ev;
}

BetaEvaluator BetaEvaluator::direct_radial(double rho, double a0, int n, int n_elems,
                                           BetaOptions opts) {
  BetaEvaluator ev;
  ev.method_ = Method::DirectRadial;
  ev.opts_ = opts;
  ev.a0_ = a0;
  ev.rho_ = rho;
  ev.n_ = n;
  ev.n_elems_ = n_elems;
  ev.spectrum_ = ball_spectrum(rho, a0, n, 64);
  ev.poles_ = ev.spectrum_->poles();
  return ev;
}

BetaEvaluator BetaEvaluator::explicit_ball(double rho, double a0, int k_max_poles,
                                           BetaOptions opts) {
  BetaEvaluator ev;
  ev.method_ = Method::ExplicitBall;
  ev.opts_ = opts;
  ev.a0_ = a0;
  ev.rho_ = rho;
  ev.n_ = 3;
  ev.spectrum_ = ball_spectrum(rho, a0, 3, k_max_poles);
  ev.poles_ = ev.spectrum_->poles();
  return ev;
}

const char* BetaEvaluator::method_name() const {
  switch (method_) {
    case Method::Series: return "series";
    case Method::Direct: return "direct";
    case Method::DirectRadial: return "direct-radial";
    case Method::ExplicitBall: return "explicit-ball";
  }
  return "?";
}

void BetaEvaluator::check_poles(double lambda) const {
  guard_against_poles(lambda, poles_, opts_.pole_guard);
}

BetaValue BetaEvaluator::eval(double lambda) const {
  switch (method_) {
    case Method::Series:
      return beta_series(*spectrum_, lambda, opts_);
    case Method::Direct: {
      check_poles(lambda);
      return {beta_direct(*mesh_, a0_, lambda, {}, opts_.pole_guard), 0.0};
    }
    case Method::DirectRadial: {
      check_poles(lambda);
      return {beta_direct_ball_radial(rho_, a0_, n_, lambda, n_elems_, opts_.pole_guard), 0.0};
    }
    case Method::ExplicitBall:
      return {beta_explicit_ball(rho_, a0_, lambda, opts_.pole_guard), 0.0};
  }
  return {};
}

GapTable BetaEvaluator::find_gaps(double lambda_max) const {
  GapTable table;
  if (poles_.empty()) return table;  // beta = lambda >= 0: no gaps
  if (!(lambda_max > poles_.front()))
    throw NumericError("find_gaps: lambda_max must exceed the first pole");

  for (size_t i = 0; i < poles_.size() && poles_[i] < lambda_max; ++i) {
    double lo = poles_[i];
    bool clipped_interval = (i + 1 >= poles_.size()) || (poles_[i + 1] > lambda_max);
    double hi = clipped_interval ? lambda_max : poles_[i + 1];

    // beta -> -inf just right of a pole; bracket the sign change.
    double guard = std::max(4.0 * opts_.pole_guard * lo, 1e-12 * lo);
    double a = lo + guard;
    double b = hi - (clipped_interval ? 0.0 : std::max(4.0 * opts_.pole_guard * hi, 1e-12 * hi));
    if (a >= b) continue;
    double fa = eval(a).beta;
    if (fa >= 0.0) continue;  // no visible gap on this interval
    double fb = eval(b).beta;

    Gap gap;
    gap.lo = lo;
    gap.lo_kind = GapEndpointKind::Pole;
    if (fb < 0.0) {
      // Negative all the way to the interval end.
      if (!clipped_interval) {
        gap.hi = hi;
        gap.hi_kind = GapEndpointKind::Pole;
      } else {
        gap.hi = lambda_max;
        gap.hi_kind = GapEndpointKind::Clipped;
      }
    } else {
      double x0 = a, x1 = b;
      while (x1 - x0 > opts_.gap_tol) {
        double mid = 0.5 * (x0 + x1);
        double fm = eval(mid).beta;
        if (fm < 0.0)
          x0 = mid;
        else
          x1 = mid;
      }
      gap.hi = 0.5 * (x0 + x1);
      gap.hi_kind = GapEndpointKind::Zero;
    }
    if (eval(0.5 * (gap.lo + gap.hi)).beta < 0.0) table.gaps.push_back(gap);
  }
  return table;
}

GapTable find_gaps(const BetaEvaluator& evaluator, double lambda_max) {
  return evaluator.find_gaps(lambda_max);
}

void GapTable::write_csv(std::ostream& os) const {
  auto kind = [](GapEndpointKind k) {
    switch (k) {
      case GapEndpointKind::Pole: return "pole";
      case GapEndpointKind::Zero: return "zero";
      case GapEndpointKind::Clipped: return "clipped";
    }
    return "?";
  };
  os << "gap_index,lo,hi,lo_kind,hi_kind\n";
  os.precision(17);
  for (size_t i = 0; i < gaps.size(); ++i)
    os << i + 1 << "," << gaps[i].lo << "," << gaps[i].hi << "," << kind(gaps[i].lo_kind) << ","
       << kind(gaps[i].hi_kind) << "\n";
}

}  // namespace hcd
