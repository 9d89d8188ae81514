#include "hcdefect/defect_modes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hcdefect/errors.hpp"
#include "hcdefect/special.hpp"

namespace hcd {

namespace {

void check_angular_order(double m, int n) {
  double twice = 2.0 * m;
  if (std::abs(twice - std::round(twice)) > 1e-12 || m < 0.0)
    throw NumericError("radial modes: angular order must be a non-negative multiple of 1/2");
  bool integer = std::abs(m - std::round(m)) < 1e-12;
  if (n == 2 && !integer)
    throw NumericError("radial modes: integer angular order required for n = 2");
  if (n == 3 && integer)
    throw NumericError("radial modes: half-integer angular order required for n = 3");
}

int angular_multiplicity(double m, int n) {
  if (n == 2) return m == 0.0 ? 1 : 2;
  return static_cast<int>(std::lround(2.0 * m));  // 2l + 1 with m = l + 1/2
}

}  // namespace

RadialMatchingParts radial_matching_parts(double lambda, double m, const RadialParams& p) {
  if (!p.beta) throw NumericError("radial modes: missing beta evaluator");
  double beta = p.beta->eval(lambda).beta;
  if (beta >= 0.0) {
    std::ostringstream msg;
    msg << "radial modes: beta(" << lambda << ") = " << beta << " >= 0, not inside a gap";
    throw NumericError(msg.str());
  }
  RadialMatchingParts parts;
  double s = 0.5 * (p.n - 2);
  double kin = std::sqrt(lambda / p.a2);
  double kappa = std::sqrt(-beta / p.a_hom);
  parts.z1 = kin * p.R;
  parts.z2 = kappa * p.R;
  parts.J = special::bessel_j(m, parts.z1);
  parts.FJ = std::sqrt(lambda * p.a2) * special::bessel_j_prime(m, parts.z1) -
             p.a2 * s / p.R * parts.J;
  parts.Ks = special::bessel_k_scaled(m, parts.z2);
  double Kps = (m / parts.z2) * parts.Ks - special::bessel_k_scaled(m + 1.0, parts.z2);
  parts.FKs = std::sqrt(-beta * p.a_hom) * Kps - p.a_hom * s / p.R * parts.Ks;
  return parts;
}

double radial_dispersion(double lambda, double m, const RadialParams& p) {
  check_angular_order(m, p.n);
  auto parts = radial_matching_parts(lambda, m, p);
  // Rows scaled by their largest coefficient so J- and K-side magnitudes
  // cannot underflow the determinant.
  double r1 = std::max(std::abs(parts.J), std::abs(parts.Ks));
  double r2 = std::max(std::abs(parts.FJ), std::abs(parts.FKs));
  if (r1 == 0.0 || r2 == 0.0) throw NumericError("radial_dispersion: degenerate matching rows");
  return (parts.J * parts.FKs - parts.Ks * parts.FJ) / (r1 * r2);
}

double radial_dispersion_trig(double lambda, const RadialParams& p) {
  if (p.n != 3) throw NumericError("radial_dispersion_trig: defined for n = 3");
  double beta = p.beta->eval(lambda).beta;
  if (beta >= 0.0) throw NumericError("radial_dispersion_trig: beta >= 0, not inside a gap");
  double z1 = std::sqrt(lambda / p.a2) * p.R;
  return std::cos(z1) / std::sin(z1) + (p.a_hom - p.a2) / (std::sqrt(lambda * p.a2) * p.R) +
         std::sqrt(p.a_hom * (-beta) / (lambda * p.a2));
}

namespace {

LocalizedMode make_radial_mode(double lambda, double m, const RadialParams& p) {
  auto parts = radial_matching_parts(lambda, m, p);
  LocalizedMode mode;
  mode.lambda0 = lambda;
  mode.m = m;
  mode.n = p.n;
  mode.a2 = p.a2;
  mode.a_hom = p.a_hom;
  mode.R = p.R;
  mode.beta0 = p.beta->eval(lambda).beta;
  mode.kappa = std::sqrt(-mode.beta0 / p.a_hom);
  mode.alpha = parts.J * std::exp(parts.z2) / parts.Ks;
  mode.multiplicity = angular_multiplicity(m, p.n);
  double K_true = parts.Ks * std::exp(-parts.z2);
  double FK_true = parts.FKs * std::exp(-parts.z2);
  mode.value_residual = std::abs(parts.J - mode.alpha * K_true) /
                        std::max(std::abs(parts.J), std::abs(mode.alpha * K_true));
  mode.flux_residual = std::abs(parts.FJ - mode.alpha * FK_true) /
                       std::max(std::abs(parts.FJ), std::abs(mode.alpha * FK_true));
  return mode;
}

}  // namespace

std::vector<LocalizedMode> find_radial_modes(const RadialParams& p, const Gap& gap,
                                             const std::vector<double>& m_list,
                                             const RadialModeOptions& opts) {
  std::vector<LocalizedMode> modes;
  double guard = std::max(4.0 * p.beta->options().pole_guard * gap.lo, 1e-10 * gap.lo);
  double lo = gap.lo + guard;
  double hi = gap.hi - std::max(1e-12 * gap.hi, 1e-13);
  if (!(hi > lo)) return modes;

  for (double m : m_list) {
    check_angular_order(m, p.n);
    auto disp = [&](double lam) { return radial_dispersion(lam, m, p); };
    int npts = std::max(8, opts.scan_points);
    double prev_x = lo, prev_f = 0.0;
    bool have_prev = false;
    for (int i = 0; i <= npts; ++i) {
      double x = lo + (hi - lo) * i / npts;
      double beta = p.beta->eval(x).beta;
      if (beta >= 0.0) {
        have_prev = false;  // outside the gap: never emit here
        continue;
      }
      double f = disp(x);
      if (have_prev && prev_f * f < 0.0) {
        double a = prev_x, b = x, fa = prev_f;
        // Bisect essentially to machine precision (the configured tolerance
        // is an upper bound) so the interface residuals come out clean.
        double width_tol = std::min(opts.lambda_tol, 4e-16);
        for (int it = 0; it < 200; ++it) {
          double mid = 0.5 * (a + b);
          if (b - a <= width_tol * std::max(1.0, mid)) break;
          double fm = disp(mid);
          if (fa * fm <= 0.0) {
            b = mid;
          } else {
            a = mid;
            fa = fm;
          }
        }
        modes.push_back(make_radial_mode(0.5 * (a + b), m, p));
      }
      prev_x = x;
      prev_f = f;
      have_prev = true;
    }
  }
  std::sort(modes.begin(), modes.end(),
            [](const LocalizedMode& a, const LocalizedMode& b) { return a.lambda0 < b.lambda0; });
  return modes;
}

// ---- general defects: pencil with inertia-counting ------------------------

DefectPencil assemble_defect_pencil(const SimplicialMesh& mesh, const Eigen::Matrix2d& A_hom,
                                    double a2) {
  DefectPencil out;
  std::vector<int> fixed;
  {
    std::vector<bool> seen(mesh.num_vertices(), false);
    for (int f = 0; f < mesh.num_bfaces(); ++f) {
      if (mesh.bface_marker[f] != kMarkerOuter) continue;
      for (int v : {mesh.bfaces[2 * f], mesh.bfaces[2 * f + 1]})
        if (!seen[v]) {
          seen[v] = true;
          fixed.push_back(v);
        }
    }
  }
  if (fixed.empty())
    throw NumericError("general_defect_modes: mesh has no outer Dirichlet boundary");
  out.map = compose_dirichlet(DofMap::identity(mesh.num_vertices()), fixed);

  std::vector<Eigen::Triplet<double>> tk, tm1, tm2;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    bool defect = mesh.elem_tag[e] == kTagDefect;
    auto g = element_gradients(mesh, e);
    auto [i0, i1, i2] = mesh.element(e);
    int nodes[3] = {i0, i1, i2};
    for (int i = 0; i < 3; ++i) {
      int di = out.map.dof[nodes[i]];
      if (di < 0) continue;
      for (int j = i; j < 3; ++j) {
        int dj = out.map.dof[nodes[j]];
        if (dj < 0) continue;
        double kij;
        if (defect) {
          kij = a2 * g.area * (g.gx[i] * g.gx[j] + g.gy[i] * g.gy[j]);
        } else {
          // One evaluation per unordered pair keeps the matrix bitwise
          // symmetric under the anisotropic coefficient.
          kij = g.area * (A_hom(0, 0) * g.gx[i] * g.gx[j] + A_hom(1, 1) * g.gy[i] * g.gy[j] +
                          A_hom(0, 1) * (g.gx[i] * g.gy[j] + g.gy[i] * g.gx[j]));
        }
        double mij = g.area / 12.0 * ((i == j) ? 2.0 : 1.0);
        tk.emplace_back(di, dj, kij);
        (defect ? tm2 : tm1).emplace_back(di, dj, mij);
        if (di != dj) {
          tk.emplace_back(dj, di, kij);
          (defect ? tm2 : tm1).emplace_back(dj, di, mij);
        }
      }
    }
  }
  int n = out.map.n_free;
  out.K.resize(n, n);
  out.M1.resize(n, n);
  out.M2.resize(n, n);
  out.K.setFromTriplets(tk.begin(), tk.end());
  out.M1.setFromTriplets(tm1.begin(), tm1.end());
  out.M2.setFromTriplets(tm2.begin(), tm2.end());
  out.M = out.M1 + out.M2;
  return out;
}

namespace {

// Negative-eigenvalue count of P(lambda), with deterministic retry when the
// unpivoted factorization hits a zero pivot.
int pencil_negatives(const DefectPencil& pa, const BetaEvaluator& beta, double lambda) {
  for (int attempt = 0; attempt < 4; ++attempt) {
    double lam = lambda * (1.0 + attempt * 3e-13);
    double b = beta.eval(lam).beta;
    Eigen::SparseMatrix<double> P = pa.matrix(lam, b);
    try {
      return ldlt_inertia(P).n_neg;
    } catch (const NumericError&) {
      continue;
    }
  }
  throw NumericError("general_defect_modes: inertia factorization kept failing near lambda = " +
                     std::to_string(lambda));
}

// Angular order of a FEM mode from its trace on a ring of nodes.
double estimate_angular_order(const SimplicialMesh& mesh, const Eigen::VectorXd& field,
                              double ring_r, double band) {
  const int m_max = 8;
  std::vector<double> cs(m_max + 1, 0.0), sn(m_max + 1, 0.0);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    double r = std::hypot(mesh.x(v), mesh.y(v));
    if (std::abs(r - ring_r) > band) continue;
    double th = std::atan2(mesh.y(v), mesh.x(v));
    for (int m = 0; m <= m_max; ++m) {
      cs[m] += field[v] * std::cos(m * th);
      sn[m] += field[v] * std::sin(m * th);
    }
  }
  int best = 0;
  double best_amp = -1.0;
  for (int m = 0; m <= m_max; ++m) {
    double amp = std::hypot(cs[m], sn[m]);
    if (amp > best_amp) {
      best_amp = amp;
      best = m;
    }
  }
  return best;
}

}  // namespace

std::vector<LocalizedMode> general_defect_modes(const SimplicialMesh& mesh,
                                                const Eigen::Matrix2d& A_hom, double a2,
                                                const BetaEvaluator& beta, const Gap& gap,
                                                const PencilOptions& opts) {
  auto pa = assemble_defect_pencil(mesh, A_hom, a2);

  double guard = std::max(4.0 * beta.options().pole_guard * gap.lo, 1e-10 * gap.lo);
  double lo = gap.lo + guard;
  double hi = gap.hi - std::max(1e-10 * gap.hi, 1e-13);
  if (!(hi > lo)) return {};

  // Coarse inertia scan, then recursive bisection of every count jump.
  std::vector<std::pair<double, int>> roots;  // lambda, multiplicity
  std::function<void(double, double, int, int)> locate = [&](double a, double b, int ca, int cb) {
    if (cb == ca) return;
    if (b - a <= opts.lambda_tol * std::max(1.0, b)) {
      roots.push_back({0.5 * (a + b), cb - ca});
      return;
    }
    double mid = 0.5 * (a + b);
    int cm = pencil_negatives(pa, beta, mid);
    locate(a, mid, ca, cm);
    locate(mid, b, cm, cb);
  };

  int npts = std::max(4, opts.coarse_points);
  double prev_x = lo;
  int prev_c = pencil_negatives(pa, beta, lo);
  for (int i = 1; i <= npts; ++i) {
    double x = lo + (hi - lo) * i / npts;
    int c = pencil_negatives(pa, beta, x);
    if (c != prev_c) locate(prev_x, x, prev_c, c);
    prev_x = x;
    prev_c = c;
  }

  std::vector<LocalizedMode> modes;
  for (auto [lam, mult] : roots) {
    if (mult <= 0) continue;  // count decreased: not a crossing of the sought sign
    double b = beta.eval(lam).beta;
    Eigen::SparseMatrix<double> P = pa.matrix(lam, b);
    ShiftInvertOptions sopts;
    sopts.tol = opts.eig_tol;
    // The pencil is nearly singular at a located root; fall back to a tiny
    // shift when the exact-zero factorization breaks down.
    std::vector<EigenPair> pairs;
    try {
      pairs = eig_shift_invert(P, pa.M, 0.0, std::min(opts.k_window, pa.map.n_free), sopts);
    } catch (const NumericError&) {
      double shift = 1e-7 * std::max(1.0, lam);
      pairs = eig_shift_invert(P, pa.M, shift, std::min(opts.k_window, pa.map.n_free), sopts);
    }
    for (int i = 0; i < mult && i < static_cast<int>(pairs.size()); ++i) {
      LocalizedMode mode;
      mode.lambda0 = lam;
      mode.n = 2;
      mode.a2 = a2;
      mode.a_hom = 0.5 * (A_hom(0, 0) + A_hom(1, 1));
      mode.beta0 = b;
      mode.kappa = std::sqrt(std::max(-b, 0.0) / std::max(mode.a_hom, 1e-300));
      mode.multiplicity = mult;
      mode.fem_field = expand_to_nodes(pa.map, pairs[i].vec);
      double ring = 0.0;
      for (int e = 0; e < mesh.num_elements(); ++e)
        if (mesh.elem_tag[e] == kTagDefect)
          ring = std::max(ring, std::hypot(mesh.barycenter(e)[0], mesh.barycenter(e)[1]));
      mode.R = ring;
      mode.m = estimate_angular_order(mesh, mode.fem_field, 0.5 * ring, 0.05 * ring);
      // Weak-form flux balance across the interface is what the pencil
      // residual measures; store the solver residual.
      mode.flux_residual = pairs[i].residual;
      mode.value_residual = std::abs(pairs[i].lambda);
      modes.push_back(std::move(mode));
    }
  }
  std::sort(modes.begin(), modes.end(),
            [](const LocalizedMode& a, const LocalizedMode& b) { return a.lambda0 < b.lambda0; });
  return modes;
}

// ---- composite field -------------------------------------------------------

ModeField::ModeField(const LocalizedMode& mode, double inclusion_rho, double inclusion_a0)
    : mode_(mode), rho_(inclusion_rho), a0_(inclusion_a0) {
  k_mic_ = std::sqrt(mode.lambda0 / a0_);
  if (mode.n == 2) {
    w_rho_ = special::bessel_j(0.0, k_mic_ * rho_);
  } else {
    w_rho_ = std::sin(k_mic_ * rho_) / (k_mic_ * rho_);
  }
  if (std::abs(w_rho_) < 1e-14)
    throw NumericError("ModeField: lambda0 coincides with an inclusion eigenvalue");
}

double ModeField::u0_radial(double r) const {
  double s = 0.5 * (mode_.n - 2);
  double kin = std::sqrt(mode_.lambda0 / mode_.a2);
  if (r < 1e-12) {
    if (mode_.n == 2) return mode_.m == 0.0 ? 1.0 : 0.0;
    // limit of r^{-1/2} J_m(k r): finite only for m = 1/2
    return mode_.m == 0.5 ? std::sqrt(2.0 * kin / M_PI) : 0.0;
  }
  double pref = (s == 0.0) ? 1.0 : std::pow(r, -s);
  if (r <= mode_.R) return pref * special::bessel_j(mode_.m, kin * r);
  double z = mode_.kappa * r;
  return mode_.alpha * pref * special::bessel_k_scaled(mode_.m, z) * std::exp(-z);
}

double ModeField::u0(double x, double y) const {
  double r = std::hypot(x, y);
  double angular = 1.0;
  if (mode_.n == 2 && mode_.m > 0.0) angular = std::cos(mode_.m * std::atan2(y, x));
  return u0_radial(r) * angular;
}

double ModeField::V_local(double yx, double yy) const {
  double r = std::hypot(yx, yy);
  if (r >= rho_) return 0.0;
  double w;
  if (mode_.n == 2) {
    w = special::bessel_j(0.0, k_mic_ * r);
  } else {
    double z = k_mic_ * r;
    w = (z < 1e-8) ? 1.0 : std::sin(z) / z;
  }
  return -1.0 + w / w_rho_;
}

double ModeField::v(double x, double y, double yx, double yy) const {
  double r = std::hypot(x, y);
  if (r <= mode_.R) return 0.0;  // zero-extended over the defect
  return u0(x, y) * V_local(yx, yy);
}

ModeField assemble_mode_field(const LocalizedMode& mode, double inclusion_rho,
                              double inclusion_a0) {
  return ModeField(mode, inclusion_rho, inclusion_a0);
}

}  // namespace hcd
