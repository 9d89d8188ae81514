#include "hcdefect/special.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "hcdefect/errors.hpp"

namespace hcd::special {

namespace {

constexpr long double kPi = 3.14159265358979323846264338327950288L;

bool is_half_integer(double nu) {
  double two = 2.0 * nu;
  return std::abs(two - std::round(two)) < 1e-12;
}

void check_order(double nu, const char* fn) {
  if (!(nu >= 0.0) || !is_half_integer(nu))
    throw NumericError(std::string(fn) + ": order must be a non-negative multiple of 1/2, got " +
                       std::to_string(nu));
}

// Gamma(nu + 1) for nu a non-negative multiple of 1/2, in long double.
long double gamma_nu_plus_1(double nu) {
  long int twice = std::lround(2.0 * nu);
  if (twice % 2 == 0) {
    long double g = 1.0L;
    for (long int k = 2; k <= twice / 2; ++k) g *= static_cast<long double>(k);
    return g;
  }
  // Gamma(1/2) = sqrt(pi), then Gamma(z+1) = z Gamma(z).
  long double g = std::sqrt(kPi);
  for (long double z = 0.5L; z <= static_cast<long double>(nu); z += 1.0L) g *= z;
  return g;
}

// Ascending series, valid for small arguments where no cancellation occurs.
double series_j(double nu, double x) {
  long double q = static_cast<long double>(x) / 2.0L;
  long double q2 = q * q;
  long double term = std::pow(q, static_cast<long double>(nu)) / gamma_nu_plus_1(nu);
  long double sum = term;
  for (int k = 1; k < 60; ++k) {
    term *= -q2 / (static_cast<long double>(k) * (static_cast<long double>(nu) + k));
    sum += term;
    if (std::abs(term) < 1e-22L * std::abs(sum)) break;
  }
  return static_cast<double>(sum);
}

double series_i(double nu, double x) {
  long double q = static_cast<long double>(x) / 2.0L;
  long double q2 = q * q;
  long double term = std::pow(q, static_cast<long double>(nu)) / gamma_nu_plus_1(nu);
  long double sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= q2 / (static_cast<long double>(k) * (static_cast<long double>(nu) + k));
    sum += term;
    if (term < 1e-22L * sum) break;
  }
  return static_cast<double>(sum);
}

// Uniform asymptotic expansion of I_nu for large argument.
double asymptotic_i(double nu, double x) {
  long double mu = 4.0L * nu * nu;
  long double term = 1.0L, sum = 1.0L;
  long double prev = std::numeric_limits<long double>::max();
  for (int k = 1; k < 40; ++k) {
    long double num = mu - static_cast<long double>((2 * k - 1) * (2 * k - 1));
    term *= -num / (8.0L * k * static_cast<long double>(x));
    if (std::abs(term) > prev) break;  // divergence onset
    sum += term;
    prev = std::abs(term);
    if (std::abs(term) < 1e-18L * std::abs(sum)) break;
  }
  long double pref = std::exp(static_cast<long double>(x)) /
                     std::sqrt(2.0L * kPi * static_cast<long double>(x));
  return static_cast<double>(pref * sum);
}

// Miller's downward recurrence for integer orders, normalized with
// J_0 + 2 J_2 + 2 J_4 + ... = 1.
double miller_j_int(int n, double x) {
  int start = std::max(n, static_cast<int>(std::ceil(x))) + 42;
  if (start % 2 != 0) ++start;
  long double jp = 0.0L, jc = 1e-300L;
  long double norm = 0.0L, target = 0.0L;
  for (int k = start; k >= 1; --k) {
    long double jm = (2.0L * k / x) * jc - jp;
    jp = jc;
    jc = jm;
    // jc now holds J_{k-1}, jp holds J_k
    if (k - 1 == n) target = jc;
    if ((k - 1) % 2 == 0) norm += (k - 1 == 0) ? jc : 2.0L * jc;
    if (std::abs(jc) > 1e280L) {
      jc *= 1e-280L;
      jp *= 1e-280L;
      norm *= 1e-280L;
      target *= 1e-280L;
    }
  }
  return static_cast<double>(target / norm);
}

// Spherical Bessel j_l by downward recurrence, normalized against the
// closed forms of j_0 / j_1.
double spherical_j(int l, double x) {
  double j0 = std::sin(x) / x;
  if (l == 0) return j0;
  double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  if (l == 1) return j1;
  int start = std::max(l, static_cast<int>(std::ceil(x))) + 42;
  long double tp = 0.0L, tc = 1e-300L;
  long double t_l = 0.0L, t0 = 0.0L, t1 = 0.0L;
  for (int k = start; k >= 1; --k) {
    long double tm = ((2.0L * k + 1.0L) / x) * tc - tp;
    tp = tc;
    tc = tm;
    // tc holds j_{k-1}
    if (k - 1 == l) t_l = tc;
    if (k - 1 == 1) t1 = tc;
    if (k - 1 == 0) t0 = tc;
    if (std::abs(tc) > 1e280L) {
      tc *= 1e-280L;
      tp *= 1e-280L;
      t_l *= 1e-280L;
      t1 *= 1e-280L;
    }
  }
  // Normalize by whichever reference is better conditioned.
  long double scale = (std::abs(j0) > 0.1 / x) ? j0 / t0 : j1 / t1;
  return static_cast<double>(t_l * scale);
}

}  // namespace

double bessel_j(double nu, double x) {
  check_order(nu, "bessel_j");
  if (x < 0.0) throw NumericError("bessel_j: argument must be >= 0");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  long int twice = std::lround(2.0 * nu);
  if (twice % 2 == 0) {
    int n = static_cast<int>(twice / 2);
    if (x < 1.0) return series_j(nu, x);
    return miller_j_int(n, x);
  }
  int l = static_cast<int>((twice - 1) / 2);
  if (x < 0.5) return series_j(nu, x);
  return spherical_j(l, x) * std::sqrt(2.0 * x / static_cast<double>(kPi));
}

double bessel_i(double nu, double x) {
  check_order(nu, "bessel_i");
  if (x < 0.0) throw NumericError("bessel_i: argument must be >= 0");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  if (x <= 80.0) return series_i(nu, x);
  return asymptotic_i(nu, x);
}

double bessel_k_scaled(double nu, double x) {
  check_order(nu, "bessel_k");
  if (!(x > 0.0)) throw NumericError("bessel_k: argument must be > 0");
  // e^x K_nu(x) = int_0^inf exp(-x(cosh t - 1)) cosh(nu t) dt.
  // The integrand decays double-exponentially, so the trapezoidal rule
  // converges geometrically; the step shrinks like 1/sqrt(x) because the
  // integrand peak narrows for large arguments.
  const long double h = std::min(0.18L, 0.7L / std::sqrt(static_cast<long double>(x)));
  long double lx = x;
  long double sum = 0.5L;  // t = 0 contributes cosh(0) = 1, half weight
  for (int k = 1; k < 4000; ++k) {
    long double t = h * k;
    long double expo = -lx * (std::cosh(t) - 1.0L);
    long double lc = expo + std::log(std::cosh(static_cast<long double>(nu) * t));
    if (lc < -60.0L && t > 1.0L) break;
    sum += std::exp(expo) * std::cosh(static_cast<long double>(nu) * t);
  }
  return static_cast<double>(h * sum);
}

double bessel_k(double nu, double x) {
  return bessel_k_scaled(nu, x) * std::exp(-static_cast<long double>(x));
}

double bessel_j_prime(double nu, double x) {
  return (nu / x) * bessel_j(nu, x) - bessel_j(nu + 1.0, x);
}

double bessel_i_prime(double nu, double x) {
  return (nu / x) * bessel_i(nu, x) + bessel_i(nu + 1.0, x);
}

double bessel_k_prime(double nu, double x) {
  return (nu / x) * bessel_k(nu, x) - bessel_k(nu + 1.0, x);
}

double bessel_j0_zero(int j) {
  if (j < 1) throw NumericError("bessel_j0_zero: index is 1-based");
  // McMahon estimate, then bisection on a verified sign-changing bracket.
  double beta = (j - 0.25) * static_cast<double>(kPi);
  double guess = beta + 1.0 / (8.0 * beta);
  double lo = guess - 0.4, hi = guess + 0.4;
  double flo = bessel_j(0.0, lo), fhi = bessel_j(0.0, hi);
  int widen = 0;
  while (flo * fhi > 0.0 && widen++ < 8) {
    lo -= 0.2;
    hi += 0.2;
    flo = bessel_j(0.0, lo);
    fhi = bessel_j(0.0, hi);
  }
  if (flo * fhi > 0.0) throw NumericError("bessel_j0_zero: bracketing failed");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = bessel_j(0.0, mid);
    if (flo * fm <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> bessel_j0_zeros(int n) {
  std::vector<double> z(n);
  for (int j = 1; j <= n; ++j) z[j - 1] = bessel_j0_zero(j);
  return z;
}

}  // namespace hcd::special
