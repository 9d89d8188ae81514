#pragma once

#include <vector>

namespace hcd::special {

// Bessel functions of real order nu >= 0 on x > 0, accurate to ~1e-12
// relative. Orders needed by the radial mode solver are integers (2D) and
// half-integers (3D); the routines accept any nu >= 0 that is a multiple
// of 1/2.
double bessel_j(double nu, double x);
double bessel_i(double nu, double x);
double bessel_k(double nu, double x);

// e^x K_nu(x): exponentially rescaled variant that stays representable for
// large arguments (the matching determinants use ratios of these).
double bessel_k_scaled(double nu, double x);

// First derivatives via the standard recurrences.
double bessel_j_prime(double nu, double x);
double bessel_i_prime(double nu, double x);
double bessel_k_prime(double nu, double x);

// First n positive zeros of J_0, by bracketed bisection.
std::vector<double> bessel_j0_zeros(int n);

// j-th positive zero of J_0 (1-based).
double bessel_j0_zero(int j);

}  // namespace hcd::special
