#pragma once

// Test-side oracles, independent of the implementation paths they check.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>

#include "hypex/grid_function.hpp"
#include "hypex/quadrature.hpp"

namespace oracles {

/// K0 via the integral representation int_0^inf exp(-x cosh u) du.
inline double k0_integral_representation(double x) {
  auto integrand = [x](double u) {
    const double arg = x * std::cosh(u);
    return arg > 700.0 ? 0.0 : std::exp(-arg);
  };
  return hypex::integrate_halfline(integrand, {1e-14, 1e-13, 2'000'000}).value.real();
}

/// K0 small-argument series: -(log(x/2) + gamma) I0(x) + sum_{k>=1} ...
inline double k0_small_series(double x) {
  constexpr double euler_gamma = 0.57721566490153286061;
  double i0 = 1.0, sum = 0.0, term = 1.0, harmonic = 0.0;
  const double q = 0.25 * x * x;
  for (int k = 1; k <= 30; ++k) {
    term *= q / (k * k);
    harmonic += 1.0 / k;
    i0 += term;
    sum += term * harmonic;
  }
  return -(std::log(0.5 * x) + euler_gamma) * i0 + sum;
}

/// K0 large-argument asymptotic: sqrt(pi/2x) e^{-x} sum_k (-1)^k
/// prod_{j<=k}(2j-1)^2 / (k! (8x)^k), truncated after 7 terms.
inline double k0_asymptotic(double x) {
  const double z = 8.0 * x;
  double sum = 1.0, prod = 1.0, factorial = 1.0, power = 1.0;
  for (int k = 1; k <= 6; ++k) {
    const double odd = 2.0 * k - 1.0;
    prod *= odd * odd;
    factorial *= k;
    power *= z;
    sum += (k % 2 ? -1.0 : 1.0) * prod / (factorial * power);
  }
  return std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) * sum;
}

/// Direct extension quadrature with plain trapezoid weights; a second
/// discretization of the same integral as extension_numeric.
inline std::complex<double> trapezoid_extension(const hypex::GridFunction& f, int sign0,
                                                int sign1, std::span<const double> x,
                                                double t) {
  const auto& a0 = f.axis(0);
  const auto& a1 = f.axis(1);
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i0 = 0; i0 < a0.count; ++i0)
    for (std::size_t i1 = 0; i1 < a1.count; ++i1) {
      const double xi0 = a0.coord(i0), xi1 = a1.coord(i1);
      const double phase =
          x[0] * xi0 + x[1] * xi1 + t * (sign0 * xi0 * xi0 + sign1 * xi1 * xi1);
      double w = 1.0;
      if (i0 == 0 || i0 + 1 == a0.count) w *= 0.5;
      if (i1 == 0 || i1 + 1 == a1.count) w *= 0.5;
      acc += w * f[i0 * a1.count + i1] *
             std::complex<double>(std::cos(phase), std::sin(phase));
    }
  return acc * a0.spacing() * a1.spacing();
}

}  // namespace oracles
