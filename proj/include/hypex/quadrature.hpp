#pragma once

// Real-line adaptive quadrature for complex-valued integrands with
// algebraic decay, plus the principal-branch half-integer powers used by
// the extension closed forms.
//
// The scheme is a nested Gauss(7)/Kronrod(15) pair per panel with
// bisection of the worst panel.  Improper integrals over R and (0, inf)
// are compactified first via s = sinh(tan(pi u / 2)), so algebraic tails
// never need hand-tuned truncation: any |s|^{-alpha} tail with alpha > 1
// becomes exponentially flat at the endpoints, which plain bisection
// resolves to machine precision (the bare tangent map would stall at a
// floor of ulp^{alpha-1}).  Real and imaginary parts share one
// subdivision tree; the final sum runs over panels ordered by position,
// which makes results independent of the subdivision schedule.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hypex/errors.hpp"

namespace hypex {

struct QuadTol {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  std::size_t max_evals = 1'000'000;
};

struct QuadratureResult {
  std::complex<double> value{0.0, 0.0};
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights (positive half; node 0 included).
// Even entries of kGkNodes are the embedded Gauss-7 abscissae.
inline constexpr double kGkNodes[8] = {
    0.99145537112081263920685469752633,  // Kronrod only
    0.94910791234275852452618968404785,
    0.86486442335976907278971278864093,  // Kronrod only
    0.74153118559939443986386477328079,
    0.58608723546769113029414483825873,  // Kronrod only
    0.40584515137739716690660641207696,
    0.20778495500789846760068940377324,  // Kronrod only
    0.0};

inline constexpr double kKronrodW[8] = {
    0.02293532201052922496373200805897, 0.06309209262997855329070066318920,
    0.10479001032225018383987632254152, 0.14065325971552591874518959051024,
    0.16900472663926790282658342659855, 0.19035057806478540991325640242101,
    0.20443294007529889241416199923465, 0.20948214108472782801299917489171};

inline constexpr double kGaussW[4] = {
    0.12948496616886969327061143267908, 0.27970539148927666790146777142378,
    0.38183005050511894495036977548898, 0.41795918367346938775510204081633};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  std::complex<double> value{0.0, 0.0};
  double error = 0.0;
};

// One GK15 evaluation on [a, b].  15 integrand calls.
template <class F>
Panel gk15(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::complex<double> kronrod{0.0, 0.0};
  std::complex<double> gauss{0.0, 0.0};

  const std::complex<double> f_mid = f(mid);
  kronrod += kKronrodW[7] * f_mid;
  gauss += kGaussW[3] * f_mid;

  for (int i = 0; i < 7; ++i) {
    const double dx = half * kGkNodes[i];
    const std::complex<double> sum =
        std::complex<double>(f(mid - dx)) + std::complex<double>(f(mid + dx));
    kronrod += kKronrodW[i] * sum;
    if (i % 2 == 1) gauss += kGaussW[i / 2] * sum;
  }

  Panel p;
  p.a = a;
  p.b = b;
  p.value = half * kronrod;
  // |K15 - G7| as the panel error, floored so a symmetric zero cannot
  // report an exactly-zero estimate.
  p.error = std::abs(half * (kronrod - gauss));
  p.error = std::max(p.error, 1e-16 * std::abs(p.value));
  return p;
}

struct PanelWorse {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a < y.a;  // deterministic tie-break
  }
};

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature of a complex-valued integrand on a
/// finite interval [a, b].  Throws budget_exceeded_error (carrying the
/// best estimate) if the tolerance is not met within tol.max_evals.
template <class F>
QuadratureResult integrate_interval(F&& f, double a, double b,
                                    QuadTol tol = {}) {
  if (!(a < b)) throw std::domain_error("integrate_interval: need a < b");

  std::priority_queue<detail::Panel, std::vector<detail::Panel>,
                      detail::PanelWorse>
      queue;
  std::vector<detail::Panel> frozen;  // roundoff-width panels, error retained
  std::size_t evals = 15;
  queue.push(detail::gk15(f, a, b));

  double total_error = queue.top().error;
  std::complex<double> total_value = queue.top().value;

  auto finalize = [&queue, &frozen]() {
    std::vector<detail::Panel> panels = frozen;
    while (!queue.empty()) {
      panels.push_back(queue.top());
      queue.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const detail::Panel& x, const detail::Panel& y) {
                return x.a < y.a;
              });
    QuadratureResult r;
    for (const auto& p : panels) {
      r.value += p.value;
      r.abs_error_estimate += p.error;
    }
    return r;
  };

  while (total_error > std::max(tol.abs_tol, tol.rel_tol * std::abs(total_value))) {
    if (evals + 30 > tol.max_evals || queue.empty()) {
      QuadratureResult best = finalize();
      best.evaluations = evals;
      throw budget_exceeded_error(
          queue.empty() ? "integrate_interval: tolerance unreachable at roundoff width"
                        : "integrate_interval: evaluation budget exceeded",
          best.value, best.abs_error_estimate, evals);
    }
    detail::Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      // Roundoff-width panel: no further refinement possible, but its
      // error stays in the total so the estimate remains honest.
      frozen.push_back(worst);
      continue;
    }
    detail::Panel left = detail::gk15(f, worst.a, mid);
    detail::Panel right = detail::gk15(f, mid, worst.b);
    evals += 30;
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }

  QuadratureResult r = finalize();
  r.evaluations = evals;
  return r;
}

namespace detail {

// s = sinh(tan(pi u / 2)) with its Jacobian.  Beyond |tan| = 300 the
// contribution is dropped: s exceeds e^300 / 2 there, so any tail with
// alpha >= 1.1 has under 1e-12 of its mass left, while s^2 still fits a
// double for every evaluated point (no overflow inside integrands).
template <class F>
std::complex<double> compactified(F& f, double u) {
  constexpr double half_pi = 1.57079632679489661923;
  const double t = std::tan(half_pi * u);
  if (std::abs(t) > 300.0) return {0.0, 0.0};
  const double s = std::sinh(t);
  const double jacobian = half_pi * (1.0 + t * t) * std::cosh(t);
  return std::complex<double>(f(s)) * jacobian;
}

}  // namespace detail

/// Integral over the whole real line, compactified to u in (-1, 1).
/// Requires |f(s)| = O(|s|^{-alpha}) with alpha > 1 for convergence.
template <class F>
QuadratureResult integrate_line(F&& f, QuadTol tol = {}) {
  auto mapped = [&f](double u) { return detail::compactified(f, u); };
  return integrate_interval(mapped, -1.0, 1.0, tol);
}

/// Integral over (0, inf) via the same compactification.
template <class F>
QuadratureResult integrate_halfline(F&& f, QuadTol tol = {}) {
  auto mapped = [&f](double u) { return detail::compactified(f, u); };
  return integrate_interval(mapped, 0.0, 1.0, tol);
}

/// Principal branch of z^{m/2}.  Computed as (sqrt z)^m, which equals
/// exp((m/2) Log z) exactly on the cut plane; every in-scope base has
/// strictly positive real part, so the cut is never approached.
inline std::complex<double> principal_half_power(std::complex<double> z, int m) {
  if (z.imag() == 0.0 && z.real() <= 0.0)
    throw branch_cut_error("principal_half_power: base on the closed negative real axis");
  if (m == 0) return {1.0, 0.0};
  const std::complex<double> root = std::sqrt(z);
  std::complex<double> acc{1.0, 0.0};
  int n = m < 0 ? -m : m;
  std::complex<double> base = root;
  while (n > 0) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  return m < 0 ? 1.0 / acc : acc;
}

}  // namespace hypex
