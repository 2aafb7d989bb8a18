#pragma once

// Exponent algebra for the Strichartz scaling line q = (d+2) p' / d and
// the special exponent p_d where the moment change of variables
// degenerates.

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "hypex/errors.hpp"

namespace hypex {

/// Sign pattern of the quadratic form Q(xi) = sum sigma_j xi_j^2 with
/// d_plus leading +1 signs and d_minus trailing -1 signs.  Only
/// hyperbolic signatures (both counts >= 1) are representable.
class Signature {
 public:
  Signature(int d_plus, int d_minus) : d_plus_(d_plus), d_minus_(d_minus) {
    if (d_plus < 1 || d_minus < 1)
      throw hyperbolic_required(
          "Signature: hyperbolic signatures need d_plus >= 1 and d_minus >= 1");
  }

  /// Canonicalizes an arbitrary sign vector: entries must be +1 or -1,
  /// and any ordering with the same counts maps to the same Signature.
  static Signature from_signs(std::span<const int> signs) {
    int plus = 0, minus = 0;
    for (int s : signs) {
      if (s == 1)
        ++plus;
      else if (s == -1)
        ++minus;
      else
        throw std::domain_error("Signature: signs must be +1 or -1");
    }
    return Signature(plus, minus);
  }

  int d_plus() const { return d_plus_; }
  int d_minus() const { return d_minus_; }
  int dimension() const { return d_plus_ + d_minus_; }

  /// Stored canonical ordering: +1 for j < d_plus, else -1.
  int sign(int j) const { return j < d_plus_ ? 1 : -1; }

  /// The sign-flip companion (d_minus, d_plus).  Q -> -Q conjugates all
  /// downstream integrands, which is what makes the flip testable.
  Signature flipped() const { return Signature(d_minus_, d_plus_); }

  bool operator==(const Signature& o) const {
    return d_plus_ == o.d_plus_ && d_minus_ == o.d_minus_;
  }

 private:
  int d_plus_;
  int d_minus_;
};

inline double eval_Q(const Signature& sig, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != sig.dimension())
    throw std::domain_error("eval_Q: point dimension does not match signature");
  double q = 0.0;
  for (int j = 0; j < sig.dimension(); ++j) q += sig.sign(j) * xi[j] * xi[j];
  return q;
}

/// Holder dual p' = p / (p - 1), p > 1.
inline double dual_exponent(double p) {
  if (!(p > 1.0)) throw std::domain_error("dual_exponent: need p > 1");
  return p / (p - 1.0);
}

/// Scaling-line output exponent q = (d + 2) p' / d.
inline double strichartz_q(double p, int d) {
  if (d < 1) throw std::domain_error("strichartz_q: need d >= 1");
  return (d + 2) * dual_exponent(p) / d;
}

/// Open interval (1, 2(d+1)/d) of conjectured validity.
struct AdmissibleRange {
  double lower;
  double upper;
  bool contains(double p) const { return p > lower && p < upper; }
};

inline AdmissibleRange admissible_range(int d) {
  if (d < 2) throw std::domain_error("admissible_range: need d >= 2");
  return {1.0, 2.0 * (d + 1) / d};
}

/// Exponent triple on the scaling line, with the range check applied.
/// kappa is only meaningful at p = p_d and is NaN elsewhere.
struct ExponentTriple {
  int d;
  double p;
  double p_prime;
  double q;
  double kappa;
};

/// p_d in closed form.  Its defining property is that both sides of
/// (p/d)/(q - p) = (q - 1)/2 coincide, which kills the moment change of
/// variables; see critical_exponent_bisection for the independent route.
inline double critical_exponent(int d) {
  if (d < 2) throw std::domain_error("critical_exponent: need d >= 2");
  const double dd = static_cast<double>(d);
  const double a = -dd * dd + 8.0 * dd + 4.0;
  const double b = dd * dd - 8.0 * dd - 4.0;
  return (a + std::sqrt(b * b + 32.0 * dd * dd * dd)) / (8.0 * dd);
}

namespace detail {
// Defining relation residual; negative at p = 2, +inf at the right edge.
inline double critical_relation(double p, int d) {
  const double q = strichartz_q(p, d);
  return (p / d) / (q - p) - 0.5 * (q - 1.0);
}
}  // namespace detail

/// Solves the defining relation of p_d by bisection on (2, 2(d+1)/d).
/// Cross-check route, independent of the closed form.
inline double critical_exponent_bisection(int d) {
  if (d < 2) throw std::domain_error("critical_exponent_bisection: need d >= 2");
  double lo = 2.0;
  double hi = admissible_range(d).upper * (1.0 - 1e-14);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (detail::critical_relation(mid, d) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// kappa_d = (q_d - 1)/2, the common value of both sides of the p_d
/// defining relation.
inline double kappa(int d) {
  return 0.5 * (strichartz_q(critical_exponent(d), d) - 1.0);
}

inline ExponentTriple exponent_triple(int d, double p) {
  const AdmissibleRange range = admissible_range(d);
  if (!range.contains(p))
    throw std::domain_error("exponent_triple: p outside the open admissible range");
  ExponentTriple t;
  t.d = d;
  t.p = p;
  t.p_prime = dual_exponent(p);
  t.q = strichartz_q(p, d);
  t.kappa = std::abs(p - critical_exponent(d)) <= 1e-9
                ? 0.5 * (t.q - 1.0)
                : std::numeric_limits<double>::quiet_NaN();
  return t;
}

}  // namespace hypex
