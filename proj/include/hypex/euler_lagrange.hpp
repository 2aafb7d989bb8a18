#pragma once

// Criticality machinery for the Gaussian under the extension inequality:
// the Euler-Lagrange weight (the t-integral whose proportionality to
// g^{p-1} is equivalent to criticality), its normalized s-form after
// t/pi = s, the moment sequences obtained by differentiating in the
// radial variables at the origin, the diagonal p = p_d analogue, and the
// first variation computed two independent ways.  A nonzero residual,
// moment or first variation is a finite-precision witness that the
// Gaussian is not a critical point.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hypex/exponents.hpp"
#include "hypex/gaussian_extension.hpp"
#include "hypex/grid_function.hpp"
#include "hypex/quadrature.hpp"
#include "hypex/slice_transform.hpp"

namespace hypex {

struct MomentReport {
  int k = 0;
  std::complex<double> value{0.0, 0.0};
  double abs_error = 0.0;
  bool nonzero_at_tolerance = false;
};

struct CriticalityReport {
  std::complex<double> lambda_estimate{0.0, 0.0};  // normalized LHS at the origin
  double residual = 0.0;        // max relative deviation of the LHS over the samples
  double combined_error = 0.0;  // quadrature error bound, same normalization
  std::vector<std::array<double, 2>> sample_points;
  std::optional<int> witness_k;  // first nonzero moment, when a sweep was run
};

namespace detail {

// (1 + 4s^2)^{-d(q-2)/4} ((1+2is)/(q-1+2is))^{d+/2} ((1-2is)/(q-1-2is))^{d-/2}
inline std::complex<double> el_base(double s, double q, const Signature& sig) {
  const int d = sig.dimension();
  const std::complex<double> i2s{0.0, 2.0 * s};
  const std::complex<double> zp = (1.0 + i2s) / (q - 1.0 + i2s);
  const std::complex<double> zm = (1.0 - i2s) / (q - 1.0 - i2s);
  return std::pow(1.0 + 4.0 * s * s, -0.25 * d * (q - 2.0)) *
         principal_half_power(zp, sig.d_plus()) *
         principal_half_power(zm, sig.d_minus());
}

// Radial exponential factors of the normalized LHS; uses
// 1 - (p-1)(q-1) = -2p/d on the scaling line.
inline std::complex<double> el_radial(double s, double r_plus, double r_minus, double p,
                                      double q, int d) {
  const double pi = std::numbers::pi;
  const std::complex<double> i2s{0.0, 2.0 * s};
  const std::complex<double> num_p = -2.0 * p / d + i2s * (q - p);
  const std::complex<double> num_m = -2.0 * p / d - i2s * (q - p);
  return std::exp(-(pi * r_plus / 2.0) * num_p / (q - 1.0 + i2s)) *
         std::exp(-(pi * r_minus / 2.0) * num_m / (q - 1.0 - i2s));
}

inline void require_admissible(double p, int d, const char* who) {
  if (!admissible_range(d).contains(p))
    throw std::domain_error(std::string(who) + ": p outside the admissible range");
}

}  // namespace detail

/// Normalized Euler-Lagrange left-hand side as a function of the radial
/// variables r+ = |xi+|^2, r- = |xi-|^2.  Criticality of the Gaussian
/// would make this constant in (r+, r-).  r is allowed to be any real
/// (the integral converges); the physical domain is r >= 0.
inline QuadratureResult el_lhs_result(double r_plus, double r_minus, double p,
                                      const Signature& sig, QuadTol tol = {}) {
  detail::require_admissible(p, sig.dimension(), "el_lhs_normalized");
  const double q = strichartz_q(p, sig.dimension());
  const int d = sig.dimension();
  return integrate_line(
      [&sig, r_plus, r_minus, p, q, d](double s) {
        return detail::el_base(s, q, sig) * detail::el_radial(s, r_plus, r_minus, p, q, d);
      },
      tol);
}

inline std::complex<double> el_lhs_normalized(double r_plus, double r_minus, double p,
                                              const Signature& sig, QuadTol tol = {}) {
  return el_lhs_result(r_plus, r_minus, p, sig, tol).value;
}

/// The t-integral of the Euler-Lagrange equation before normalization:
/// criticality reads el_weight(xi) = lambda g(xi)^{p-1}.  Kept as an
/// independent computation path from el_lhs_normalized; the two are
/// related by el_weight = pi g^{p-1} el_lhs.
inline QuadratureResult el_weight_result(std::span<const double> xi, double p,
                                         const Signature& sig, QuadTol tol = {}) {
  const int d = sig.dimension();
  if (static_cast<int>(xi.size()) != d)
    throw std::domain_error("el_weight: dimension mismatch");
  detail::require_admissible(p, d, "el_weight");
  const double q = strichartz_q(p, d);
  const double pi = std::numbers::pi;

  double r_plus = 0.0, r_minus = 0.0;
  for (int k = 0; k < d; ++k) (sig.sign(k) > 0 ? r_plus : r_minus) += xi[k] * xi[k];
  const double Q = r_plus - r_minus;

  return integrate_line(
      [=, &sig](double t) {
        const std::complex<double> it_pi{0.0, t / pi};
        const std::complex<double> dp = 0.5 * (q - 1.0) + it_pi;
        const std::complex<double> dm = 0.5 * (q - 1.0) - it_pi;
        const std::complex<double> zp = (0.5 + it_pi) / dp;
        const std::complex<double> zm = (0.5 - it_pi) / dm;
        const double tt = pi * pi + 4.0 * t * t;
        return std::pow(0.25 + t * t / (pi * pi), -0.25 * d * (q - 2.0)) *
               std::exp(std::complex<double>(0.0, -t * Q)) *
               principal_half_power(zp, sig.d_plus()) *
               principal_half_power(zm, sig.d_minus()) *
               std::exp(-r_plus * tt / (4.0 * pi * dp)) *
               std::exp(-r_minus * tt / (4.0 * pi * dm));
      },
      tol);
}

inline std::complex<double> el_weight(std::span<const double> xi, double p,
                                      const Signature& sig, QuadTol tol = {}) {
  return el_weight_result(xi, p, sig, tol).value;
}

/// A(s): the real part of the moment integrand's base factor.  Even,
/// continuous, strictly positive when d+ = d-.
inline double A_of_s(double s, double p, const Signature& sig) {
  detail::require_admissible(p, sig.dimension(), "A_of_s");
  const double q = strichartz_q(p, sig.dimension());
  return detail::el_base(s, q, sig).real();
}

/// B(s) = ((p^2/d^2 + s^2 (q-p)^2) / ((q-1)^2 + 4 s^2)) A(s).
inline double B_of_s(double s, double p, const Signature& sig) {
  detail::require_admissible(p, sig.dimension(), "B_of_s");
  const int d = sig.dimension();
  const double q = strichartz_q(p, d);
  const double kernel = (p * p / (d * d) + s * s * (q - p) * (q - p)) /
                        ((q - 1.0) * (q - 1.0) + 4.0 * s * s);
  return kernel * A_of_s(s, p, sig);
}

/// Moment M_k: vanishes for every k >= 1 if the Gaussian were a critical
/// point, so nonzero_at_tolerance is a non-criticality witness.
inline MomentReport moment(int k, double p, const Signature& sig, QuadTol tol = {}) {
  if (k < 1) throw std::domain_error("moment: need k >= 1");
  detail::require_admissible(p, sig.dimension(), "moment");
  const int d = sig.dimension();
  const double q = strichartz_q(p, d);
  const QuadratureResult r = integrate_line(
      [=, &sig](double s) {
        const double kernel = (p * p / (d * d) + s * s * (q - p) * (q - p)) /
                              ((q - 1.0) * (q - 1.0) + 4.0 * s * s);
        return std::pow(kernel, k) * detail::el_base(s, q, sig);
      },
      tol);
  MomentReport rep;
  rep.k = k;
  rep.value = r.value;
  rep.abs_error = r.abs_error_estimate;
  rep.nonzero_at_tolerance = std::abs(r.value) > 10.0 * r.abs_error_estimate;
  return rep;
}

inline std::vector<MomentReport> moment_sweep(int k_max, double p, const Signature& sig,
                                              QuadTol tol = {}) {
  std::vector<MomentReport> out;
  for (int k = 1; k <= k_max; ++k) out.push_back(moment(k, p, sig, tol));
  return out;
}

/// The change-of-variables kernel t = phi^{-1}(s).  Degenerates to the
/// constant kappa_d^2 at p = p_d, where it is rejected.
inline double phi_inverse(double s, double p, int d) {
  detail::require_admissible(p, d, "phi_inverse");
  if (std::abs(p - critical_exponent(d)) < 1e-9)
    throw degenerate_change_error("phi_inverse: map is constant at p = p_d");
  const double q = strichartz_q(p, d);
  return (p * p / (d * d) + s * s * (q - p) * (q - p)) /
         ((q - 1.0) * (q - 1.0) + 4.0 * s * s);
}

/// t = gamma^{-1}(s) = (s^2 - kappa^2) / (s^2 + kappa^2), the bijection
/// (0, inf) -> (-1, 1) used on the diagonal at p = p_d.
inline double gamma_inverse(double s, double kappa_value) {
  if (!(kappa_value > 0.0)) throw std::domain_error("gamma_inverse: need kappa > 0");
  return (s * s - kappa_value * kappa_value) / (s * s + kappa_value * kappa_value);
}

/// Diagonal moment at p = p_d, with the gamma kernel.
inline MomentReport diagonal_moment(int k, int d, const Signature& sig, QuadTol tol = {}) {
  if (k < 1) throw std::domain_error("diagonal_moment: need k >= 1");
  if (sig.dimension() != d)
    throw std::domain_error("diagonal_moment: signature dimension mismatch");
  const double q = strichartz_q(critical_exponent(d), d);
  const double kap = kappa(d);
  const QuadratureResult r = integrate_line(
      [=, &sig](double s) {
        const double kernel = (s * s - kap * kap) / (kap * kap + s * s);
        return std::pow(kernel, k) * detail::el_base(s, q, sig);
      },
      tol);
  MomentReport rep;
  rep.k = k;
  rep.value = r.value;
  rep.abs_error = r.abs_error_estimate;
  rep.nonzero_at_tolerance = std::abs(r.value) > 10.0 * r.abs_error_estimate;
  return rep;
}

inline std::vector<MomentReport> diagonal_sweep(int k_max, int d, const Signature& sig,
                                                QuadTol tol = {}) {
  std::vector<MomentReport> out;
  for (int k = 1; k <= k_max; ++k) out.push_back(diagonal_moment(k, d, sig, tol));
  return out;
}

/// Evaluates the normalized LHS over the sample set and reports the
/// maximum relative deviation from its origin value.  A residual
/// exceeding the combined quadrature error witnesses that the EL
/// equation fails, i.e. the Gaussian is not a critical point.
inline CriticalityReport criticality_residual(double p, const Signature& sig,
                                              std::span<const std::array<double, 2>> samples,
                                              QuadTol tol = {}) {
  bool has_origin = false;
  for (const auto& s : samples)
    if (s[0] == 0.0 && s[1] == 0.0) has_origin = true;
  if (samples.empty() || !has_origin)
    throw std::domain_error("criticality_residual: samples must include (0, 0)");

  const QuadratureResult origin = el_lhs_result(0.0, 0.0, p, sig, tol);
  const double scale = std::abs(origin.value);

  CriticalityReport rep;
  rep.lambda_estimate = origin.value;
  rep.sample_points.assign(samples.begin(), samples.end());
  for (const auto& s : samples) {
    if (s[0] == 0.0 && s[1] == 0.0) continue;
    const QuadratureResult here = el_lhs_result(s[0], s[1], p, sig, tol);
    rep.residual = std::max(rep.residual, std::abs(here.value - origin.value) / scale);
    rep.combined_error =
        std::max(rep.combined_error,
                 (here.abs_error_estimate + origin.abs_error_estimate) / scale);
  }
  return rep;
}

/// Removes the g^{p-1} component so that the orthogonality condition
/// int g^{p-1} phi = 0 holds on the grid.
inline GridFunction project_orthogonal(const GridFunction& phi, double p) {
  const GridFunction gp = GridFunction::sampled(
      phi.axes(), [p](std::span<const double> xi) {
        return std::pow(gaussian(xi), p - 1.0);
      });
  const std::complex<double> c =
      grid_inner_product(gp, phi) / grid_inner_product(gp, gp);
  GridFunction out = phi;
  out.axpy(-c, gp);
  return out;
}

struct FirstVariationConfig {
  QuadTol weight_tol{1e-11, 1e-9, 1'000'000};
  double fd_epsilon = 1e-4;
  SliceConfig slices{10.0, 161, 16, 8.0, 8};
};

struct FirstVariationReport {
  double pairing = 0.0;            // Re int conj(phi) el_weight, grid quadrature
  double pairing_error = 0.0;      // propagated quadrature error bound
  double finite_difference = 0.0;  // Richardson FD of Psi, rescaled to match
};

namespace detail {

// el_weight values and error estimates over a 2-D grid, evaluated once
// so that several pairings against the same field stay cheap.
struct ElWeightField {
  std::vector<std::complex<double>> value;
  std::vector<double> error;
};

inline ElWeightField el_weight_field(const std::vector<GridAxis>& axes, double p,
                                     const Signature& sig, QuadTol tol) {
  ElWeightField field;
  field.value.resize(axes[0].count * axes[1].count);
  field.error.resize(field.value.size());
  std::array<double, 2> xi{};
  for (std::size_t i0 = 0; i0 < axes[0].count; ++i0) {
    xi[0] = axes[0].coord(i0);
    for (std::size_t i1 = 0; i1 < axes[1].count; ++i1) {
      xi[1] = axes[1].coord(i1);
      const QuadratureResult r = el_weight_result(xi, p, sig, tol);
      field.value[i0 * axes[1].count + i1] = r.value;
      field.error[i0 * axes[1].count + i1] = r.abs_error_estimate;
    }
  }
  return field;
}

inline std::pair<double, double> pair_against_field(const GridFunction& phi,
                                                    const ElWeightField& field) {
  const std::vector<double> w0 = axis_weights(phi.axis(0));
  const std::vector<double> w1 = axis_weights(phi.axis(1));
  double value = 0.0, err = 0.0;
  for (std::size_t i0 = 0; i0 < phi.axis(0).count; ++i0)
    for (std::size_t i1 = 0; i1 < phi.axis(1).count; ++i1) {
      const std::size_t flat = i0 * phi.axis(1).count + i1;
      value += w0[i0] * w1[i1] * (std::conj(phi[flat]) * field.value[flat]).real();
      err += std::abs(w0[i0] * w1[i1]) * std::abs(phi[flat]) * field.error[flat];
    }
  return {value, err};
}

}  // namespace detail

/// Finite-difference path for Psi'(0), rescaled into the pairing
/// normalization.  Psi'(0) = (2 pi)^d (||Tg||_q^{1-q} / ||g||_p) *
/// pairing, so the FD derivative is multiplied by the inverse factor.
inline double first_variation_fd(const GridFunction& phi, double p,
                                 FirstVariationConfig cfg = {}) {
  if (phi.rank() != 2) throw std::domain_error("first_variation_fd: d = 2 only");
  detail::require_admissible(p, 2, "first_variation_fd");
  const double q = strichartz_q(p, 2);
  SaddleSliceTransform engine({phi.axis(0), phi.axis(1)}, cfg.slices);
  const GridFunction g = GridFunction::sampled(
      phi.axes(), [](std::span<const double> xi) { return gaussian(xi); });
  auto psi = [&](double eps) {
    GridFunction f = g;
    f.axpy(eps, phi);
    const double extension_norm = std::pow(engine.qnorm_report(f, q).value(), 1.0 / q);
    GridFunction fp = f;
    for (std::size_t i = 0; i < fp.size(); ++i) fp[i] = std::pow(std::abs(f[i]), p);
    const double input_norm = std::pow(integrate_grid(fp).real(), 1.0 / p);
    return extension_norm / input_norm;
  };
  const double e = cfg.fd_epsilon;
  const double d1 = (psi(e) - psi(-e)) / (2.0 * e);
  const double d2 = (psi(e / 2.0) - psi(-e / 2.0)) / e;
  const double psi_prime = (4.0 * d2 - d1) / 3.0;

  const double tg_q = std::pow(gaussian_strichartz_norm(2, q), 1.0 / q);
  const double two_pi = 2.0 * std::numbers::pi;
  return psi_prime * gaussian_lp_norm(2, p) * std::pow(tg_q, q - 1.0) / (two_pi * two_pi);
}

/// First variation in the pairing normalization: Re int conj(phi(xi))
/// el_weight(xi) dxi by grid quadrature.  phi should already satisfy the
/// orthogonality condition (see project_orthogonal).
inline double first_variation(const GridFunction& phi, double p, const Signature& sig,
                              FirstVariationConfig cfg = {}) {
  if (sig.dimension() != 2 || phi.rank() != 2)
    throw std::domain_error("first_variation: d = 2 only");
  detail::require_admissible(p, 2, "first_variation");
  const detail::ElWeightField field =
      detail::el_weight_field(phi.axes(), p, sig, cfg.weight_tol);
  return detail::pair_against_field(phi, field).first;
}

inline FirstVariationReport first_variation_paths(const GridFunction& phi, double p,
                                                  const Signature& sig,
                                                  FirstVariationConfig cfg = {}) {
  if (sig.dimension() != 2 || phi.rank() != 2)
    throw std::domain_error("first_variation_paths: d = 2 only");
  detail::require_admissible(p, 2, "first_variation_paths");
  const detail::ElWeightField field =
      detail::el_weight_field(phi.axes(), p, sig, cfg.weight_tol);
  const auto [value, err] = detail::pair_against_field(phi, field);
  FirstVariationReport rep;
  rep.pairing = value;
  rep.pairing_error = err;
  rep.finite_difference = first_variation_fd(phi, p, cfg);
  return rep;
}

/// Low-order even perturbation profiles (Hermite-type bumps times radial
/// powers), passed through project_orthogonal.  The EL defect depends
/// only on (|xi+|^2, |xi-|^2), which these overlap.
inline std::vector<GridFunction> perturbation_dictionary(const std::vector<GridAxis>& axes,
                                                         double p) {
  auto profile = [&axes](auto&& poly) {
    return GridFunction::sampled(axes, [&poly](std::span<const double> xi) {
      return poly(xi[0], xi[1]) * gaussian(xi);
    });
  };
  std::vector<GridFunction> dict;
  dict.push_back(profile([](double a, double b) { return a * a + b * b; }));
  dict.push_back(profile([](double a, double b) { return a * a - b * b; }));
  dict.push_back(profile([](double a, double b) { return (a * a + b * b) * (a * a + b * b); }));
  dict.push_back(profile([](double a, double b) { return a * a * b * b; }));
  dict.push_back(profile([](double a, double b) {
    return (a * a - b * b) * (a * a + b * b);
  }));
  for (auto& phi : dict) phi = project_orthogonal(phi, p);
  return dict;
}

struct VariationWitness {
  std::size_t dictionary_index = 0;
  FirstVariationReport paths;
};

/// Sweeps the dictionary against one shared el_weight field and returns
/// the profile with the largest |pairing| / error ratio, FD cross-check
/// included for that profile.
inline VariationWitness find_variation_witness(const std::vector<GridAxis>& axes, double p,
                                               const Signature& sig,
                                               FirstVariationConfig cfg = {}) {
  if (sig.dimension() != 2)
    throw std::domain_error("find_variation_witness: d = 2 only");
  const std::vector<GridFunction> dict = perturbation_dictionary(axes, p);
  const detail::ElWeightField field = detail::el_weight_field(axes, p, sig, cfg.weight_tol);
  std::size_t best = 0;
  double best_ratio = -1.0;
  std::pair<double, double> best_pair{0.0, 0.0};
  for (std::size_t i = 0; i < dict.size(); ++i) {
    const auto pr = detail::pair_against_field(dict[i], field);
    const double ratio = std::abs(pr.first) / std::max(pr.second, 1e-300);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = i;
      best_pair = pr;
    }
  }
  VariationWitness out;
  out.dictionary_index = best;
  out.paths.pairing = best_pair.first;
  out.paths.pairing_error = best_pair.second;
  out.paths.finite_difference = first_variation_fd(dict[best], p, cfg);
  return out;
}

}  // namespace hypex
