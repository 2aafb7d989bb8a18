#pragma once

// Desk-scale maximization of Lambda(f) = ||Tf||_4^4 / ||f||_2^4 for the
// d = 2 saddle surface: gradient ascent with backtracking line search and
// per-step renormalization to the L^2 unit sphere.  No claim is made
// that the ascent limit is a global extremizer; the report carries the
// trace and stationarity residuals only.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypex/gaussian_extension.hpp"
#include "hypex/grid_function.hpp"
#include "hypex/slice_transform.hpp"

namespace hypex {

/// Per-slice extension values on the conjugate x-grid; agrees with
/// extension_numeric pointwise.
inline SliceSet extension_slices(const GridFunction& f, std::span<const double> t_samples,
                                 SliceConfig cfg = {}) {
  SaddleSliceTransform engine({f.axis(0), f.axis(1)}, cfg);
  return engine.slices(f, t_samples);
}

struct LambdaReport {
  double value = 0.0;      // Lambda(f)
  double grid_part = 0.0;  // contribution of the Simpson window to ||Tf||_4^4
  double tail_part = 0.0;  // measured tail beyond |t| = t_max
  double norm_sq = 0.0;    // ||f||_2^2 on the periodic view
};

inline LambdaReport lambda_functional(const GridFunction& f, SliceConfig cfg = {}) {
  SaddleSliceTransform engine({f.axis(0), f.axis(1)}, cfg);
  const auto r = engine.qnorm_report(f, 4.0);
  if (!(r.norm_sq > 0.0)) throw std::domain_error("lambda_functional: zero input");
  return {r.value() / (r.norm_sq * r.norm_sq), r.grid_part, r.tail_part, r.norm_sq};
}

inline GridFunction lambda_gradient(const GridFunction& f, SliceConfig cfg = {}) {
  SaddleSliceTransform engine({f.axis(0), f.axis(1)}, cfg);
  return engine.lambda_gradient(f).gradient;
}

struct AscentReport {
  std::size_t iterations = 0;
  std::vector<double> lambda_trace;  // non-decreasing by construction
  std::vector<double> step_trace;
  std::vector<double> gradient_norm_trace;
  GridFunction final_f{std::vector<GridAxis>{{0.0, 1.0, 3}, {0.0, 1.0, 3}}};
  double gradient_norm_final = 0.0;
  double lambda_gaussian = 0.0;
  bool improved_over_gaussian = false;
};

/// Gradient ascent from f0.  Every accepted step satisfies
/// Lambda_{n+1} >= Lambda_n (backtracking); the iterate is renormalized
/// to ||f||_2 = 1 after every step, which is equivalent by homogeneity.
inline AscentReport ascend(const GridFunction& f0, std::size_t max_iters,
                           double step0 = 0.1, double tol = 1e-9,
                           SliceConfig cfg = {}) {
  SaddleSliceTransform engine({f0.axis(0), f0.axis(1)}, cfg);

  const double nsq0 = engine.norm_sq(f0);
  if (!(nsq0 > 0.0)) throw std::domain_error("ascend: zero input");

  AscentReport report;
  const GridFunction gauss = GridFunction::sampled(
      {f0.axis(0), f0.axis(1)}, [](std::span<const double> xi) { return gaussian(xi); });
  report.lambda_gaussian = engine.qnorm_report(gauss, 4.0).value() /
                           (engine.norm_sq(gauss) * engine.norm_sq(gauss));

  GridFunction f = f0;
  f *= 1.0 / std::sqrt(nsq0);
  double lambda = engine.qnorm_report(f, 4.0).value() / (engine.norm_sq(f) * engine.norm_sq(f));
  report.lambda_trace.push_back(lambda);
  report.final_f = f;

  auto finish = [&report](const GridFunction& final_f, double gnorm) {
    report.final_f = final_f;
    report.gradient_norm_final = gnorm;
    report.improved_over_gaussian =
        report.lambda_trace.back() > report.lambda_gaussian * (1.0 + 1e-3);
    return report;
  };

  if (max_iters == 0 || !(tol < std::numeric_limits<double>::infinity()))
    return finish(f, 0.0);

  double step = step0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    auto grad_rep = engine.lambda_gradient(f);
    const double gnorm = std::sqrt(engine.norm_sq(grad_rep.gradient));
    if (!std::isfinite(gnorm) || !std::isfinite(lambda))
      throw std::runtime_error("ascend: non-finite value (resolution loss)");
    if (gnorm < 1e-14) return finish(f, gnorm);

    bool accepted = false;
    double lambda_new = lambda;
    while (step > 1e-12) {
      GridFunction trial = f;
      trial.axpy(step / gnorm, grad_rep.gradient);
      const double tn = engine.norm_sq(trial);
      trial *= 1.0 / std::sqrt(tn);
      const double lt =
          engine.qnorm_report(trial, 4.0).value() / (engine.norm_sq(trial) * engine.norm_sq(trial));
      if (!std::isfinite(lt))
        throw std::runtime_error("ascend: non-finite trial value (resolution loss)");
      if (lt >= lambda) {
        f = trial;
        lambda_new = lt;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return finish(f, gnorm);

    ++report.iterations;
    report.lambda_trace.push_back(lambda_new);
    report.step_trace.push_back(step);
    report.gradient_norm_trace.push_back(gnorm);
    step *= 1.5;

    const double rel_gain = (lambda_new - lambda) / std::abs(lambda);
    lambda = lambda_new;
    if (rel_gain < tol) return finish(f, gnorm);
  }
  return finish(f, report.gradient_norm_trace.empty() ? 0.0
                                                      : report.gradient_norm_trace.back());
}

/// JSON-lines trace: one record per accepted iteration plus a summary.
inline void write_ascent_jsonl(std::ostream& os, const AscentReport& r) {
  char line[256];
  for (std::size_t i = 0; i < r.iterations; ++i) {
    std::snprintf(line, sizeof line,
                  "{\"iter\":%zu,\"lambda\":%.17g,\"step\":%.17g,\"gradient_norm\":%.17g}",
                  i + 1, r.lambda_trace[i + 1], r.step_trace[i], r.gradient_norm_trace[i]);
    os << line << "\n";
  }
  std::snprintf(line, sizeof line,
                "{\"iterations\":%zu,\"lambda_initial\":%.17g,\"lambda_final\":%.17g,"
                "\"lambda_gaussian\":%.17g,\"gradient_norm_final\":%.17g,"
                "\"improved_over_gaussian\":%s}",
                r.iterations, r.lambda_trace.front(), r.lambda_trace.back(),
                r.lambda_gaussian, r.gradient_norm_final,
                r.improved_over_gaussian ? "true" : "false");
  os << line << "\n";
}

}  // namespace hypex
