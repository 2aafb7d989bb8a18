#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace hypex {

/// Thrown when a signature has no hyperbolic part (all signs equal).
/// The paraboloid case is rejected rather than silently computed.
struct hyperbolic_required : std::domain_error {
  using std::domain_error::domain_error;
};

/// Thrown by principal_half_power when the base sits on the closed
/// negative real axis (branch cut of the principal square root).
struct branch_cut_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// Thrown when a requested (x, t) phase cannot be resolved on the grid:
/// |x_j| + 2|t| L_j exceeds pi / h_j on some axis.
struct resolution_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when the change of variables t = phi^{-1}(s) degenerates,
/// i.e. p is within tolerance of the critical exponent p_d.
struct degenerate_change_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// Thrown by kg_closed on the singular set (eta1-nu1)^2 = (eta2-nu2)^2,
/// where the closed form has a logarithmic blow-up.
struct singular_point_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// Thrown when an integrand fails to converge within the evaluation
/// budget.  Carries the best estimate obtained so far.
struct budget_exceeded_error : std::runtime_error {
  std::complex<double> best_value;
  double best_error;
  std::size_t evaluations;

  budget_exceeded_error(const std::string& msg, std::complex<double> value,
                        double error, std::size_t evals)
      : std::runtime_error(msg),
        best_value(value),
        best_error(error),
        evaluations(evals) {}
};

}  // namespace hypex
