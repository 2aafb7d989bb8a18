#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "hypex/deterministic_rng.hpp"
#include "hypex/quadrature.hpp"

using namespace hypex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("integrate_line on reference integrands", "[quadrature]") {
  auto arctan = integrate_line([](double s) { return 1.0 / (1.0 + s * s); });
  REQUIRE_THAT(arctan.value.real(), WithinAbs(pi, 1e-12));

  auto gauss = integrate_line([](double s) { return std::exp(-pi * s * s); });
  REQUIRE_THAT(gauss.value.real(), WithinAbs(1.0, 1e-12));

  // antiderivative s / sqrt(1 + 4 s^2): endpoint values +-1/2
  auto algebraic = integrate_line([](double s) { return std::pow(1.0 + 4.0 * s * s, -1.5); });
  REQUIRE_THAT(algebraic.value.real(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("integrate_halfline on reference integrands", "[quadrature]") {
  REQUIRE_THAT(integrate_halfline([](double s) { return std::exp(-s); }).value.real(),
               WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(integrate_halfline([](double s) { return 1.0 / (1.0 + s * s); }).value.real(),
               WithinAbs(pi / 2.0, 1e-12));
}

TEST_CASE("even integrands: line equals twice the half-line", "[quadrature]") {
  auto even = [](double s) { return std::exp(-s * s) * std::cos(s); };
  const double full = integrate_line(even).value.real();
  const double half = integrate_halfline(even).value.real();
  REQUIRE_THAT(full, WithinRel(2.0 * half, 1e-11));
}

TEST_CASE("linearity within combined error estimates", "[quadrature]") {
  DeterministicRng rng(42);
  auto f = [](double s) { return std::complex<double>(1.0, s) / (1.0 + s * s * s * s); };
  auto g = [](double s) { return std::exp(-s * s) * std::complex<double>(std::cos(s), 0.3); };
  for (int rep = 0; rep < 5; ++rep) {
    const double a = rng.uniform(-2.0, 2.0);
    const double b = rng.uniform(-2.0, 2.0);
    auto combo = integrate_line([&](double s) { return a * f(s) + b * g(s); });
    auto fa = integrate_line(f);
    auto gb = integrate_line(g);
    const std::complex<double> expected = a * fa.value + b * gb.value;
    const double budget = combo.abs_error_estimate +
                          std::abs(a) * fa.abs_error_estimate +
                          std::abs(b) * gb.abs_error_estimate + 1e-14;
    REQUIRE(std::abs(combo.value - expected) <= 10.0 * budget);
  }
}

TEST_CASE("error-estimate honesty on known values", "[quadrature]") {
  struct Case {
    std::function<double(double)> f;
    double exact;
  };
  const std::vector<Case> battery = {
      {[](double s) { return 1.0 / (1.0 + s * s); }, pi},
      {[](double s) { return std::exp(-pi * s * s); }, 1.0},
      {[](double s) { return std::pow(1.0 + 4.0 * s * s, -1.5); }, 1.0},
      {[](double s) { return 1.0 / (4.0 + s * s); }, pi / 2.0},
      {[](double s) { return 1.0 / std::cosh(s); }, pi},
  };
  for (const auto& c : battery) {
    auto r = integrate_line(c.f);
    const double true_error = std::abs(r.value.real() - c.exact);
    INFO("true " << true_error << " estimate " << r.abs_error_estimate);
    REQUIRE(true_error <= 10.0 * r.abs_error_estimate + 1e-15);
    REQUIRE(r.abs_error_estimate <=
            std::max(1e-12, 1e-10 * std::abs(r.value)) + 1e-15);
  }
}

TEST_CASE("slowly decaying tails still converge", "[quadrature]") {
  // |s|^{-1.2} tail: int (1+s^2)^{-0.6} has a closed value via the
  // Beta function: B(1/2, 0.1) = Gamma(1/2)Gamma(0.1)/Gamma(0.6)
  const double expected = std::sqrt(pi) * std::tgamma(0.1) / std::tgamma(0.6);
  auto slow = [](double s) { return std::pow(1.0 + s * s, -0.6); };
  const auto r = integrate_line(slow, {1e-12, 1e-11, 400'000});
  REQUIRE_THAT(r.value.real(), WithinRel(expected, 1e-10));
}

TEST_CASE("budget exhaustion carries the best estimate", "[quadrature]") {
  // oscillation over |s| < 20 needs far more than 300 evaluations
  auto wiggle = [](double s) { return std::cos(40.0 * s) / (1.0 + s * s); };
  REQUIRE_THROWS_AS(integrate_line(wiggle, {1e-14, 1e-14, 300}), budget_exceeded_error);
  try {
    integrate_line(wiggle, {1e-14, 1e-14, 300});
  } catch (const budget_exceeded_error& e) {
    REQUIRE(std::isfinite(e.best_value.real()));
    REQUIRE(e.best_error > 0.0);
    REQUIRE(e.evaluations <= 300);
  }
}

TEST_CASE("principal_half_power basics", "[quadrature]") {
  REQUIRE(principal_half_power({1.0, 0.0}, 1) == std::complex<double>{1.0, 0.0});
  const std::complex<double> i{0.0, 1.0};
  REQUIRE_THAT(std::abs(principal_half_power(i, 2) - i), WithinAbs(0.0, 1e-15));
}

TEST_CASE("principal_half_power branch symmetry and square", "[quadrature]") {
  DeterministicRng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const std::complex<double> z{rng.uniform(0.05, 4.0), rng.uniform(-4.0, 4.0)};
    const int m = 1 + static_cast<int>(rng.uniform(0.0, 6.0));
    const auto conj_first = principal_half_power(std::conj(z), m);
    const auto conj_after = std::conj(principal_half_power(z, m));
    REQUIRE(std::abs(conj_first - conj_after) <= 1e-14 * std::abs(conj_first));

    const auto root = principal_half_power(z, 1);
    REQUIRE(std::abs(root * root - z) <= 1e-14 * std::abs(z));
  }
}

TEST_CASE("principal_half_power rejects the branch cut", "[quadrature]") {
  REQUIRE_THROWS_AS(principal_half_power({-1.0, 0.0}, 1), branch_cut_error);
  REQUIRE_THROWS_AS(principal_half_power({0.0, 0.0}, 1), branch_cut_error);
  REQUIRE_THROWS_AS(principal_half_power({-2.5, 0.0}, 3), branch_cut_error);
}

TEST_CASE("integrate_interval rejects empty intervals", "[quadrature]") {
  REQUIRE_THROWS_AS(integrate_interval([](double) { return 1.0; }, 1.0, 1.0),
                    std::domain_error);
}
