#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "hypex/deterministic_rng.hpp"
#include "hypex/gaussian_extension.hpp"

using namespace hypex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double pi = std::numbers::pi;

GridFunction gaussian_grid(double half_width, std::size_t n) {
  return GridFunction::sampled({{-half_width, half_width, n}, {-half_width, half_width, n}},
                               [](std::span<const double> xi) { return gaussian(xi); });
}
}  // namespace

TEST_CASE("gaussian point values and normalization", "[gaussian]") {
  const std::array<double, 2> origin{0.0, 0.0};
  REQUIRE_THAT(gaussian(origin), WithinAbs(1.0, 1e-15));
  const std::array<double, 1> at_e{std::sqrt(2.0 / pi)};
  REQUIRE_THAT(gaussian(at_e), WithinRel(std::exp(-1.0), 1e-14));

  for (int d = 1; d <= 3; ++d) REQUIRE_THAT(gaussian_lp_norm(d, 2.0), WithinAbs(1.0, 1e-15));

  // grid quadrature route for d = 1 and d = 2
  const GridFunction g1 = GridFunction::sampled(
      {{-6.0, 6.0, 201}}, [](std::span<const double> xi) {
        const double v = gaussian(xi);
        return v * v;
      });
  REQUIRE_THAT(integrate_grid(g1).real(), WithinAbs(1.0, 1e-12));
  const GridFunction g2 = GridFunction::sampled(
      {{-6.0, 6.0, 128}, {-6.0, 6.0, 128}}, [](std::span<const double> xi) {
        const double v = gaussian(xi);
        return v * v;
      });
  REQUIRE_THAT(integrate_grid(g2).real(), WithinAbs(1.0, 1e-10));
}

TEST_CASE("closed form at the origin", "[gaussian]") {
  const Signature s11(1, 1);
  const std::array<double, 2> x0{0.0, 0.0};
  REQUIRE_THAT(std::abs(extension_gaussian_closed(s11, x0, 0.0) - 2.0), WithinAbs(0.0, 1e-14));
  const Signature s21(2, 1);
  const std::array<double, 3> y0{0.0, 0.0, 0.0};
  REQUIRE_THAT(extension_gaussian_closed(s21, y0, 0.0).real(),
               WithinRel(std::pow(2.0, 1.5), 1e-14));
}

TEST_CASE("modulus identity at 100 seeded points", "[gaussian]") {
  DeterministicRng rng(2024);
  const Signature s11(1, 1);
  const Signature s21(2, 1);
  for (int i = 0; i < 100; ++i) {
    const double t = rng.uniform(-3.0, 3.0);
    {
      const std::array<double, 2> x{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
      const double closed = std::abs(extension_gaussian_closed(s11, x, t));
      REQUIRE_THAT(closed, WithinRel(extension_abs_gaussian(2, x, t), 1e-12));
    }
    {
      const std::array<double, 3> x{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0),
                                    rng.uniform(-3.0, 3.0)};
      const double closed = std::abs(extension_gaussian_closed(s21, x, t));
      REQUIRE_THAT(closed, WithinRel(extension_abs_gaussian(3, x, t), 1e-12));
    }
  }
}

TEST_CASE("modulus is signature independent", "[gaussian]") {
  DeterministicRng rng(5);
  for (int i = 0; i < 20; ++i) {
    const std::array<double, 3> x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                                  rng.uniform(-2.0, 2.0)};
    const std::array<double, 3> mirrored{x[2], x[1], x[0]};
    const double t = rng.uniform(-2.0, 2.0);
    REQUIRE_THAT(std::abs(extension_gaussian_closed(Signature(2, 1), x, t)),
                 WithinRel(std::abs(extension_gaussian_closed(Signature(1, 2), mirrored, t)),
                           1e-12));
  }
}

TEST_CASE("sign-flip symmetry conjugates the closed form", "[gaussian]") {
  DeterministicRng rng(6);
  for (int i = 0; i < 20; ++i) {
    const std::array<double, 3> x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                                  rng.uniform(-2.0, 2.0)};
    const std::array<double, 3> mirrored{x[2], x[1], x[0]};
    const double t = rng.uniform(-2.0, 2.0);
    const auto direct = extension_gaussian_closed(Signature(2, 1), x, t);
    // flip (2,1)->(1,2) on mirrored coordinates: Q -> -Q, so the value
    // at the same t conjugates and the value at -t is recovered exactly
    const auto flipped_same_t = extension_gaussian_closed(Signature(1, 2), mirrored, t);
    REQUIRE(std::abs(flipped_same_t - std::conj(direct)) <= 1e-12 * std::abs(direct));
    const auto flipped_neg_t = extension_gaussian_closed(Signature(1, 2), mirrored, -t);
    REQUIRE(std::abs(flipped_neg_t - direct) <= 1e-12 * std::abs(direct));
  }
  // d+ = d-: swapping the two coordinate blocks conjugates at fixed t
  for (int i = 0; i < 20; ++i) {
    const std::array<double, 2> x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    const std::array<double, 2> swapped{x[1], x[0]};
    const double t = rng.uniform(-2.0, 2.0);
    const auto a = extension_gaussian_closed(Signature(1, 1), x, t);
    const auto b = extension_gaussian_closed(Signature(1, 1), swapped, t);
    REQUIRE(std::abs(b - std::conj(a)) <= 1e-12 * std::abs(a));
  }
}

TEST_CASE("large-t decay of the modulus", "[gaussian]") {
  const std::array<double, 2> x0{0.0, 0.0};
  for (int d : {1, 2, 3}) {
    std::vector<double> zero(static_cast<std::size_t>(d), 0.0);
    const double value = extension_abs_gaussian(d, zero, 1e3);
    REQUIRE_THAT(value, WithinRel(std::pow(pi / 1e3, 0.5 * d), 0.01));
  }
  REQUIRE_THAT(extension_abs_gaussian(2, x0, 1.5),
               WithinRel(std::pow(0.25 + 2.25 / (pi * pi), -0.5), 1e-13));
}

TEST_CASE("numeric extension matches the closed form at seeded points", "[gaussian]") {
  const GridFunction g = gaussian_grid(6.0, 128);
  const Signature s11(1, 1);
  DeterministicRng rng(2025);
  const std::array<double, 2> x0{0.0, 0.0};
  REQUIRE_THAT(std::abs(extension_numeric(g, s11, x0, 0.0) - 2.0), WithinAbs(0.0, 1e-8));
  for (int i = 0; i < 20; ++i) {
    const std::array<double, 2> x{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    const double t = rng.uniform(-2.0, 2.0);
    const auto numeric = extension_numeric(g, s11, x, t);
    const auto closed = extension_gaussian_closed(s11, x, t);
    REQUIRE(std::abs(numeric - closed) <= 1e-6 * std::abs(closed));
  }
}

TEST_CASE("Nyquist guard rejects unresolvable phases", "[gaussian]") {
  const GridFunction coarse = gaussian_grid(6.0, 24);
  const Signature s11(1, 1);
  const std::array<double, 2> x{0.0, 0.0};
  REQUIRE_THROWS_AS(extension_numeric(coarse, s11, x, 10.0), resolution_error);
  const std::array<double, 2> far{40.0, 0.0};
  REQUIRE_THROWS_AS(extension_numeric(coarse, s11, far, 0.0), resolution_error);
}

TEST_CASE("numeric extension is linear in f", "[gaussian]") {
  const GridFunction g = gaussian_grid(6.0, 64);
  const GridFunction h = GridFunction::sampled(
      {{-6.0, 6.0, 64}, {-6.0, 6.0, 64}}, [](std::span<const double> xi) {
        return xi[0] * std::exp(-(xi[0] * xi[0] + xi[1] * xi[1]));
      });
  GridFunction combo = g;
  combo *= 2.0;
  combo.axpy(std::complex<double>(0.0, -1.5), h);
  const Signature s11(1, 1);
  const std::array<double, 2> x{0.7, -1.1};
  const double t = 0.9;
  const auto lhs = extension_numeric(combo, s11, x, t);
  const auto rhs = 2.0 * extension_numeric(g, s11, x, t) +
                   std::complex<double>(0.0, -1.5) * extension_numeric(h, s11, x, t);
  REQUIRE(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
}

TEST_CASE("modulation shifts the extension exactly on the grid", "[gaussian]") {
  const GridFunction g = gaussian_grid(6.0, 64);
  const std::array<double, 2> a{0.8, -0.3};
  GridFunction modulated = g;
  {
    std::vector<std::size_t> idx(2, 0);
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
      const double phase = a[0] * g.axis(0).coord(idx[0]) + a[1] * g.axis(1).coord(idx[1]);
      modulated[flat] *= std::complex<double>(std::cos(phase), std::sin(phase));
      g.advance(idx);
    }
  }
  const Signature s11(1, 1);
  const std::array<double, 2> x{0.4, 0.6};
  const std::array<double, 2> shifted{x[0] + a[0], x[1] + a[1]};
  const double t = 0.7;
  const auto lhs = extension_numeric(modulated, s11, x, t);
  const auto rhs = extension_numeric(g, s11, shifted, t);
  REQUIRE(std::abs(lhs - rhs) <= 1e-13 * std::abs(rhs));
}

TEST_CASE("reduced Strichartz norm of the Gaussian", "[gaussian]") {
  const double target = 4.0 * std::pow(pi, 4.0);
  REQUIRE_THAT(gaussian_strichartz_norm(2, 4.0, {1e-13, 1e-13, 1'000'000}),
               WithinRel(target, 1e-12));
  REQUIRE_THROWS_AS(gaussian_strichartz_norm(2, 3.0), std::domain_error);
  REQUIRE_THROWS_AS(gaussian_strichartz_norm(2, 2.99999), std::domain_error);

  // finite and continuous above the threshold
  double previous = gaussian_strichartz_norm(2, 3.2);
  REQUIRE(std::isfinite(previous));
  for (double q = 3.3; q < 5.01; q += 0.1) {
    const double value = gaussian_strichartz_norm(2, q);
    REQUIRE(std::isfinite(value));
    REQUIRE(value > 0.0);
    previous = value;
  }
}

TEST_CASE("3-D grid route with measured tail agrees within 1%", "[gaussian][slow]") {
  const double target = 4.0 * std::pow(pi, 4.0);
  const GridNormReport rep = gaussian_strichartz_norm_grid_d2(4.0, 8.0, 6.0, 97, 97);
  REQUIRE(rep.grid_part > 0.0);
  REQUIRE(rep.tail_part > 0.0);
  REQUIRE(rep.tail_part < rep.grid_part);
  REQUIRE_THAT(rep.value(), WithinRel(target, 0.01));
}
