// Delta-calculus kernel on the saddle surface: compare the hyperbola
// line integral against the Bessel closed form at a few points, then
// show the logarithmic growth of the truncated K1.

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "hypex/saddle_kernel.hpp"

int main() {
  const double pi = std::numbers::pi;
  auto gauss4 = [pi](double a, double b, double c, double d) {
    return std::exp(-0.5 * pi * (a * a + b * b + c * c + d * d));
  };

  std::printf("Kg closed form vs line integral (B = 12):\n");
  const std::array<std::array<double, 4>, 3> points{{{1.0, 0.0, 0.0, 0.0},
                                                     {0.8, 0.3, -0.2, 0.5},
                                                     {0.1, 1.2, 0.4, -0.6}}};
  for (const auto& q : points) {
    const std::array<double, 2> eta{q[0], q[1]};
    const std::array<double, 2> nu{q[2], q[3]};
    const double closed = hypex::kg_closed(eta, nu);
    const double line = hypex::k_apply_line_integral(gauss4, eta, nu, 12.0).value.real();
    std::printf("  eta=(%.1f,%.1f) nu=(%.1f,%.1f): closed %.10e  line %.10e\n", q[0],
                q[1], q[2], q[3], closed, line);
  }

  std::printf("\ntruncated K1 at eta=(0.9,0.2), nu=(-0.1,-0.3):\n");
  for (double b : {8.0, 16.0, 32.0, 64.0})
    std::printf("  B = %4.0f: %.8f\n", b, hypex::truncated_k1({0.9, 0.2}, {-0.1, -0.3}, b));
  std::printf("(grows ~ log B: K1 is infinite without the cutoff)\n");

  std::printf("\n<K(g x g), g x g> via the factored outer integral: %.8f\n",
              hypex::k_pairing_gaussian_line(12.0));
  std::printf("4 pi^4                                            = %.8f\n",
              4.0 * std::pow(pi, 4.0));
  return 0;
}
