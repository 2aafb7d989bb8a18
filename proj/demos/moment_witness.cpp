// Minimal library usage: sweep the moment sequence for a signature and
// report the first index that certifies the Gaussian is not a critical
// point.
//
//   ./demo_moment_witness [d_plus] [d_minus] [p] [k_max]

#include <cstdio>
#include <cstdlib>

#include "hypex/euler_lagrange.hpp"
#include "hypex/exponents.hpp"

int main(int argc, char** argv) {
  const int d_plus = argc > 1 ? std::atoi(argv[1]) : 2;
  const int d_minus = argc > 2 ? std::atoi(argv[2]) : 1;
  const double p = argc > 3 ? std::atof(argv[3]) : 2.0;
  const int k_max = argc > 4 ? std::atoi(argv[4]) : 5;

  try {
    const hypex::Signature sig(d_plus, d_minus);
    std::printf("signature (%d,%d), p = %g, q = %g\n", d_plus, d_minus, p,
                hypex::strichartz_q(p, sig.dimension()));
    int witness = -1;
    for (const auto& m : hypex::moment_sweep(k_max, p, sig)) {
      std::printf("  M_%d = % .12e + % .2ei  (err %.2e)%s\n", m.k, m.value.real(),
                  m.value.imag(), m.abs_error,
                  m.nonzero_at_tolerance ? "  nonzero" : "");
      if (witness < 0 && m.nonzero_at_tolerance) witness = m.k;
    }
    if (witness > 0)
      std::printf("first nonzero moment: k = %d -> the Gaussian is not a critical point\n",
                  witness);
    else
      std::printf("no nonzero moment up to k = %d (inconclusive at tolerance)\n", k_max);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
