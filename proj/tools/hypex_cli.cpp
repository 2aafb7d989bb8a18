// hypex command-line front door: one subcommand per family of checks,
// machine-readable CSV / JSON-lines output, fully seeded sampling.
//
// Exit codes: 0 = claim witnessed, 2 = usage error, 3 = inconclusive at
// tolerance, 4 = numerical budget exceeded / resolution loss.

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "hypex/deterministic_rng.hpp"
#include "hypex/euler_lagrange.hpp"
#include "hypex/exponents.hpp"
#include "hypex/extremizer_search.hpp"
#include "hypex/gaussian_extension.hpp"
#include "hypex/grid_function.hpp"
#include "hypex/quadrature.hpp"
#include "hypex/saddle_kernel.hpp"

namespace {

constexpr int kExitWitnessed = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInconclusive = 3;
constexpr int kExitBudget = 4;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Output {
  std::unique_ptr<std::ofstream> file;
  std::ostream* os = &std::cout;

  void open(const std::string& path) {
    if (path.empty()) return;
    file = std::make_unique<std::ofstream>(path);
    if (!*file) throw std::runtime_error("cannot open output file: " + path);
    os = file.get();
  }
  std::ostream& stream() { return *os; }
};

struct CommonOpts {
  int d_plus = 1;
  int d_minus = 1;
  double p = 2.0;
  int kmax = 5;
  double tol_abs = 1e-12;
  double tol_rel = 1e-10;
  std::size_t grid_n = 64;
  double grid_box = 6.0;
  double cutoff_b = 12.0;
  double cutoff_y = 40.0;
  double t_max = 8.0;
  std::size_t t_slices = 129;
  std::size_t iters = 200;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string format = "csv";
};

void emit_header(std::ostream& os, const std::string& cmd, const CommonOpts& o) {
  os << "# hypex " << cmd << "\n";
  os << "# d_plus=" << o.d_plus << " d_minus=" << o.d_minus << " p=" << fmt(o.p)
     << " kmax=" << o.kmax << "\n";
  os << "# tol_abs=" << fmt(o.tol_abs) << " tol_rel=" << fmt(o.tol_rel)
     << " grid_n=" << o.grid_n << " grid_box=" << fmt(o.grid_box) << "\n";
  os << "# cutoff_b=" << fmt(o.cutoff_b) << " cutoff_y=" << fmt(o.cutoff_y)
     << " t_max=" << fmt(o.t_max) << " t_slices=" << o.t_slices << " iters=" << o.iters
     << " seed=" << o.seed << "\n";
}

int cmd_critical_exponent(int d, Output& out) {
  const double p_d = hypex::critical_exponent(d);
  const double q_d = hypex::strichartz_q(p_d, d);
  const double kap = hypex::kappa(d);
  const double p_bis = hypex::critical_exponent_bisection(d);
  const double residual = std::abs(p_d - p_bis);
  const bool in_range = hypex::admissible_range(d).contains(p_d);
  auto& os = out.stream();
  os << "d,p_d,q_d,kappa_d,bisection_residual,in_admissible_range\n";
  os << d << "," << fmt(p_d) << "," << fmt(q_d) << "," << fmt(kap) << ","
     << fmt(residual) << "," << (in_range ? 1 : 0) << "\n";
  return residual < 1e-12 && in_range ? kExitWitnessed : kExitInconclusive;
}

int cmd_moments(const CommonOpts& o, bool diagonal, Output& out) {
  const hypex::Signature sig(o.d_plus, o.d_minus);
  const hypex::QuadTol tol{o.tol_abs, o.tol_rel, 1'000'000};
  std::vector<hypex::MomentReport> reports;
  if (diagonal) {
    reports = hypex::diagonal_sweep(o.kmax, sig.dimension(), sig, tol);
  } else {
    reports = hypex::moment_sweep(o.kmax, o.p, sig, tol);
  }
  auto& os = out.stream();
  bool witnessed = false;
  if (o.format == "jsonl") {
    for (const auto& r : reports) {
      os << "{\"k\":" << r.k << ",\"re\":" << fmt(r.value.real())
         << ",\"im\":" << fmt(r.value.imag()) << ",\"abs_error\":" << fmt(r.abs_error)
         << ",\"nonzero\":" << (r.nonzero_at_tolerance ? "true" : "false") << "}\n";
      witnessed = witnessed || r.nonzero_at_tolerance;
    }
    return witnessed ? kExitWitnessed : kExitInconclusive;
  }
  emit_header(os, diagonal ? "moments --diagonal" : "moments", o);
  os << "k,re,im,abs_error,nonzero\n";
  for (const auto& r : reports) {
    os << r.k << "," << fmt(r.value.real()) << "," << fmt(r.value.imag()) << ","
       << fmt(r.abs_error) << "," << (r.nonzero_at_tolerance ? 1 : 0) << "\n";
    witnessed = witnessed || r.nonzero_at_tolerance;
  }
  return witnessed ? kExitWitnessed : kExitInconclusive;
}

int cmd_residual(const CommonOpts& o, const std::vector<std::array<double, 2>>& samples,
                 Output& out) {
  const hypex::Signature sig(o.d_plus, o.d_minus);
  const hypex::QuadTol tol{o.tol_abs, o.tol_rel, 1'000'000};
  const hypex::CriticalityReport rep =
      hypex::criticality_residual(o.p, sig, samples, tol);
  auto& os = out.stream();
  emit_header(os, "residual", o);
  os << "r_plus,r_minus\n";
  for (const auto& s : rep.sample_points)
    os << fmt(s[0]) << "," << fmt(s[1]) << "\n";
  os << "lambda_re,lambda_im,residual,combined_error\n";
  os << fmt(rep.lambda_estimate.real()) << "," << fmt(rep.lambda_estimate.imag()) << ","
     << fmt(rep.residual) << "," << fmt(rep.combined_error) << "\n";
  return rep.residual > 10.0 * rep.combined_error ? kExitWitnessed : kExitInconclusive;
}

hypex::GridFunction seeded_smooth_f4(const std::vector<hypex::GridAxis>& axes,
                                     hypex::DeterministicRng& rng) {
  std::array<double, 6> c{};
  for (auto& v : c) v = rng.uniform(-1.0, 1.0);
  return hypex::GridFunction::sampled(axes, [c](std::span<const double> x) {
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
    const double poly = c[0] + c[1] * x[0] + c[2] * x[1] + c[3] * x[2] + c[4] * x[3] +
                        c[5] * x[0] * x[2];
    return poly * std::exp(-0.5 * std::numbers::pi * r2);
  });
}

int cmd_saddle_kernel(const CommonOpts& o, Output& out) {
  hypex::DeterministicRng rng(o.seed);
  auto& os = out.stream();
  emit_header(os, "saddle --check kernel", o);
  os << "eta1,eta2,nu1,nu2,closed,line_integral,rel_error\n";
  auto gauss4 = [](double a, double b, double cc, double dd) {
    return std::exp(-0.5 * std::numbers::pi * (a * a + b * b + cc * cc + dd * dd));
  };
  double max_rel = 0.0;
  for (int i = 0; i < 10; ++i) {
    std::array<double, 2> eta{}, nu{};
    double c = 0.0;
    do {
      for (auto& v : eta) v = rng.uniform(-1.5, 1.5);
      for (auto& v : nu) v = rng.uniform(-1.5, 1.5);
      const double d1 = eta[0] - nu[0], d2 = eta[1] - nu[1];
      c = 0.5 * (d1 * d1 - d2 * d2);
    } while (std::abs(c) < 0.05);
    const double closed = hypex::kg_closed(eta, nu);
    const double line =
        hypex::k_apply_line_integral(gauss4, eta, nu, o.cutoff_b).value.real();
    const double rel = std::abs(line - closed) / std::abs(closed);
    max_rel = std::max(max_rel, rel);
    os << fmt(eta[0]) << "," << fmt(eta[1]) << "," << fmt(nu[0]) << "," << fmt(nu[1])
       << "," << fmt(closed) << "," << fmt(line) << "," << fmt(rel) << "\n";
  }
  os << "max_rel_error," << fmt(max_rel) << "\n";
  return max_rel <= 1e-4 ? kExitWitnessed : kExitInconclusive;
}

// Log-slope fit across cutoff doublings; returns {mean slope, dispersion}.
std::array<double, 2> log_slope(const std::vector<double>& values) {
  std::vector<double> slopes;
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    slopes.push_back((values[i + 1] - values[i]) / std::numbers::ln2);
  double mean = 0.0;
  for (double s : slopes) mean += s;
  mean /= static_cast<double>(slopes.size());
  double lo = slopes[0], hi = slopes[0];
  for (double s : slopes) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {mean, (hi - lo) / std::abs(mean)};
}

int cmd_saddle_divergence(const CommonOpts& o, Output& out) {
  auto& os = out.stream();
  emit_header(os, "saddle --check divergence", o);
  const std::array<double, 2> eta{0.9, 0.2};
  const std::array<double, 2> nu{-0.1, -0.3};

  os << "cutoff_b,truncated_k1\n";
  std::vector<double> k1_values;
  for (double b : {8.0, 16.0, 32.0, 64.0}) {
    k1_values.push_back(hypex::truncated_k1(eta, nu, b));
    os << fmt(b) << "," << fmt(k1_values.back()) << "\n";
  }
  const auto k1_fit = log_slope(k1_values);
  os << "k1_log_slope," << fmt(k1_fit[0]) << ",dispersion," << fmt(k1_fit[1]) << "\n";

  os << "cutoff_y,truncated_kg_l2\n";
  std::vector<double> kg_values;
  for (double y : {10.0, 20.0, 40.0, 80.0}) {
    kg_values.push_back(hypex::truncated_kg_l2(y));
    os << fmt(y) << "," << fmt(kg_values.back()) << "\n";
  }
  const auto kg_fit = log_slope(kg_values);
  os << "kg_l2_log_slope," << fmt(kg_fit[0]) << ",dispersion," << fmt(kg_fit[1]) << "\n";

  const bool ok = k1_fit[0] > 0.0 && k1_fit[1] <= 0.10 && kg_fit[0] > 0.0 &&
                  kg_fit[1] <= 0.10;
  return ok ? kExitWitnessed : kExitInconclusive;
}

int cmd_saddle_symmetry(const CommonOpts& o, Output& out) {
  hypex::DeterministicRng rng(o.seed);
  auto& os = out.stream();
  emit_header(os, "saddle --check symmetry", o);
  const std::size_t n = o.grid_n > 4 ? std::min<std::size_t>(o.grid_n, 20) : 16;
  const hypex::GridAxis ax{-o.grid_box / 2.0, o.grid_box / 2.0, n};
  const std::vector<hypex::GridAxis> axes{ax, ax, ax, ax};
  os << "case,involution_exact,orthogonality,identity_rel_error\n";
  bool ok = true;
  for (int rep = 0; rep < 3; ++rep) {
    const hypex::GridFunction f = seeded_smooth_f4(axes, rng);
    const hypex::GridFunction rr = hypex::reflection_R(hypex::reflection_R(f));
    bool involution = true;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (rr[i] != f[i]) involution = false;
    const auto [f1, f2] = hypex::symmetric_decompose(f);
    const double orth =
        std::abs(hypex::grid_inner_product(f1, f2)) /
        std::max(1e-300, hypex::grid_l2_norm(f1) * hypex::grid_l2_norm(f2));
    const auto p_f = hypex::k_pairing(f, o.cutoff_b);
    const auto p_f1 = hypex::k_pairing(f1, o.cutoff_b);
    const double identity = std::abs(p_f.value - p_f1.value) / std::abs(p_f.value);
    os << rep << "," << (involution ? 1 : 0) << "," << fmt(orth) << "," << fmt(identity)
       << "\n";
    ok = ok && involution && orth <= 1e-10 && identity <= 1e-6;
  }
  return ok ? kExitWitnessed : kExitInconclusive;
}

int cmd_saddle_norm(const CommonOpts& o, std::size_t pairing_n, Output& out) {
  auto& os = out.stream();
  emit_header(os, "saddle --check norm", o);
  // Distinct counts on the two axis pairs keep grid nodes off the
  // degenerate level c = 0 except on the exact diagonal.
  const hypex::GridAxis ax13{-3.0, 3.0, pairing_n};
  const hypex::GridAxis ax24{-3.0, 3.0, pairing_n + 1};
  hypex::GridFunction f({ax13, ax24, ax13, ax24});
  {
    std::vector<std::size_t> idx(4, 0);
    std::array<double, 4> x{};
    for (std::size_t flat = 0; flat < f.size(); ++flat) {
      for (int k = 0; k < 4; ++k) x[k] = f.axis(k).coord(idx[k]);
      f[flat] = std::exp(-0.5 * std::numbers::pi *
                         (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]));
      f.advance(idx);
    }
  }
  const auto rep = hypex::k_pairing(f, o.cutoff_b);
  const double target = 4.0 * std::pow(std::numbers::pi, 4.0);
  const double rel = std::abs(rep.value - target) / target;
  const double factored = hypex::k_pairing_gaussian_line(o.cutoff_b);
  os << "pairing,target,rel_deviation,singular_nodes_skipped,factored_outer_reference\n";
  os << fmt(rep.value) << "," << fmt(target) << "," << fmt(rel) << ","
     << rep.singular_nodes_skipped << "," << fmt(factored) << "\n";
  return rel <= 0.02 ? kExitWitnessed : kExitInconclusive;
}

int cmd_search(const CommonOpts& o, bool csv_requested, Output& out) {
  if (o.grid_n < 4) throw CLI::ValidationError("--grid-n", "need at least 4 grid points");
  const hypex::GridAxis ax{-o.grid_box, o.grid_box, o.grid_n};
  const hypex::GridFunction g0 = hypex::GridFunction::sampled(
      {ax, ax}, [](std::span<const double> xi) { return hypex::gaussian(xi); });
  hypex::SliceConfig cfg;
  cfg.t_max = o.t_max;
  cfg.t_slices = o.t_slices;
  const hypex::AscentReport rep = hypex::ascend(g0, o.iters, 0.1, 1e-10, cfg);
  auto& os = out.stream();
  if (csv_requested) {
    // the trace is primarily a JSON-lines artifact; CSV on request
    os << "iter,lambda,step,gradient_norm\n";
    for (std::size_t i = 0; i < rep.iterations; ++i)
      os << i + 1 << "," << fmt(rep.lambda_trace[i + 1]) << ","
         << fmt(rep.step_trace[i]) << "," << fmt(rep.gradient_norm_trace[i]) << "\n";
    os << "# lambda_gaussian=" << fmt(rep.lambda_gaussian)
       << " lambda_final=" << fmt(rep.lambda_trace.back())
       << " improved=" << (rep.improved_over_gaussian ? 1 : 0) << "\n";
  } else {
    hypex::write_ascent_jsonl(os, rep);
  }
  if (!o.out_path.empty()) {
    std::ofstream grid_os(o.out_path + ".grid");
    rep.final_f.save(grid_os);
  }
  if (o.iters == 0) return kExitWitnessed;  // echo of Lambda(f0)
  return rep.improved_over_gaussian ? kExitWitnessed : kExitInconclusive;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypex: Fourier extension numerics on hyperbolic paraboloids"};
  app.require_subcommand(1);

  CommonOpts o;
  int d_for_exponent = 3;
  bool diagonal = false;
  std::string saddle_check = "kernel";
  std::vector<std::string> sample_args;

  auto add_common = [&o](CLI::App* cmd) {
    cmd->add_option("--d-plus", o.d_plus, "count of +1 signs");
    cmd->add_option("--d-minus", o.d_minus, "count of -1 signs");
    cmd->add_option("--p", o.p, "Lebesgue input exponent");
    cmd->add_option("--kmax", o.kmax, "largest moment index");
    cmd->add_option("--tol-abs", o.tol_abs, "absolute quadrature tolerance");
    cmd->add_option("--tol-rel", o.tol_rel, "relative quadrature tolerance");
    cmd->add_option("--grid-n", o.grid_n, "samples per grid axis");
    cmd->add_option("--grid-box", o.grid_box, "grid half-width");
    cmd->add_option("--cutoff-b", o.cutoff_b, "hyperbola cutoff B");
    cmd->add_option("--cutoff-y", o.cutoff_y, "L2 divergence cutoff Y");
    cmd->add_option("--t-max", o.t_max, "t-integration half-width");
    cmd->add_option("--t-slices", o.t_slices, "number of t slices");
    cmd->add_option("--iters", o.iters, "ascent iteration cap");
    cmd->add_option("--seed", o.seed, "seed for pseudo-random sampling");
    cmd->add_option("--out", o.out_path, "output path (default: stdout)");
    cmd->add_option("--format", o.format, "csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
  };

  CLI::App* ce = app.add_subcommand("critical-exponent",
                                    "p_d, q_d, kappa_d and the bisection cross-check");
  ce->add_option("--d", d_for_exponent, "dimension (>= 2)")->required();
  add_common(ce);

  CLI::App* mo = app.add_subcommand("moments", "moment sweep M_k, k = 1..kmax");
  mo->add_flag("--diagonal", diagonal, "diagonal moments at p = p_d");
  add_common(mo);

  CLI::App* re = app.add_subcommand("residual", "Euler-Lagrange residual over samples");
  re->add_option("--sample", sample_args, "sample point 'r_plus,r_minus' (repeatable)");
  add_common(re);

  CLI::App* sa = app.add_subcommand("saddle", "d=2 saddle kernel diagnostics");
  sa->add_option("--check", saddle_check, "kernel | divergence | symmetry | norm")
      ->check(CLI::IsMember({"kernel", "divergence", "symmetry", "norm"}));
  add_common(sa);
  CLI::Option* grid_opt = sa->get_option("--grid-n");

  CLI::App* se = app.add_subcommand("search", "extremizer ascent from the Gaussian");
  add_common(se);
  CLI::Option* search_format_opt = se->get_option("--format");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    Output out;
    out.open(o.out_path);
    if (ce->parsed()) return cmd_critical_exponent(d_for_exponent, out);
    if (mo->parsed()) return cmd_moments(o, diagonal, out);
    if (re->parsed()) {
      std::vector<std::array<double, 2>> samples{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
      if (!sample_args.empty()) {
        samples.clear();
        for (const auto& s : sample_args) {
          std::array<double, 2> pt{};
          if (std::sscanf(s.c_str(), "%lf,%lf", &pt[0], &pt[1]) != 2)
            throw std::domain_error("--sample expects 'r_plus,r_minus'");
          samples.push_back(pt);
        }
      }
      return cmd_residual(o, samples, out);
    }
    if (sa->parsed()) {
      if (saddle_check == "kernel") return cmd_saddle_kernel(o, out);
      if (saddle_check == "divergence") return cmd_saddle_divergence(o, out);
      if (saddle_check == "symmetry") return cmd_saddle_symmetry(o, out);
      // 32/33 meets the 2% pairing target; --grid-n overrides
      const std::size_t pairing_n = grid_opt->count() > 0 ? o.grid_n : 32;
      return cmd_saddle_norm(o, pairing_n, out);
    }
    if (se->parsed())
      return cmd_search(o, search_format_opt->count() > 0 && o.format == "csv", out);
  } catch (const hypex::budget_exceeded_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const hypex::resolution_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
