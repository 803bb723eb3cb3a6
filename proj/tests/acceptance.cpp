// Acceptance gate: one line per criterion, [PASS]/[FAIL] + detail, exit 0
// only when every criterion holds. Invoked as
//   acceptance <pdo-lab binary> <suite dir> <scratch dir>
// Criteria 1-13 run in process against the library; criterion 14 runs the
// command-line binary on the full suite twice and compares the reports.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "pdolab/grid.hpp"
#include "pdolab/lp_decomp.hpp"
#include "pdolab/maximal.hpp"
#include "pdolab/operators.hpp"
#include "pdolab/symbols.hpp"
#include "pdolab/verify.hpp"
#include "pdolab/weights.hpp"

using namespace pdolab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double now_s() {
  using clk = std::chrono::steady_clock;
  static const clk::time_point t0 = clk::now();
  return std::chrono::duration<double>(clk::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Run an inline suite; returns the result and throws nothing (config errors
// count as failure).
bool run_inline(const std::string& cfg_text, std::string& detail, double* secs = nullptr) {
  try {
    auto cfg = verify::parse_config(cfg_text);
    verify::RunOptions opt;
    double t0 = now_s();
    auto res = verify::run_suite(cfg, opt);
    if (secs) *secs = now_s() - t0;
    std::string bad;
    for (const auto& o : res.outcomes)
      if (o.gate && !o.pass) bad += (bad.empty() ? "" : ", ") + o.name;
    detail = bad.empty() ? fmt("%zu experiments passed", res.outcomes.size())
                         : "failing: " + bad;
    return res.pass;
  } catch (const std::exception& ex) {
    detail = std::string("error: ") + ex.what();
    return false;
  }
}

// --------------------------------------------------------------------------
// 1. dyadic shell partition and scale-flat derivative sups
// --------------------------------------------------------------------------
Outcome c01_shell_partition() {
  double t0 = now_s();
  const int K = 5;
  double worst_part = 0.0;
  for (int i = 0; i <= 40000; ++i) {
    double r = 64.0 * i / 40000.0;
    double sum = 0.0;
    for (int k = 0; k <= K; ++k) sum += lp::shell(k, r);
    worst_part = std::max(worst_part, std::abs(sum - lp::cutoff(r / std::pow(2.0, K))));
  }

  double worst_flat = 0.0;
  std::vector<std::vector<int>> alphas = {{1},    {2},    {1, 0}, {0, 1},
                                          {1, 1}, {2, 0}, {0, 2}};
  for (const auto& al : alphas) {
    int deg = 0;
    for (int a : al) deg += a;
    double lo = 1e300, hi = 0.0;
    // k >= 1: the dyadic shells are exact dilates of one another (the k = 0
    // ball piece has a different profile and is covered by the partition sum)
    for (int k = 1; k <= K; ++k) {
      double v = std::pow(2.0, k * deg) * lp::derivative_sup(k, al, 1);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    worst_flat = std::max(worst_flat, hi / lo - 1.0);
  }
  double secs = now_s() - t0;

  Outcome o;
  o.pass = worst_part <= 1e-12 && worst_flat <= 0.05 && secs < 5.0;
  o.detail = fmt("partition defect %.2e (<=1e-12), scale spread %.2e (<=5%%), %.2f s (<5)",
                 worst_part, worst_flat, secs);
  return o;
}

// --------------------------------------------------------------------------
// 2. shifted-lattice transforms: oracle, roundtrip, norm identity
// --------------------------------------------------------------------------
Outcome c02_transforms() {
  GridSpec g = GridSpec::make(1, 1, 16.0, 512);
  Field u = random_bandlimited(g, 1, 8.0, 2);
  Field F = forward_ft(u);

  double scale = 0.0, dev = 0.0;
  for (int k = 0; k < g.G; ++k) {
    cdouble acc = 0.0;
    double xk = g.xi(k);
    for (int j = 0; j < g.G; ++j)
      acc += u.v[static_cast<std::size_t>(j)] *
             std::polar(1.0, -xk * g.x(j));
    acc *= g.h();
    dev = std::max(dev, std::abs(F.v[static_cast<std::size_t>(k)] - acc));
    scale = std::max(scale, std::abs(acc));
  }
  double rel_fwd = dev / scale;

  Field back = inverse_ft(F);
  double rel_rt = 0.0, uscale = 0.0;
  for (std::size_t i = 0; i < u.v.size(); ++i) {
    rel_rt = std::max(rel_rt, std::abs(back.v[i] - u.v[i]));
    uscale = std::max(uscale, std::abs(u.v[i]));
  }
  rel_rt /= uscale;

  double nf = lp_norm(F, 2.0), nu = lp_norm(u, 2.0);
  double rel_pars = std::abs(nf - std::sqrt(2.0 * kPi) * nu) / nf;

  Outcome o;
  o.pass = rel_fwd <= 1e-10 && rel_rt <= 1e-10 && rel_pars <= 1e-12;
  o.detail = fmt("forward vs direct %.2e (<=1e-10), roundtrip %.2e (<=1e-10), "
                 "norm identity %.2e (<=1e-12)",
                 rel_fwd, rel_rt, rel_pars);
  return o;
}

// --------------------------------------------------------------------------
// 3. transform-norm inequality for kernels, five exponent tuples
// --------------------------------------------------------------------------
Outcome c03_kernel_norms() {
  const char* cfg = R"({
    "schema": 1, "seed": 3, "experiments": [
      {"name": "t2",  "kind": "hausdorff-young", "exponents": [2],    "G": 32, "trials": 200},
      {"name": "t1",  "kind": "hausdorff-young", "exponents": [1],    "G": 32, "trials": 200},
      {"name": "t21", "kind": "hausdorff-young", "exponents": [2, 1], "G": 32, "trials": 200},
      {"name": "t22", "kind": "hausdorff-young", "exponents": [2, 2], "G": 32, "trials": 200},
      {"name": "t11", "kind": "hausdorff-young", "exponents": [1, 1], "G": 32, "trials": 200}
    ]})";
  Outcome o;
  std::string d;
  o.pass = run_inline(cfg, d);
  o.detail = "200 trials per tuple, no ratio above 1 + 1e-8; " + d;
  return o;
}

// --------------------------------------------------------------------------
// 4. maximal function: classical value, brute agreement, majorant pairs
// --------------------------------------------------------------------------
Outcome c04_maximal() {
  GridSpec g = GridSpec::make(1, 1, 8.0, 256);
  Field ind(g, 1, Domain::Space);
  for (int j = 0; j < g.G; ++j)
    ind.v[static_cast<std::size_t>(j)] = (g.x(j) >= 0.0 && g.x(j) < 1.0) ? 1.0 : 0.0;
  Field m = maximal::apply(ind, 1.0);
  int jb = 0;
  double db = 1e30;
  for (int j = 0; j < g.G; ++j)
    if (std::abs(g.x(j) - 2.0) < db) { db = std::abs(g.x(j) - 2.0); jb = j; }
  double val = m.v[static_cast<std::size_t>(jb)].real();
  bool classical = std::abs(val - 0.5) <= 2.0 * g.h();

  double brute_dev = 0.0;
  {
    GridSpec g1 = GridSpec::make(1, 1, 8.0, 16);
    Field u1 = random_bandlimited(g1, 1, 3.0, 40);
    GridSpec g2 = GridSpec::make(2, 1, 4.0, 8);
    Field u2 = random_bandlimited(g2, 2, 2.0, 41);
    for (double p : {1.0, 2.0}) {
      Field a = maximal::apply(u1, p), b = maximal::apply_brute(u1, p);
      for (std::size_t i = 0; i < a.v.size(); ++i)
        brute_dev = std::max(brute_dev, std::abs(a.v[i] - b.v[i]));
      Field c = maximal::apply(u2, p), d = maximal::apply_brute(u2, p);
      for (std::size_t i = 0; i < c.v.size(); ++i)
        brute_dev = std::max(brute_dev, std::abs(c.v[i] - d.v[i]));
    }
  }

  int majorant_ok = 0;
  GridSpec gm = GridSpec::make(1, 1, 8.0, 128);
  for (int t = 0; t < 20; ++t) {
    Field u = random_bandlimited(gm, 1, 10.0, 100 + static_cast<std::uint64_t>(t));
    std::vector<double> prof(static_cast<std::size_t>(gm.G / 2 + 1));
    if (t % 2 == 0) {
      double w = 0.2 + 1.8 * t / 19.0;
      for (std::size_t r = 0; r < prof.size(); ++r) {
        double y = static_cast<double>(r) * gm.h();
        prof[r] = std::exp(-y * y / (2.0 * w * w));
      }
    } else {
      std::size_t R = static_cast<std::size_t>(t % 7 + 1);
      for (std::size_t r = 0; r < prof.size(); ++r) prof[r] = r <= R ? 1.0 : 0.0;
    }
    if (maximal::convolution_majorant_check(u, prof).pass) ++majorant_ok;
  }

  Outcome o;
  o.pass = classical && brute_dev <= 1e-12 && majorant_ok == 20;
  o.detail = fmt("value at 2: %.4f (0.5 +- %.4f), brute dev %.2e (<=1e-12), "
                 "majorant pairs %d/20",
                 val, 2.0 * g.h(), brute_dev, majorant_ok);
  return o;
}

// --------------------------------------------------------------------------
// 5. cube-average weight characteristics
// --------------------------------------------------------------------------
Outcome c05_weights() {
  GridSpec g = GridSpec::make(1, 1, 8.0, 32);
  WeightField ones = WeightField::ones(g, 1);
  bool unit = true;
  for (double p : {1.0, 2.0, 3.0}) unit = unit && weights::ap_constant(ones, p) == 1.0;

  GridSpec base = GridSpec::make(1, 1, 8.0, 128);
  auto good = [](std::span<const double> x) { return std::sqrt(std::abs(x[0])); };
  auto bad = [](std::span<const double> x) { return std::pow(std::abs(x[0]), -1.5); };
  auto sg = weights::ap_refinement_scan(good, base, 1, 2.0, 3, 2);
  auto sb = weights::ap_refinement_scan(bad, base, 1, 2.0, 3, 2);

  Outcome o;
  o.pass = unit && sg.growth <= 1.1 && sb.growth >= 2.0;
  o.detail = fmt("unit characteristic exact: %s; |x|^0.5 growth %.4f (<=1.1); "
                 "|x|^-1.5 growth %.4f (>=2)",
                 unit ? "yes" : "no", sg.growth, sb.growth);
  return o;
}

// --------------------------------------------------------------------------
// 6. pointwise maximal domination for three symbol families
// --------------------------------------------------------------------------
Outcome c06_pointwise() {
  const char* cfg = R"({
    "schema": 1, "seed": 6, "trials": 20, "experiments": [
      {"name": "oscillatory", "kind": "pointwise-maximal", "family": "oscillatory",
       "m": -0.8, "rho": 0.5, "ps": [2, 2], "grids": [64, 128, 256]},
      {"name": "rough-x", "kind": "pointwise-maximal", "family": "rough",
       "m": -0.8, "rho": 0.5, "ps": [2, 2], "cells": 64, "grids": [64, 128, 256]},
      {"name": "dyadic-piece", "kind": "pointwise-maximal", "family": "dyadic",
       "m": -0.8, "rho": 0.5, "ps": [2, 2], "shell_k": 3, "grids": [64, 128, 256]}
    ]})";
  Outcome o;
  std::string d;
  double secs = 0.0;
  bool pass = run_inline(cfg, d, &secs);
  o.pass = pass && secs < 180.0;
  o.detail = fmt("three families, 20 trials, ratio stability < 2 over G=64..256, "
                 "%.1f s (<180); ", secs) + d;
  return o;
}

// --------------------------------------------------------------------------
// 7. two-block mixed-norm bound for the linear operator
// --------------------------------------------------------------------------
Outcome c07_mixed_norm() {
  const char* cfg = R"({
    "schema": 1, "seed": 7, "trials": 20, "experiments": [
      {"name": "two-block", "kind": "mixed-norm-linear", "m": -0.967, "rho": 0.5,
       "qs": [2, 2], "maximal_p": 1.5, "grids": [32, 64]}
    ]})";
  Outcome o;
  std::string d;
  o.pass = run_inline(cfg, d);
  o.detail = "pointwise vs iterated block maximal and order-reversed norm, G <= 64; " + d;
  return o;
}

// --------------------------------------------------------------------------
// 8. weighted bounds for the linear operator, three exponent/weight configs
// --------------------------------------------------------------------------
Outcome c08_linear_weighted() {
  const char* cfg = R"({
    "schema": 1, "seed": 8, "trials": 20, "experiments": [
      {"name": "r1", "kind": "linear-weighted", "m": -0.55, "rho": 0.5,
       "q": 2, "r": 1, "weight_gamma": 0, "grids": [64, 128, 256]},
      {"name": "power", "kind": "linear-weighted", "m": -0.55, "rho": 0.5,
       "q": 4, "r": 1.3333333333333333, "weight_gamma": 0.5, "grids": [64, 128, 256]},
      {"name": "qinf", "kind": "linear-weighted", "m": -0.55, "rho": 0.5,
       "q": "inf", "r": 2, "weight_gamma": 0, "grids": [64, 128, 256]}
    ]})";
  Outcome o;
  std::string d;
  o.pass = run_inline(cfg, d);
  o.detail = "unweighted, power-weight, and q = infinity configurations; " + d;
  return o;
}

// --------------------------------------------------------------------------
// 9. critical-order surface: marked points and per-region affineness
// --------------------------------------------------------------------------
Outcome c09_thresholds() {
  const double inf = std::numeric_limits<double>::infinity();
  double worst_pt = 0.0;
  for (int n : {1, 2}) {
    for (double rho : {0.5, 0.3}) {
      double half = n * (rho - 1.0) / 2.0;
      double pts[6] = {
          verify::bilinear_order_strong(n, rho, 2.0, 2.0, 1.0) - half,
          verify::bilinear_order_strong(n, rho, inf, 2.0, 2.0) - half,
          verify::bilinear_order_strong(n, rho, 2.0, inf, 2.0) - half,
          verify::bilinear_order_strong(n, rho, inf, 1.0, 1.0) - 3.0 * half,
          verify::bilinear_order_strong(n, rho, 1.0, inf, 1.0) - 3.0 * half,
          verify::bilinear_order_strong(n, rho, inf, inf, inf) - 3.0 * half};
      for (double d : pts) worst_pt = std::max(worst_pt, std::abs(d));
    }
  }

  auto midgap = [](double p1, double q1, double r1, double p2, double q2, double r2) {
    int n = 1;
    double rho = 0.4;
    double want = 0.5 * (verify::bilinear_order_strong(n, rho, p1, q1, r1) +
                         verify::bilinear_order_strong(n, rho, p2, q2, r2));
    double ipm = 0.5 * (1 / p1 + 1 / p2), iqm = 0.5 * (1 / q1 + 1 / q2),
           irm = 0.5 * (1 / r1 + 1 / r2);
    return std::abs(verify::bilinear_order_strong(n, rho, 1 / ipm, 1 / iqm, 1 / irm) -
                    want);
  };
  double worst_mid = std::max(midgap(2.0, 2.0, 1.0, 2.5, 2.5, 1.25),
                              midgap(8.0, 8.0, 4.0, 16.0, 16.0, 8.0));

  Outcome o;
  o.pass = worst_pt <= 1e-15 && worst_mid <= 1e-12;
  o.detail = fmt("six marked points off by %.2e (<=1e-15), region midpoints %.2e (<=1e-12)",
                 worst_pt, worst_mid);
  return o;
}

// --------------------------------------------------------------------------
// 10. one-slot operator norm: iterative estimate vs exact supremum
// --------------------------------------------------------------------------
Outcome c10_snorm() {
  const char* cfg = R"({
    "schema": 1, "seed": 10, "experiments": [
      {"name": "sharp", "kind": "snorm-sharpness", "G": 32, "count": 10,
       "tol": 1e-6, "include_separable": true}
    ]})";
  Outcome o;
  std::string d;
  double secs = 0.0;
  bool pass = run_inline(cfg, d, &secs);
  o.pass = pass && secs < 30.0;
  o.detail = fmt("10 random symbols + separable, agreement 1e-6, %.1f s (<30); ", secs) + d;
  return o;
}

// --------------------------------------------------------------------------
// 11. transpose pairing identities
// --------------------------------------------------------------------------
Outcome c11_transposes() {
  const char* cfg = R"({
    "schema": 1, "seed": 11, "experiments": [
      {"name": "pairings", "kind": "transpose-duality", "G": 16, "trials": 20,
       "tol": 1e-10}
    ]})";
  Outcome o;
  std::string d;
  o.pass = run_inline(cfg, d);
  o.detail = "both pairing identities on 20 instances at 1e-10; " + d;
  return o;
}

// --------------------------------------------------------------------------
// 12. kernels: closed-form oracle and off-diagonal decay
// --------------------------------------------------------------------------
Outcome c12_kernels() {
  GridSpec g = GridSpec::make(1, 1, 10.0, 256);
  sym::SymbolModel gauss;
  gauss.n = 1;
  gauss.N = 1;
  gauss.m = -1.0;
  auto f = [](std::span<const double> Xi) -> cdouble {
    return std::exp(-Xi[0] * Xi[0]);
  };
  gauss.xifactor = f;
  gauss.eval = [f](std::span<const double>, std::span<const double> Xi) { return f(Xi); };
  Field K = op::kernel(gauss, g);
  double worst = 0.0;
  for (int mb = 0; mb < g.G; ++mb) {
    double y = g.sigma(mb) * g.h();
    double want = std::sqrt(kPi) / (2.0 * kPi) * std::exp(-0.25 * y * y);
    worst = std::max(worst, std::abs(K.v[static_cast<std::size_t>(mb)] - want));
  }

  GridSpec g2 = GridSpec::make(1, 2, 8.0, 256);
  auto osc = sym::osc_symbol(1, 2, -1.0, 0.5);
  Field K2 = op::kernel_truncated(osc, g2);
  auto fit = op::kernel_decay_fit(K2, 1.0, -1.0, 12);

  Outcome o;
  o.pass = worst <= 1e-8 && fit.bin_r.size() >= 8 && fit.slope <= -1.8;
  o.detail = fmt("Gaussian kernel error %.2e (<=1e-8); diagonal decay slope %.3f "
                 "(<= -1.8) over %zu bins",
                 worst, fit.slope, fit.bin_r.size());
  return o;
}

// --------------------------------------------------------------------------
// 13. locally square-summable symbol: global and unit-ball bounds
// --------------------------------------------------------------------------
Outcome c13_local() {
  const char* cfg = R"({
    "schema": 1, "seed": 13, "trials": 20, "experiments": [
      {"name": "local-ball", "kind": "bilinear-local", "grids": [64, 128],
       "modulated": true, "decay_power": 2}
    ]})";
  Outcome o;
  std::string d;
  o.pass = run_inline(cfg, d);
  o.detail = "finite local square functional, global product bound, five ball centers; " + d;
  return o;
}

// --------------------------------------------------------------------------
// 14. full suite through the command line: timing and reproducibility
// --------------------------------------------------------------------------
Outcome c14_full_suite(const std::string& bin, const std::string& suites,
                       const std::string& scratch) {
  Outcome o;
  fs::create_directories(scratch);
  std::string cfgp = suites + "/full.json";
  if (!fs::exists(cfgp)) {
    o.detail = "missing " + cfgp;
    return o;
  }
  auto invoke = [&](const std::string& out) {
    std::string cmd = bin + " run --config " + cfgp + " --out " + scratch + "/" + out +
                      " > " + scratch + "/" + out + ".log 2>&1";
    return std::system(cmd.c_str());
  };
  double t0 = now_s();
  int s1 = invoke("run1");
  double secs = now_s() - t0;
  int s2 = invoke("run2");
  if (s1 != 0 || s2 != 0) {
    o.detail = fmt("suite exit codes %d/%d (want 0/0), %.0f s", s1, s2, secs);
    return o;
  }
  std::string a = slurp(fs::path(scratch) / "run1" / "results.csv");
  std::string b = slurp(fs::path(scratch) / "run2" / "results.csv");
  bool identical = !a.empty() && a == b;
  o.pass = identical && secs < 600.0;
  o.detail = fmt("exit 0, %.0f s (<600), reports %s (%zu bytes)", secs,
                 identical ? "byte-identical" : "DIFFER", a.size());
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 4) {
    std::fprintf(stderr, "usage: acceptance <pdo-lab binary> <suite dir> <scratch dir>\n");
    return 2;
  }
  std::string bin = argv[1], suites = argv[2], scratch = argv[3];

  struct Entry {
    const char* label;
    std::function<Outcome()> fn;
  };
  std::vector<Entry> entries = {
      {"shell partition + scale-flat derivatives", c01_shell_partition},
      {"shifted-lattice transforms", c02_transforms},
      {"kernel transform-norm inequality", c03_kernel_norms},
      {"maximal function oracles", c04_maximal},
      {"weight characteristics", c05_weights},
      {"pointwise maximal domination", c06_pointwise},
      {"two-block mixed-norm bound", c07_mixed_norm},
      {"weighted linear bounds", c08_linear_weighted},
      {"critical-order surface", c09_thresholds},
      {"one-slot norm sharpness", c10_snorm},
      {"transpose pairings", c11_transposes},
      {"kernel oracle + decay", c12_kernels},
      {"local square-functional bounds", c13_local},
      {"full suite reproducibility",
       [&] { return c14_full_suite(bin, suites, scratch); }},
  };

  bool all = true;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Outcome o;
    try {
      o = entries[i].fn();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail = std::string("exception: ") + ex.what();
    }
    all = all && o.pass;
    std::printf("[%s] %02zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                entries[i].label, o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
