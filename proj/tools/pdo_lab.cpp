// pdo-lab: batch driver for the operator-bound laboratory.
//
// Subcommands:
//   run             execute a JSON experiment suite, emit JSON + CSV reports
//   threshold       print the critical symbol order for a bound family
//   kernel-decay    fit the off-diagonal decay rate of a symbol's kernel
//   seminorms       scale-stability scan of symbol-class seminorms
//   snorm-sharpness compare the iterated operator norm of the one-slot
//                   bilinear map against its exact multiplier supremum
#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "pdolab/grid.hpp"
#include "pdolab/operators.hpp"
#include "pdolab/report.hpp"
#include "pdolab/rng.hpp"
#include "pdolab/symbols.hpp"
#include "pdolab/verify.hpp"

namespace fs = std::filesystem;
using namespace pdolab;

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::uint64_t seed, bool has_seed, int grid, int jobs, bool plot_data) {
  std::ifstream in(config_path);
  if (!in) {
    std::fprintf(stderr, "error: cannot open config '%s'\n", config_path.c_str());
    return 2;
  }
  std::stringstream ss;
  ss << in.rdbuf();

  verify::SuiteConfig cfg;
  try {
    cfg = verify::parse_config(ss.str());
  } catch (const verify::ConfigError& ex) {
    std::fprintf(stderr, "config error: %s\n", ex.what());
    return 2;
  }

  verify::RunOptions opt;
  opt.seed_override = seed;
  opt.has_seed_override = has_seed;
  opt.grid_override = grid;
  opt.jobs = jobs;

  report::SuiteResult res;
  try {
    res = verify::run_suite(cfg, opt);
  } catch (const verify::ConfigError& ex) {
    std::fprintf(stderr, "config error: %s\n", ex.what());
    return 2;
  }

  fs::create_directories(out_dir);
  report::write_csv(out_dir + "/results.csv", res);
  report::write_json(out_dir + "/results.json", res, cfg.echo);
  if (plot_data) {
    for (const auto& o : res.outcomes) {
      std::ofstream pd(out_dir + "/" + o.name + ".dat");
      pd << "# G sup_ratio\n";
      for (std::size_t i = 0; i < o.grids.size(); ++i)
        pd << o.grids[i] << " " << o.sup_ratio[i] << "\n";
    }
  }

  for (const auto& o : res.outcomes)
    std::printf("%-28s %-20s %s%s  %s\n", o.name.c_str(), o.kind.c_str(),
                o.pass ? "pass" : "FAIL", o.gate ? "" : " (ungated)",
                o.detail.c_str());
  std::printf("suite: %s in %.1f s (%zu experiments) -> %s\n",
              res.pass ? "pass" : "FAIL", res.runtime_s, res.outcomes.size(),
              out_dir.c_str());
  return res.pass ? 0 : 1;
}

const char* region_name(verify::TriangleRegion r) {
  switch (r) {
    case verify::TriangleRegion::PCorner: return "first-exponent corner";
    case verify::TriangleRegion::QCorner: return "second-exponent corner";
    case verify::TriangleRegion::RCorner: return "target-exponent corner";
    default: return "central";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for multilinear frequency-space operator bounds"};
  app.require_subcommand(1);

  // --- run ---
  auto* run = app.add_subcommand("run", "execute an experiment suite");
  std::string config_path, out_dir = "out";
  std::uint64_t seed = 0;
  int grid = 0, jobs = 1;
  bool plot_data = false;
  run->add_option("--config", config_path, "suite configuration (JSON)")->required();
  run->add_option("--out", out_dir, "report directory");
  auto* seed_opt = run->add_option("--seed", seed, "override the suite seed");
  run->add_option("--grid", grid, "replace every resolution ladder by one G");
  run->add_option("--jobs", jobs, "worker threads per experiment")
      ->check(CLI::Range(1, 256));
  run->add_flag("--plot-data", plot_data, "also write per-experiment ratio-vs-G files");

  // --- threshold ---
  auto* thr = app.add_subcommand("threshold", "critical symbol order for a bound");
  double tp = 2.0, tq = 2.0, tr = 1.0, trho = 0.5, tclass_p = 2.0;
  int tn = 1;
  std::string kind = "strong";
  bool show_region = false;
  thr->add_option("--p", tp, "first Lebesgue exponent (0 = infinity)");
  thr->add_option("--q", tq, "second Lebesgue exponent (0 = infinity)");
  thr->add_option("--r", tr, "target Lebesgue exponent (0 = infinity)");
  thr->add_option("--rho", trho, "derivative gain of the symbol class");
  thr->add_option("-n,--n,--dims", tn, "dimension of each variable block");
  thr->add_option("--kind", kind, "strong | weak | pointwise | weighted")
      ->check(CLI::IsMember({"strong", "weak", "pointwise", "weighted"}));
  thr->add_option("--class-p", tclass_p, "symbol-class integrability (weighted kind)");
  thr->add_flag("--region", show_region, "also print which affine piece binds");

  // --- kernel-decay ---
  auto* kd = app.add_subcommand("kernel-decay", "off-diagonal kernel decay fit");
  double km = -1.0, krho = 0.5, kL = 8.0, krmin = 1.0;
  int kG = 256, karity = 2, kbins = 12;
  kd->add_option("--m", km, "symbol order");
  kd->add_option("--rho", krho, "derivative gain");
  kd->add_option("--grid", kG, "points per axis");
  kd->add_option("--length", kL, "half-period L");
  kd->add_option("--arity", karity, "number of operator inputs");
  kd->add_option("--bins", kbins, "geometric fit bins");
  kd->add_option("--rmin", krmin, "inner fit radius");

  // --- seminorms ---
  auto* sn = app.add_subcommand("seminorms", "symbol-class seminorm scale scan");
  std::string family = "oscillatory", class_kind = "sup";
  double sm = -0.8, srho = 0.5, sdrho = -1.0, sL = 8.0;
  int sG = 32, slevels = 4, samax = 2, sbmax = 0;
  std::uint64_t sseed = 0;
  sn->add_option("--family", family, "oscillatory | rough")
      ->check(CLI::IsMember({"oscillatory", "rough"}));
  sn->add_option("--m", sm, "symbol order");
  sn->add_option("--rho", srho, "true derivative gain");
  sn->add_option("--declared-rho", sdrho, "gain claimed by the class (default: true gain)");
  sn->add_option("--kind", class_kind, "sup | lp | smooth")
      ->check(CLI::IsMember({"sup", "lp", "smooth"}));
  sn->add_option("--grid", sG, "base points per axis");
  sn->add_option("--levels", slevels, "grid doublings in the scan");
  sn->add_option("--amax", samax, "max frequency-derivative order");
  sn->add_option("--bmax", sbmax, "max space-derivative order");
  sn->add_option("--length", sL, "half-period L");
  sn->add_option("--seed", sseed, "probe seed");

  // --- snorm-sharpness ---
  auto* ss = app.add_subcommand(
      "snorm-sharpness", "iterated norm of the one-slot bilinear map vs exact supremum");
  int ssG = 32, sscount = 10;
  double ssL = 8.0;
  std::uint64_t ssseed = 0;
  ss->add_option("--grid", ssG, "points per axis");
  ss->add_option("--count", sscount, "number of random symbols");
  ss->add_option("--length", ssL, "half-period L");
  ss->add_option("--seed", ssseed, "symbol seed");

  CLI11_PARSE(app, argc, argv);

  if (*run)
    return cmd_run(config_path, out_dir, seed, seed_opt->count() > 0, grid, jobs,
                   plot_data);

  if (*thr) {
    auto ex = [](double v) {
      return v == 0.0 ? std::numeric_limits<double>::infinity() : v;
    };
    double p = ex(tp), q = ex(tq), r = ex(tr);
    double value = 0.0;
    if (kind == "strong") {
      value = verify::bilinear_order_strong(tn, trho, p, q, r);
    } else if (kind == "weak") {
      value = verify::bilinear_order_weak(tn, trho, p, q);
    } else if (kind == "pointwise") {
      double ps[2] = {p, q};
      value = verify::pointwise_order_threshold(tn, trho, ps);
    } else {
      double pprime = tclass_p == 1.0 ? std::numeric_limits<double>::infinity()
                                      : tclass_p / (tclass_p - 1.0);
      value = verify::weighted_order_threshold(tn, trho, pprime);
    }
    std::printf("%.10g\n", value);
    if (show_region && kind == "strong")
      std::printf("region: %s\n", region_name(verify::bilinear_region(p, q, r)));
    return 0;
  }

  if (*kd) {
    GridSpec g = GridSpec::make(1, karity, kL, kG);
    Field K = op::kernel_truncated(sym::osc_symbol(1, karity, km, krho), g);
    auto fit = op::kernel_decay_fit(K, krmin, -1.0, kbins);
    std::printf("# r  envelope\n");
    for (std::size_t i = 0; i < fit.bin_r.size(); ++i)
      std::printf("%.6f %.10e\n", fit.bin_r[i], fit.bin_env[i]);
    std::printf("slope %.4f  intercept %.4f  (diagonal |K| ~ r^slope)\n",
                fit.slope, fit.intercept);
    return 0;
  }

  if (*sn) {
    sym::SymbolModel a = family == "rough"
                             ? sym::rough_sign_symbol(1, 2, sm, srho, sL, 64, 7)
                             : sym::osc_symbol(1, 2, sm, srho);
    sym::SymbolClass cls;
    cls.kind = class_kind == "lp"       ? sym::SymbolClass::LpX
               : class_kind == "smooth" ? sym::SymbolClass::Smooth
                                        : sym::SymbolClass::SupX;
    cls.m = sm;
    cls.rho = sdrho < 0.0 ? srho : sdrho;
    GridSpec base = GridSpec::make(1, 2, sL, sG);
    auto scan = sym::seminorm_scale_scan(a, cls, samax, sbmax, base, slevels, sseed);
    std::printf("# log<Ximax>  log seminorm\n");
    for (std::size_t i = 0; i < scan.log_c.size(); ++i)
      std::printf("%.6f %.6f\n", scan.log_bracket[i], scan.log_c[i]);
    std::printf("slope %.4f -> %s of the declared class\n", scan.slope,
                scan.member ? "member" : "NOT a member");
    return 0;
  }

  if (*ss) {
    GridSpec g = GridSpec::make(1, 2, ssL, ssG);
    double worst = 0.0;
    for (int i = 0; i < sscount; ++i) {
      rng::Stream st(ssseed);
      st.mix(i);
      std::uint64_t s = st.next();
      auto a = sym::random_lattice_symbol(g, s);
      double direct = op::s_constant_direct(a, g);
      auto pi = op::s_norm_power_iteration(a, g, s ^ 0x5eedULL);
      double rel = std::abs(pi.value - direct) / direct;
      worst = std::max(worst, rel);
      std::printf("symbol %2d  exact %.12f  iterated %.12f  rel %.3e  (%d iters)\n",
                  i, direct, pi.value, rel, pi.iters);
    }
    std::printf("worst relative deviation %.3e\n", worst);
    return worst < 1e-6 ? 0 : 1;
  }

  return 0;
}
