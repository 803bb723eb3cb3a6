#include "pdolab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "pdolab/grid.hpp"
#include "pdolab/lp_decomp.hpp"
#include "pdolab/maximal.hpp"
#include "pdolab/operators.hpp"
#include "pdolab/rng.hpp"
#include "pdolab/symbols.hpp"
#include "pdolab/weights.hpp"

namespace pdolab::verify {

using nlohmann::json;
using report::ExperimentOutcome;
using report::SuiteResult;
using report::TrialRow;

// ---------------------------------------------------------------------------
// Order thresholds
// ---------------------------------------------------------------------------

double pointwise_order_threshold(int n, double rho, std::span<const double> ps) {
  double s = 0.0;
  for (double p : ps) s += n / p;
  return (rho - 1.0) * s;
}

double weighted_order_threshold(int n, double rho, double pprime) {
  return n * (rho - 1.0) / pprime;
}

double bilinear_order_strong(int n, double rho, double p, double q, double r) {
  double ip = std::isinf(p) ? 0.0 : 1.0 / p;
  double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  double ir = std::isinf(r) ? 0.0 : 1.0 / r;
  double piece = std::max({0.5, 2.0 * ip - 0.5, 2.0 * iq - 0.5, 1.5 - 2.0 * ir});
  return n * (rho - 1.0) * piece;
}

double bilinear_order_weak(int n, double rho, double p, double q) {
  double ip = std::isinf(p) ? 0.0 : 1.0 / p;
  double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  double piece = 2.0 * std::max(std::abs(ip - 0.5), std::abs(iq - 0.5)) + 0.5;
  return n * (rho - 1.0) * piece;
}

TriangleRegion bilinear_region(double p, double q, double r) {
  double ip = std::isinf(p) ? 0.0 : 1.0 / p;
  double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  double ir = std::isinf(r) ? 0.0 : 1.0 / r;
  double cands[4] = {0.5, 2.0 * ip - 0.5, 2.0 * iq - 0.5, 1.5 - 2.0 * ir};
  int best = 0;
  for (int i = 1; i < 4; ++i)
    if (cands[i] > cands[best]) best = i;
  switch (best) {
    case 1: return TriangleRegion::PCorner;
    case 2: return TriangleRegion::QCorner;
    case 3: return TriangleRegion::RCorner;
    default: return TriangleRegion::Central;
  }
}

// ---------------------------------------------------------------------------
// Config helpers
// ---------------------------------------------------------------------------

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t trial_seed(std::uint64_t suite_seed, const std::string& name, int trial) {
  rng::Stream s(suite_seed);
  s.mix(static_cast<std::int64_t>(fnv1a(name)));
  s.mix(trial);
  return s.next();
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& ctx) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key '" + it.key() + "' in " + ctx);
}

const json& need(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError("missing key '" + std::string(key) + "' in " + ctx);
  return *it;
}

double as_number(const json& v, const std::string& ctx) {
  if (!v.is_number()) throw ConfigError("expected a number in " + ctx);
  return v.get<double>();
}

// Lebesgue exponents may be given as a number or the string "inf".
double as_exponent(const json& v, const std::string& ctx) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw ConfigError("expected a number or \"inf\" in " + ctx);
  }
  double x = as_number(v, ctx);
  if (!(x > 0.0)) throw ConfigError("exponent must be positive in " + ctx);
  return x;
}

double get_num(const json& e, const char* key, double def) {
  auto it = e.find(key);
  return it == e.end() ? def : it->get<double>();
}

int get_int(const json& e, const char* key, int def) {
  auto it = e.find(key);
  return it == e.end() ? def : it->get<int>();
}

std::vector<int> get_grids(const json& e, std::vector<int> def, int grid_override) {
  std::vector<int> gs = def;
  if (auto it = e.find("grids"); it != e.end()) {
    gs.clear();
    for (const auto& v : *it) gs.push_back(v.get<int>());
  }
  if (grid_override > 0) gs = {grid_override};
  if (gs.empty()) throw ConfigError("empty grid ladder");
  return gs;
}

double stability_of(const std::vector<double>& sup) {
  double lo = sup[0], hi = sup[0];
  for (double v : sup) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

// sup over grid points of num/den, skipping points where den falls under
// 1e-3 of its mean (the bound is vacuous where the majorant vanishes).
double guarded_sup_ratio(const Field& num, const std::vector<double>& den) {
  double mean = 0.0;
  for (double d : den) mean += d;
  mean /= static_cast<double>(den.size());
  double eps = 1e-3 * mean, sup = 0.0;
  for (std::size_t i = 0; i < den.size(); ++i) {
    if (den[i] <= eps) continue;
    sup = std::max(sup, std::abs(num.v[i]) / den[i]);
  }
  return sup;
}

// L^r with r < 1 permitted (quasi-norm); weighted.
double quasi_norm(const Field& u, double r, const WeightField* w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.v.size(); ++i)
    acc += std::pow(std::abs(u.v[i]), r) * (w ? w->v[i] : 1.0);
  return std::pow(u.cell() * acc, 1.0 / r);
}

// Swap the two blocks of n axes each (bilinear kernels / symbols).
Field block_transpose2(const Field& u, int n) {
  if (u.axes != 2 * n) throw std::invalid_argument("block_transpose2: axes != 2n");
  Field out = u;
  std::vector<int> bins(u.axes), tb(u.axes);
  for (std::size_t flat = 0; flat < u.v.size(); ++flat) {
    u.decode(flat, bins.data());
    for (int a = 0; a < n; ++a) {
      tb[a] = bins[n + a];
      tb[n + a] = bins[a];
    }
    out.v[out.encode(tb.data())] = u.v[flat];
  }
  return out;
}

// The smooth modulation used by the x-dependent linear family.
sym::SymbolModel modulated_osc(int n, int N, double m, double rho, double L) {
  auto b = [L](std::span<const double> x) -> cdouble {
    double t = kPi * x[0] / L;
    return (1.0 + 0.5 * std::cos(t)) * std::polar(1.0, std::sin(t));
  };
  return sym::with_xfactor(sym::osc_symbol(n, N, m, rho), b, /*smooth=*/true);
}

sym::SymbolModel family_symbol(const std::string& family, int n, int N, double m,
                               double rho, double L, int cells, int shell_k,
                               std::uint64_t sym_seed) {
  if (family == "oscillatory") return sym::osc_symbol(n, N, m, rho);
  if (family == "rough") return sym::rough_sign_symbol(n, N, m, rho, L, cells, sym_seed);
  if (family == "dyadic") return sym::dyadic_piece_symbol(n, N, shell_k);
  if (family == "modulated") return modulated_osc(n, N, m, rho, L);
  if (family == "separable-gaussian") {
    auto gz = [](double z) -> cdouble { return std::exp(-0.25 * z * z); };
    auto hz = [](double z) -> cdouble { return std::exp(-0.5 * z * z); };
    return sym::separable_bilinear(gz, hz);
  }
  throw ConfigError("unknown symbol family '" + family + "'");
}

// Run fn(grid_spec, trial, seed) over a ladder x trial grid, collecting rows
// and per-level sup ratios. Trials may run on several threads.
void run_ladder(ExperimentOutcome& out, const std::vector<int>& grids, int n,
                int N, double L, int trials, std::uint64_t suite_seed, int jobs,
                const std::function<double(const GridSpec&, int, std::uint64_t)>& fn) {
  out.grids = grids;
  for (int G : grids) {
    GridSpec g = GridSpec::make(n, N, L, G);
    std::vector<double> ratios(static_cast<std::size_t>(trials), 0.0);
    auto work = [&](int t0, int step) {
      for (int t = t0; t < trials; t += step)
        ratios[static_cast<std::size_t>(t)] = fn(g, t, trial_seed(suite_seed, out.name, t));
    };
    if (jobs <= 1 || trials == 1) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      int k = std::min(jobs, trials);
      pool.reserve(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) pool.emplace_back(work, i, k);
      for (auto& th : pool) th.join();
    }
    double sup = 0.0;
    for (int t = 0; t < trials; ++t) {
      out.rows.push_back({out.name, G, t, trial_seed(suite_seed, out.name, t),
                          ratios[static_cast<std::size_t>(t)]});
      sup = std::max(sup, ratios[static_cast<std::size_t>(t)]);
    }
    out.sup_ratio.push_back(sup);
  }
  out.stability = stability_of(out.sup_ratio);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Experiment kinds
// ---------------------------------------------------------------------------

namespace {

const std::set<std::string> kCommonKeys = {"name", "kind", "gate", "trials", "grids"};

std::set<std::string> with_common(std::initializer_list<const char*> extra) {
  std::set<std::string> s = kCommonKeys;
  for (const char* k : extra) s.insert(k);
  return s;
}

ExperimentOutcome run_shell_partition(const json& e, std::uint64_t seed, int, int grid_override) {
  ExperimentOutcome out;
  out.name = e.at("name");
  out.kind = "shell-partition";
  check_keys(e, with_common({"L", "amax", "kmax", "tol_partition", "tol_stability"}), out.name);
  double L = get_num(e, "L", 8.0);
  int amax = get_int(e, "amax", 2), kmax = get_int(e, "kmax", 5);
  double tolp = get_num(e, "tol_partition", 1e-12);
  double tols = get_num(e, "tol_stability", 0.05);
  int G = grid_override > 0 ? grid_override : 64;
  GridSpec g = GridSpec::make(1, 2, L, G);
  out.grids = {G};

  // Telescoping sum over the resolvable band.
  int Kres = g.kmax();
  double worst = 0.0, top = std::ldexp(1.0, Kres);
  for (int i = 0; i <= 40000; ++i) {
    double r = top * i / 40000.0;
    double s = 0.0;
    for (int k = 0; k <= Kres; ++k) s += lp::shell(k, r);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  bool partition_ok = worst <= tolp;

  // Rescaled derivative sups must be flat in k for every |alpha| <= amax.
  bool stable = true;
  double worst_spread = 0.0;
  for (int dims = 1; dims <= 2; ++dims) {
    std::vector<std::vector<int>> alphas;
    std::vector<int> cur(dims, 0);
    std::function<void(int, int)> rec = [&](int axis, int left) {
      if (axis == dims) {
        int deg = 0;
        for (int c : cur) deg += c;
        if (deg >= 1) alphas.push_back(cur);
        return;
      }
      for (int c = 0; c <= left; ++c) {
        cur[axis] = c;
        rec(axis + 1, left - c);
      }
      cur[axis] = 0;
    };
    rec(0, amax);
    for (const auto& al : alphas) {
      int deg = 0;
      for (int c : al) deg += c;
      std::vector<double> sups;
      for (int k = 1; k <= kmax; ++k) {
        double s = lp::derivative_sup(k, al, seed);
        sups.push_back(std::ldexp(s, k * deg));
        if (dims == 1 && deg == 1)
          out.rows.push_back({out.name, G, k, seed, sups.back()});
      }
      double spread = stability_of(sups) - 1.0;
      worst_spread = std::max(worst_spread, spread);
      if (spread > tols) stable = false;
    }
  }
  out.sup_ratio = {1.0 + worst};
  out.stability = 1.0;
  out.pass = partition_ok && stable;
  out.detail = fmt("partition dev %.3e, worst derivative spread %.3f%%", worst,
                   100.0 * worst_spread);
  return out;
}

ExperimentOutcome run_hausdorff_young(const json& e, std::uint64_t seed, int trials_default,
                                      int grid_override) {
  ExperimentOutcome out;
  out.name = e.at("name");
  out.kind = "hausdorff-young";
  check_keys(e, with_common({"L", "G", "exponents", "tol"}), out.name);
  double L = get_num(e, "L", 8.0), tol = get_num(e, "tol", 1e-8);
  int G = grid_override > 0 ? grid_override : get_int(e, "G", 32);
  int trials = get_int(e, "trials", trials_default);
  std::vector<double> ps;
  for (const auto& v : need(e, "exponents", out.name)) {
    double p = as_number(v, out.name + ".exponents");
    if (!(p >= 1.0 && p <= 2.0))
      throw ConfigError("exponents must lie in [1,2] in " + out.name);
    if (!ps.empty() && p > ps.back())
      throw ConfigError("exponents must be non-increasing block to block in " + out.name);
    ps.push_back(p);
  }
  int N = static_cast<int>(ps.size());
  if (N < 1 || N > 2) throw ConfigError("exponents must have 1 or 2 entries in " + out.name);
  GridSpec g = GridSpec::make(1, N, L, G);

  // The transform kernel here carries plain quadrature weights (no inverse
  // measure factor), where the constant below is sharp: the p_j = 2 axes hit
  // exact equality, the p_j = 1 axes give |sum| <= sum||.
  double constant = 1.0;
  std::vector<double> pdual(ps.size());
  for (std::size_t j = 0; j < ps.size(); ++j) {
    pdual[j] = ps[j] == 1.0 ? std::numeric_limits<double>::infinity()
                            : ps[j] / (ps[j] - 1.0);
    constant *= std::pow(2.0 * kPi, std::isinf(pdual[j]) ? 0.0 : 1.0 / pdual[j]);
  }
  double kernel_scale = std::pow(2.0 * kPi, N); // n = 1 per block

  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::uint64_t s = trial_seed(seed, out.name, t);
    auto a = sym::random_lattice_symbol(g, s);
    Field A = sym::tabulate_xindep(a, g);
    Field K = op::kernel(a, g);
    for (auto& z : K.v) z *= kernel_scale;
    // Innermost norm runs over the first block on both sides; with block 1
    // stored slowest, that means transposing before taking the mixed norm.
    double lhs, rhs;
    if (N == 1) {
      lhs = lp_norm(K, pdual[0]);
      rhs = constant * lp_norm(A, ps[0]);
    } else {
      Field Kt = block_transpose2(K, 1);
      Field At = block_transpose2(A, 1);
      double exl[2] = {pdual[1], pdual[0]};
      double exr[2] = {ps[1], ps[0]};
      lhs = mixed_norm(Kt, exl);
      rhs = constant * mixed_norm(At, exr);
    }
    double ratio = lhs / rhs;
    worst = std::max(worst, ratio);
    out.rows.push_back({out.name, G, t, s, ratio});
  }
  out.grids = {G};
  out.sup_ratio = {worst};
  out.stability = 1.0;
  out.pass = worst <= 1.0 + tol;
  out.detail = fmt("worst lhs/rhs %.12f (must stay <= 1)", worst);
  return out;
}

ExperimentOutcome run_convolution_majorant(const json& e, std::uint64_t seed,
                                           int trials_default, int grid_override) {
  ExperimentOutcome out;
  out.name = e.at("name");
  out.kind = "convolution-majorant";
  check_keys(e, with_common({"L", "G", "band", "tol"}), out.name);
  double L = get_num(e, "L", 8.0), band = get_num(e, "band", 8.0);
  double tol = get_num(e, "tol", 1e-12);
  int G = grid_override > 0 ? grid_override : get_int(e, "G", 256);
  int trials = get_int(e, "trials", trials_default);
  GridSpec g = GridSpec::make(1, 1, L, G);

  bool ok = true;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::uint64_t s = trial_seed(seed, out.name, t);
    Field u = random_bandlimited(g, 1, band, s);
    rng::Stream st(s);
    st.mix(77);
    std::vector<double> prof(static_cast<std::size_t>(G / 2 + 1));
    if (t % 2 == 0) {
      double width = st.uniform(0.2, 2.0);
      for (int r = 0; r <= G / 2; ++r) {
        double y = r * g.h();
        prof[static_cast<std::size_t>(r)] = std::exp(-y * y / (2.0 * width * width));
      }
    } else {
      int cutoff_r = 1 + static_cast<int>(st.uniform() * (G / 2 - 1));
      for (int r = 0; r <= G / 2; ++r)
        prof[static_cast<std::size_t>(r)] = r <= cutoff_r ? 1.0 : 0.0;
    }
    auto rep = maximal::convolution_majorant_check(u, prof, tol);
    ok = ok && rep.pass;
    worst = std::max(worst, -rep.worst_rel);
    out.rows.push_back({out.name, G, t, s, -rep.worst_rel});
  }
  out.grids = {G};
  out.sup_ratio = {worst};
  out.stability = 1.0;
  out.pass = ok;
  out.detail = fmt("largest relative violation %.3e", worst);
  return out;
}

ExperimentOutcome run_pointwise_maximal(const json& e, std::uint64_t seed,
                                        int trials_default, int grid_override, int jobs) {
  ExperimentOutcome out;
  out.name = e.at("name");
  out.kind = "pointwise-maximal";
  check_keys(e, with_common({"family", "m", "rho", "ps", "L", "band", "cells",
                             "shell_k", "stability_tol"}),
             out.name);
  std::string family = need(e, "family", out.name);
  double m = as_number(need(e, "m", out.name), out.name);
  double rho = get_num(e, "rho", 0.5);
  double L = get_num(e, "L", 8.0), band = get_num(e, "band", 8.0);
  double stab_tol = get_num(e, "stability_tol", 2.0);
  int cells = get_int(e, "cells", 64), shell_k = get_int(e, "shell_k", 3);
  std::vector<double> ps;
  for (const auto& v : need(e, "ps", out.name)) ps.push_back(as_number(v, out.name));
  int N = static_cast<int>(ps.size());
  int trials = get_int(e, "trials", trials_default);
  auto grids = get_grids(e, {64, 128, 256}, grid_override);
  auto a = family_symbol(family, 1, N, m, rho, L, cells, shell_k, fnv1a(out.name));

  run_ladder(out, grids, 1, N, L, trials, seed, jobs,
             [&](const GridSpec& g, int, std::uint64_t s) {
               std::vector<Field> in;
               std::vector<std::vector<double>> dens;
               for (int j = 0; j < N; ++j) {
                 rng::Stream ss(s);
                 ss.mix(j);
                 in.push_back(random_bandlimited(g, 1, band, ss.next()));
               }
               Field T = op::apply(a, g, in);
               std::vector<double> den(T.v.size(), 1.0);
               for (int j = 0; j < N; ++j) {
                 Field M = maximal::apply(in[static_cast<std::size_t>(j)], ps[static_cast<std::size_t>(j)]);
                 for (std::size_t i = 0; i < den.size(); ++i) den[i] *= M.v[i].real();
               }
               return guarded_sup_ratio(T, den);
             });
  out.pass = out.stability < stab_tol;
  out.detail = fmt("sup ratio per G spans %.4f..%.4f (stability %.3f)",
                   *std::min_element(out.sup_ratio.begin(), out.sup_ratio.end()),
                   *std::max_element(out.sup_ratio.begin(), out.sup_ratio.end()),
                   out.stability);
  return out;
}

ExperimentOutcome run_weighted_multilinear(const json& e, std::uint64_t seed,
                                           int trials_default, int grid_override, int jobs) {
  ExperimentOutcome out;
  out.name = e.at("name");
  out.kind = "weighted-multilinear";
  check_keys(e, with_common({"family", "m", "rho", "qs", "r", "weight_gammas",
                             "L", "band", "stability_tol"}),
             out.name);
  std::string family = e.value("family", "oscillatory");
  double m = as_number(need(e, "m", out.name), out.name);
  double rho = get_num(e, "rho", 0.5);
  double L = get_num(e, "L", 8.0), band = get_num(e, "band", 8.0);
  double r = as_number(need(e, "r", out.name), out.name);
  double stab_tol = get_num(e, "stability_tol", 2.0);
  std::vector<double> qs, gammas;
  for (const auto& v : need(e, "qs", out.name)) qs.push_back(as_exponent(v, out.name));
  for (const auto& v : need(e, "weight_gammas", out.name))
    gammas.push_back(as_number(v, out.name));
  if (qs.size() != gammas.size())
    throw ConfigError("qs and weight_gammas must align in " + out.name);
  double inv = 0.0;
  for (double q : qs) inv += 1.0 / q;
  if (std::abs(inv - 1.0 / r) > 1e-12)
    throw ConfigError("sum 1/q_j must equal 1/r in " + out.name);
  int N = static_cast<int>(qs.size());
  int trials = get_int(e, "trials", trials_default);
  auto grids = get_grids(e, {64, 128, 256}, grid_override);
  auto a = family_symbol(family, 1, N, m, rho, L, 64, 3, fnv1a(out.name));

  run_ladder(out, grids, 1, N, L, trials, seed, jobs,
             [&](const GridSpec& g, int, std::uint64_t s) {
               std::vector<WeightField> ws;
               std::vector<double> exps;
               for (int j = 0; j < N; ++j) {
                 ws.push_back(gammas[static_cast<std::size_t>(j)] == 0.0
                                  ? WeightField::ones(g, 1)
                                  : weights::power_weight(g, 1, gammas[static_cast<std::size_t>(j)]));
                 exps.push_back(r / qs[static_cast<std::size_t>(j)]);
               }
               WeightField mu = weights::combine(ws, exps);
               std::vector<Field> in;
               double den = 1.0;
               for (int j = 0; j < N; ++j) {
                 rng::Stream ss(s);
                 ss.mix(j);
                 in.push_back(random_bandlimited(g, 1, band, ss.next()));
                 den *= lp_norm(in.back(), qs[static_cast<std::size_t>(j)],
                                &ws[static_cast<std::size_t>(j)]);
               }
               Field T = op::apply(a, g, in);
               double num = r >= 1.0 ? lp_norm(T, r, &mu) : quasi_norm(T, r, &mu);
               return num / den;
             });
  out.pass = out.stability < stab_tol;
  out.detail = fmt("r=%.4g, stability %.3f", r, out.stability);
  return out;
}

// A linear operator in two variable blocks: the pointwise bound compares
// |T u|(X) against the iterated per-block maximal function (innermost block
// first), and the norm bound sends the mixed norm with one exponent order to
// the mixed norm with the reversed order.
ExperimentOutcome run_mixed_norm_linear(const json& e, std::uint64_t seed,
                                        int trials_default, int grid_override, int jobs) {
  ExperimentOutcome out;
  out.name = e.at("name");
  out.kind = "mixed-norm-linear";
  check_keys(e, with_common({"m", "rho", "qs", "maximal_p", "L", "band",
                             "stability_tol"}),
             out.name);
  double m = as_number(need(e, "m", out.name), out.name);
  double rho = get_num(e, "rho", 0.5);
  double L = get_num(e, "L", 8.0), band = get_num(e, "band", 4.0);
  double mp = get_num(e, "maximal_p", 1.5);
  double stab_tol = get_num(e, "stability_tol", 2.0);
  std::vector<double> qs;
  for (const auto& v : need(e, "qs", out.name)) qs.push_back(as_exponent(v, out.name));
  if (qs.size() != 2) throw ConfigError("qs must have 2 entries in " + out.name);
  for (double q : qs) {
    if (!(q >= 1.0 && q <= 2.0))
      throw ConfigError("qs must lie in [1,2] in " + out.name);
    if (!(q > mp)) throw ConfigError("qs must exceed maximal_p in " + out.name);
  }
  if (qs[1] > qs[0])
    throw ConfigError("qs must be non-increasing block to block in " + out.name);
  int trials = get_int(e, "trials", trials_default);
  auto grids = get_grids(e, {32, 64}, grid_override);
  // One function of both variables; the symbol lives on the full frequency
  // space (arity 1, two spatial axes).
  auto a = sym::osc_symbol(2, 1, m, rho);

  std::vector<double> pw_sup, nm_sup;
  run_ladder(out, grids, 2, 1, L, trials, seed, jobs,
             [&](const GridSpec& g, int, std::uint64_t s) {
               Field u = random_bandlimited(g, 2, band, s);
               std::vector<Field> in = {u};
               Field T = op::apply(a, g, in);
               Field M = maximal::iterated(u, mp, 1);
               std::vector<double> den(M.v.size());
               for (std::size_t i = 0; i < den.size(); ++i) den[i] = M.v[i].real();
               double pw = guarded_sup_ratio(T, den);
               // Block 1 is stored slowest, so with the first block innermost
               // the source norm reads {q1 outer-block-2 ... }: exps[0] is the
               // exponent of the outermost (slowest) block.
               double src[2] = {qs[0], qs[1]};
               double dst[2] = {qs[1], qs[0]};
               double nm = mixed_norm(T, dst) / mixed_norm(u, src);
               return std::max(pw, nm);
             });
  out.pass = out.stability < stab_tol;
  out.detail = fmt("pointwise-vs-iterated-maximal and order-reversing norm "
                   "ratios, stability %.3f",
                   out.stability);
  return out;
}

ExperimentOutcome run_linear_weighted(const json& e, std::uint64_t seed,
                                      int trials_default, int grid_override, int jobs) {
  ExperimentOutcome out;
  out.name = e.at("name");
  out.kind = "linear-weighted";
  check_keys(e, with_common({"m", "rho", "q", "r", "weight_gamma", "L", "band",
                             "stability_tol"}),
             out.name);
  double m = as_number(need(e, "m", out.name), out.name);
  double rho = get_num(e, "rho", 0.5);
  double L = get_num(e, "L", 8.0), band = get_num(e, "band", 8.0);
  double q = as_exponent(need(e, "q", out.name), out.name);
  double r = as_exponent(need(e, "r", out.name), out.name);
  double gamma = get_num(e, "weight_gamma", 0.0);
  double stab_tol = get_num(e, "stability_tol", 2.0);
  if (std::isinf(q) && gamma != 0.0)
    throw ConfigError("q = inf requires a constant weight in " + out.name);
  int trials = get_int(e, "trials", trials_default);
  auto grids = get_grids(e, {64, 128, 256}, grid_override);
  auto a = modulated_osc(1, 1, m, rho, L);
  double nu_gamma = std::isinf(q) ? 0.0 : gamma * r / q;

  run_ladder(out, grids, 1, 1, L, trials, seed, jobs,
             [&](const GridSpec& g, int, std::uint64_t s) {
               WeightField w = gamma == 0.0 ? WeightField::ones(g, 1)
                                            : weights::power_weight(g, 1, gamma);
               WeightField nu = nu_gamma == 0.0 ? WeightField::ones(g, 1)
                                                : weights::power_weight(g, 1, nu_gamma);
               Field u = random_bandlimited(g, 1, band, s);
               std::vector<Field> in = {u};
               Field T = op::apply(a, g, in);
               return lp_norm(T, r, &nu) / lp_norm(u, q, &w);
             });
  out.pass = out.stability < stab_tol;
  out.detail = fmt("q=%.3g r=%.3g gamma=%.3g, stability %.3f", q, r, gamma,
                   out.stability);
  return out;
}

ExperimentOutcome run_bilinear_lebesgue(const json& e, std::uint64_t seed,
                                        int trials_default, int grid_override, int jobs) {
  ExperimentOutcome out;
  out.name = e.at("name");
  out.kind = "bilinear-lebesgue";
  check_keys(e, with_common({"family", "m", "rho", "p", "q", "r", "L", "band",
                             "stability_tol"}),
             out.name);
  std::string family = e.value("family", "oscillatory");
  double m = get_num(e, "m", -0.55);
  double rho = get_num(e, "rho", 0.5);
  double L = get_num(e, "L", 8.0), band = get_num(e, "band", 8.0);
  double p = as_exponent(need(e, "p", out.name), out.name);
  double q = as_exponent(need(e, "q", out.name), out.name);
  double r = as_exponent(need(e, "r", out.name), out.name);
  double stab_tol = get_num(e, "stability_tol", 2.0);
  if (std::abs((std::isinf(p) ? 0 : 1 / p) + (std::isinf(q) ? 0 : 1 / q) -
               (std::isinf(r) ? 0 : 1 / r)) > 1e-12)
    throw ConfigError("1/p + 1/q must equal 1/r in " + out.name);
  int trials = get_int(e, "trials", trials_default);
  auto grids = get_grids(e, {64, 128, 256}, grid_override);
  auto a = family_symbol(family, 1, 2, m, rho, L, 64, 3, fnv1a(out.name));

  run_ladder(out, grids, 1, 2, L, trials, seed, jobs,
             [&](const GridSpec& g, int, std::uint64_t s) {
               rng::Stream s1(s), s2(s);
               s1.mix(1);
               s2.mix(2);
               Field u = random_bandlimited(g, 1, band, s1.next());
               Field v = random_bandlimited(g, 1, band, s2.next());
               std::vector<Field> in = {u, v};
               Field T = op::apply(a, g, in);
               return lp_norm(T, r) / (lp_norm(u, p) * lp_norm(v, q));
             });
  out.pass = out.stability < stab_tol;
  out.detail = fmt("(p,q,r)=(%.3g,%.3g,%.3g), stability %.3f", p, q, r, out.stability);
  return out;
}

// A (possibly x-modulated) separable bilinear symbol whose local square
// functional is finite: check (a) the global L^2 x L^2 -> L^1 ratio and
// (b) the local bound, integral of |T(f,g)| over a unit ball around x0
// against the product of decay-weighted L^2 tails of f and g.
ExperimentOutcome run_bilinear_local(const json& e, std::uint64_t seed,
                                     int trials_default, int grid_override, int jobs) {
  ExperimentOutcome out;
  out.name = e.at("name");
  out.kind = "bilinear-local";
  check_keys(e, with_common({"L", "band", "stability_tol", "decay_power",
                             "modulated", "hypo_amax"}),
             out.name);
  double L = get_num(e, "L", 8.0), band = get_num(e, "band", 8.0);
  double stab_tol = get_num(e, "stability_tol", 2.0);
  int trials = get_int(e, "trials", trials_default);
  double Npow = get_num(e, "decay_power", 2.0); // 2n for n = 1
  bool modulated = e.value("modulated", true);
  int hypo_amax = get_int(e, "hypo_amax", 2);
  auto grids = get_grids(e, {64, 128}, grid_override);
  auto a = family_symbol("separable-gaussian", 1, 2, 0.0, 1.0, L, 0, 0, 0);
  if (modulated) {
    auto b = [L](std::span<const double> x) -> cdouble {
      return std::polar(1.0, std::sin(kPi * x[0] / L));
    };
    a = sym::with_xfactor(std::move(a), b, /*smooth=*/true);
  }

  // Gate: the local square functional of the symbol must be finite.
  GridSpec g0 = GridSpec::make(1, 2, L, grids.front());
  double hypo = sym::local_square_seminorm(a, g0, hypo_amax, seed);
  if (!std::isfinite(hypo)) {
    out.pass = false;
    out.detail = "local square functional of the symbol is not finite";
    out.grids = {grids.front()};
    out.sup_ratio = {std::numeric_limits<double>::infinity()};
    out.stability = 1.0;
    return out;
  }

  run_ladder(out, grids, 1, 2, L, trials, seed, jobs,
             [&](const GridSpec& g, int, std::uint64_t s) {
               rng::Stream s1(s), s2(s);
               s1.mix(1);
               s2.mix(2);
               Field f = random_bandlimited(g, 1, band, s1.next());
               Field g2 = random_bandlimited(g, 1, band, s2.next());
               std::vector<Field> in = {f, g2};
               Field T = op::apply(a, g, in);
               double global =
                   lp_norm(T, 1.0) / (lp_norm(f, 2.0) * lp_norm(g2, 2.0));
               double centers[5] = {0.0, L / 4, -L / 4, L / 2, -L / 2};
               double local = 0.0;
               for (double c : centers) {
                 int j0 = static_cast<int>(std::floor((c + g.L) / g.h()));
                 j0 = std::clamp(j0, 0, g.G - 1);
                 double x0 = g.x(j0);
                 double ball = 0.0, df = 0.0, dg = 0.0;
                 for (int j = 0; j < g.G; ++j) {
                   double d = g.x(j) - x0;
                   d -= 2.0 * L * std::round(d / (2.0 * L));
                   double wgt = std::pow(1.0 + std::abs(d), -Npow);
                   df += std::norm(f.v[j]) * wgt;
                   dg += std::norm(g2.v[j]) * wgt;
                   if (std::abs(d) <= 1.0) ball += std::abs(T.v[j]);
                 }
                 double den = std::sqrt(g.h() * df) * std::sqrt(g.h() * dg);
                 local = std::max(local, g.h() * ball / den);
               }
               return std::max(global, local);
             });
  out.pass = out.stability < stab_tol;
  out.detail = fmt("local square functional %.4f; worst of global L1 ratio "
                   "and unit-ball local ratio, stability %.3f",
                   hypo, out.stability);
  return out;
}

ExperimentOutcome run_snorm_sharpness(const json& e, std::uint64_t seed, int, int grid_override) {
  ExperimentOutcome out;
  out.name = e.at("name");
  out.kind = "snorm-sharpness";
  check_keys(e, with_common({"L", "G", "count", "tol", "include_separable"}), out.name);
  double L = get_num(e, "L", 8.0), tol = get_num(e, "tol", 1e-6);
  int G = grid_override > 0 ? grid_override : get_int(e, "G", 32);
  int count = get_int(e, "count", 10);
  bool incl_sep = e.value("include_separable", true);
  GridSpec g = GridSpec::make(1, 2, L, G);

  bool ok = true;
  double worst = 0.0;
  int t = 0;
  auto check_model = [&](const sym::SymbolModel& a, std::uint64_t s) {
    double direct = op::s_constant_direct(a, g);
    auto pi = op::s_norm_power_iteration(a, g, s ^ 0x5eedULL);
    double rel = std::abs(pi.value - direct) / std::max(direct, 1e-300);
    worst = std::max(worst, rel);
    ok = ok && rel <= tol;
    out.rows.push_back({out.name, G, t++, s, rel});
  };
  for (int i = 0; i < count; ++i) {
    std::uint64_t s = trial_seed(seed, out.name, i);
    check_model(sym::random_lattice_symbol(g, s), s);
  }
  if (incl_sep) check_model(family_symbol("separable-gaussian", 1, 2, 0, 1, L, 0, 0, 0), 0);
  out.grids = {G};
  out.sup_ratio = {worst};
  out.stability = 1.0;
  out.pass = ok;
  out.detail = fmt("largest |iterated - direct| / direct = %.3e", worst);
  return out;
}

ExperimentOutcome run_kernel_decay(const json& e, std::uint64_t, int, int grid_override) {
  ExperimentOutcome out;
  out.name = e.at("name");
  out.kind = "kernel-decay";
  check_keys(e, with_common({"m", "rho", "L", "G", "arity", "bins", "rmin",
                             "slope_margin", "gaussian_oracle"}),
             out.name);
  double m = get_num(e, "m", -1.0), rho = get_num(e, "rho", 0.5);
  double L = get_num(e, "L", 8.0);
  int G = grid_override > 0 ? grid_override : get_int(e, "G", 256);
  int arity = get_int(e, "arity", 2), bins = get_int(e, "bins", 12);
  double rmin = get_num(e, "rmin", 1.0);
  double margin = get_num(e, "slope_margin", 0.2);
  bool oracle = e.value("gaussian_oracle", true);

  GridSpec g = GridSpec::make(1, arity, L, G);
  Field K = op::kernel_truncated(sym::osc_symbol(1, arity, m, rho), g);
  auto fit = op::kernel_decay_fit(K, rmin, -1.0, bins);
  double bound = -static_cast<double>(arity) + margin;
  bool slope_ok = fit.slope <= bound;
  out.rows.push_back({out.name, G, 0, 0, fit.slope});

  double oerr = 0.0;
  if (oracle) {
    GridSpec go = GridSpec::make(1, 1, 10.0, 256);
    sym::SymbolModel ga;
    ga.n = 1;
    ga.N = 1;
    ga.m = -1.0;
    auto f = [](std::span<const double> Xi) -> cdouble {
      return std::exp(-Xi[0] * Xi[0]);
    };
    ga.xifactor = f;
    ga.eval = [f](std::span<const double>, std::span<const double> Xi) { return f(Xi); };
    Field Ko = op::kernel(ga, go);
    for (int j = 0; j < go.G; ++j) {
      double y = go.sigma(j) * go.h();
      double ref = std::sqrt(kPi) / (2.0 * kPi) * std::exp(-y * y / 4.0);
      oerr = std::max(oerr, std::abs(Ko.v[j] - cdouble(ref, 0.0)));
    }
    out.rows.push_back({out.name, go.G, 1, 0, oerr});
  }
  out.grids = {G};
  out.sup_ratio = {std::abs(fit.slope)};
  out.stability = 1.0;
  out.pass = slope_ok && (!oracle || oerr < 1e-8);
  out.detail = fmt("slope %.3f (need <= %.2f), closed-form kernel err %.3e",
                   fit.slope, bound, oerr);
  return out;
}

ExperimentOutcome run_symbol_class_scan(const json& e, std::uint64_t seed, int, int grid_override) {
  ExperimentOutcome out;
  out.name = e.at("name");
  out.kind = "symbol-class-scan";
  check_keys(e, with_common({"family", "m", "rho", "declared_rho", "class_kind",
                             "class_p", "amax", "bmax", "L", "G", "levels",
                             "expect_member", "slope_tol", "cells"}),
             out.name);
  std::string family = e.value("family", "oscillatory");
  double m = as_number(need(e, "m", out.name), out.name);
  double rho = get_num(e, "rho", 0.5);
  double drho = get_num(e, "declared_rho", rho);
  double L = get_num(e, "L", 8.0);
  int G = grid_override > 0 ? grid_override : get_int(e, "G", 32);
  int amax = get_int(e, "amax", 2), bmax = get_int(e, "bmax", 0);
  int levels = get_int(e, "levels", 4), cells = get_int(e, "cells", 64);
  double slope_tol = get_num(e, "slope_tol", 0.1);
  bool expect_member = e.value("expect_member", true);
  std::string kind_str = e.value("class_kind", "sup");

  sym::SymbolClass cls;
  cls.kind = kind_str == "lp"       ? sym::SymbolClass::LpX
             : kind_str == "smooth" ? sym::SymbolClass::Smooth
                                    : sym::SymbolClass::SupX;
  cls.m = m;
  cls.rho = drho;
  cls.p = get_num(e, "class_p", 2.0);

  auto a = family_symbol(family, 1, 2, m, rho, L, cells, 3, fnv1a(out.name));
  GridSpec base = GridSpec::make(1, 2, L, G);
  auto scan = sym::seminorm_scale_scan(a, cls, amax, bmax, base, levels, seed, slope_tol);
  for (std::size_t i = 0; i < scan.log_c.size(); ++i)
    out.rows.push_back({out.name, base.G << i, static_cast<int>(i), seed,
                        std::exp(scan.log_c[i])});
  out.grids = {G};
  out.sup_ratio = {std::abs(scan.slope)};
  out.stability = 1.0;
  out.pass = scan.member == expect_member;
  out.detail = fmt("seminorm growth slope %.3f vs declared rho %.2f (member: %s)",
                   scan.slope, drho, scan.member ? "yes" : "no");
  return out;
}

ExperimentOutcome run_profile_mass(const json& e, std::uint64_t, int, int) {
  ExperimentOutcome out;
  out.name = e.at("name");
  out.kind = "profile-mass";
  check_keys(e, with_common({"n", "rho", "pprime", "s", "kmin", "kmax", "R",
                             "quad_points", "tol"}),
             out.name);
  int n = get_int(e, "n", 1);
  double rho = get_num(e, "rho", 0.5);
  double pprime = get_num(e, "pprime", 2.0), s = get_num(e, "s", 1.0);
  int kmin = get_int(e, "kmin", 0), kmax = get_int(e, "kmax", 8);
  double R = get_num(e, "R", 16.0), tol = get_num(e, "tol", 0.05);
  int qp = get_int(e, "quad_points", 400000);

  auto chk = maximal::sigma_integral_check(n, rho, pprime, s, kmin, kmax, R, qp, tol);
  for (std::size_t i = 0; i < chk.integrals.size(); ++i)
    out.rows.push_back({out.name, 0, kmin + static_cast<int>(i), 0, chk.integrals[i]});
  out.grids = {0};
  out.sup_ratio = {1.0 + chk.spread};
  out.stability = 1.0;
  out.pass = chk.pass;
  out.detail = fmt("mass spread over k: %.2f%% (tol %.0f%%)", 100.0 * chk.spread,
                   100.0 * tol);
  return out;
}

ExperimentOutcome run_transpose_duality(const json& e, std::uint64_t seed,
                                        int trials_default, int grid_override) {
  ExperimentOutcome out;
  out.name = e.at("name");
  out.kind = "transpose-duality";
  check_keys(e, with_common({"L", "G", "band", "tol"}), out.name);
  double L = get_num(e, "L", 8.0), band = get_num(e, "band", 2.0);
  double tol = get_num(e, "tol", 1e-10);
  int G = grid_override > 0 ? grid_override : get_int(e, "G", 16);
  int trials = get_int(e, "trials", trials_default);
  GridSpec g = GridSpec::make(1, 2, L, G);

  bool ok = true;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::uint64_t s = trial_seed(seed, out.name, t);
    auto a = sym::random_lattice_symbol(g, s);
    rng::Stream s1(s), s2(s), s3(s);
    s1.mix(1);
    s2.mix(2);
    s3.mix(3);
    Field f = random_bandlimited(g, 1, band, s1.next());
    Field g2 = random_bandlimited(g, 1, band, s2.next());
    Field h = random_bandlimited(g, 1, band, s3.next());
    std::vector<Field> in = {f, g2};
    Field T = op::apply(a, g, in);
    cdouble lhs = op::pair(T, h);
    Field a1 = op::adjoint1(a, g, h, g2);
    Field a2 = op::adjoint2(a, g, f, h);
    double e1 = std::abs(lhs - op::pair(f, a1)) / std::abs(lhs);
    double e2 = std::abs(lhs - op::pair(g2, a2)) / std::abs(lhs);
    double rel = std::max(e1, e2);
    worst = std::max(worst, rel);
    ok = ok && rel <= tol;
    out.rows.push_back({out.name, G, t, s, rel});
  }
  out.grids = {G};
  out.sup_ratio = {worst};
  out.stability = 1.0;
  out.pass = ok;
  out.detail = fmt("largest duality mismatch %.3e", worst);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Suite
// ---------------------------------------------------------------------------

SuiteConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& ex) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + ex.what());
  }
  if (!j.is_object()) throw ConfigError("configuration root must be an object");
  check_keys(j, {"schema", "seed", "trials", "experiments"}, "configuration root");
  if (need(j, "schema", "configuration root").get<int>() != 1)
    throw ConfigError("unsupported schema (expected 1)");
  const json& exps = need(j, "experiments", "configuration root");
  if (!exps.is_array() || exps.empty())
    throw ConfigError("experiments must be a non-empty array");

  static const std::set<std::string> kKinds = {
      "shell-partition",   "hausdorff-young",     "convolution-majorant",
      "pointwise-maximal", "weighted-multilinear", "mixed-norm-linear",
      "linear-weighted",   "bilinear-lebesgue",   "bilinear-local",
      "snorm-sharpness",   "kernel-decay",        "symbol-class-scan",
      "profile-mass",      "transpose-duality"};
  std::set<std::string> names;
  for (const auto& e : exps) {
    if (!e.is_object()) throw ConfigError("each experiment must be an object");
    std::string name = need(e, "name", "experiment").get<std::string>();
    if (!names.insert(name).second)
      throw ConfigError("duplicate experiment name '" + name + "'");
    std::string kind = need(e, "kind", "experiment '" + name + "'").get<std::string>();
    if (!kKinds.count(kind))
      throw ConfigError("unknown experiment kind '" + kind + "' in '" + name + "'");
  }

  SuiteConfig cfg;
  cfg.schema = 1;
  cfg.seed = j.value("seed", 0ULL);
  cfg.trials = j.value("trials", 20);
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  cfg.echo = j.dump();
  cfg.raw = exps.dump();
  return cfg;
}

report::SuiteResult run_suite(const SuiteConfig& cfg, const RunOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  json exps = json::parse(cfg.raw);
  std::uint64_t seed = opt.has_seed_override ? opt.seed_override : cfg.seed;
  int jobs = std::max(1, opt.jobs);

  SuiteResult res;
  res.pass = true;
  for (const auto& e : exps) {
    std::string kind = e.at("kind");
    auto e0 = std::chrono::steady_clock::now();
    ExperimentOutcome out;
    if (kind == "shell-partition")
      out = run_shell_partition(e, seed, cfg.trials, opt.grid_override);
    else if (kind == "hausdorff-young")
      out = run_hausdorff_young(e, seed, cfg.trials, opt.grid_override);
    else if (kind == "convolution-majorant")
      out = run_convolution_majorant(e, seed, cfg.trials, opt.grid_override);
    else if (kind == "pointwise-maximal")
      out = run_pointwise_maximal(e, seed, cfg.trials, opt.grid_override, jobs);
    else if (kind == "weighted-multilinear")
      out = run_weighted_multilinear(e, seed, cfg.trials, opt.grid_override, jobs);
    else if (kind == "mixed-norm-linear")
      out = run_mixed_norm_linear(e, seed, cfg.trials, opt.grid_override, jobs);
    else if (kind == "linear-weighted")
      out = run_linear_weighted(e, seed, cfg.trials, opt.grid_override, jobs);
    else if (kind == "bilinear-lebesgue")
      out = run_bilinear_lebesgue(e, seed, cfg.trials, opt.grid_override, jobs);
    else if (kind == "bilinear-local")
      out = run_bilinear_local(e, seed, cfg.trials, opt.grid_override, jobs);
    else if (kind == "snorm-sharpness")
      out = run_snorm_sharpness(e, seed, cfg.trials, opt.grid_override);
    else if (kind == "kernel-decay")
      out = run_kernel_decay(e, seed, cfg.trials, opt.grid_override);
    else if (kind == "symbol-class-scan")
      out = run_symbol_class_scan(e, seed, cfg.trials, opt.grid_override);
    else if (kind == "profile-mass")
      out = run_profile_mass(e, seed, cfg.trials, opt.grid_override);
    else if (kind == "transpose-duality")
      out = run_transpose_duality(e, seed, cfg.trials, opt.grid_override);
    else
      throw ConfigError("unknown experiment kind '" + kind + "'");
    out.gate = e.value("gate", true);
    out.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - e0).count();
    if (out.gate && !out.pass) res.pass = false;
    res.outcomes.push_back(std::move(out));
  }
  res.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace pdolab::verify
