#include "pdolab/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "pdolab/lp_decomp.hpp"
#include "pdolab/rng.hpp"

namespace pdolab::sym {

double bracket(std::span<const double> Xi) {
  double r2 = 0.0;
  for (double c : Xi) r2 += c * c;
  return std::sqrt(1.0 + r2);
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

SymbolModel osc_symbol(int n, int N, double m, double rho) {
  if (m > 0.0) throw std::invalid_argument("osc_symbol: m must be <= 0");
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::invalid_argument("osc_symbol: rho must lie in (0, 1]");
  SymbolModel a;
  a.n = n;
  a.N = N;
  a.m = m;
  a.rho = rho;
  a.x_independent = true;
  a.x_smooth = true;
  auto f = [m, rho](std::span<const double> Xi) -> cdouble {
    double br = bracket(Xi);
    return std::polar(std::pow(br, m), std::pow(br, 1.0 - rho));
  };
  a.xifactor = f;
  a.eval = [f](std::span<const double>, std::span<const double> Xi) { return f(Xi); };
  return a;
}

SymbolModel with_xfactor(SymbolModel base,
                         std::function<cdouble(std::span<const double>)> f,
                         bool smooth) {
  if (!base.x_independent)
    throw std::invalid_argument("with_xfactor: base must be x-independent");
  SymbolModel a = base;
  a.x_independent = false;
  a.x_smooth = smooth;
  a.xfactor = f;
  if (!a.xifactor) {
    auto base_eval = base.eval;
    a.xifactor = [base_eval](std::span<const double> Xi) {
      std::vector<double> x0; // ignored by an x-independent model
      return base_eval(x0, Xi);
    };
  }
  auto xi = a.xifactor;
  a.eval = [f, xi](std::span<const double> x, std::span<const double> Xi) {
    return f(x) * xi(Xi);
  };
  return a;
}

SymbolModel rough_sign_symbol(int n, int N, double m, double rho, double L,
                              int cells, std::uint64_t seed) {
  if (cells < 1) throw std::invalid_argument("rough_sign_symbol: cells must be >= 1");
  std::size_t total = 1;
  for (int a = 0; a < n; ++a) total *= static_cast<std::size_t>(cells);
  auto signs = std::make_shared<std::vector<double>>(total);
  for (std::size_t i = 0; i < total; ++i) {
    rng::Stream s(seed);
    s.mix(static_cast<std::int64_t>(i));
    (*signs)[i] = s.uniform() < 0.5 ? -1.0 : 1.0;
  }
  double width = 2.0 * L / cells;
  auto f = [signs, L, width, cells, n](std::span<const double> x) -> cdouble {
    std::size_t flat = 0;
    for (int a = 0; a < n; ++a) {
      double xa = x[a] - 2.0 * L * std::floor((x[a] + L) / (2.0 * L));
      int c = static_cast<int>(std::floor((xa + L) / width));
      c = std::clamp(c, 0, cells - 1);
      flat = flat * cells + static_cast<std::size_t>(c);
    }
    return (*signs)[flat];
  };
  return with_xfactor(osc_symbol(n, N, m, rho), f, /*smooth=*/false);
}

SymbolModel dyadic_piece_symbol(int n, int N, int k) {
  SymbolModel a;
  a.n = n;
  a.N = N;
  a.m = 0.0;
  a.rho = 1.0;
  auto f = [k](std::span<const double> Xi) -> cdouble {
    double r2 = 0.0;
    for (double c : Xi) r2 += c * c;
    return lp::shell(k, std::sqrt(r2));
  };
  a.xifactor = f;
  a.eval = [f](std::span<const double>, std::span<const double> Xi) { return f(Xi); };
  return a;
}

SymbolModel separable_bilinear(std::function<cdouble(double)> g,
                               std::function<cdouble(double)> h) {
  SymbolModel a;
  a.n = 1;
  a.N = 2;
  auto f = [g, h](std::span<const double> Xi) -> cdouble {
    return g(Xi[0] + Xi[1]) * h(Xi[1]);
  };
  a.xifactor = f;
  a.eval = [f](std::span<const double>, std::span<const double> Xi) { return f(Xi); };
  return a;
}

SymbolModel random_lattice_symbol(const GridSpec& g, std::uint64_t seed) {
  const int axes = g.n * g.N;
  std::size_t total = 1;
  for (int a = 0; a < axes; ++a) total *= static_cast<std::size_t>(g.G);
  auto vals = std::make_shared<std::vector<cdouble>>(total);
  {
    Field idx(g, axes, Domain::Frequency); // only for decode bookkeeping
    std::vector<int> bins(axes);
    for (std::size_t flat = 0; flat < total; ++flat) {
      idx.decode(flat, bins.data());
      rng::Stream s(seed);
      for (int a = 0; a < axes; ++a) s.mix(g.sigma(bins[a]));
      s.mix(axes);
      (*vals)[flat] = s.cnormal() / std::sqrt(2.0); // unit variance overall
    }
  }
  SymbolModel a;
  a.n = g.n;
  a.N = g.N;
  GridSpec gc = g;
  auto f = [vals, gc, axes](std::span<const double> Xi) -> cdouble {
    std::size_t flat = 0;
    for (int ax = 0; ax < axes; ++ax) {
      long s = std::lround(Xi[ax] / gc.dxi());
      flat = flat * gc.G + static_cast<std::size_t>(gc.bin_of(gc.wrap_sigma(s)));
    }
    return (*vals)[flat];
  };
  a.xifactor = f;
  a.eval = [f](std::span<const double>, std::span<const double> Xi) { return f(Xi); };
  return a;
}

// ---------------------------------------------------------------------------
// Tabulation
// ---------------------------------------------------------------------------

Field tabulate_xindep(const SymbolModel& a, const GridSpec& g) {
  if (!a.x_independent && !a.xifactor)
    throw std::invalid_argument("tabulate_xindep: symbol depends on x and is not separable");
  const int axes = a.n * a.N;
  Field t(g, axes, Domain::Frequency);
  std::vector<int> bins(axes);
  std::vector<double> Xi(axes);
  std::vector<double> x0(a.n, 0.0);
  for (std::size_t flat = 0; flat < t.v.size(); ++flat) {
    t.decode(flat, bins.data());
    for (int ax = 0; ax < axes; ++ax) Xi[ax] = g.xi(bins[ax]);
    t.v[flat] = a.xifactor ? a.xifactor(Xi) : a.eval(x0, Xi);
  }
  return t;
}

Field tabulate_xfactor(const SymbolModel& a, const GridSpec& g) {
  Field t(g, a.n, Domain::Space);
  if (a.x_independent) {
    std::fill(t.v.begin(), t.v.end(), cdouble{1.0, 0.0});
    return t;
  }
  if (!a.xfactor)
    throw std::invalid_argument("tabulate_xfactor: symbol is not separable");
  std::vector<int> bins(a.n);
  std::vector<double> x(a.n);
  for (std::size_t flat = 0; flat < t.v.size(); ++flat) {
    t.decode(flat, bins.data());
    for (int ax = 0; ax < a.n; ++ax) x[ax] = g.x(bins[ax]);
    t.v[flat] = a.xfactor(x);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Seminorms
// ---------------------------------------------------------------------------

namespace {

// |d^alpha f| via nested 4th-order central differences on a complex-valued
// callable (differences act on real and imaginary parts alike).
cdouble fd_complex(const std::function<cdouble(std::span<const double>)>& f,
                   std::span<const double> x, std::span<const int> alpha,
                   double step) {
  int axis = -1;
  for (std::size_t a = 0; a < alpha.size(); ++a)
    if (alpha[a] > 0) { axis = static_cast<int>(a); break; }
  if (axis < 0) return f(x);
  std::vector<int> rest(alpha.begin(), alpha.end());
  rest[axis] -= 1;
  std::vector<double> p(x.begin(), x.end());
  auto at = [&](double d) {
    p[axis] = x[axis] + d;
    cdouble val = fd_complex(f, p, rest, step);
    p[axis] = x[axis];
    return val;
  };
  return (at(-2 * step) - 8.0 * at(-step) + 8.0 * at(step) - at(2 * step)) /
         (12.0 * step);
}

std::vector<std::vector<double>> xi_probes(const GridSpec& g, int axes,
                                           std::uint64_t seed) {
  std::vector<std::vector<double>> probes;
  std::size_t total = 1;
  for (int a = 0; a < axes; ++a) total *= static_cast<std::size_t>(g.G);
  std::size_t stride = (total + 4095) / 4096;
  Field idx(g, axes, Domain::Frequency);
  std::vector<int> bins(axes);
  for (std::size_t flat = 0; flat < total; flat += stride) {
    idx.decode(flat, bins.data());
    std::vector<double> Xi(axes);
    for (int a = 0; a < axes; ++a) Xi[a] = g.xi(bins[a]);
    probes.push_back(std::move(Xi));
  }
  // Off-lattice probes guard against structure aligned with the lattice.
  rng::Stream s(seed);
  s.mix(0x0ff1a77ce);
  double ny = g.nyquist();
  for (int i = 0; i < 64; ++i) {
    std::vector<double> Xi(axes);
    for (int a = 0; a < axes; ++a) Xi[a] = s.uniform(-ny, ny);
    probes.push_back(std::move(Xi));
  }
  return probes;
}

int degree(std::span<const int> idx) {
  int d = 0;
  for (int c : idx) d += c;
  return d;
}

void all_multi_indices(int dims, int max_degree,
                       std::vector<std::vector<int>>& out) {
  std::vector<int> cur(dims, 0);
  std::function<void(int, int)> rec = [&](int axis, int left) {
    if (axis == dims) { out.push_back(cur); return; }
    for (int c = 0; c <= left; ++c) {
      cur[axis] = c;
      rec(axis + 1, left - c);
    }
    cur[axis] = 0;
  };
  rec(0, max_degree);
}

}  // namespace

double seminorm(const SymbolModel& a, const SymbolClass& cls,
                std::span<const int> alpha, std::span<const int> beta,
                const GridSpec& grid, std::uint64_t seed) {
  const int axes = a.n * a.N;
  if (static_cast<int>(alpha.size()) != axes || static_cast<int>(beta.size()) != a.n)
    throw std::invalid_argument("seminorm: multi-index sizes do not match symbol");
  if (degree(beta) > 0 && !a.x_smooth)
    throw std::invalid_argument("seminorm: x-derivatives of a rough-in-x symbol");

  auto probes = xi_probes(grid, axes, seed);
  const double wexp = cls.rho * degree(alpha) - cls.delta * degree(beta) - cls.m;
  const double xstep = 1e-3;
  auto xi_step = [&](std::span<const double> Xi) {
    return 1e-3 * std::pow(bracket(Xi), std::min(cls.rho, 1.0));
  };

  // Separable models split: the x-reduction and the Xi-sup factor exactly.
  if (a.x_independent || a.xfactor) {
    double xpart = 1.0;
    if (!a.x_independent) {
      Field xf(grid, a.n, Domain::Space);
      std::vector<int> bins(a.n);
      std::vector<double> x(a.n);
      double supx = 0.0, acc = 0.0;
      for (std::size_t flat = 0; flat < xf.v.size(); ++flat) {
        xf.decode(flat, bins.data());
        for (int ax = 0; ax < a.n; ++ax) x[ax] = grid.x(bins[ax]);
        double d = std::abs(degree(beta) == 0 ? a.xfactor(x)
                                              : fd_complex(a.xfactor, x, beta, xstep));
        supx = std::max(supx, d);
        acc += std::pow(d, cls.p);
      }
      xpart = cls.kind == SymbolClass::LpX
                  ? std::pow(std::pow(grid.h(), a.n) * acc, 1.0 / cls.p)
                  : supx;
    } else if (degree(beta) > 0) {
      return 0.0;
    }
    double sup = 0.0;
    for (const auto& Xi : probes) {
      cdouble d = fd_complex(a.xifactor, Xi, alpha, xi_step(Xi));
      sup = std::max(sup, std::abs(d) * std::pow(bracket(Xi), wexp));
    }
    return xpart * sup;
  }

  // General path: modest x probe set, full mixed differences.
  std::vector<std::vector<double>> xs;
  std::size_t total_x = 1;
  {
    for (int ax = 0; ax < a.n; ++ax) total_x *= static_cast<std::size_t>(grid.G);
    std::size_t stride = (total_x + 32) / 33;
    Field idx(grid, a.n, Domain::Space);
    std::vector<int> bins(a.n);
    for (std::size_t flat = 0; flat < total_x; flat += stride) {
      idx.decode(flat, bins.data());
      std::vector<double> x(a.n);
      for (int ax = 0; ax < a.n; ++ax) x[ax] = grid.x(bins[ax]);
      xs.push_back(std::move(x));
    }
  }
  double sup = 0.0;
  for (const auto& Xi : probes) {
    double step = xi_step(Xi);
    double w = std::pow(bracket(Xi), wexp);
    double supx = 0.0, acc = 0.0;
    for (const auto& x : xs) {
      // Differentiate in Xi first with x frozen, then in x.
      auto inner = [&](std::span<const double> xx) {
        auto fXi = [&](std::span<const double> XX) { return a.eval(xx, XX); };
        return fd_complex(fXi, Xi, alpha, step);
      };
      double d = std::abs(degree(beta) == 0 ? inner(x) : fd_complex(inner, x, beta, xstep));
      supx = std::max(supx, d);
      acc += std::pow(d, cls.p);
    }
    double xpart = cls.kind == SymbolClass::LpX
                       ? std::pow(std::pow(grid.h(), a.n) * acc *
                                      (static_cast<double>(total_x) / xs.size()),
                                  1.0 / cls.p)
                       : supx;
    sup = std::max(sup, xpart * w);
  }
  return sup;
}

double seminorm_total(const SymbolModel& a, const SymbolClass& cls, int amax,
                      int bmax, const GridSpec& grid, std::uint64_t seed) {
  std::vector<std::vector<int>> alphas, betas;
  all_multi_indices(a.n * a.N, amax, alphas);
  all_multi_indices(a.n, a.x_smooth ? bmax : 0, betas);
  double total = 0.0;
  for (const auto& al : alphas)
    for (const auto& be : betas)
      total = std::max(total, seminorm(a, cls, al, be, grid, seed));
  return total;
}

ScaleScan seminorm_scale_scan(const SymbolModel& a, const SymbolClass& cls,
                              int amax, int bmax, const GridSpec& base,
                              int levels, std::uint64_t seed, double slope_tol) {
  if (levels < 2)
    throw std::invalid_argument("seminorm_scale_scan: need at least two levels");
  ScaleScan scan;
  for (int lvl = 0; lvl < levels; ++lvl) {
    GridSpec g = GridSpec::make(base.n, base.N, base.L, base.G << lvl);
    double c = seminorm_total(a, cls, amax, bmax, g, seed);
    double ny = g.nyquist();
    scan.log_bracket.push_back(std::log(std::sqrt(1.0 + ny * ny)));
    scan.log_c.push_back(std::log(std::max(c, 1e-300)));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double count = scan.log_bracket.size();
  for (std::size_t i = 0; i < scan.log_bracket.size(); ++i) {
    sx += scan.log_bracket[i];
    sy += scan.log_c[i];
    sxx += scan.log_bracket[i] * scan.log_bracket[i];
    sxy += scan.log_bracket[i] * scan.log_c[i];
  }
  scan.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  scan.member = std::abs(scan.slope) < slope_tol;
  return scan;
}

double local_square_seminorm(const SymbolModel& a, const GridSpec& grid,
                             int amax, std::uint64_t seed) {
  if (a.n != 1 || a.N != 2)
    throw std::invalid_argument("local_square_seminorm: needs n = 1, N = 2");
  if (amax > 0 && !a.x_smooth)
    throw std::invalid_argument("local_square_seminorm: x-derivatives of a rough symbol");

  const double L = grid.L, h = grid.h(), dxi = grid.dxi();
  const int G = grid.G;
  std::vector<double> centers = {0.0, L / 4, -L / 4, L / 2, -L / 2};

  std::vector<double> zetas;
  for (int k = 0; k < G; k += std::max(1, G / 32)) zetas.push_back(grid.xi(k));
  rng::Stream s(seed);
  s.mix(0x10ca1);
  for (int i = 0; i < 8; ++i) zetas.push_back(s.uniform(-grid.nyquist(), grid.nyquist()));

  double sup = 0.0;
  std::vector<int> alpha(1);
  for (int ord = 0; ord <= amax; ++ord) {
    alpha[0] = ord;
    for (double x0 : centers)
      for (double zeta : zetas) {
        double acc = 0.0;
        for (int jx = 0; jx < G; ++jx) {
          double x = grid.x(jx);
          double d = x - x0;
          d -= 2.0 * L * std::round(d / (2.0 * L)); // torus distance
          if (std::abs(d) > 1.0) continue;
          for (int je = 0; je < G; ++je) {
            double eta = grid.xi(je);
            double Xi[2] = {zeta - eta, eta}; // first slot left unwrapped
            double xx[1] = {x};
            cdouble val;
            if (ord == 0) {
              val = a.eval(xx, Xi);
            } else {
              auto fx = [&](std::span<const double> p) { return a.eval(p, Xi); };
              val = fd_complex(fx, xx, alpha, 1e-3);
            }
            acc += std::norm(val);
          }
        }
        sup = std::max(sup, std::sqrt(h * dxi * acc));
      }
  }
  return sup;
}

}  // namespace pdolab::sym
