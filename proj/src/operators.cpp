#include "pdolab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pdolab/fft.hpp"
#include "pdolab/lp_decomp.hpp"
#include "pdolab/rng.hpp"

namespace pdolab::op {
namespace {

void check_inputs(const sym::SymbolModel& a, const GridSpec& g,
                  std::span<const Field> inputs) {
  if (static_cast<int>(inputs.size()) != a.N)
    throw std::invalid_argument("apply: need one input per operator slot");
  for (const auto& u : inputs) {
    if (u.axes != a.n || u.domain != Domain::Space)
      throw std::invalid_argument("apply: inputs must be spatial fields of n axes");
    if (u.grid.G != g.G || u.grid.L != g.L)
      throw std::invalid_argument("apply: input lives on a different grid");
  }
}

// Fold A * prod u_j^ over the output frequency zeta = xi_1 + ... + xi_N,
// wrapping zeta into the band with the alias sign of the shifted lattice.
Field apply_folded(const Field& A, const GridSpec& g, std::span<const Field> inputs) {
  const int N = static_cast<int>(inputs.size());
  const int n = inputs[0].axes;
  std::vector<Field> uh;
  uh.reserve(inputs.size());
  for (const auto& u : inputs) uh.push_back(forward_ft(u));

  Field acc(g, n, Domain::Frequency);
  std::vector<int> bins(A.axes), obins(n);
  for (std::size_t flat = 0; flat < A.v.size(); ++flat) {
    if (A.v[flat] == cdouble{0.0, 0.0}) continue;
    A.decode(flat, bins.data());
    cdouble prod = A.v[flat];
    for (int j = 0; j < N; ++j)
      prod *= uh[static_cast<std::size_t>(j)].v[uh[0].encode(bins.data() + j * n)];
    if (prod == cdouble{0.0, 0.0}) continue;
    int wraps = 0;
    for (int axis = 0; axis < n; ++axis) {
      long stot = 0;
      for (int j = 0; j < N; ++j) stot += g.sigma(bins[j * n + axis]);
      wraps += g.wrap_count(stot);
      obins[axis] = g.bin_of(g.wrap_sigma(stot));
    }
    acc.v[acc.encode(obins.data())] += (wraps & 1) ? -prod : prod;
  }
  Field out = inverse_ft(acc);
  double scale = std::pow(1.0 / (2.0 * g.L), n * (N - 1));
  for (auto& z : out.v) z *= scale;
  return out;
}

}  // namespace

Field apply(const sym::SymbolModel& a, const GridSpec& g, std::span<const Field> inputs) {
  check_inputs(a, g, inputs);
  if (a.x_independent) return apply_folded(sym::tabulate_xindep(a, g), g, inputs);
  if (a.xfactor && a.xifactor) {
    Field out = apply_folded(sym::tabulate_xindep(a, g), g, inputs);
    Field b = sym::tabulate_xfactor(a, g);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] *= b.v[i];
    return out;
  }
  return apply_direct(a, g, inputs);
}

Field apply_direct(const sym::SymbolModel& a, const GridSpec& g,
                   std::span<const Field> inputs) {
  check_inputs(a, g, inputs);
  const int N = static_cast<int>(inputs.size());
  const int n = inputs[0].axes;
  const int axes = n * N;
  std::vector<Field> uh;
  uh.reserve(inputs.size());
  for (const auto& u : inputs) uh.push_back(forward_ft(u));

  Field out(g, n, Domain::Space);
  double scale = std::pow(g.dxi() / (2.0 * kPi), axes);
  std::vector<int> xb(n), fb(axes);
  std::vector<double> x(n), Xi(axes);
  for (std::size_t xf = 0; xf < out.v.size(); ++xf) {
    out.decode(xf, xb.data());
    for (int axis = 0; axis < n; ++axis) x[axis] = g.x(xb[axis]);
    cdouble sum{0.0, 0.0};
    Field& probe = uh[0];
    std::size_t total = 1;
    for (int t = 0; t < axes; ++t) total *= static_cast<std::size_t>(g.G);
    for (std::size_t ff = 0; ff < total; ++ff) {
      std::size_t rem = ff;
      for (int t = axes - 1; t >= 0; --t) {
        fb[t] = static_cast<int>(rem % g.G);
        rem /= g.G;
      }
      cdouble prod{1.0, 0.0};
      for (int j = 0; j < N; ++j)
        prod *= uh[static_cast<std::size_t>(j)].v[probe.encode(fb.data() + j * n)];
      if (prod == cdouble{0.0, 0.0}) continue;
      double phase = 0.0;
      for (int t = 0; t < axes; ++t) Xi[t] = g.xi(fb[t]);
      for (int axis = 0; axis < n; ++axis) {
        double zeta = 0.0;
        for (int j = 0; j < N; ++j) zeta += Xi[j * n + axis];
        phase += x[axis] * zeta;
      }
      sum += a.eval(x, Xi) * prod * std::polar(1.0, phase);
    }
    out.v[xf] = sum * scale;
  }
  return out;
}

Field kernel(const sym::SymbolModel& a, const GridSpec& g) {
  Field K = sym::tabulate_xindep(a, g);
  fft::dft(K.v, K.axes, g.G, +1);
  double scale = std::pow(g.dxi() / (2.0 * kPi), K.axes);
  for (auto& z : K.v) z *= scale;
  K.domain = Domain::Displacement;
  return K;
}

Field kernel_truncated(const sym::SymbolModel& a, const GridSpec& g) {
  if (!(a.m < 0.0))
    throw std::invalid_argument("kernel_truncated: needs a symbol of negative order");
  Field A = sym::tabulate_xindep(a, g);
  const double roll = std::ldexp(1.0, g.kmax() - 1);
  std::vector<int> bins(A.axes);
  for (std::size_t flat = 0; flat < A.v.size(); ++flat) {
    A.decode(flat, bins.data());
    double r2 = 0.0;
    for (int t = 0; t < A.axes; ++t) {
      double xi = g.xi(bins[t]);
      r2 += xi * xi;
    }
    A.v[flat] *= lp::cutoff(std::sqrt(r2) / roll);
  }
  fft::dft(A.v, A.axes, g.G, +1);
  double scale = std::pow(g.dxi() / (2.0 * kPi), A.axes);
  for (auto& z : A.v) z *= scale;
  A.domain = Domain::Displacement;
  return A;
}

Field apply_via_kernel(const Field& K, std::span<const Field> inputs) {
  if (K.domain != Domain::Displacement)
    throw std::invalid_argument("apply_via_kernel: kernel must be a displacement field");
  const int N = static_cast<int>(inputs.size());
  if (N < 1 || K.axes % N != 0)
    throw std::invalid_argument("apply_via_kernel: kernel axes must split over inputs");
  const int n = K.axes / N;
  const GridSpec& g = K.grid;
  for (const auto& u : inputs)
    if (u.axes != n || u.grid.G != g.G)
      throw std::invalid_argument("apply_via_kernel: input shape mismatch");

  Field out(g, n, Domain::Space);
  double scale = std::pow(g.h(), K.axes);
  std::vector<int> xb(n), db(K.axes), ub(n);
  for (std::size_t xf = 0; xf < out.v.size(); ++xf) {
    out.decode(xf, xb.data());
    cdouble sum{0.0, 0.0};
    for (std::size_t df = 0; df < K.v.size(); ++df) {
      if (K.v[df] == cdouble{0.0, 0.0}) continue;
      K.decode(df, db.data());
      cdouble prod = K.v[df];
      for (int j = 0; j < N; ++j) {
        for (int axis = 0; axis < n; ++axis)
          ub[axis] = ((xb[axis] - db[j * n + axis]) % g.G + g.G) % g.G;
        prod *= inputs[static_cast<std::size_t>(j)].v[out.encode(ub.data())];
      }
      sum += prod;
    }
    out.v[xf] = sum * scale;
  }
  return out;
}

DecayFit kernel_decay_fit(const Field& K, double rmin, double rmax, int bins) {
  const GridSpec& g = K.grid;
  if (rmax < 0.0) rmax = g.L / 2.0;
  if (!(rmin > 0.0) || !(rmax > rmin) || bins < 8)
    throw std::invalid_argument("kernel_decay_fit: bad bin layout");
  const int N = g.N, n = K.axes / std::max(g.N, 1);
  if (n * N != K.axes)
    throw std::invalid_argument("kernel_decay_fit: kernel axes must be n*N");

  // Collect |K| along the diagonal Y = (y, y, ..., y).
  std::vector<double> binmax(static_cast<std::size_t>(bins), 0.0);
  std::vector<bool> seen(static_cast<std::size_t>(bins), false);
  double lr = std::log(rmax / rmin);
  std::size_t diag_total = 1;
  for (int axis = 0; axis < n; ++axis) diag_total *= static_cast<std::size_t>(g.G);
  std::vector<int> db(n), full(K.axes);
  for (std::size_t df = 0; df < diag_total; ++df) {
    std::size_t rem = df;
    for (int axis = n - 1; axis >= 0; --axis) {
      db[axis] = static_cast<int>(rem % g.G);
      rem /= g.G;
    }
    double r2 = 0.0;
    for (int axis = 0; axis < n; ++axis) {
      double y = g.sigma(db[axis]) * g.h();
      r2 += y * y;
    }
    double r = std::sqrt(r2);
    if (r < rmin || r > rmax) continue;
    int b = std::min(bins - 1, static_cast<int>(std::log(r / rmin) / lr * bins));
    for (int j = 0; j < N; ++j)
      for (int axis = 0; axis < n; ++axis) full[j * n + axis] = db[axis];
    double val = std::abs(K.v[K.encode(full.data())]);
    binmax[static_cast<std::size_t>(b)] = std::max(binmax[static_cast<std::size_t>(b)], val);
    seen[static_cast<std::size_t>(b)] = true;
  }

  DecayFit fit;
  for (int b = 0; b < bins; ++b) {
    if (!seen[static_cast<std::size_t>(b)] || binmax[static_cast<std::size_t>(b)] <= 0.0)
      continue;
    double c = rmin * std::exp((b + 0.5) * lr / bins);
    fit.bin_r.push_back(c);
    fit.bin_env.push_back(binmax[static_cast<std::size_t>(b)]);
  }
  if (fit.bin_r.size() < 8)
    throw std::runtime_error("kernel_decay_fit: fewer than 8 populated bins");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double cnt = static_cast<double>(fit.bin_r.size());
  for (std::size_t i = 0; i < fit.bin_r.size(); ++i) {
    double lx = std::log(fit.bin_r[i]), ly = std::log(fit.bin_env[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  fit.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / cnt;
  return fit;
}

cdouble pair(const Field& u, const Field& v) {
  if (u.v.size() != v.v.size())
    throw std::invalid_argument("pair: fields differ in shape");
  cdouble acc{0.0, 0.0};
  for (std::size_t i = 0; i < u.v.size(); ++i) acc += u.v[i] * std::conj(v.v[i]);
  return acc * u.cell();
}

// ---------------------------------------------------------------------------
// Dense transposes
// ---------------------------------------------------------------------------

namespace {

struct DenseKernel {
  // K_x tables flattened: kx[x][d1 * P + d2] for n = 1 storage; in general
  // kx[x] is the full 2n-axis displacement table of the frozen-x symbol.
  std::vector<std::vector<cdouble>> kx;
  std::size_t P = 0; // points per n-axis block
};

DenseKernel dense_kernel(const sym::SymbolModel& a, const GridSpec& g) {
  if (a.N != 2) throw std::invalid_argument("dense transposes need N = 2");
  std::size_t P = 1;
  for (int axis = 0; axis < a.n; ++axis) P *= static_cast<std::size_t>(g.G);
  if (P > 64) throw std::invalid_argument("dense transposes are capped at G^n <= 64");

  DenseKernel dk;
  dk.P = P;
  double scale = std::pow(g.dxi() / (2.0 * kPi), 2 * a.n);
  Field proto(g, 2 * a.n, Domain::Frequency);
  std::vector<int> bins(2 * a.n), xb(a.n);
  std::vector<double> Xi(2 * a.n), x(a.n);
  Field xproto(g, a.n, Domain::Space);
  for (std::size_t xf = 0; xf < P; ++xf) {
    xproto.decode(xf, xb.data());
    for (int axis = 0; axis < a.n; ++axis) x[axis] = g.x(xb[axis]);
    std::vector<cdouble> table(proto.v.size());
    for (std::size_t flat = 0; flat < table.size(); ++flat) {
      proto.decode(flat, bins.data());
      for (int t = 0; t < 2 * a.n; ++t) Xi[t] = g.xi(bins[t]);
      table[flat] = a.eval(x, Xi);
    }
    fft::dft(table, 2 * a.n, g.G, +1);
    for (auto& z : table) z *= scale;
    dk.kx.push_back(std::move(table));
    if (a.x_independent) break; // one table serves every x
  }
  return dk;
}

// flat index of the displacement (jx - jy) mod G per axis, both blocks.
std::size_t diff_flat(const GridSpec& g, int n, const int* xb, const int* yb) {
  std::size_t flat = 0;
  for (int axis = 0; axis < n; ++axis)
    flat = flat * g.G + static_cast<std::size_t>(((xb[axis] - yb[axis]) % g.G + g.G) % g.G);
  return flat;
}

}  // namespace

Field adjoint1(const sym::SymbolModel& a, const GridSpec& g, const Field& h,
               const Field& g2) {
  DenseKernel dk = dense_kernel(a, g);
  const std::size_t P = dk.P;
  if (h.v.size() != P || g2.v.size() != P)
    throw std::invalid_argument("adjoint1: argument shape mismatch");
  const int n = a.n;
  double w = std::pow(g.h(), 2 * n);
  Field out(g, n, Domain::Space);
  std::vector<int> xb(n), y1b(n), y2b(n);
  Field proto(g, n, Domain::Space);
  for (std::size_t y1 = 0; y1 < P; ++y1) {
    proto.decode(y1, y1b.data());
    cdouble acc{0.0, 0.0};
    for (std::size_t x = 0; x < P; ++x) {
      proto.decode(x, xb.data());
      const auto& table = dk.kx[a.x_independent ? 0 : x];
      std::size_t d1 = diff_flat(g, n, xb.data(), y1b.data());
      for (std::size_t y2 = 0; y2 < P; ++y2) {
        proto.decode(y2, y2b.data());
        std::size_t d2 = diff_flat(g, n, xb.data(), y2b.data());
        cdouble W = w * table[d1 * P + d2];
        acc += std::conj(W) * h.v[x] * std::conj(g2.v[y2]);
      }
    }
    out.v[y1] = acc;
  }
  return out;
}

Field adjoint2(const sym::SymbolModel& a, const GridSpec& g, const Field& f,
               const Field& h) {
  DenseKernel dk = dense_kernel(a, g);
  const std::size_t P = dk.P;
  if (f.v.size() != P || h.v.size() != P)
    throw std::invalid_argument("adjoint2: argument shape mismatch");
  const int n = a.n;
  double w = std::pow(g.h(), 2 * n);
  Field out(g, n, Domain::Space);
  std::vector<int> xb(n), y1b(n), y2b(n);
  Field proto(g, n, Domain::Space);
  for (std::size_t y2 = 0; y2 < P; ++y2) {
    proto.decode(y2, y2b.data());
    cdouble acc{0.0, 0.0};
    for (std::size_t x = 0; x < P; ++x) {
      proto.decode(x, xb.data());
      const auto& table = dk.kx[a.x_independent ? 0 : x];
      std::size_t d2 = diff_flat(g, n, xb.data(), y2b.data());
      for (std::size_t y1 = 0; y1 < P; ++y1) {
        proto.decode(y1, y1b.data());
        std::size_t d1 = diff_flat(g, n, xb.data(), y1b.data());
        cdouble W = w * table[d1 * P + d2];
        acc += std::conj(W) * std::conj(f.v[y1]) * h.v[x];
      }
    }
    out.v[y2] = acc;
  }
  return out;
}

// ---------------------------------------------------------------------------
// S and S*
// ---------------------------------------------------------------------------

namespace {
void check_bilinear_xindep(const sym::SymbolModel& a) {
  if (a.N != 2) throw std::invalid_argument("S operators need a bilinear symbol");
  if (!a.x_independent)
    throw std::invalid_argument("S operators need an x-independent symbol");
}
}  // namespace

Field apply_S(const sym::SymbolModel& a, const GridSpec& g, const Field& F) {
  check_bilinear_xindep(a);
  const int n = a.n;
  if (F.axes != 2 * n || F.domain != Domain::Space)
    throw std::invalid_argument("apply_S: input must be spatial with 2n axes");
  Field Fh = forward_ft(F);
  Field A = sym::tabulate_xindep(a, g);
  Field acc(g, n, Domain::Frequency);
  std::vector<int> bins(2 * n), obins(n);
  for (std::size_t flat = 0; flat < A.v.size(); ++flat) {
    cdouble val = A.v[flat] * Fh.v[flat];
    if (val == cdouble{0.0, 0.0}) continue;
    A.decode(flat, bins.data());
    int wraps = 0;
    for (int axis = 0; axis < n; ++axis) {
      long stot = static_cast<long>(g.sigma(bins[axis])) + g.sigma(bins[n + axis]);
      wraps += g.wrap_count(stot);
      obins[axis] = g.bin_of(g.wrap_sigma(stot));
    }
    acc.v[acc.encode(obins.data())] += (wraps & 1) ? -val : val;
  }
  Field out = inverse_ft(acc);
  double scale = std::pow(1.0 / (2.0 * g.L), n);
  for (auto& z : out.v) z *= scale;
  return out;
}

Field apply_S_star(const sym::SymbolModel& a, const GridSpec& g, const Field& u) {
  check_bilinear_xindep(a);
  const int n = a.n;
  if (u.axes != n || u.domain != Domain::Space)
    throw std::invalid_argument("apply_S_star: input must be spatial with n axes");
  Field uh = forward_ft(u);
  Field A = sym::tabulate_xindep(a, g);
  Field spec(g, 2 * n, Domain::Frequency);
  std::vector<int> bins(2 * n), obins(n);
  for (std::size_t flat = 0; flat < A.v.size(); ++flat) {
    A.decode(flat, bins.data());
    int wraps = 0;
    for (int axis = 0; axis < n; ++axis) {
      long stot = static_cast<long>(g.sigma(bins[axis])) + g.sigma(bins[n + axis]);
      wraps += g.wrap_count(stot);
      obins[axis] = g.bin_of(g.wrap_sigma(stot));
    }
    cdouble val = std::conj(A.v[flat]) * uh.v[uh.encode(obins.data())];
    spec.v[flat] = (wraps & 1) ? -val : val;
  }
  return inverse_ft(spec);
}

double s_constant_direct(const sym::SymbolModel& a, const GridSpec& g) {
  check_bilinear_xindep(a);
  const int n = a.n;
  Field A = sym::tabulate_xindep(a, g);
  Field zproto(g, n, Domain::Frequency);
  std::size_t P = 1;
  for (int axis = 0; axis < n; ++axis) P *= static_cast<std::size_t>(g.G);
  std::vector<int> zb(n), eb(n), fb(2 * n);
  double best = 0.0;
  double meas = std::pow(g.dxi() / (2.0 * kPi), n);
  for (std::size_t zf = 0; zf < P; ++zf) {
    zproto.decode(zf, zb.data());
    double m = 0.0;
    for (std::size_t ef = 0; ef < P; ++ef) {
      zproto.decode(ef, eb.data());
      for (int axis = 0; axis < n; ++axis) {
        long diff = static_cast<long>(g.sigma(zb[axis])) - g.sigma(eb[axis]);
        fb[axis] = g.bin_of(g.wrap_sigma(diff));
        fb[n + axis] = eb[axis];
      }
      std::size_t flat = 0;
      for (int t = 0; t < 2 * n; ++t)
        flat = flat * g.G + static_cast<std::size_t>(fb[t]);
      m += std::norm(A.v[flat]);
    }
    best = std::max(best, meas * m);
  }
  return std::sqrt(best);
}

PowerIteration s_norm_power_iteration(const sym::SymbolModel& a, const GridSpec& g,
                                      std::uint64_t seed, int max_iters, double tol) {
  check_bilinear_xindep(a);
  const int n = a.n;
  Field v(g, n, Domain::Space);
  rng::Stream s(seed);
  for (auto& z : v.v) z = s.cnormal();

  PowerIteration res;
  double prev = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    Field w = apply_S(a, g, apply_S_star(a, g, v));
    double num = std::real(pair(w, v));
    double den = std::real(pair(v, v));
    double lambda = num / den;
    res.iters = it;
    res.resid = std::abs(lambda - prev) / std::max(std::abs(lambda), 1e-300);
    double wn = lp_norm(w, 2.0);
    if (wn == 0.0) { res.value = 0.0; return res; }
    for (auto& z : w.v) z /= wn;
    v = std::move(w);
    if (it > 1 && res.resid < tol) {
      res.value = std::sqrt(std::max(lambda, 0.0));
      return res;
    }
    prev = lambda;
  }
  res.value = std::sqrt(std::max(prev, 0.0));
  return res;
}

}  // namespace pdolab::op
