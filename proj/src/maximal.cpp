#include "pdolab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "pdolab/fft.hpp"

namespace pdolab::maximal {
namespace {

// Visit every 1-d line along the axis with the given stride; fn receives the
// starting flat index (elements sit at start + t * stride, t = 0..G-1).
template <typename Fn>
void for_each_line(std::size_t total, int G, std::size_t stride, Fn&& fn) {
  std::size_t lines = total / static_cast<std::size_t>(G);
  for (std::size_t l = 0; l < lines; ++l) {
    std::size_t block = l / stride, offset = l % stride;
    fn(block * stride * static_cast<std::size_t>(G) + offset);
  }
}

// Circular centered window sum of width min(2r+1, G) along one axis.
void window_sum_axis(std::vector<double>& data, std::size_t total, int G,
                     std::size_t stride, int r) {
  int w = std::min(2 * r + 1, G);
  std::vector<double> line(G), out(G);
  for_each_line(total, G, stride, [&](std::size_t start) {
    for (int t = 0; t < G; ++t) line[t] = data[start + t * stride];
    if (w == G) {
      double s = 0.0;
      for (int t = 0; t < G; ++t) s += line[t];
      std::fill(out.begin(), out.end(), s);
    } else {
      double s = 0.0;
      for (int o = -r; o <= r; ++o) s += line[((o % G) + G) % G];
      for (int t = 0; t < G; ++t) {
        out[t] = s;
        s -= line[(t - r + G) % G];
        s += line[(t + r + 1) % G];
      }
    }
    for (int t = 0; t < G; ++t) data[start + t * stride] = out[t];
  });
}

// Circular centered sliding max of width min(2r+1, G) along one axis.
void window_max_axis(std::vector<double>& data, std::size_t total, int G,
                     std::size_t stride, int r) {
  int w = std::min(2 * r + 1, G);
  std::vector<double> line(G), out(G);
  std::deque<int> dq;
  for_each_line(total, G, stride, [&](std::size_t start) {
    for (int t = 0; t < G; ++t) line[t] = data[start + t * stride];
    if (w == G) {
      double m = line[0];
      for (int t = 1; t < G; ++t) m = std::max(m, line[t]);
      std::fill(out.begin(), out.end(), m);
    } else {
      // Slide over the unrolled line; the window ending at j covers
      // [j - 2r, j], which is [i - r, i + r] for i = j - r.
      dq.clear();
      for (int j = 0; j < 2 * G + r; ++j) {
        double val = line[j % G];
        while (!dq.empty() && line[dq.back() % G] <= val) dq.pop_back();
        dq.push_back(j);
        if (dq.front() <= j - w) dq.pop_front();
        int i = j - r;
        if (i >= G && i < 2 * G) out[i - G] = line[dq.front() % G];
      }
    }
    for (int t = 0; t < G; ++t) data[start + t * stride] = out[t];
  });
}

std::size_t axis_stride(int axes, int axis, int G) {
  std::size_t s = 1;
  for (int a = axes - 1; a > axis; --a) s *= static_cast<std::size_t>(G);
  return s;
}

// Per-point sup over r of cube averages / admissible centers, restricted to
// the axes in [axis_lo, axis_hi); other axes ride along as batch dimensions.
std::vector<double> maximal_over_axes(const std::vector<double>& w,
                                      const GridSpec& g, int axes, int axis_lo,
                                      int axis_hi) {
  const int G = g.G;
  std::vector<double> best = w; // r = 0: the point itself
  for (int r = 1; r <= G / 2; ++r) {
    std::vector<double> avg = w;
    double count = 1.0;
    for (int a = axis_lo; a < axis_hi; ++a) {
      window_sum_axis(avg, avg.size(), G, axis_stride(axes, a, G), r);
      count *= std::min(2 * r + 1, G);
    }
    for (auto& v : avg) v /= count;
    for (int a = axis_lo; a < axis_hi; ++a)
      window_max_axis(avg, avg.size(), G, axis_stride(axes, a, G), r);
    for (std::size_t i = 0; i < best.size(); ++i)
      best[i] = std::max(best[i], avg[i]);
  }
  return best;
}

std::vector<double> power_in(const Field& u, double p) {
  if (!(p >= 1.0) || std::isinf(p))
    throw std::invalid_argument("maximal: p must be finite and >= 1");
  std::vector<double> w(u.v.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(std::abs(u.v[i]), p);
  return w;
}

Field power_out(const Field& u, std::vector<double>&& w, double p) {
  Field out(u.grid, u.axes, u.domain);
  for (std::size_t i = 0; i < w.size(); ++i)
    out.v[i] = std::pow(w[i], 1.0 / p);
  return out;
}

}  // namespace

Field apply(const Field& u, double p) {
  auto w = power_in(u, p);
  w = maximal_over_axes(w, u.grid, u.axes, 0, u.axes);
  return power_out(u, std::move(w), p);
}

Field apply_brute(const Field& u, double p) {
  const int G = u.grid.G, d = u.axes;
  auto w = power_in(u, p);
  std::vector<double> out(w.size(), 0.0);
  std::vector<int> xb(d), yb(d), zb(d);
  Field idx(u.grid, d, Domain::Space);
  for (std::size_t xf = 0; xf < w.size(); ++xf) {
    idx.decode(xf, xb.data());
    double best = 0.0;
    for (int r = 0; r <= G / 2; ++r) {
      // every center within r steps of x along each axis, circularly
      std::vector<int> off(d, -r);
      for (;;) {
        for (int a = 0; a < d; ++a) yb[a] = ((xb[a] + off[a]) % G + G) % G;
        double sum = 0.0;
        std::size_t cnt = 0;
        std::vector<int> o2(d, -r);
        for (;;) {
          for (int a = 0; a < d; ++a) zb[a] = ((yb[a] + o2[a]) % G + G) % G;
          // skip duplicates when the window wraps all the way around
          bool dup = false;
          for (int a = 0; a < d; ++a)
            if (2 * r + 1 > G && o2[a] + G <= r) dup = true;
          if (!dup) {
            sum += w[idx.encode(zb.data())];
            ++cnt;
          }
          int a = d - 1;
          while (a >= 0 && ++o2[a] > r) o2[a--] = -r;
          if (a < 0) break;
        }
        best = std::max(best, sum / static_cast<double>(cnt));
        int a = d - 1;
        while (a >= 0 && ++off[a] > r) off[a--] = -r;
        if (a < 0) break;
      }
    }
    out[xf] = best;
  }
  return power_out(u, std::move(out), p);
}

Field iterated(const Field& u, double p, int block_axes) {
  if (block_axes < 1 || u.axes % block_axes != 0)
    throw std::invalid_argument("iterated: block size must divide axes");
  auto w = power_in(u, p);
  for (int lo = u.axes - block_axes; lo >= 0; lo -= block_axes)
    w = maximal_over_axes(w, u.grid, u.axes, lo, lo + block_axes);
  return power_out(u, std::move(w), p);
}

MajorantReport convolution_majorant_check(const Field& u,
                                          std::span<const double> profile,
                                          double tol) {
  const int G = u.grid.G, d = u.axes;
  if (static_cast<int>(profile.size()) != G / 2 + 1)
    throw std::invalid_argument("convolution_majorant_check: profile needs G/2+1 entries");
  for (std::size_t r = 0; r < profile.size(); ++r) {
    if (profile[r] < 0.0)
      throw std::invalid_argument("convolution_majorant_check: profile must be >= 0");
    if (r > 0 && profile[r] > profile[r - 1])
      throw std::invalid_argument("convolution_majorant_check: profile must be non-increasing");
  }

  std::vector<cdouble> phi(u.v.size()), uu(u.v.size());
  std::vector<int> bins(d);
  Field idx(u.grid, d, Domain::Space);
  double mass = 0.0;
  for (std::size_t f = 0; f < phi.size(); ++f) {
    idx.decode(f, bins.data());
    int r = 0;
    for (int a = 0; a < d; ++a) r = std::max(r, std::abs(u.grid.sigma(bins[a])));
    phi[f] = profile[static_cast<std::size_t>(r)];
    mass += profile[static_cast<std::size_t>(r)];
    uu[f] = std::abs(u.v[f]);
  }
  double hd = std::pow(u.grid.h(), d);
  mass *= hd;

  fft::dft(phi, d, G, -1);
  fft::dft(uu, d, G, -1);
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] *= uu[i];
  fft::dft(phi, d, G, +1);
  double scale = hd / std::pow(static_cast<double>(G), d);

  Field M = apply(u, 1.0);
  MajorantReport rep;
  rep.pass = true;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    double conv = phi[i].real() * scale;
    double bound = mass * M.v[i].real();
    double slack = bound - conv;
    rep.worst_slack = std::min(rep.worst_slack, slack);
    double rel = slack / std::max(bound, 1e-300);
    rep.worst_rel = std::min(rep.worst_rel, rel);
    if (slack < -tol * std::max(1.0, bound)) rep.pass = false;
  }
  return rep;
}

double sigma_profile(double t, int k, double rho, int n, double pprime, double s) {
  if (!(s > n / pprime))
    throw std::domain_error("sigma_profile: needs s > n/p' for finite mass");
  if (!(rho > 0.0) || !(pprime >= 1.0))
    throw std::invalid_argument("sigma_profile: rho > 0 and p' >= 1 required");
  double tb = std::pow(2.0, -k * rho);
  double head = std::pow(2.0, k * rho * n / pprime);
  if (t <= tb) return head;
  return head * std::pow(tb, s) * std::pow(t, -s);
}

SigmaCheck sigma_integral_check(int n, double rho, double pprime, double s,
                                int kmin, int kmax, double R, int quad_points,
                                double tol) {
  if (kmin < 0 || kmax < kmin)
    throw std::invalid_argument("sigma_integral_check: bad k range");
  double surface = 2.0 * std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0);
  SigmaCheck chk;
  double dt = R / quad_points;
  for (int k = kmin; k <= kmax; ++k) {
    double acc = 0.0;
    for (int i = 0; i < quad_points; ++i) {
      double t = (i + 0.5) * dt;
      double v = sigma_profile(t, k, rho, n, pprime, s);
      acc += std::pow(t, n - 1) * std::pow(v, pprime);
    }
    chk.integrals.push_back(surface * acc * dt);
  }
  double lo = chk.integrals[0], hi = chk.integrals[0];
  for (double v : chk.integrals) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  chk.spread = hi / lo - 1.0;
  chk.pass = chk.spread < tol;
  return chk;
}

}  // namespace pdolab::maximal
