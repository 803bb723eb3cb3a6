#include "pdolab/lp_decomp.hpp"

#include <cmath>
#include <stdexcept>

#include "pdolab/rng.hpp"

namespace pdolab::lp {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  // 1 / (1 + e^{1/t - 1/(1-t)}), arranged so the exponential never overflows.
  double z = 1.0 / t - 1.0 / (1.0 - t);
  if (z > 0.0) {
    double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double cutoff(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  return 1.0 - smooth_step(r - 1.0);
}

double shell(int k, double r) {
  if (k < 0) throw std::invalid_argument("shell: k must be >= 0");
  if (k == 0) return cutoff(r);
  double s = std::ldexp(1.0, -k); // 2^{-k}
  return cutoff(r * s) - cutoff(r * s * 2.0);
}

Field shell_table(const GridSpec& g, int axes, int k) {
  Field t(g, axes, Domain::Frequency);
  std::vector<int> bins(axes);
  for (std::size_t flat = 0; flat < t.v.size(); ++flat) {
    t.decode(flat, bins.data());
    double r2 = 0.0;
    for (int a = 0; a < axes; ++a) {
      double xi = g.xi(bins[a]);
      r2 += xi * xi;
    }
    t.v[flat] = shell(k, std::sqrt(r2));
  }
  return t;
}

Field project(const Field& u, int k) {
  Field uh = forward_ft(u);
  Field t = shell_table(u.grid, u.axes, k);
  for (std::size_t i = 0; i < uh.v.size(); ++i) uh.v[i] *= t.v[i];
  return inverse_ft(uh);
}

double fd_derivative(const std::function<double(std::span<const double>)>& f,
                     std::span<const double> x, std::span<const int> alpha,
                     double step) {
  int axis = -1;
  for (std::size_t a = 0; a < alpha.size(); ++a)
    if (alpha[a] > 0) { axis = static_cast<int>(a); break; }
  if (axis < 0) return f(x);

  std::vector<int> rest(alpha.begin(), alpha.end());
  rest[axis] -= 1;
  std::vector<double> p(x.begin(), x.end());
  auto shifted = [&](double d) {
    p[axis] = x[axis] + d;
    double val = fd_derivative(f, p, rest, step);
    p[axis] = x[axis];
    return val;
  };
  return (shifted(-2 * step) - 8.0 * shifted(-step) + 8.0 * shifted(step) -
          shifted(2 * step)) /
         (12.0 * step);
}

double derivative_sup(int k, std::span<const int> alpha, std::uint64_t seed) {
  const int d = static_cast<int>(alpha.size());
  if (d < 1) throw std::invalid_argument("derivative_sup: empty multi-index");
  const double scale = std::ldexp(1.0, k < 1 ? 0 : k);
  const double step = scale * 1e-3;
  auto f = [&](std::span<const double> Xi) {
    double r2 = 0.0;
    for (double c : Xi) r2 += c * c;
    return shell(k, std::sqrt(r2));
  };

  // Fixed directions; for d = 1 this is just the two rays.
  std::vector<std::vector<double>> dirs;
  if (d == 1) {
    dirs = {{1.0}, {-1.0}};
  } else {
    rng::Stream ds(0xd1285u); // direction set shared by every k
    for (int i = 0; i < 24; ++i) {
      std::vector<double> u(d);
      double n2 = 0.0;
      for (auto& c : u) { c = ds.normal(); n2 += c * c; }
      for (auto& c : u) c /= std::sqrt(n2);
      dirs.push_back(std::move(u));
    }
  }

  // Radii covering the support annulus, in units of the shell's own scale,
  // plus jittered radii so the fixed set cannot hide a spike.
  std::vector<double> radii;
  for (int i = 0; i <= 160; ++i) radii.push_back(0.30 + i * 0.0125); // up to 2.30
  // The jitter is independent of k so every probe point is an exact dilate
  // across scales; rescaled sups of exact dilates are then exactly flat.
  rng::Stream js(seed);
  for (int i = 0; i < 40; ++i) radii.push_back(js.uniform(0.30, 2.30));

  double sup = 0.0;
  std::vector<double> x(d);
  for (const auto& u : dirs)
    for (double t : radii) {
      for (int a = 0; a < d; ++a) x[a] = scale * t * u[a];
      sup = std::max(sup, std::abs(fd_derivative(f, x, alpha, step)));
    }
  return sup;
}

}  // namespace pdolab::lp
