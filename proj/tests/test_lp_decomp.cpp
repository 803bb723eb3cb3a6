#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pdolab/grid.hpp"
#include "pdolab/lp_decomp.hpp"
#include "pdolab/rng.hpp"

using namespace pdolab;

TEST_CASE("smooth step is a monotone 0-1 bridge") {
  CHECK(lp::smooth_step(0.0) == 0.0);
  CHECK(lp::smooth_step(1.0) == 1.0);
  CHECK(lp::smooth_step(-3.0) == 0.0);
  CHECK(lp::smooth_step(4.0) == 1.0);
  double prev = 0.0;
  for (int i = 0; i <= 100; ++i) {
    double v = lp::smooth_step(i / 100.0);
    CHECK(v >= prev - 1e-15);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    prev = v;
  }
  // No overflow at the steep ends of the exponent.
  CHECK(std::isfinite(lp::smooth_step(1e-300)));
  CHECK(std::isfinite(lp::smooth_step(1.0 - 1e-16)));
}

TEST_CASE("cutoff plateau and support") {
  CHECK(lp::cutoff(0.0) == 1.0);
  CHECK(lp::cutoff(1.0) == 1.0);
  CHECK(lp::cutoff(2.0) == 0.0);
  CHECK(lp::cutoff(17.5) == 0.0);
  CHECK(lp::cutoff(1.5) > 0.0);
  CHECK(lp::cutoff(1.5) < 1.0);
}

TEST_CASE("shells telescope to an exact partition of unity") {
  for (double r : {0.0, 0.03, 0.8, 1.0, 1.7, 2.0, 3.9, 12.0, 31.5}) {
    double s = 0.0;
    for (int k = 0; k <= 5; ++k) s += lp::shell(k, r);
    // Telescoping: the partial sum equals cutoff(r / 2^5), which is 1 for
    // r <= 32.
    CHECK(std::abs(s - lp::cutoff(r / 32.0)) < 1e-15);
    CHECK(std::abs(s - 1.0) < 1e-15);
  }
  // Support: shell k lives on 2^{k-1} < r < 2^{k+1}.
  CHECK(lp::shell(3, 4.0 - 1e-9) == 0.0);
  CHECK(lp::shell(3, 5.0) > 0.0);
  CHECK(lp::shell(3, 16.0) == 0.0);
  // Shells k >= 1 are exact dilates of each other.
  for (double t : {0.6, 0.9, 1.3, 1.9}) {
    CHECK(lp::shell(4, 16.0 * t) == doctest::Approx(lp::shell(1, 2.0 * t)).epsilon(1e-14));
  }
}

TEST_CASE("finite differences hit analytic derivatives") {
  auto f = [](std::span<const double> x) { return std::sin(x[0]); };
  std::vector<int> a1 = {1};
  std::vector<double> x1 = {0.4};
  double d = lp::fd_derivative(f, x1, a1, 1e-3);
  CHECK(d == doctest::Approx(std::cos(0.4)).epsilon(1e-10));

  // The 4th-order stencil differentiates cubics exactly.
  auto cubic = [](std::span<const double> x) { return x[0] * x[0] * x[0]; };
  std::vector<int> a2 = {2};
  std::vector<double> x2 = {1.3};
  CHECK(lp::fd_derivative(cubic, x2, a2, 1e-2) == doctest::Approx(6.0 * 1.3).epsilon(1e-10));

  // Mixed second derivative of x*y is 1.
  auto bil = [](std::span<const double> x) { return x[0] * x[1]; };
  std::vector<int> a11 = {1, 1};
  std::vector<double> x11 = {0.7, -0.2};
  CHECK(lp::fd_derivative(bil, x11, a11, 1e-3) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rescaled shell derivative suprema are flat in k") {
  std::vector<int> alpha = {1};
  double base = 0.0;
  for (int k = 1; k <= 3; ++k) {
    double s = std::ldexp(lp::derivative_sup(k, alpha, 11), k);
    if (k == 1)
      base = s;
    else
      CHECK(s == doctest::Approx(base).epsilon(1e-9));
  }
  std::vector<int> alpha2 = {2};
  double base2 = 0.0;
  for (int k = 1; k <= 3; ++k) {
    double s = std::ldexp(lp::derivative_sup(k, alpha2, 11), 2 * k);
    if (k == 1)
      base2 = s;
    else
      CHECK(s == doctest::Approx(base2).epsilon(1e-9));
  }
}

TEST_CASE("frequency projections reassemble band-limited fields") {
  GridSpec g = GridSpec::make(1, 1, 8.0, 64);
  Field u = random_bandlimited(g, 1, 4.0, 21);
  // Summing projections up to the resolvable top shell recovers u.
  Field acc(g, 1, Domain::Space);
  for (int k = 0; k <= g.kmax(); ++k) {
    Field pk = lp::project(u, k);
    for (std::size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += pk.v[i];
  }
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < acc.v.size(); ++i) {
    worst = std::max(worst, std::abs(acc.v[i] - u.v[i]));
    scale = std::max(scale, std::abs(u.v[i]));
  }
  CHECK(worst / scale < 1e-12);

  // Each projection is supported on its shell in frequency.
  Field p2 = lp::project(u, 2);
  Field p2h = forward_ft(p2);
  for (int b = 0; b < g.G; ++b) {
    double r = std::abs(g.xi(b));
    if (r <= 2.0 || r >= 8.0) CHECK(std::abs(p2h.v[b]) < 1e-12);
  }
}

TEST_CASE("shell tables sample the radial profile") {
  GridSpec g = GridSpec::make(1, 2, 8.0, 16);
  Field t = lp::shell_table(g, 2, 2);
  std::vector<int> bins(2);
  for (std::size_t f = 0; f < t.v.size(); ++f) {
    t.decode(f, bins.data());
    double r = std::hypot(g.xi(bins[0]), g.xi(bins[1]));
    CHECK(std::abs(t.v[f].real() - lp::shell(2, r)) < 1e-14);
    CHECK(t.v[f].imag() == 0.0);
  }
}
