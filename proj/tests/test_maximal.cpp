#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "pdolab/grid.hpp"
#include "pdolab/maximal.hpp"
#include "pdolab/weights.hpp"

using namespace pdolab;

namespace {

double max_abs_diff(const Field& a, const Field& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i)
    worst = std::max(worst, std::abs(a.v[i] - b.v[i]));
  return worst;
}

Field indicator_interval(const GridSpec& g, double lo, double hi) {
  Field u(g, 1, Domain::Space);
  for (int j = 0; j < g.G; ++j)
    u.v[static_cast<std::size_t>(j)] = (g.x(j) >= lo && g.x(j) < hi) ? 1.0 : 0.0;
  return u;
}

}  // namespace

TEST_CASE("sliding-window maximal matches direct enumeration") {
  GridSpec g1 = GridSpec::make(1, 1, 8.0, 16);
  Field u1 = random_bandlimited(g1, 1, 3.0, 11);
  for (double p : {1.0, 1.7}) {
    Field fast = maximal::apply(u1, p);
    Field brute = maximal::apply_brute(u1, p);
    CHECK(max_abs_diff(fast, brute) < 1e-12);
  }

  GridSpec g2 = GridSpec::make(2, 1, 4.0, 8);
  Field u2 = random_bandlimited(g2, 2, 2.0, 12);
  for (double p : {1.0, 2.0}) {
    Field fast = maximal::apply(u2, p);
    Field brute = maximal::apply_brute(u2, p);
    CHECK(max_abs_diff(fast, brute) < 1e-12);
  }
}

TEST_CASE("maximal dominates the function itself") {
  GridSpec g = GridSpec::make(1, 1, 8.0, 64);
  Field u = random_bandlimited(g, 1, 6.0, 3);
  Field m = maximal::apply(u, 1.0);
  for (std::size_t i = 0; i < u.v.size(); ++i)
    CHECK(m.v[i].real() >= std::abs(u.v[i]) - 1e-15);
}

TEST_CASE("maximal of a unit indicator takes the classical value 1/2 at x = 2") {
  GridSpec g = GridSpec::make(1, 1, 8.0, 256);
  Field u = indicator_interval(g, 0.0, 1.0);
  Field m = maximal::apply(u, 1.0);
  // nearest lattice point to x = 2.03
  int jbest = 0;
  double dbest = 1e30;
  for (int j = 0; j < g.G; ++j) {
    double d = std::abs(g.x(j) - 2.03);
    if (d < dbest) { dbest = d; jbest = j; }
  }
  double val = m.v[static_cast<std::size_t>(jbest)].real();
  CHECK(std::abs(val - 0.5) <= 2.0 * g.h());
}

TEST_CASE("maximal of a constant is the constant") {
  GridSpec g = GridSpec::make(1, 1, 8.0, 32);
  Field u(g, 1, Domain::Space);
  for (auto& v : u.v) v = 0.7;
  for (double p : {1.0, 2.0}) {
    Field m = maximal::apply(u, p);
    for (auto& v : m.v) CHECK(v.real() == doctest::Approx(0.7).epsilon(1e-13));
  }
}

TEST_CASE("iterated maximal with a single full block reduces to the plain one") {
  GridSpec g = GridSpec::make(2, 1, 4.0, 8);
  Field u = random_bandlimited(g, 2, 2.0, 21);
  Field it = maximal::iterated(u, 1.5, 2);
  Field pl = maximal::apply(u, 1.5);
  CHECK(max_abs_diff(it, pl) < 1e-12);
}

TEST_CASE("iterated per-axis maximal composes fastest axis first") {
  GridSpec g = GridSpec::make(2, 1, 4.0, 8);
  Field u = random_bandlimited(g, 2, 2.0, 22);
  double p = 1.5;
  Field it = maximal::iterated(u, p, 1);

  // Oracle: run the one-dimensional maximal along the fastest axis on every
  // row, then along the slowest axis on every column, via 1-d slices.
  GridSpec gl = GridSpec::make(1, 1, g.L, g.G);
  Field stage = u;
  auto sweep_fast = [&](const Field& in) {
    Field out = in;
    for (int row = 0; row < g.G; ++row) {
      Field slice(gl, 1, Domain::Space);
      for (int c = 0; c < g.G; ++c)
        slice.v[static_cast<std::size_t>(c)] =
            in.v[static_cast<std::size_t>(row * g.G + c)];
      Field ms = maximal::apply(slice, p);
      for (int c = 0; c < g.G; ++c)
        out.v[static_cast<std::size_t>(row * g.G + c)] =
            ms.v[static_cast<std::size_t>(c)];
    }
    return out;
  };
  auto sweep_slow = [&](const Field& in) {
    Field out = in;
    for (int col = 0; col < g.G; ++col) {
      Field slice(gl, 1, Domain::Space);
      for (int r = 0; r < g.G; ++r)
        slice.v[static_cast<std::size_t>(r)] =
            in.v[static_cast<std::size_t>(r * g.G + col)];
      Field ms = maximal::apply(slice, p);
      for (int r = 0; r < g.G; ++r)
        out.v[static_cast<std::size_t>(r * g.G + col)] =
            ms.v[static_cast<std::size_t>(r)];
    }
    return out;
  };
  Field oracle = sweep_slow(sweep_fast(stage));
  CHECK(max_abs_diff(it, oracle) < 1e-12);
}

TEST_CASE("non-increasing radial profiles convolve below their mass times M") {
  GridSpec g = GridSpec::make(1, 1, 8.0, 128);
  Field u = random_bandlimited(g, 1, 10.0, 31);
  std::vector<double> prof(static_cast<std::size_t>(g.G / 2 + 1));
  for (std::size_t r = 0; r < prof.size(); ++r) {
    double t = static_cast<double>(r) * g.h();
    prof[r] = std::exp(-t * t);
  }
  auto rep = maximal::convolution_majorant_check(u, prof);
  CHECK(rep.pass);
  CHECK(rep.worst_rel > -1e-12);

  std::vector<double> rising = {1.0, 2.0};
  CHECK_THROWS(maximal::convolution_majorant_check(u, rising));
  std::vector<double> negative = {1.0, -0.5};
  CHECK_THROWS(maximal::convolution_majorant_check(u, negative));
}

TEST_CASE("scale-calibrated profile: head value, continuity, mass condition") {
  int n = 1, k = 3;
  double rho = 0.5, pp = 2.0, s = 1.0;
  double brk = std::pow(2.0, -k * rho);
  double head = std::pow(2.0, k * rho * n / pp);
  CHECK(maximal::sigma_profile(0.5 * brk, k, rho, n, pp, s) == doctest::Approx(head).epsilon(1e-14));
  double lo = maximal::sigma_profile(brk * (1.0 - 1e-9), k, rho, n, pp, s);
  double hi = maximal::sigma_profile(brk * (1.0 + 1e-9), k, rho, n, pp, s);
  CHECK(std::abs(lo - hi) / head < 1e-6);
  CHECK_THROWS(maximal::sigma_profile(1.0, k, rho, n, pp, 0.4));  // s <= n/p'
}

TEST_CASE("profile masses agree across scales") {
  auto chk = maximal::sigma_integral_check(1, 0.5, 2.0, 1.0, 0, 5);
  CHECK(chk.pass);
  for (double v : chk.integrals) CHECK(v == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("weighted maximal ratios: admissible weight stays bounded, singular weight grows") {
  double L = 8.0;
  auto ratio_at = [&](int G, double gamma) {
    GridSpec g = GridSpec::make(1, 1, L, G);
    Field u = indicator_interval(g, 2.0, 3.0);
    Field m = maximal::apply(u, 1.0);
    WeightField w = weights::power_weight(g, 1, gamma);
    return lp_norm(m, 2.0, &w) / lp_norm(u, 2.0, &w);
  };
  double grow_bad = ratio_at(512, -1.5) / ratio_at(128, -1.5);
  double grow_good = ratio_at(512, 0.5) / ratio_at(128, 0.5);
  CHECK(grow_bad > 1.2);
  CHECK(grow_good < 1.1);
}
