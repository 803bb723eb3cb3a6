#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "pdolab/grid.hpp"
#include "pdolab/weights.hpp"

using namespace pdolab;

namespace {

// Direct enumeration of the cube-average characteristic: every lattice-
// centered l-infinity cube (half-width r h, circular, no double counting).
double brute_ap(const WeightField& w, double p) {
  const GridSpec& g = w.grid;
  const int G = g.G, d = w.axes;
  const int rmax = G / 2;
  std::vector<int> bins(static_cast<std::size_t>(d));
  std::vector<int> probe(static_cast<std::size_t>(d));
  std::size_t total = w.v.size();
  double sup = 0.0;
  Field idx(g, d, Domain::Space);  // decode/encode bookkeeping only
  for (std::size_t c = 0; c < total; ++c) {
    idx.decode(c, bins.data());
    for (int r = 0; r <= rmax; ++r) {
      int side = std::min(2 * r + 1, G);
      double aw = 0.0, adual = 0.0, wmin = 1e300;
      std::size_t cnt = 1;
      for (int a = 0; a < d; ++a) cnt *= static_cast<std::size_t>(side);
      std::vector<int> off(static_cast<std::size_t>(d), 0);
      for (std::size_t t = 0; t < cnt; ++t) {
        std::size_t rem = t;
        for (int a = d - 1; a >= 0; --a) {
          off[static_cast<std::size_t>(a)] = static_cast<int>(rem % side) - side / 2;
          rem /= static_cast<std::size_t>(side);
        }
        for (int a = 0; a < d; ++a) {
          int jj = bins[static_cast<std::size_t>(a)] + off[static_cast<std::size_t>(a)];
          probe[static_cast<std::size_t>(a)] = ((jj % G) + G) % G;
        }
        double val = w.v[idx.encode(probe.data())];
        aw += val;
        wmin = std::min(wmin, val);
        if (p > 1.0) adual += std::pow(val, -1.0 / (p - 1.0));
      }
      aw /= static_cast<double>(cnt);
      double cand;
      if (p > 1.0) {
        adual /= static_cast<double>(cnt);
        cand = aw * std::pow(adual, p - 1.0);
      } else {
        cand = aw / wmin;
      }
      sup = std::max(sup, cand);
    }
  }
  return sup;
}

}  // namespace

TEST_CASE("constant weights have unit characteristic at every exponent") {
  GridSpec g = GridSpec::make(1, 1, 8.0, 32);
  WeightField w = WeightField::ones(g, 1);
  for (double p : {1.0, 2.0, 3.0}) CHECK(weights::ap_constant(w, p) == 1.0);
}

TEST_CASE("power weights sample |x|^gamma on the shifted lattice") {
  GridSpec g = GridSpec::make(1, 1, 8.0, 16);
  WeightField w = weights::power_weight(g, 1, 0.5);
  for (int j = 0; j < g.G; ++j) {
    double want = std::pow(std::abs(g.x(j)), 0.5);
    CHECK(w.v[static_cast<std::size_t>(j)] == doctest::Approx(want).epsilon(1e-15));
    CHECK(std::isfinite(w.v[static_cast<std::size_t>(j)]));
  }
  // gamma < 0 stays finite because the lattice has no origin point
  WeightField ws = weights::power_weight(g, 1, -1.5);
  for (double v : ws.v) CHECK(std::isfinite(v));
}

TEST_CASE("sampled weights must be strictly positive") {
  GridSpec g = GridSpec::make(1, 1, 8.0, 16);
  CHECK_THROWS(weights::sample_weight(g, 1, [](std::span<const double> x) {
    return x[0] > 0 ? 1.0 : 0.0;
  }));
  CHECK_THROWS(weights::sample_weight(g, 1, [](std::span<const double>) { return -1.0; }));
}

TEST_CASE("combining weights multiplies pointwise powers") {
  GridSpec g = GridSpec::make(1, 1, 8.0, 16);
  std::vector<WeightField> ws;
  ws.push_back(weights::power_weight(g, 1, 1.0));
  ws.push_back(weights::sample_weight(
      g, 1, [](std::span<const double> x) { return 2.0 + std::sin(x[0]); }));
  std::vector<double> exps = {0.5, 2.0};
  WeightField c = weights::combine(ws, exps);
  for (std::size_t i = 0; i < c.v.size(); ++i) {
    double want = std::pow(ws[0].v[i], 0.5) * std::pow(ws[1].v[i], 2.0);
    CHECK(c.v[i] == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("characteristic matches direct enumeration on small grids") {
  GridSpec g1 = GridSpec::make(1, 1, 4.0, 8);
  WeightField w1 = weights::sample_weight(
      g1, 1, [](std::span<const double> x) { return 1.0 + 0.8 * std::cos(x[0]); });
  for (double p : {1.0, 2.0, 2.5})
    CHECK(weights::ap_constant(w1, p) == doctest::Approx(brute_ap(w1, p)).epsilon(1e-12));

  GridSpec g2 = GridSpec::make(2, 1, 4.0, 8);
  WeightField w2 = weights::sample_weight(g2, 2, [](std::span<const double> x) {
    return 1.5 + std::sin(x[0]) * std::cos(x[1]);
  });
  for (double p : {1.0, 2.0})
    CHECK(weights::ap_constant(w2, p) == doctest::Approx(brute_ap(w2, p)).epsilon(1e-12));
}

TEST_CASE("refinement scans separate admissible from singular power weights") {
  GridSpec base = GridSpec::make(1, 1, 8.0, 64);
  auto good = [](std::span<const double> x) { return std::sqrt(std::abs(x[0])); };
  auto bad = [](std::span<const double> x) { return std::pow(std::abs(x[0]), -1.5); };
  auto sg = weights::ap_refinement_scan(good, base, 1, 2.0, 3, 2);
  auto sb = weights::ap_refinement_scan(bad, base, 1, 2.0, 3, 2);
  REQUIRE(sg.constants.size() == 3);
  CHECK(sg.growth < 1.15);
  CHECK(sb.growth > 1.5);
  // constants never drop below 1
  for (double c : sg.constants) CHECK(c >= 1.0);
  for (double c : sb.constants) CHECK(c >= 1.0);
}
