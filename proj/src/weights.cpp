#include "pdolab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace pdolab::weights {
namespace {

std::size_t axis_stride(int axes, int axis, int G) {
  std::size_t s = 1;
  for (int a = axes - 1; a > axis; --a) s *= static_cast<std::size_t>(G);
  return s;
}

template <typename Fn>
void for_each_line(std::size_t total, int G, std::size_t stride, Fn&& fn) {
  std::size_t lines = total / static_cast<std::size_t>(G);
  for (std::size_t l = 0; l < lines; ++l) {
    std::size_t block = l / stride, offset = l % stride;
    fn(block * stride * static_cast<std::size_t>(G) + offset);
  }
}

void window_sum_axis(std::vector<double>& data, int G, std::size_t stride, int r) {
  int w = std::min(2 * r + 1, G);
  std::vector<double> line(G), out(G);
  for_each_line(data.size(), G, stride, [&](std::size_t start) {
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

void window_min_axis(std::vector<double>& data, int G, std::size_t stride, int r) {
  int w = std::min(2 * r + 1, G);
  std::vector<double> line(G), out(G);
  std::deque<int> dq;
  for_each_line(data.size(), G, stride, [&](std::size_t start) {
    for (int t = 0; t < G; ++t) line[t] = data[start + t * stride];
    if (w == G) {
      double m = line[0];
      for (int t = 1; t < G; ++t) m = std::min(m, line[t]);
      std::fill(out.begin(), out.end(), m);
    } else {
      dq.clear();
      for (int j = 0; j < 2 * G + r; ++j) {
        double val = line[j % G];
        while (!dq.empty() && line[dq.back() % G] >= val) dq.pop_back();
        dq.push_back(j);
        if (dq.front() <= j - w) dq.pop_front();
        int i = j - r;
        if (i >= G && i < 2 * G) out[i - G] = line[dq.front() % G];
      }
    }
    for (int t = 0; t < G; ++t) data[start + t * stride] = out[t];
  });
}

}  // namespace

double ap_constant(const WeightField& w, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("ap_constant: p must be >= 1");
  for (double v : w.v)
    if (!(v > 0.0)) throw std::invalid_argument("ap_constant: weight must be positive");
  const int G = w.grid.G, d = w.axes;

  std::vector<double> dual(w.v.size());
  if (p > 1.0)
    for (std::size_t i = 0; i < w.v.size(); ++i)
      dual[i] = std::pow(w.v[i], -1.0 / (p - 1.0));

  double best = 0.0;
  for (int r = 0; r <= G / 2; ++r) {
    std::vector<double> avg = w.v;
    double count = 1.0;
    for (int a = 0; a < d; ++a) {
      window_sum_axis(avg, G, axis_stride(d, a, G), r);
      count *= std::min(2 * r + 1, G);
    }
    if (p > 1.0) {
      std::vector<double> davg = dual;
      for (int a = 0; a < d; ++a)
        window_sum_axis(davg, G, axis_stride(d, a, G), r);
      for (std::size_t i = 0; i < avg.size(); ++i)
        best = std::max(best, (avg[i] / count) *
                                  std::pow(davg[i] / count, p - 1.0));
    } else {
      std::vector<double> wmin = w.v;
      for (int a = 0; a < d; ++a)
        window_min_axis(wmin, G, axis_stride(d, a, G), r);
      for (std::size_t i = 0; i < avg.size(); ++i)
        best = std::max(best, avg[i] / count / wmin[i]);
    }
  }
  return best;
}

WeightField power_weight(const GridSpec& g, int axes, double gamma) {
  return sample_weight(g, axes, [gamma](std::span<const double> x) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return std::pow(std::sqrt(r2), gamma);
  });
}

WeightField sample_weight(const GridSpec& g, int axes,
                          const std::function<double(std::span<const double>)>& w) {
  WeightField out = WeightField::ones(g, axes);
  Field idx(g, axes, Domain::Space);
  std::vector<int> bins(axes);
  std::vector<double> x(axes);
  for (std::size_t flat = 0; flat < out.v.size(); ++flat) {
    idx.decode(flat, bins.data());
    for (int a = 0; a < axes; ++a) x[a] = g.x(bins[a]);
    double val = w(x);
    if (!(val > 0.0) || !std::isfinite(val))
      throw std::invalid_argument("sample_weight: weight must be positive and finite");
    out.v[flat] = val;
  }
  return out;
}

WeightField combine(std::span<const WeightField> ws, std::span<const double> exps) {
  if (ws.empty() || ws.size() != exps.size())
    throw std::invalid_argument("combine: need one exponent per weight");
  WeightField out = ws[0];
  std::fill(out.v.begin(), out.v.end(), 1.0);
  for (std::size_t j = 0; j < ws.size(); ++j) {
    if (ws[j].v.size() != out.v.size())
      throw std::invalid_argument("combine: weights live on different lattices");
    for (std::size_t i = 0; i < out.v.size(); ++i)
      out.v[i] *= std::pow(ws[j].v[i], exps[j]);
  }
  return out;
}

ApScan ap_refinement_scan(const std::function<double(std::span<const double>)>& w,
                          const GridSpec& base, int axes, double p, int levels,
                          int factor) {
  if (levels < 2 || factor < 2)
    throw std::invalid_argument("ap_refinement_scan: need >= 2 levels, factor >= 2");
  ApScan scan;
  int G = base.G;
  for (int lvl = 0; lvl < levels; ++lvl) {
    GridSpec g = GridSpec::make(base.n, base.N, base.L, G);
    scan.gs.push_back(G);
    scan.constants.push_back(ap_constant(sample_weight(g, axes, w), p));
    G *= factor;
  }
  scan.growth = scan.constants.back() / scan.constants.front();
  return scan;
}

}  // namespace pdolab::weights
