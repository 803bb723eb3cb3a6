#pragma once
// Muckenhoupt-type constants on the grid, power weights on the shifted
// lattice, and the pointwise products that combine per-input weights into the
// weight for the output side.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pdolab/grid.hpp"

namespace pdolab::weights {

/// sup over lattice-centered cubes B (half-widths r h, r = 0..G/2, circular)
/// of avg_B(w) * avg_B(w^{-1/(p-1)})^{p-1}; for p = 1, avg_B(w) / min_B(w).
/// Always >= 1, and exactly 1 for constant weights. Requires w > 0.
double ap_constant(const WeightField& w, double p);

/// w(x) = |x|^gamma with the Euclidean norm over the field's axes. The
/// spatial lattice never contains the origin, so any real gamma is finite.
WeightField power_weight(const GridSpec& g, int axes, double gamma);

/// Sample an explicit weight function on the lattice.
WeightField sample_weight(const GridSpec& g, int axes,
                          const std::function<double(std::span<const double>)>& w);

/// Pointwise product prod_j w_j(x)^{e_j}; all weights must share a lattice.
WeightField combine(std::span<const WeightField> ws, std::span<const double> exps);

struct ApScan {
  std::vector<int> gs;
  std::vector<double> constants;
  double growth = 0.0; // last constant / first constant
};

/// ap_constant of the same weight function re-sampled while G is multiplied
/// by `factor` each level: constants of a genuine A_p weight stabilize, while
/// a failing power weight grows without bound as the lattice approaches its
/// singularity.
ApScan ap_refinement_scan(const std::function<double(std::span<const double>)>& w,
                          const GridSpec& base, int axes, double p, int levels,
                          int factor);

}  // namespace pdolab::weights
