#pragma once
// Smooth dyadic decomposition of frequency space. shell(k, |Xi|) carves the
// annulus 2^{k-1} <= |Xi| <= 2^{k+1} (ball of radius 2 for k = 0); the shells
// sum telescopically to 1, and shell k is an exact dilate of shell 1, so its
// derivative sups scale like 2^{-k |alpha|}.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pdolab/grid.hpp"

namespace pdolab::lp {

/// C^inf monotone step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);

/// Radial bump: 1 on [0,1], smooth descent on (1,2), 0 on [2,inf).
double cutoff(double r);

/// Dyadic shell profile at radius r: cutoff(r) for k = 0, otherwise
/// cutoff(r/2^k) - cutoff(r/2^{k-1}). sum_{k=0}^{K} shell(k,r) = cutoff(r/2^K),
/// identically 1 for r <= 2^K.
double shell(int k, double r);

/// shell(k, .) sampled on the full frequency lattice of `axes` axes (radius
/// taken jointly over all axes).
Field shell_table(const GridSpec& g, int axes, int k);

/// Frequency projection onto shell k: spatial field in, spatial field out.
Field project(const Field& u, int k);

/// sup over probe points of |d^alpha_Xi shell(k, |Xi|)|, estimated with
/// 4th-order central differences (step 2^k * 1e-3). Probes cover the support
/// annulus along fixed directions scaled by 2^k, plus jittered radii drawn
/// from `seed` (k-independent, so probes are exact dilates across scales).
/// alpha.size() is the dimension.
double derivative_sup(int k, std::span<const int> alpha, std::uint64_t seed);

/// Central-difference derivative d^alpha f at x, 4th-order stencil per axis,
/// axes composed recursively. Exposed for reuse on symbol tables.
double fd_derivative(const std::function<double(std::span<const double>)>& f,
                     std::span<const double> x, std::span<const int> alpha,
                     double step);

}  // namespace pdolab::lp
