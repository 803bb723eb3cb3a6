#pragma once
// Multilinear frequency-multiplier operators on the periodic grid:
//   T_a(u_1, ..., u_N)(x)
//     = (2 pi)^{-nN} dxi^{nN} sum_Xi a(x, Xi) prod_j u_j^(xi_j) e^{i x . (xi_1 + ... + xi_N)}
// together with their kernels on the displacement lattice, transposes, and
// the single-operator S / S* pair whose composition is a Fourier multiplier.
//
// The output frequency xi_1 + ... + xi_N can leave the resolvable band; on
// the half-cell-shifted spatial lattice e^{i x zeta} then equals the aliased
// exponential times (-1)^{wrap count}, and the fast paths below fold with
// that sign, which keeps them exactly equal to the direct summation.

#include <cstdint>
#include <span>
#include <vector>

#include "pdolab/grid.hpp"
#include "pdolab/symbols.hpp"

namespace pdolab::op {

/// T_a applied to N spatial inputs of n axes each. Dispatches to a folded
/// spectral path for x-independent and separable symbols, and to direct
/// summation otherwise. Output is spatial with n axes.
Field apply(const sym::SymbolModel& a, const GridSpec& g, std::span<const Field> inputs);

/// The defining sum evaluated directly at every x; O(G^{n(N+1)}) oracle.
Field apply_direct(const sym::SymbolModel& a, const GridSpec& g, std::span<const Field> inputs);

/// Kernel of an x-independent symbol on the displacement lattice (n*N axes):
///   K(Y) = (2 pi)^{-nN} dxi^{nN} sum_Xi a(Xi) e^{i Y . Xi},
/// so that T_a(u)(x) = h^{nN} sum_Y K(Y) prod_j u_j(x - y_j).
Field kernel(const sym::SymbolModel& a, const GridSpec& g);

/// Kernel of a * cutoff(|Xi| / 2^{kmax - 1}): the symbol is rolled off
/// smoothly inside the resolvable band, so the kernel is free of the ringing
/// a hard band edge would create. Requires declared order m < 0.
Field kernel_truncated(const sym::SymbolModel& a, const GridSpec& g);

/// h^{nN} sum_Y K(Y) prod_j u_j(x - y_j) by direct summation.
Field apply_via_kernel(const Field& K, std::span<const Field> inputs);

struct DecayFit {
  std::vector<double> bin_r;   // geometric bin centers (nonempty bins only)
  std::vector<double> bin_env; // max |K| over diagonal probes in the bin
  double slope = 0.0;          // least-squares slope of log env vs log r
  double intercept = 0.0;
};

/// Envelope decay of |K| along the diagonal Y = (y, ..., y), |y| in
/// [rmin, rmax] split into `bins` geometric bins; needs >= 8 nonempty bins.
/// rmax < 0 means L/2.
DecayFit kernel_decay_fit(const Field& K, double rmin = 1.0, double rmax = -1.0,
                          int bins = 12);

/// Sesquilinear pairing h^d sum u conj(v) of two same-shape spatial fields.
cdouble pair(const Field& u, const Field& v);

/// Transposes of a bilinear operator (N = 2), via the dense space kernel
/// W[x, y1, y2]; meant for small grids (throws when G^n > 64):
///   <T(f, g), h> = <f, adjoint1(a, h, g)> = <g, adjoint2(a, f, h)>.
Field adjoint1(const sym::SymbolModel& a, const GridSpec& g, const Field& h, const Field& g2);
Field adjoint2(const sym::SymbolModel& a, const GridSpec& g, const Field& f, const Field& h);

// ---------------------------------------------------------------------------
// S and S*: bilinear symbol, one function slot
// ---------------------------------------------------------------------------
// For an x-independent bilinear symbol a(xi, eta), S maps a function F of 2n
// variables to the n-variable function
//   S F (x) = (2 pi)^{-2n} dxi^{2n} sum_{xi, eta} a(xi, eta) F^(xi, eta) e^{i x.(xi + eta)},
// and S* is its adjoint under the h-weighted pairing. S S* is the Fourier
// multiplier with symbol
//   m(zeta) = (2 pi)^{-n} dxi^n sum_eta |a(wrap(zeta - eta), eta)|^2,
// so the operator norm of S is exactly sup_zeta m(zeta)^{1/2} on the grid.

Field apply_S(const sym::SymbolModel& a, const GridSpec& g, const Field& F);
Field apply_S_star(const sym::SymbolModel& a, const GridSpec& g, const Field& u);

/// sup_zeta m(zeta)^{1/2} by direct evaluation of the multiplier.
double s_constant_direct(const sym::SymbolModel& a, const GridSpec& g);

struct PowerIteration {
  double value = 0.0; // operator norm estimate of S
  int iters = 0;
  double resid = 0.0; // last relative change of the Rayleigh quotient
};

/// Largest singular value of S by power iteration on S S*, starting from a
/// seeded random vector.
PowerIteration s_norm_power_iteration(const sym::SymbolModel& a, const GridSpec& g,
                                      std::uint64_t seed, int max_iters = 4000,
                                      double tol = 1e-13);

}  // namespace pdolab::op
