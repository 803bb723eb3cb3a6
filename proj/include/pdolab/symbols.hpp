#pragma once
// Symbol families a(x, Xi) for multilinear frequency multipliers, together
// with the seminorms that test which symbol class a family actually lives in.
// x ranges over R^n, Xi = (xi_1, ..., xi_N) over R^{nN}. Symbols are callables
// over real arguments, so probes may sit anywhere, not just on a lattice.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pdolab/grid.hpp"

namespace pdolab::sym {

/// <Xi> = (1 + |Xi|^2)^{1/2}.
double bracket(std::span<const double> Xi);

struct SymbolModel {
  int n = 1;
  int N = 1;
  double m = 0.0;    // declared decay order
  double rho = 1.0;  // declared derivative gain in Xi
  double delta = 0.0;
  bool x_independent = true;
  bool x_smooth = true; // false: only beta = 0 seminorms are meaningful

  /// Full evaluation a(x, Xi); x.size() = n, Xi.size() = n*N.
  std::function<cdouble(std::span<const double>, std::span<const double>)> eval;

  /// Set when a(x, Xi) = xfactor(x) * xifactor(Xi); operators exploit this.
  std::function<cdouble(std::span<const double>)> xfactor;
  std::function<cdouble(std::span<const double>)> xifactor;

  cdouble operator()(std::span<const double> x, std::span<const double> Xi) const {
    return eval(x, Xi);
  }
};

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

/// a(Xi) = <Xi>^m e^{i <Xi>^{1-rho}}: the standard example that decays like
/// order m but oscillates too slowly for kernel estimates unless rho = 1.
/// Requires m <= 0 and rho in (0, 1].
SymbolModel osc_symbol(int n, int N, double m, double rho);

/// Multiply an x-independent model by a smooth explicit x factor; the result
/// is separable. `smooth` should describe whether the factor has bounded
/// x-derivatives of all orders.
SymbolModel with_xfactor(SymbolModel base,
                         std::function<cdouble(std::span<const double>)> f,
                         bool smooth);

/// osc_symbol modulated by a random sign that is constant on each cell of a
/// fixed partition of [-L, L)^n into `cells` slabs per axis. The partition
/// does not depend on any grid resolution, so refining G keeps the symbol.
/// Bounded in x but not differentiable there.
SymbolModel rough_sign_symbol(int n, int N, double m, double rho, double L,
                              int cells, std::uint64_t seed);

/// A single dyadic shell in Xi: a(Xi) = shell(k, |Xi|).
SymbolModel dyadic_piece_symbol(int n, int N, int k);

/// Bilinear separable symbol a(xi, eta) = g(xi + eta) h(eta), n = 1, N = 2.
SymbolModel separable_bilinear(std::function<cdouble(double)> g,
                               std::function<cdouble(double)> h);

/// Values drawn independently per frequency lattice bin of `g` (all n*N axes)
/// with unit complex-normal law; evaluation at a real Xi looks up the nearest
/// bin, wrapping periodically. Bounded, no smoothness. x-independent.
SymbolModel random_lattice_symbol(const GridSpec& g, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Tabulation
// ---------------------------------------------------------------------------

/// a sampled on the full frequency lattice (axes = n*N); requires an
/// x-independent model (for separable ones, tabulates xifactor).
Field tabulate_xindep(const SymbolModel& a, const GridSpec& g);

/// The x factor of a separable model sampled on the spatial lattice (n axes).
Field tabulate_xfactor(const SymbolModel& a, const GridSpec& g);

// ---------------------------------------------------------------------------
// Classes and seminorms
// ---------------------------------------------------------------------------

struct SymbolClass {
  enum Kind {
    SupX,   // sup over x of |d^alpha_Xi d^beta_x a|, weighted by <Xi>
    LpX,    // L^p in x of the Xi-derivative, then sup over Xi
    Smooth, // classical: sup over x, all beta up to the requested order
  };
  Kind kind = Smooth;
  double m = 0.0, rho = 1.0, delta = 0.0;
  double p = 2.0; // only read when kind == LpX
};

/// One rescaled seminorm
///   sup over probes of |d^alpha_Xi d^beta_x a(x, Xi)| <Xi>^{rho|alpha| - delta|beta| - m},
/// derivatives by 4th-order central differences; for LpX the x-reduction is
/// (h^n sum_x |.|^p)^{1/p} over the grid instead of a sup. alpha has n*N
/// entries, beta has n. Probes: the frequency lattice of `grid` (subsampled
/// past 4096 points) plus seeded off-lattice jitter; x runs over the grid.
double seminorm(const SymbolModel& a, const SymbolClass& cls,
                std::span<const int> alpha, std::span<const int> beta,
                const GridSpec& grid, std::uint64_t seed);

/// Largest rescaled seminorm over all |alpha| <= amax, |beta| <= bmax.
double seminorm_total(const SymbolModel& a, const SymbolClass& cls, int amax,
                      int bmax, const GridSpec& grid, std::uint64_t seed);

struct ScaleScan {
  std::vector<double> log_bracket; // log <Xi_max> per ladder level
  std::vector<double> log_c;       // log of the total seminorm
  double slope = 0.0;              // least-squares slope
  bool member = false;             // |slope| below the stability threshold
};

/// Class membership as scale stability: rescaled seminorms of a genuine class
/// member stay bounded as the resolvable frequency range doubles, so the
/// fitted slope of log C against log <Xi_max> is ~0; a misdeclared rho shows
/// up as a positive slope ~ (rho_declared - rho_true) * amax.
ScaleScan seminorm_scale_scan(const SymbolModel& a, const SymbolClass& cls,
                              int amax, int bmax, const GridSpec& base,
                              int levels, std::uint64_t seed,
                              double slope_tol = 0.1);

/// Localized square functional for bilinear symbols (n = 1, N = 2):
///   sup over |alpha| <= amax, centers x0, and zeta probes of
///   ( h sum_{|x - x0| <= 1} dxi sum_eta |d^alpha_x a(x, zeta - eta, eta)|^2 )^{1/2}.
/// The first argument zeta - eta is passed unwrapped. Finite when the symbol
/// concentrates near the diagonal xi + eta = const in an L^2-averaged sense.
double local_square_seminorm(const SymbolModel& a, const GridSpec& grid,
                             int amax, std::uint64_t seed);

}  // namespace pdolab::sym
