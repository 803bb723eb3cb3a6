#pragma once
// Periodic grid model of R^n: the torus [-L,L)^d sampled on G points per axis,
// with the dual frequency lattice {pi k / L : k = -G/2 .. G/2-1}. Spatial
// sample points are shifted half a cell, x_j = (j + 1/2) h - L, so no lattice
// point sits at the origin (power weights |x|^gamma with gamma < 0 stay
// finite). The discrete transforms below carry the exact phase factors for
// that shift and invert each other to machine precision.

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pdolab {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------------------
// GridSpec
// ---------------------------------------------------------------------------

struct GridSpec {
  int n = 1;      // dimensions per input block
  int N = 1;      // number of input blocks (operator arity)
  double L = 8.0; // half period per axis
  int G = 64;     // samples per axis; even power of two

  /// Validates: n >= 1, N >= 1, L > 0, G an even power of two >= 4.
  static GridSpec make(int n, int N, double L, int G);

  double h() const { return 2.0 * L / G; }
  double dxi() const { return kPi / L; }
  double nyquist() const { return kPi * G / (2.0 * L); }
  /// Largest dyadic scale resolved by the frequency lattice.
  int kmax() const;

  double x(int j) const { return -L + (j + 0.5) * h(); }
  /// Signed frequency index of a storage bin (FFT order).
  int sigma(int bin) const { return bin < G / 2 ? bin : bin - G; }
  int bin_of(long sig) const { return static_cast<int>(((sig % G) + G) % G); }
  double xi(int bin) const { return kPi * sigma(bin) / L; }

  /// Fold a signed index sum into [-G/2, G/2); wrap_count says how many full
  /// bands were folded (each fold flips the sign of e^{i x zeta} on the
  /// half-cell-shifted spatial lattice).
  int wrap_sigma(long s) const;
  int wrap_count(long s) const;

  bool operator==(const GridSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Fields
// ---------------------------------------------------------------------------

enum class Domain {
  Space,        // values at x_j = (j+1/2)h - L
  Frequency,    // values at xi_k = pi sigma(k) / L
  Displacement, // values at y_m = sigma(m) h   (differences of grid points)
};

/// Complex samples on a d-dimensional lattice, d = `axes`. A single input
/// block has d = n; the full product lattice has d = nN. Storage is row-major
/// with axis 0 slowest.
class Field {
 public:
  Field() = default;
  Field(const GridSpec& g, int axes_, Domain dom);

  GridSpec grid;
  int axes = 0;
  Domain domain = Domain::Space;
  std::optional<double> band; // declared band limit (radius), if any
  std::vector<cdouble> v;

  std::size_t size() const { return v.size(); }
  /// Quadrature weight per axis: h in space, dxi in frequency.
  double cell1() const { return domain == Domain::Frequency ? grid.dxi() : grid.h(); }
  /// Quadrature weight per lattice point, cell1()^axes.
  double cell() const;

  /// Physical coordinate of bin j along one axis.
  double coord(int j) const;

  /// Decode a flat index into per-axis bins (row-major, axis 0 slowest).
  void decode(std::size_t flat, int* bins) const;
  std::size_t encode(const int* bins) const;
};

/// A multi-block field is the same storage with axes = n*N; the alias keeps
/// call sites readable.
using MultiField = Field;

/// Strictly positive real samples on a lattice; used in weighted norms.
struct WeightField {
  GridSpec grid;
  int axes = 0;
  std::vector<double> v;

  static WeightField ones(const GridSpec& g, int axes);
  double cell() const;
};

// ---------------------------------------------------------------------------
// Exponent bookkeeping
// ---------------------------------------------------------------------------

/// A Lebesgue exponent triple (p, q, r) with 1/p + 1/q = 1/r, kept as
/// reciprocals so that infinity needs no special case and so the admissible
/// order is an affine function of the stored data.
struct ExponentTriple {
  double ip = 0, iq = 0, ir = 0;

  /// Accepts values in [1, inf]; throws unless 1/p + 1/q = 1/r to 1e-12.
  static ExponentTriple pqr(double p, double q, double r);
  static ExponentTriple reciprocals(double ip, double iq, double ir);

  double p() const { return ip == 0 ? std::numeric_limits<double>::infinity() : 1.0 / ip; }
  double q() const { return iq == 0 ? std::numeric_limits<double>::infinity() : 1.0 / iq; }
  double r() const { return ir == 0 ? std::numeric_limits<double>::infinity() : 1.0 / ir; }

  /// Membership in the closed admissible triangle with vertices
  /// (0,1,1), (1,0,1), (0,0,0) in (1/p, 1/q, 1/r) coordinates.
  bool in_triangle() const;
};

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

/// Riemann-sum Fourier transform on the shifted lattice:
///   u^(xi_k) = h^d sum_j u(x_j) e^{-i xi_k . x_j}.
/// Exact DFT of the samples (phase twiddles account for the half-cell shift).
Field forward_ft(const Field& u);

/// Inverse of forward_ft:
///   u(x_j) = (2 pi)^{-d} dxi^d sum_k u^(xi_k) e^{+i xi_k . x_j}.
/// Round trip is exact to machine precision.
Field inverse_ft(const Field& uh);

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

/// (cell^d sum |u|^p w)^{1/p}; p = inf gives the grid max of |u| (weights are
/// irrelevant for the discrete essential sup). Rejects p < 1.
double lp_norm(const Field& u, double p, const WeightField* w = nullptr);

/// Iterated block norm with exps.size() blocks of axes/exps.size() axes each:
/// the last block (fastest axes) is reduced first with exps.back(), so
/// exps[0] is the outermost norm over block 1. Exponents may be inf. With all
/// exponents equal this matches lp_norm up to rounding.
double mixed_norm(const Field& u, std::span<const double> exps);

// ---------------------------------------------------------------------------
// Test signals
// ---------------------------------------------------------------------------

/// Random band-limited field: independent complex-normal coefficients on the
/// frequency lattice points with |xi| <= band, zero elsewhere. A mode's
/// coefficient depends on (seed, mode index) only, so refining G extends the
/// same underlying function. Requires band < nyquist.
Field random_bandlimited(const GridSpec& g, int axes, double band, std::uint64_t seed);

/// Unit point mass h^{-d} at lattice index j0 (all axes); its transform is
/// the pure phase e^{-i xi . x_{j0}}.
Field delta_field(const GridSpec& g, int axes, int j0);

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// One JSON header line {"n","N","L","G","axes","domain","points"} followed by
/// row-major little-endian (re, im) float64 pairs.
void save_field(const std::string& path, const Field& u);
Field load_field(const std::string& path);

}  // namespace pdolab
