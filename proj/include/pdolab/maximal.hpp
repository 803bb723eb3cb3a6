#pragma once
// Uncentered grid maximal functions over l-infinity cubes, their iterated
// (per-block) variants, the convolution-majorant inequality they satisfy, and
// the scale-uniform radial profiles used to majorize dyadic kernel pieces.

#include <cstdint>
#include <span>
#include <vector>

#include "pdolab/grid.hpp"

namespace pdolab::maximal {

/// M_p u (x) = sup over lattice-centered cubes containing x of the cube
/// average of |u|^p, to the power 1/p. Cube half-widths run over r h for
/// r = 0..G/2 (r = 0 is the point itself, so M_p u >= |u|). Windows wrap
/// circularly and never count a point twice. Output is real-valued.
Field apply(const Field& u, double p);

/// Same sup computed by direct enumeration; O(G^{2d}) and meant as an oracle.
Field apply_brute(const Field& u, double p);

/// Iterated maximal over blocks of `block_axes` axes: the block of the
/// fastest axes (the innermost variables) is processed first, remaining axes
/// held fixed, then the next block outward, and so on. Note (|u|^p block
/// averages)^{1/p} compose so that one power/root pair around plain block
/// maximals equals the iterated M_p composite.
Field iterated(const Field& u, double p, int block_axes);

struct MajorantReport {
  bool pass = false;
  double worst_slack = 0.0; // min over x of ||phi||_1 M u - phi * u
  double worst_rel = 0.0;   // most negative slack relative to ||phi||_1 M u
};

/// Discrete layer-cake bound: for phi radial (in l-infinity lattice radius)
/// and non-increasing, phi * u <= ||phi||_1 M_1 u at every grid point.
/// `profile[r]` is the value of phi on the shell of radius r, r = 0..G/2;
/// the profile must be non-negative and non-increasing (throws otherwise).
/// u is taken by absolute value.
MajorantReport convolution_majorant_check(const Field& u,
                                          std::span<const double> profile,
                                          double tol = 1e-12);

/// Scale-calibrated radial profile
///   sigma_k(t) = 2^{k rho n / p'}                      for t <= 2^{-k rho},
///                2^{k rho (n/p' - s)} t^{-s}           for t >  2^{-k rho},
/// continuous at the break. Finite L^{p'} mass needs s > n/p' (throws below
/// that), and then the integral of sigma_k^{p'} over R^n is the same for
/// every k.
double sigma_profile(double t, int k, double rho, int n, double pprime, double s);

struct SigmaCheck {
  std::vector<double> integrals; // one value of || sigma_k ||_{p'}^{p'} per k
  double spread = 0.0;           // max/min - 1
  bool pass = false;
};

/// Radial midpoint quadrature of integral sigma_k^{p'} over the ball of
/// radius R in R^n, for k = kmin..kmax; passes when the values agree to
/// within `tol` relative spread.
SigmaCheck sigma_integral_check(int n, double rho, double pprime, double s,
                                int kmin, int kmax, double R = 16.0,
                                int quad_points = 400000, double tol = 0.05);

}  // namespace pdolab::maximal
