#pragma once
// Deterministic random streams. std::normal_distribution is implementation
// defined, so the generators here are spelled out explicitly: report bytes
// must not depend on the standard library vendor.

#include <cstdint>
#include <cmath>
#include <complex>

namespace pdolab::rng {

inline std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// One independent stream per (seed, tags...) tuple. Mixing integer tags into
/// the state lets a lattice mode keep its coefficient when the grid is
/// refined: the stream depends on the mode index, never on G.
class Stream {
 public:
  explicit Stream(std::uint64_t seed)
      : state_(seed * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL) {}

  Stream& mix(std::int64_t tag) {
    std::uint64_t t = static_cast<std::uint64_t>(tag) + 0x632be59bd9b4e019ULL;
    state_ = (state_ ^ t) * 0xff51afd7ed558ccdULL;
    state_ ^= state_ >> 33;
    return *this;
  }

  std::uint64_t next() { return splitmix64(state_); }

  /// Uniform on (0,1]; never returns 0, so log() below is safe.
  double uniform() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal (Box-Muller, cosine branch).
  double normal() {
    double u = uniform(), v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925287 * v);
  }

  /// Complex with independent N(0,1) real and imaginary parts.
  std::complex<double> cnormal() {
    double u = uniform(), v = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    double t = 6.283185307179586476925287 * v;
    return {r * std::cos(t), r * std::sin(t)};
  }

 private:
  std::uint64_t state_;
};

}  // namespace pdolab::rng
