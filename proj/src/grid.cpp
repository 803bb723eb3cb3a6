#include "pdolab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pdolab/fft.hpp"
#include "pdolab/rng.hpp"

namespace pdolab {

// ---------------------------------------------------------------------------
// GridSpec
// ---------------------------------------------------------------------------

GridSpec GridSpec::make(int n, int N, double L, int G) {
  if (n < 1) throw std::invalid_argument("GridSpec: n must be >= 1");
  if (N < 1) throw std::invalid_argument("GridSpec: N must be >= 1");
  if (!(L > 0.0)) throw std::invalid_argument("GridSpec: L must be positive");
  if (G < 4 || (G & (G - 1)) != 0)
    throw std::invalid_argument("GridSpec: G must be a power of two, >= 4");
  return GridSpec{n, N, L, G};
}

int GridSpec::kmax() const {
  // Largest k with 2^k <= nyquist(). The lattice resolves dyadic shells up
  // to roughly this scale.
  return static_cast<int>(std::floor(std::log2(nyquist()) + 1e-12));
}

int GridSpec::wrap_sigma(long s) const {
  long g = G;
  long m = ((s % g) + g) % g; // into [0, G)
  if (m >= g / 2) m -= g;     // into [-G/2, G/2)
  return static_cast<int>(m);
}

int GridSpec::wrap_count(long s) const {
  return static_cast<int>((s - wrap_sigma(s)) / G);
}

// ---------------------------------------------------------------------------
// Field
// ---------------------------------------------------------------------------

Field::Field(const GridSpec& g, int axes_, Domain dom) {
  if (axes_ < 1) throw std::invalid_argument("Field: axes must be >= 1");
  grid = g;
  axes = axes_;
  domain = dom;
  std::size_t total = 1;
  for (int a = 0; a < axes; ++a) total *= static_cast<std::size_t>(g.G);
  v.assign(total, cdouble{0.0, 0.0});
}

double Field::cell() const {
  double c = 1.0;
  for (int a = 0; a < axes; ++a) c *= cell1();
  return c;
}

double Field::coord(int j) const {
  switch (domain) {
    case Domain::Space: return grid.x(j);
    case Domain::Frequency: return grid.xi(j);
    case Domain::Displacement: return grid.sigma(j) * grid.h();
  }
  return 0.0;
}

void Field::decode(std::size_t flat, int* bins) const {
  for (int a = axes - 1; a >= 0; --a) {
    bins[a] = static_cast<int>(flat % grid.G);
    flat /= grid.G;
  }
}

std::size_t Field::encode(const int* bins) const {
  std::size_t flat = 0;
  for (int a = 0; a < axes; ++a)
    flat = flat * grid.G + static_cast<std::size_t>(bins[a]);
  return flat;
}

WeightField WeightField::ones(const GridSpec& g, int axes) {
  WeightField w;
  w.grid = g;
  w.axes = axes;
  std::size_t total = 1;
  for (int a = 0; a < axes; ++a) total *= static_cast<std::size_t>(g.G);
  w.v.assign(total, 1.0);
  return w;
}

double WeightField::cell() const {
  double c = 1.0;
  for (int a = 0; a < axes; ++a) c *= grid.h();
  return c;
}

// ---------------------------------------------------------------------------
// ExponentTriple
// ---------------------------------------------------------------------------

namespace {
double checked_reciprocal(double p, const char* which) {
  if (std::isinf(p)) return 0.0;
  if (!(p >= 1.0))
    throw std::invalid_argument(std::string("ExponentTriple: ") + which +
                                " must lie in [1, inf]");
  return 1.0 / p;
}
}  // namespace

ExponentTriple ExponentTriple::pqr(double p, double q, double r) {
  ExponentTriple t;
  t.ip = checked_reciprocal(p, "p");
  t.iq = checked_reciprocal(q, "q");
  t.ir = std::isinf(r) ? 0.0 : 1.0 / r; // r may drop below 1 for N >= 2
  if (!(r > 0.0))
    throw std::invalid_argument("ExponentTriple: r must be positive");
  if (std::abs(t.ip + t.iq - t.ir) > 1e-12)
    throw std::invalid_argument("ExponentTriple: 1/p + 1/q must equal 1/r");
  return t;
}

ExponentTriple ExponentTriple::reciprocals(double ip, double iq, double ir) {
  if (ip < 0 || iq < 0 || ir < 0)
    throw std::invalid_argument("ExponentTriple: reciprocals must be >= 0");
  if (std::abs(ip + iq - ir) > 1e-12)
    throw std::invalid_argument("ExponentTriple: 1/p + 1/q must equal 1/r");
  return ExponentTriple{ip, iq, ir};
}

bool ExponentTriple::in_triangle() const {
  return ip >= 0.0 && iq >= 0.0 && ip <= 1.0 && iq <= 1.0 && ir <= 1.0;
}

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

namespace {

// e^{i pi sigma (1 - 1/G)} for each storage bin. The signed index matters:
// the twiddle is antiperiodic, W(sigma + G) = -W(sigma), which is exactly the
// sign e^{i x zeta} picks up on the half-cell-shifted lattice when zeta
// leaves the fundamental band.
std::vector<cdouble> shift_twiddles(const GridSpec& g) {
  std::vector<cdouble> tw(g.G);
  for (int k = 0; k < g.G; ++k)
    tw[k] = std::polar(1.0, kPi * g.sigma(k) * (1.0 - 1.0 / g.G));
  return tw;
}

void apply_per_axis(Field& f, const std::vector<cdouble>& tw, bool conjugate) {
  const int G = f.grid.G;
  for (std::size_t flat = 0; flat < f.v.size(); ++flat) {
    std::size_t rem = flat;
    cdouble t{1.0, 0.0};
    for (int a = 0; a < f.axes; ++a) {
      t *= tw[rem % G];
      rem /= G;
    }
    f.v[flat] *= conjugate ? std::conj(t) : t;
  }
}

}  // namespace

Field forward_ft(const Field& u) {
  if (u.domain != Domain::Space)
    throw std::invalid_argument("forward_ft: input must live on the spatial lattice");
  Field out = u;
  fft::dft(out.v, out.axes, out.grid.G, -1);
  auto tw = shift_twiddles(out.grid);
  apply_per_axis(out, tw, /*conjugate=*/false);
  double scale = std::pow(out.grid.h(), out.axes);
  for (auto& z : out.v) z *= scale;
  out.domain = Domain::Frequency;
  return out;
}

Field inverse_ft(const Field& uh) {
  if (uh.domain != Domain::Frequency)
    throw std::invalid_argument("inverse_ft: input must live on the frequency lattice");
  Field out = uh;
  auto tw = shift_twiddles(out.grid);
  apply_per_axis(out, tw, /*conjugate=*/true);
  fft::dft(out.v, out.axes, out.grid.G, +1);
  double scale = std::pow(1.0 / (out.grid.G * out.grid.h()), out.axes);
  for (auto& z : out.v) z *= scale;
  out.domain = Domain::Space;
  return out;
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

double lp_norm(const Field& u, double p, const WeightField* w) {
  if (w && w->v.size() != u.v.size())
    throw std::invalid_argument("lp_norm: weight lattice does not match field");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& z : u.v) m = std::max(m, std::abs(z));
    return m;
  }
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must lie in [1, inf]");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.v.size(); ++i) {
    double a = std::abs(u.v[i]);
    acc += std::pow(a, p) * (w ? w->v[i] : 1.0);
  }
  return std::pow(u.cell() * acc, 1.0 / p);
}

double mixed_norm(const Field& u, std::span<const double> exps) {
  const int B = static_cast<int>(exps.size());
  if (B < 1 || u.axes % B != 0)
    throw std::invalid_argument("mixed_norm: block count must divide axes");
  const int bs = u.axes / B;
  std::size_t block_pts = 1;
  for (int a = 0; a < bs; ++a) block_pts *= static_cast<std::size_t>(u.grid.G);
  double cell_b = std::pow(u.cell1(), bs);

  std::vector<double> cur(u.v.size());
  for (std::size_t i = 0; i < u.v.size(); ++i) cur[i] = std::abs(u.v[i]);

  // Reduce the fastest block first (the innermost norm), then work outward.
  for (int b = B - 1; b >= 0; --b) {
    double e = exps[static_cast<std::size_t>(b)];
    std::size_t outer = cur.size() / block_pts;
    std::vector<double> nxt(outer);
    if (std::isinf(e)) {
      for (std::size_t o = 0; o < outer; ++o) {
        double m = 0.0;
        for (std::size_t i = 0; i < block_pts; ++i)
          m = std::max(m, cur[o * block_pts + i]);
        nxt[o] = m;
      }
    } else {
      if (!(e >= 1.0))
        throw std::invalid_argument("mixed_norm: exponents must lie in [1, inf]");
      for (std::size_t o = 0; o < outer; ++o) {
        double acc = 0.0;
        for (std::size_t i = 0; i < block_pts; ++i)
          acc += std::pow(cur[o * block_pts + i], e);
        nxt[o] = std::pow(cell_b * acc, 1.0 / e);
      }
    }
    cur = std::move(nxt);
  }
  return cur[0];
}

// ---------------------------------------------------------------------------
// Test signals
// ---------------------------------------------------------------------------

Field random_bandlimited(const GridSpec& g, int axes, double band, std::uint64_t seed) {
  if (!(band > 0.0) || band >= g.nyquist())
    throw std::invalid_argument("random_bandlimited: band must lie inside the resolvable range");
  Field uh(g, axes, Domain::Frequency);
  uh.band = band;
  std::vector<int> bins(axes);
  for (std::size_t flat = 0; flat < uh.v.size(); ++flat) {
    uh.decode(flat, bins.data());
    double r2 = 0.0;
    for (int a = 0; a < axes; ++a) {
      double xi = g.xi(bins[a]);
      r2 += xi * xi;
    }
    if (r2 > band * band) continue;
    rng::Stream s(seed);
    for (int a = 0; a < axes; ++a) s.mix(g.sigma(bins[a]));
    s.mix(axes); // distinguish (k) from (k, 0, ...)
    uh.v[flat] = s.cnormal();
  }
  Field u = inverse_ft(uh);
  u.band = band;
  return u;
}

Field delta_field(const GridSpec& g, int axes, int j0) {
  if (j0 < 0 || j0 >= g.G) throw std::invalid_argument("delta_field: bad index");
  Field u(g, axes, Domain::Space);
  std::vector<int> bins(axes, j0);
  u.v[u.encode(bins.data())] = std::pow(1.0 / g.h(), axes);
  return u;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

void save_field(const std::string& path, const Field& u) {
  nlohmann::json hdr;
  hdr["n"] = u.grid.n;
  hdr["N"] = u.grid.N;
  hdr["L"] = u.grid.L;
  hdr["G"] = u.grid.G;
  hdr["axes"] = u.axes;
  hdr["domain"] = static_cast<int>(u.domain);
  hdr["points"] = u.v.size();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_field: cannot open " + path);
  f << hdr.dump() << "\n";
  f.write(reinterpret_cast<const char*>(u.v.data()),
          static_cast<std::streamsize>(u.v.size() * sizeof(cdouble)));
  if (!f) throw std::runtime_error("save_field: write failed for " + path);
}

Field load_field(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_field: cannot open " + path);
  std::string line;
  std::getline(f, line);
  nlohmann::json hdr = nlohmann::json::parse(line);
  GridSpec g = GridSpec::make(hdr.at("n").get<int>(), hdr.at("N").get<int>(),
                              hdr.at("L").get<double>(), hdr.at("G").get<int>());
  Field u(g, hdr.at("axes").get<int>(),
          static_cast<Domain>(hdr.at("domain").get<int>()));
  if (u.v.size() != hdr.at("points").get<std::size_t>())
    throw std::runtime_error("load_field: header is inconsistent");
  f.read(reinterpret_cast<char*>(u.v.data()),
         static_cast<std::streamsize>(u.v.size() * sizeof(cdouble)));
  if (!f) throw std::runtime_error("load_field: truncated payload in " + path);
  return u;
}

}  // namespace pdolab
