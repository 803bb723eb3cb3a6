#pragma once
// Inequality experiments: each one measures the ratio of the two sides of a
// claimed bound on randomized inputs, across a ladder of grid resolutions.
// Because the random inputs are tied to frequency modes rather than grid
// bins, refining the grid keeps the same underlying functions; a bound that
// genuinely holds shows a sup ratio that stays put (stability < 2 across the
// ladder), while a false bound drifts upward as the grid resolves more of
// the symbol.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdolab/report.hpp"

namespace pdolab::verify {

// ---------------------------------------------------------------------------
// Order thresholds
// ---------------------------------------------------------------------------

/// Critical symbol order for the pointwise maximal-function bound:
/// (rho - 1) * sum_j n / p_j.
double pointwise_order_threshold(int n, double rho, std::span<const double> ps);

/// Critical order for the weighted bound driven by a dual exponent p':
/// n (rho - 1) / p'.
double weighted_order_threshold(int n, double rho, double pprime);

/// Critical order for the bilinear Lebesgue bound, sharper form:
/// n (rho - 1) * max{1/2, 2/p - 1/2, 2/q - 1/2, 3/2 - 2/r}.
double bilinear_order_strong(int n, double rho, double p, double q, double r);

/// Coarser bilinear threshold n (rho-1) (2 max{|1/p - 1/2|, |1/q - 1/2|} + 1/2).
double bilinear_order_weak(int n, double rho, double p, double q);

/// Which affine piece attains the max in bilinear_order_strong.
enum class TriangleRegion { Central, PCorner, QCorner, RCorner };
TriangleRegion bilinear_region(double p, double q, double r);

// ---------------------------------------------------------------------------
// Suite configuration and execution
// ---------------------------------------------------------------------------

/// Raised on malformed configuration (unknown keys, bad types, bad values);
/// the command line maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SuiteConfig {
  int schema = 1;
  std::uint64_t seed = 0;
  int trials = 20;        // default trial count, overridable per experiment
  std::string echo;       // normalized JSON text of the parsed config
  std::string raw;        // internal: experiment array for the runner
};

/// Parses and validates the strict schema-1 configuration. Top-level keys:
/// schema (=1, required), seed, trials, experiments (required array). Every
/// experiment entry needs name and kind plus the keys its kind defines;
/// anything unrecognized raises ConfigError.
SuiteConfig parse_config(const std::string& json_text);

struct RunOptions {
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;
  int grid_override = 0; // replace every experiment ladder by this single G
  int jobs = 1;
};

/// Runs every experiment in the configuration.
report::SuiteResult run_suite(const SuiteConfig& cfg, const RunOptions& opt);

}  // namespace pdolab::verify
