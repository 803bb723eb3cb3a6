#pragma once
// Result records for inequality experiments and their serialization. The CSV
// stream holds only deterministic columns so repeated runs are byte
// identical; wall-clock timings go to the JSON report alone.

#include <cstdint>
#include <string>
#include <vector>

namespace pdolab::report {

struct TrialRow {
  std::string experiment;
  int G = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double ratio = 0.0;
};

struct ExperimentOutcome {
  std::string name;
  std::string kind;
  bool gate = true;  // gated outcomes decide the process exit code
  bool pass = false;
  std::string detail;            // one-line human-readable summary
  std::vector<int> grids;        // ladder actually run
  std::vector<double> sup_ratio; // worst ratio per ladder level
  double stability = 0.0;        // max/min of sup_ratio (1 when single level)
  std::vector<TrialRow> rows;
  double runtime_s = 0.0;
};

struct SuiteResult {
  std::vector<ExperimentOutcome> outcomes;
  bool pass = false; // all gated outcomes passed
  double runtime_s = 0.0;
};

/// experiment,G,trial,seed,ratio with ratios in %.17g; rows in outcome order.
void write_csv(const std::string& path, const SuiteResult& res);

/// Full outcome dump including timings and the echoed configuration text.
void write_json(const std::string& path, const SuiteResult& res,
                const std::string& config_echo);

}  // namespace pdolab::report
