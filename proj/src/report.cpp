#include "pdolab/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pdolab::report {

void write_csv(const std::string& path, const SuiteResult& res) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("write_csv: cannot open " + path);
  std::fputs("experiment,G,trial,seed,ratio\n", f);
  for (const auto& out : res.outcomes)
    for (const auto& row : out.rows)
      std::fprintf(f, "%s,%d,%d,%" PRIu64 ",%.17g\n", row.experiment.c_str(),
                   row.G, row.trial, row.seed, row.ratio);
  if (std::fclose(f) != 0) throw std::runtime_error("write_csv: close failed");
}

void write_json(const std::string& path, const SuiteResult& res,
                const std::string& config_echo) {
  nlohmann::json j;
  j["pass"] = res.pass;
  j["runtime_s"] = res.runtime_s;
  j["config"] = nlohmann::json::parse(config_echo);
  j["experiments"] = nlohmann::json::array();
  for (const auto& out : res.outcomes) {
    nlohmann::json e;
    e["name"] = out.name;
    e["kind"] = out.kind;
    e["gate"] = out.gate;
    e["pass"] = out.pass;
    e["detail"] = out.detail;
    e["grids"] = out.grids;
    e["sup_ratio"] = out.sup_ratio;
    e["stability"] = out.stability;
    e["rows"] = out.rows.size();
    e["runtime_s"] = out.runtime_s;
    j["experiments"].push_back(std::move(e));
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_json: cannot open " + path);
  f << j.dump(2) << "\n";
}

}  // namespace pdolab::report
