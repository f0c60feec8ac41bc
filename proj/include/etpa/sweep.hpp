#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "etpa/io.hpp"
#include "etpa/tpa.hpp"

namespace etpa::sweep {

using json = nlohmann::json;

// CLI-facing run description (JSON document, version 1). See
// docs in README and `tpa run --help` for the schema.
struct ScenarioConfig {
  json raw;
  static ScenarioConfig parse(const json& j);
  static ScenarioConfig parse_file(const std::string& path);
};

struct SweepAxis {
  std::string parameter;
  double from, to;
  bool log_scale;
  std::size_t count;
};

struct SweepRecord {
  std::size_t index = 0;
  std::vector<std::pair<std::string, double>> swept;
  double p_dqc = 0, p_nrp = 0, p_rp = 0, p_nrp_rp = 0, p_total = 0;
  double spectral_factor = 0, prefactor = 0;
  std::string method;
  std::vector<std::string> warnings;
  bool guard_error = false;        // physics-guard violation on this row
  std::string error;
};

struct RunResult {
  std::vector<SweepRecord> records;
  std::vector<std::string> columns;
  int exit_code = 0;  // 0 ok, 2 physics-guard rows, 3 convergence failure
};

// Builders shared by the CLI commands and tests.
LevelSystem molecule_from_config(const json& cfg, const std::string& base_dir);
SIContext units_from_config(const json& cfg);
LightState light_from_config(const json& light);

// Executes the sweep on a worker pool (TPA_WORKERS env or hardware
// concurrency); output rows are ordered by sweep index.
RunResult run_scenario(const ScenarioConfig& cfg, const std::string& base_dir);

void write_records_csv(const RunResult& r, const std::string& path);
void write_records_json(const RunResult& r, const std::string& path);
void write_schema_file(const RunResult& r, const std::string& path);
std::string csv_schema_help();

struct QefReport {
  QefResult qef;
  double dominance_ratio;
  json to_json() const;
  std::string table() const;
};
QefReport run_qef(const ScenarioConfig& cfg, const std::string& base_dir);

struct OpaReport {
  double p;
  bool perturbative_warning;
  json to_json() const;
};
OpaReport run_opa(const ScenarioConfig& cfg, const std::string& base_dir);

}  // namespace etpa::sweep
