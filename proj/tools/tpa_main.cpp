#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "etpa/errors.hpp"
#include "etpa/sweep.hpp"
#include "etpa/validate.hpp"

namespace {

std::string dir_of(const std::string& path) {
  const auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

int cmd_run(const std::string& config_path) {
  etpa::sweep::ScenarioConfig cfg = etpa::sweep::ScenarioConfig::parse_file(config_path);
  etpa::sweep::RunResult res = etpa::sweep::run_scenario(cfg, dir_of(config_path));
  const auto out = cfg.raw.value("outputs", nlohmann::json::object());
  if (out.contains("csv")) {
    const std::string csv = out.at("csv").get<std::string>();
    etpa::sweep::write_records_csv(res, csv);
    etpa::sweep::write_schema_file(res, csv + ".schema.json");
  }
  if (out.contains("json")) etpa::sweep::write_records_json(res, out.at("json").get<std::string>());
  std::size_t guard_rows = 0;
  for (const auto& rec : res.records) guard_rows += rec.guard_error ? 1 : 0;
  std::cout << res.records.size() << " sweep point(s), " << guard_rows
            << " physics-guard failure(s)\n";
  return res.exit_code;
}

int cmd_validate(double tol, std::uint64_t seed, const std::string& out_path) {
  const etpa::validate::Report rep = etpa::validate::run(tol, seed);
  const std::string doc = rep.to_json().dump(2) + "\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    f << doc;
  }
  std::cout << doc;
  return rep.all_pass ? 0 : 4;
}

int cmd_qef(const std::string& config_path, const std::string& out_path) {
  etpa::sweep::ScenarioConfig cfg = etpa::sweep::ScenarioConfig::parse_file(config_path);
  const etpa::sweep::QefReport rep = etpa::sweep::run_qef(cfg, dir_of(config_path));
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    f << rep.to_json().dump(2) << "\n";
  }
  std::cout << rep.table();
  return 0;
}

int cmd_opa(const std::string& config_path) {
  etpa::sweep::ScenarioConfig cfg = etpa::sweep::ScenarioConfig::parse_file(config_path);
  const etpa::sweep::OpaReport rep = etpa::sweep::run_opa(cfg, dir_of(config_path));
  std::cout << rep.to_json().dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one- and two-photon absorption engine for classical and entangled light"};
  app.require_subcommand(1);
  app.footer(etpa::sweep::csv_schema_help() +
             "\nTPA_WORKERS sets the sweep worker count (default: hardware concurrency).");

  std::string config_path, out_path;
  double tol = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 12345;

  auto* run = app.add_subcommand("run", "execute a sweep scenario (CSV/JSON outputs)");
  run->add_option("config", config_path, "scenario JSON")->required();

  auto* validate = app.add_subcommand("validate", "oracle-vs-closed-form validation report");
  validate->add_option("--tol", tol, "override every check tolerance");
  validate->add_option("--seed", seed, "Monte-Carlo seed (report is byte-identical per seed)");
  validate->add_option("--out", out_path, "also write the JSON report here");

  auto* qef = app.add_subcommand("qef", "quantum enhancement factor for paired coherent/EPP runs");
  qef->add_option("config", config_path, "qef JSON (coherent + epp blocks)")->required();
  qef->add_option("--out", out_path, "also write the JSON report here");

  auto* opa = app.add_subcommand("opa", "one-photon absorption probability");
  opa->add_option("config", config_path, "scenario JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (validate->parsed()) return cmd_validate(tol, seed, out_path);
    if (qef->parsed()) return cmd_qef(config_path, out_path);
    if (opa->parsed()) return cmd_opa(config_path);
  } catch (const etpa::ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return 3;
  } catch (const etpa::NearResonanceError& e) {
    std::cerr << "physics guard: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
