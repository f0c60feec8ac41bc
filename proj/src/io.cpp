#include "etpa/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace etpa::io {

namespace {

json complex_to_json(cd z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

cd complex_from_json(const json& j) { return cd(j.at("re").get<double>(), j.at("im").get<double>()); }

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json level_system_to_json(const LevelSystem& level) {
  json j;
  j["schema_version"] = 1;
  j["omega_f"] = level.omega_f();
  json inter = json::array();
  for (std::size_t i = 0; i < level.n_intermediates(); ++i) {
    const Intermediate& lv = level.intermediate(i);
    inter.push_back(json{{"label", lv.label},
                         {"omega", lv.omega},
                         {"mu_ge", complex_to_json(lv.mu_ge)},
                         {"mu_ef", complex_to_json(lv.mu_ef)}});
  }
  j["intermediates"] = inter;
  json deph = json::array();
  for (const auto& [key, gamma] : level.dephasing_map())
    deph.push_back(json{{"levels", json::array({key.first, key.second})}, {"gamma", gamma}});
  j["dephasing"] = deph;
  json dec = json::array();
  for (const auto& [label, rate] : level.decay_map())
    dec.push_back(json{{"level", label}, {"rate", rate}});
  j["decay"] = dec;
  return j;
}

LevelSystem level_system_from_json(const json& j) {
  if (j.value("schema_version", 0) != 1)
    throw std::invalid_argument("level system: unsupported schema_version");
  LevelSystem level(j.at("omega_f").get<double>());
  for (const auto& it : j.at("intermediates"))
    level.add_intermediate(it.at("label").get<std::string>(), it.at("omega").get<double>(),
                           complex_from_json(it.at("mu_ge")), complex_from_json(it.at("mu_ef")));
  for (const auto& d : j.value("dephasing", json::array()))
    level.set_dephasing(d.at("levels").at(0).get<std::string>(),
                        d.at("levels").at(1).get<std::string>(), d.at("gamma").get<double>());
  for (const auto& d : j.value("decay", json::array()))
    level.set_decay(d.at("level").get<std::string>(), d.at("rate").get<double>());
  level.validate();
  return level;
}

void save_level_system(const LevelSystem& level, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << level_system_to_json(level).dump(2) << "\n";
}

LevelSystem load_level_system(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  json j;
  f >> j;
  return level_system_from_json(j);
}

json pathway_result_to_json(const PathwayResult& r) {
  json j;
  j["p_dqc"] = r.p_dqc;
  j["p_nrp"] = r.p_nrp;
  j["p_rp"] = r.p_rp;
  j["p_nrp_rp"] = r.p_nrp_rp;
  j["p_total"] = r.total();
  j["spectral_factor"] = r.spectral_factor;
  j["prefactor"] = r.prefactor;
  j["method"] = r.method;
  j["dqc_sum"] = complex_to_json(r.dqc_sum);
  j["nrp_sum"] = complex_to_json(r.nrp_sum);
  j["rp_sum"] = complex_to_json(r.rp_sum);
  j["nrp_rp_combined_sum"] = complex_to_json(r.nrp_rp_combined_sum);
  json pairs = json::array();
  for (const auto& p : r.pairs)
    pairs.push_back(json{{"e", p.e},
                         {"ep", p.ep},
                         {"r_dqc", complex_to_json(p.dqc)},
                         {"r_nrp", complex_to_json(p.nrp)},
                         {"r_rp", complex_to_json(p.rp)}});
  j["pairs"] = pairs;
  j["warnings"] = r.warnings;
  return j;
}

void save_jsa_csv(const Sampled2DJsa& jsa, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "jsa_csv,1\n";
  auto grid_row = [&](const char* name, const FrequencyGrid& g) {
    f << name << "," << format_double(g.center());
    for (std::size_t i = 0; i < g.size(); ++i) f << "," << format_double(g.point(i));
    f << "\n";
  };
  grid_row("grid_a", jsa.grid_a);
  grid_row("grid_b", jsa.grid_b);
  const std::size_t nb = jsa.grid_b.size();
  for (std::size_t i = 0; i < jsa.grid_a.size(); ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      if (j) f << ",";
      f << format_double(jsa.values[i * nb + j].real()) << ","
        << format_double(jsa.values[i * nb + j].imag());
    }
    f << "\n";
  }
}

namespace {

double parse_double(const std::string& cell) {
  // strtod handles subnormals without throwing
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) throw std::invalid_argument("jsa csv: bad number '" + cell + "'");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

FrequencyGrid parse_grid_row(const std::vector<std::string>& cells, const char* name) {
  if (cells.size() < 4 || cells[0] != name)
    throw std::invalid_argument(std::string("jsa csv: bad ") + name + " row");
  const double center = parse_double(cells[1]);
  std::vector<double> pts;
  pts.reserve(cells.size() - 2);
  for (std::size_t i = 2; i < cells.size(); ++i) pts.push_back(parse_double(cells[i]));
  return FrequencyGrid(std::move(pts), center);
}

}  // namespace

Sampled2DJsa load_jsa_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(f, line) || split_csv(line).size() < 2 || split_csv(line)[0] != "jsa_csv")
    throw std::invalid_argument("jsa csv: missing version line");
  std::getline(f, line);
  FrequencyGrid ga = parse_grid_row(split_csv(line), "grid_a");
  std::getline(f, line);
  FrequencyGrid gb = parse_grid_row(split_csv(line), "grid_b");
  Sampled2DJsa jsa{ga, gb, {}};
  jsa.values.reserve(ga.size() * gb.size());
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 2 * gb.size()) throw std::invalid_argument("jsa csv: bad matrix row width");
    for (std::size_t j = 0; j < gb.size(); ++j)
      jsa.values.emplace_back(parse_double(cells[2 * j]), parse_double(cells[2 * j + 1]));
  }
  if (jsa.values.size() != ga.size() * gb.size())
    throw std::invalid_argument("jsa csv: matrix row count does not match grid");
  return jsa;
}

}  // namespace etpa::io
