#include "etpa/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "etpa/errors.hpp"
#include "etpa/opa.hpp"

namespace etpa::sweep {

namespace {

std::string join_path(const std::string& base, const std::string& p) {
  if (p.empty() || p.front() == '/' || base.empty()) return p;
  return base + "/" + p;
}

PulseShape shape_from_config(const json& s) {
  const std::string type = s.at("type").get<std::string>();
  if (type == "rectangular") return Rectangular{s.at("duration").get<double>()};
  if (type == "exponential") return ExponentialOneSided{s.at("gamma").get<double>()};
  if (type == "gaussian") return GaussianSpectral{s.at("sigma").get<double>()};
  throw std::invalid_argument("config: unknown shape type '" + type + "'");
}

JointSpectralAmplitude jsa_from_config(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "antidiagonal")
    return JointSpectralAmplitude::anti_diagonal(shape_from_config(j.at("narrow")),
                                                 shape_from_config(j.at("broad")),
                                                 j.at("pump_omega").get<double>());
  if (type == "separable") {
    const json& p = j.at("phi0");
    return JointSpectralAmplitude::separable(
        SpectralAmplitude(shape_from_config(p), p.at("omega0").get<double>()));
  }
  if (type == "csv") return JointSpectralAmplitude::sampled(io::load_jsa_csv(j.at("path")));
  throw std::invalid_argument("config: unknown jsa type '" + type + "'");
}

std::size_t worker_count() {
  if (const char* env = std::getenv("TPA_WORKERS")) {
    const long n = std::atol(env);
    if (n >= 1) return std::size_t(n);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

json* resolve_parameter(json& cfg, const std::string& name) {
  // dotted path into the config document
  json* node = &cfg;
  std::stringstream ss(name);
  std::string key;
  while (std::getline(ss, key, '.')) {
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &(*node)[key];
  }
  return node->is_number() ? node : nullptr;
}

}  // namespace

ScenarioConfig ScenarioConfig::parse(const json& j) {
  if (j.value("version", 0) != 1) throw std::invalid_argument("config: unsupported version");
  if (!j.contains("molecule")) throw std::invalid_argument("config: missing molecule");
  if (!j.contains("light")) throw std::invalid_argument("config: missing light");
  return ScenarioConfig{j};
}

ScenarioConfig ScenarioConfig::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot read " + path);
  json j;
  f >> j;
  return parse(j);
}

LevelSystem molecule_from_config(const json& cfg, const std::string& base_dir) {
  const json& m = cfg.at("molecule");
  if (m.is_string()) return io::load_level_system(join_path(base_dir, m.get<std::string>()));
  return io::level_system_from_json(m);
}

SIContext units_from_config(const json& cfg) {
  if (!cfg.contains("units")) return SIContext::reduced_units();
  const json& u = cfg.at("units");
  const std::string mode = u.value("mode", "reduced");
  if (mode == "reduced") return SIContext::reduced_units();
  if (mode == "si")
    return SIContext::si(u.at("omega0").get<double>(), u.value("n", 1.0),
                         u.at("area").get<double>());
  throw std::invalid_argument("config: units.mode must be 'reduced' or 'si'");
}

LightState light_from_config(const json& light) {
  const std::string kind = light.at("kind").get<std::string>();
  if (kind == "coherent" || kind == "single") {
    const json& s = light.at("shape");
    SpectralAmplitude phi(shape_from_config(s), s.at("omega0").get<double>());
    if (kind == "single") return SinglePhotonState{std::move(phi)};
    const double n = light.value("photons", 1.0);
    return CoherentState{std::sqrt(n), std::move(phi)};
  }
  if (kind == "epp") {
    JointSpectralAmplitude jsa = jsa_from_config(light.at("jsa"));
    const double d = light.value("dispersion", 0.0);
    if (d != 0.0) jsa = apply_dispersion(jsa, d);
    return TwoPhotonState(light.value("epsilon", 0.1), std::move(jsa));
  }
  throw std::invalid_argument("config: light.kind must be coherent, single or epp");
}

RunResult run_scenario(const ScenarioConfig& cfg, const std::string& base_dir) {
  const LevelSystem level = molecule_from_config(cfg.raw, base_dir);
  const SIContext si = units_from_config(cfg.raw);

  std::vector<SweepAxis> axes;
  for (const auto& a : cfg.raw.value("sweep", json::array())) {
    SweepAxis ax;
    ax.parameter = a.at("parameter").get<std::string>();
    ax.from = a.at("from").get<double>();
    ax.to = a.at("to").get<double>();
    ax.log_scale = a.value("scale", "linear") == "log";
    ax.count = a.at("count").get<std::size_t>();
    if (ax.count < 1) throw std::invalid_argument("config: sweep count must be >= 1");
    if (ax.log_scale && (ax.from <= 0.0 || ax.to <= 0.0))
      throw std::invalid_argument("config: log sweep needs positive range");
    {
      // validate the parameter path up front
      json probe = cfg.raw;
      if (!resolve_parameter(probe, ax.parameter))
        throw std::invalid_argument("config: unknown sweep parameter '" + ax.parameter + "'");
    }
    axes.push_back(std::move(ax));
  }

  std::size_t total = 1;
  for (const auto& ax : axes) total *= ax.count;

  RunResult out;
  out.records.resize(total);
  out.columns = {"index"};
  for (const auto& ax : axes) out.columns.push_back(ax.parameter);
  for (const char* c : {"p_dqc", "p_nrp", "p_rp", "p_nrp_rp", "p_total", "spectral_factor",
                        "prefactor", "method", "warnings"})
    out.columns.push_back(c);

  std::atomic<std::size_t> next{0};
  std::atomic<int> exit_code{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      SweepRecord rec;
      rec.index = idx;
      json point = cfg.raw;
      std::size_t rest = idx;
      for (const auto& ax : axes) {
        const std::size_t k = rest % ax.count;
        rest /= ax.count;
        double v = ax.from;
        if (ax.count > 1) {
          const double t = double(k) / double(ax.count - 1);
          v = ax.log_scale ? ax.from * std::pow(ax.to / ax.from, t)
                           : ax.from + (ax.to - ax.from) * t;
        }
        *resolve_parameter(point, ax.parameter) = v;
        rec.swept.emplace_back(ax.parameter, v);
      }
      try {
        const LightState state = light_from_config(point.at("light"));
        const PathwayResult r = compute_pathways(level, si, state);
        rec.p_dqc = r.p_dqc;
        rec.p_nrp = r.p_nrp;
        rec.p_rp = r.p_rp;
        rec.p_nrp_rp = r.p_nrp_rp;
        rec.p_total = r.total();
        rec.spectral_factor = r.spectral_factor;
        rec.prefactor = r.prefactor;
        rec.method = r.method;
        rec.warnings = r.warnings;
      } catch (const NearResonanceError& e) {
        rec.guard_error = true;
        rec.error = e.what();
        rec.p_dqc = rec.p_nrp = rec.p_rp = rec.p_nrp_rp = rec.p_total =
            std::numeric_limits<double>::quiet_NaN();
        rec.warnings.push_back(std::string("guard: ") + e.what());
        int expected = 0;
        exit_code.compare_exchange_strong(expected, 2);
      } catch (const ConvergenceError& e) {
        rec.error = e.what();
        rec.warnings.push_back(std::string("convergence: ") + e.what());
        exit_code.store(3);
      }
      out.records[idx] = std::move(rec);
    }
  };

  const std::size_t nw = std::min(worker_count(), std::max<std::size_t>(total, 1));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < nw; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  out.exit_code = exit_code.load();
  return out;
}

namespace {

std::string sanitize_cell(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

}  // namespace

void write_records_csv(const RunResult& r, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  for (std::size_t i = 0; i < r.columns.size(); ++i) f << (i ? "," : "") << r.columns[i];
  f << "\n";
  for (const auto& rec : r.records) {
    f << rec.index;
    for (const auto& [name, v] : rec.swept) f << "," << io::format_double(v);
    for (double v : {rec.p_dqc, rec.p_nrp, rec.p_rp, rec.p_nrp_rp, rec.p_total,
                     rec.spectral_factor, rec.prefactor})
      f << "," << io::format_double(v);
    f << "," << rec.method;
    std::string w;
    for (const auto& s : rec.warnings) {
      if (!w.empty()) w += ";";
      w += sanitize_cell(s);
    }
    f << "," << w << "\n";
  }
}

void write_records_json(const RunResult& r, const std::string& path) {
  json rows = json::array();
  for (const auto& rec : r.records) {
    json row;
    row["index"] = rec.index;
    for (const auto& [name, v] : rec.swept) row["swept"][name] = v;
    row["p_dqc"] = rec.p_dqc;
    row["p_nrp"] = rec.p_nrp;
    row["p_rp"] = rec.p_rp;
    row["p_nrp_rp"] = rec.p_nrp_rp;
    row["p_total"] = rec.p_total;
    row["spectral_factor"] = rec.spectral_factor;
    row["prefactor"] = rec.prefactor;
    row["method"] = rec.method;
    row["warnings"] = rec.warnings;
    if (!rec.error.empty()) row["error"] = rec.error;
    rows.push_back(std::move(row));
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << json{{"rows", rows}}.dump(2) << "\n";
}

void write_schema_file(const RunResult& r, const std::string& path) {
  json j;
  j["format"] = "tpa_sweep_csv";
  j["version"] = 1;
  j["columns"] = r.columns;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << "\n";
}

std::string csv_schema_help() {
  return "CSV columns, in order: index, one column per sweep axis (parameter name in the\n"
         "header), p_dqc, p_nrp, p_rp, p_nrp_rp, p_total, spectral_factor, prefactor,\n"
         "method, warnings (';'-separated). A <output>.schema.json file restates this.";
}

json QefReport::to_json() const {
  return json{{"analytic_qef", qef.analytic},
              {"computed_qef", qef.computed},
              {"agreement", qef.agreement},
              {"photon_factor", qef.photon_factor},
              {"spectral_ratio", qef.spectral_ratio},
              {"dominance_ratio", dominance_ratio}};
}

std::string QefReport::table() const {
  std::ostringstream os;
  os << "quantum enhancement factor\n";
  os << "  analytic (2 N_epp / N_coh^2 x sigma_B/Gamma): " << io::format_double(qef.analytic) << "\n";
  os << "  computed p_dqc ratio:                          " << io::format_double(qef.computed) << "\n";
  os << "  computed / analytic:                           " << io::format_double(qef.agreement) << "\n";
  os << "  photon-number factor:                          " << io::format_double(qef.photon_factor)
     << "\n";
  os << "  spectral factor sigma_B/Gamma:                 " << io::format_double(qef.spectral_ratio)
     << "\n";
  os << "  DQC/(NRP+RP) dominance ratio:                  " << io::format_double(dominance_ratio)
     << "\n";
  return os.str();
}

QefReport run_qef(const ScenarioConfig& cfg, const std::string& base_dir) {
  const LevelSystem level = molecule_from_config(cfg.raw, base_dir);
  const SIContext si = units_from_config(cfg.raw);
  if (!cfg.raw.contains("coherent") || !cfg.raw.contains("epp"))
    throw std::invalid_argument("qef config: needs paired 'coherent' and 'epp' blocks");
  json cj = cfg.raw.at("coherent");
  cj["kind"] = "coherent";
  json ej = cfg.raw.at("epp");
  ej["kind"] = "epp";
  const LightState cs = light_from_config(cj);
  const LightState es = light_from_config(ej);
  QefReport rep{};
  rep.qef = qef(level, si, std::get<CoherentState>(cs), std::get<TwoPhotonState>(es));
  rep.dominance_ratio =
      pathway_dominance_ratio(level, si, std::get<TwoPhotonState>(es));
  return rep;
}

json OpaReport::to_json() const {
  return json{{"p", p}, {"perturbative_warning", perturbative_warning}};
}

OpaReport run_opa(const ScenarioConfig& cfg, const std::string& base_dir) {
  const LevelSystem level = molecule_from_config(cfg.raw, base_dir);
  const SIContext si = units_from_config(cfg.raw);
  const LightState state = light_from_config(cfg.raw.at("light"));
  const std::size_t target =
      cfg.raw.contains("target") ? level.index_of(cfg.raw.at("target").get<std::string>()) : 0;
  OpaReport rep{};
  if (const auto* coh = std::get_if<CoherentState>(&state))
    rep.p = p_opa_coherent(level, si, *coh, target);
  else if (const auto* sp = std::get_if<SinglePhotonState>(&state))
    rep.p = p_opa_single_photon(level, si, *sp, target);
  else
    throw std::invalid_argument("opa config: light must be coherent or single");
  rep.perturbative_warning = opa_perturbative_warning(rep.p);
  return rep;
}

}  // namespace etpa::sweep
