#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "etpa/errors.hpp"
#include "etpa/fixtures.hpp"
#include "etpa/io.hpp"
#include "etpa/opa.hpp"
#include "etpa/oracle.hpp"
#include "etpa/special.hpp"

namespace py = pybind11;
using namespace etpa;

namespace {

PulseShape shape_from_kwargs(const std::string& type, double param) {
  if (type == "rectangular") return Rectangular{param};
  if (type == "exponential") return ExponentialOneSided{param};
  if (type == "gaussian") return GaussianSpectral{param};
  throw std::invalid_argument("shape type must be rectangular, exponential or gaussian");
}

}  // namespace

PYBIND11_MODULE(etpa, m) {
  m.doc() = "one- and two-photon absorption of classical and entangled light";

  py::register_exception<NearResonanceError>(m, "NearResonanceError");
  py::register_exception<ConvergenceError>(m, "ConvergenceError");
  py::register_exception<DegenerateStateError>(m, "DegenerateStateError");

  m.def("erfcx", &erfcx, py::arg("x"));
  m.def("xi_erfcx", &xi_erfcx, py::arg("z"));
  m.def("faddeeva_w", &faddeeva_w, py::arg("z"));
  m.def("kubo_decay_factor", &kubo_decay_factor, py::arg("gamma"), py::arg("omega"), py::arg("t"));

  py::class_<SpectralAmplitude>(m, "SpectralAmplitude")
      .def(py::init([](const std::string& type, double param, double omega0) {
             return SpectralAmplitude(shape_from_kwargs(type, param), omega0);
           }),
           py::arg("type"), py::arg("param"), py::arg("omega0"))
      .def_readonly("omega0", &SpectralAmplitude::omega0)
      .def("amplitude", &SpectralAmplitude::amplitude)
      .def("width", &SpectralAmplitude::width);
  m.def(
      "temporal_envelope",
      [](const SpectralAmplitude& phi, double t) { return temporal_envelope(phi, t).value; },
      py::arg("phi"), py::arg("t"));

  py::class_<JointSpectralAmplitude>(m, "JointSpectralAmplitude")
      .def_static("separable", &JointSpectralAmplitude::separable)
      .def_static(
          "anti_diagonal",
          [](const std::string& ntype, double nparam, const std::string& btype, double bparam,
             double pump) {
            return JointSpectralAmplitude::anti_diagonal(shape_from_kwargs(ntype, nparam),
                                                         shape_from_kwargs(btype, bparam), pump);
          },
          py::arg("narrow_type"), py::arg("narrow_param"), py::arg("broad_type"),
          py::arg("broad_param"), py::arg("pump_omega"))
      .def_static("two_mode", &JointSpectralAmplitude::two_mode)
      .def_property_readonly("symmetric", &JointSpectralAmplitude::symmetric)
      .def_property_readonly("omega0", &JointSpectralAmplitude::omega0)
      .def("value", &JointSpectralAmplitude::value)
      .def("norm_sq", &JointSpectralAmplitude::norm_sq);
  m.def("apply_dispersion",
        [](const JointSpectralAmplitude& jsa, double d) { return apply_dispersion(jsa, d); });
  m.def("dispersed_broad_width", &dispersed_broad_width);
  m.def("symmetrize_jsa", [](const JointSpectralAmplitude& jsa) {
    SymmetrizeResult r = symmetrize_jsa(jsa);
    return py::make_tuple(r.jsa, r.norm_before);
  });

  py::class_<CoherentState>(m, "CoherentState")
      .def(py::init<cd, SpectralAmplitude>(), py::arg("alpha0"), py::arg("phi"))
      .def_readonly("phi", &CoherentState::phi)
      .def("mean_photons", &CoherentState::mean_photons);
  py::class_<SinglePhotonState>(m, "SinglePhotonState")
      .def(py::init<SpectralAmplitude>(), py::arg("phi"));
  py::class_<TwoPhotonState>(m, "TwoPhotonState")
      .def(py::init<double, JointSpectralAmplitude>(), py::arg("epsilon"), py::arg("jsa"))
      .def_readonly("epsilon", &TwoPhotonState::epsilon)
      .def_readonly("jsa", &TwoPhotonState::jsa)
      .def("mean_photons", &TwoPhotonState::mean_photons)
      .def("non_isolated_pair_warning", &TwoPhotonState::non_isolated_pair_warning)
      .def("symmetrized", &TwoPhotonState::symmetrized);

  m.def("mean_photon_number", [](py::object s) {
    if (py::isinstance<CoherentState>(s)) return mean_photon_number(s.cast<CoherentState>());
    if (py::isinstance<SinglePhotonState>(s)) return mean_photon_number(s.cast<SinglePhotonState>());
    return mean_photon_number(s.cast<TwoPhotonState>());
  });

  py::class_<SIContext>(m, "SIContext")
      .def_static("reduced", &SIContext::reduced_units)
      .def_static("si", &SIContext::si, py::arg("omega0"), py::arg("n"), py::arg("area"))
      .def("L0", &SIContext::L0);

  py::class_<LevelSystem>(m, "LevelSystem")
      .def(py::init<double>(), py::arg("omega_f"))
      .def("add_intermediate", &LevelSystem::add_intermediate, py::arg("label"), py::arg("omega"),
           py::arg("mu_ge"), py::arg("mu_ef"))
      .def("set_dephasing", &LevelSystem::set_dephasing)
      .def("set_decay", &LevelSystem::set_decay)
      .def_property_readonly("omega_f", &LevelSystem::omega_f)
      .def("gamma_eff", &LevelSystem::gamma_eff)
      .def("dipole_product", &LevelSystem::dipole_product)
      .def("m_is_real", &LevelSystem::m_is_real, py::arg("tol") = 1e-12);
  m.def("build_symmetric_nmer", &build_symmetric_nmer, py::arg("n_monomers"), py::arg("mu_g"),
        py::arg("mu_f"), py::arg("U"), py::arg("intermediate_energies") = std::vector<double>{},
        py::arg("omega_f") = 2.0);
  m.def("sigma1", &sigma1, py::arg("level"), py::arg("si"), py::arg("omega_drive"),
        py::arg("target") = 0);
  m.def("big_sigma2", &big_sigma2, py::arg("level"), py::arg("omega0"),
        py::arg("guard_factor") = 10.0);
  m.def("sigma2_conventional", [](const LevelSystem& l, const SIContext& si, double w0) {
    const Sigma2Result r = sigma2_conventional(l, si, w0);
    return py::make_tuple(r.sigma2, r.amplitude_form);
  });
  m.def("induced_dipole_steady_state", &induced_dipole_steady_state);

  m.def("p_opa_coherent", &p_opa_coherent, py::arg("level"), py::arg("si"), py::arg("state"),
        py::arg("target") = 0);
  m.def("p_opa_single_photon", &p_opa_single_photon, py::arg("level"), py::arg("si"),
        py::arg("state"), py::arg("target") = 0);

  py::class_<PathwayResult>(m, "PathwayResult")
      .def_readonly("p_dqc", &PathwayResult::p_dqc)
      .def_readonly("p_nrp", &PathwayResult::p_nrp)
      .def_readonly("p_rp", &PathwayResult::p_rp)
      .def_readonly("p_nrp_rp", &PathwayResult::p_nrp_rp)
      .def_readonly("spectral_factor", &PathwayResult::spectral_factor)
      .def_readonly("prefactor", &PathwayResult::prefactor)
      .def_readonly("method", &PathwayResult::method)
      .def_readonly("warnings", &PathwayResult::warnings)
      .def("total", &PathwayResult::total)
      .def("to_json", [](const PathwayResult& r) { return io::pathway_result_to_json(r).dump(); });

  auto wrap_state = [](py::object s) -> LightState {
    if (py::isinstance<CoherentState>(s)) return s.cast<CoherentState>();
    if (py::isinstance<SinglePhotonState>(s)) return s.cast<SinglePhotonState>();
    return s.cast<TwoPhotonState>();
  };
  m.def(
      "p_dqc",
      [wrap_state](const LevelSystem& l, const SIContext& si, py::object s, double detuning) {
        return p_dqc(l, si, wrap_state(s), detuning);
      },
      py::arg("level"), py::arg("si"), py::arg("state"),
      py::arg("detuning") = std::numeric_limits<double>::quiet_NaN());
  m.def(
      "p_nrp_rp",
      [wrap_state](const LevelSystem& l, const SIContext& si, py::object s) {
        return p_nrp_rp(l, si, wrap_state(s));
      },
      py::arg("level"), py::arg("si"), py::arg("state"));
  m.def(
      "compute_pathways",
      [wrap_state](const LevelSystem& l, const SIContext& si, py::object s) {
        return compute_pathways(l, si, wrap_state(s));
      },
      py::arg("level"), py::arg("si"), py::arg("state"));
  m.def("pathway_dominance_ratio", &pathway_dominance_ratio);
  m.def("tpa_rate_quasimono", &tpa_rate_quasimono, py::arg("level"), py::arg("si"),
        py::arg("flux_density"), py::arg("detuning"));
  m.def(
      "p_dqc_impulsive",
      [](const LevelSystem& l, const SIContext& si, const std::vector<cd>& env, double dt) {
        const ImpulsiveResult r = p_dqc_impulsive(l, si, env, dt);
        return py::make_tuple(r.p, r.bandwidth_warning);
      },
      py::arg("level"), py::arg("si"), py::arg("envelope"), py::arg("dt"));
  m.def("qef", [](const LevelSystem& l, const SIContext& si, const CoherentState& c,
                  const TwoPhotonState& t) {
    const QefResult r = qef(l, si, c, t);
    return py::dict(py::arg("analytic") = r.analytic, py::arg("computed") = r.computed,
                    py::arg("agreement") = r.agreement, py::arg("photon_factor") = r.photon_factor,
                    py::arg("spectral_ratio") = r.spectral_ratio);
  });

  m.def(
      "kubo_monte_carlo",
      [](double gamma, double t, std::size_t traj, std::uint64_t seed, std::size_t steps) {
        const oracle::KuboResult r = oracle::kubo_monte_carlo(gamma, t, traj, seed, steps);
        return py::make_tuple(r.mean, r.std_error, r.phase_variance);
      },
      py::arg("gamma"), py::arg("t"), py::arg("trajectories"), py::arg("seed"),
      py::arg("steps") = 1000);
}
