#include "etpa/validate.hpp"

#include <cmath>

#include "etpa/fixtures.hpp"
#include "etpa/opa.hpp"
#include "etpa/oracle.hpp"
#include "etpa/quad.hpp"
#include "etpa/special.hpp"

namespace etpa::validate {

namespace {

struct Battery {
  std::vector<Check> checks;
  double tol_override;

  void rel(const std::string& name, double computed, double target, double tol) {
    if (!std::isnan(tol_override)) tol = tol_override;
    const double scale = std::max(std::abs(target), 1e-300);
    const double diff = std::abs(computed - target) / scale;
    checks.push_back({name, computed, target, tol, diff <= tol, diff / tol});
  }
  void abs(const std::string& name, double computed, double target, double tol) {
    if (!std::isnan(tol_override)) tol = tol_override;
    const double diff = std::abs(computed - target);
    checks.push_back({name, computed, target, tol, diff <= tol, diff / tol});
  }
};

double xi_by_quadrature(double z) {
  // exp(z^2) * (2/sqrt(pi)) Int_z^inf e^{-t^2} dt with the overlap folded in
  // to stay bounded: substitute t = z + u.
  quad::Nodes nd = quad::rational_tail(0.0, 1.0 / (1.0 + z), 240);
  quad::KahanSum acc;
  for (std::size_t i = 0; i < nd.size(); ++i) {
    const double u = nd.x[i];
    acc.add(nd.w[i] * std::exp(-u * u - 2.0 * z * u));
  }
  return 2.0 / kSqrtPi * acc.value();
}

cd w_by_quadrature(cd z) {
  // w(z) = (i/pi) Int e^{-t^2} / (z - t) dt for Im z > 0
  quad::Nodes nd = quad::structured_line({{z.real(), std::max(z.imag(), 0.05)}, {0.0, 1.0}}, 14);
  quad::KahanSumC acc;
  for (std::size_t i = 0; i < nd.size(); ++i)
    acc.add(nd.w[i] * std::exp(-nd.x[i] * nd.x[i]) / (z - nd.x[i]));
  return cd(0.0, 1.0 / kPi) * acc.value();
}

}  // namespace

Report run(double tol_override, std::uint64_t seed) {
  using namespace etpa::fixtures;
  Battery b{{}, tol_override};
  const SIContext red = SIContext::reduced_units();

  // special functions against quadrature
  b.rel("xi_erfcx(1) vs quadrature", xi_erfcx(1.0), xi_by_quadrature(1.0), 1e-12);
  b.rel("faddeeva Re w(0.7+0.4i) vs quadrature", faddeeva_w(cd(0.7, 0.4)).real(),
        w_by_quadrature(cd(0.7, 0.4)).real(), 1e-11);

  // Kubo Monte Carlo vs exp(-gamma t), in standard errors
  {
    const auto mc = oracle::kubo_monte_carlo(1.0, 1.0, 20000, seed);
    b.abs("kubo MC (gamma=1,t=1) deviation [std errors]",
          std::abs(mc.mean - cd(std::exp(-1.0), 0.0)) / mc.std_error, 0.0, 3.0);
    b.rel("kubo MC phase variance vs 2 gamma t", mc.phase_variance, 2.0, 0.05);
  }

  // coherent DQC closed forms vs the far-off oracle
  const LevelSystem mol = single_intermediate(0.5, 0.2);
  auto dqc_check = [&](const std::string& name, const LightState& st, double tol) {
    const PathwayResult closed = p_dqc(mol, red, st);
    const auto orc = oracle::quadrature_r(mol, st, oracle::Pathway::DQC, 0, 0);
    const cd closed_r = closed.pairs.at(0).dqc;
    b.rel(name, std::abs(closed_r - orc.value) / std::abs(orc.value) + 1.0, 1.0, tol);
  };
  dqc_check("DQC exp closed vs oracle", LightState(coherent_exp(0.5, 2.0)), 1e-6);
  dqc_check("DQC rect closed vs oracle", LightState(coherent_rect(0.5, 3.0)), 1e-6);
  dqc_check("DQC gauss closed vs oracle", LightState(coherent_gauss(0.5, 2.0)), 1e-6);
  dqc_check("DQC EPP gauss closed vs oracle", LightState(epp_gauss(0.1, 1.0, 4.0)), 1e-5);
  dqc_check("DQC EPP exp-narrow closed vs oracle", LightState(epp_exp_narrow(0.1, 1.0, 4.0)), 1e-5);

  // sampled EPP JSA through the oracle
  {
    const TwoPhotonState ideal = epp_gauss(0.1, 1.0, 4.0);
    const TwoPhotonState sampled(0.1, JointSpectralAmplitude::sampled(sample_jsa(ideal.jsa)));
    const PathwayResult closed = p_dqc(mol, red, LightState(ideal));
    const auto orc =
        oracle::quadrature_r(mol, LightState(sampled), oracle::Pathway::DQC, 0, 0, oracle::Mode::FarOff, 1e-4);
    b.rel("DQC EPP gauss closed vs oracle on sampled JSA",
          std::abs(closed.pairs.at(0).dqc - orc.value) / std::abs(orc.value) + 1.0, 1.0, 1e-5);
  }

  // Q closed forms vs quadrature (Eq. 121 with numerically built G)
  {
    const LevelSystem mol2 = two_intermediate(0.5, 0.3, 0.2);
    auto q_check = [&](const std::string& name, const LightState& st, double tol) {
      const cd closed = q_ee(mol2, 0, 1, st);
      const auto orc = oracle::quadrature_r(mol2, st, oracle::Pathway::NRP, 0, 1);
      // strip the shared far-off weight to compare the Q integrals
      const double omega0 = state_omega0(st);
      const double a_ep = omega0 - (mol2.omega_f() - mol2.intermediate(1).omega);
      const double d_up = mol2.intermediate(0).omega - omega0;
      const cd q_orc = orc.value * (a_ep * d_up);
      b.rel(name, std::abs(closed - q_orc) / std::abs(q_orc) + 1.0, 1.0, tol);
    };
    q_check("Q exp closed vs quadrature", LightState(coherent_exp(0.5, 2.0)), 1e-6);
    q_check("Q rect closed vs quadrature", LightState(coherent_rect(0.5, 3.0)), 1e-6);
    q_check("Q EPP gauss closed vs quadrature", LightState(epp_gauss(0.1, 1.0, 4.0)), 1e-6);
  }

  // dispersion: sampled propagation equals the sigma_B substitution
  {
    const double sn = 1.0, sb = 6.0;
    const double disp = std::sqrt(3.0) / (4.0 * sb * sb);  // 16 D^2 sb^4 = 3
    const TwoPhotonState plain = epp_gauss(0.1, sn, sb);
    const JointSpectralAmplitude dispersed = apply_dispersion(plain.jsa, disp, {2049, 10.0});
    const PathwayResult pd = p_dqc(mol, red, LightState(TwoPhotonState(0.1, dispersed)));
    const PathwayResult ps =
        p_dqc(mol, red, LightState(epp_gauss(0.1, sn, dispersed_broad_width(sb, disp))));
    b.rel("dispersed sampled JSA vs sigma_B substitution", pd.p_dqc, ps.p_dqc, 1e-8);
  }

  // separable two-photon state carries the coherent spectral factor
  {
    const PathwayResult sep = p_dqc(
        mol, red,
        LightState(TwoPhotonState(0.1, JointSpectralAmplitude::separable(
                                           SpectralAmplitude::gaussian(2.0, 100.0)))));
    const PathwayResult coh = p_dqc(mol, red, LightState(coherent_gauss(1.0, 2.0)));
    b.rel("separable JSA = coherent spectral factor", sep.spectral_factor, coh.spectral_factor,
          1e-10);
  }

  // OPA: single-photon/coherent equivalence and frequency vs time domain
  {
    const LevelSystem opa_mol = [] {
      LevelSystem ls(200.0);
      ls.add_intermediate("e1", 100.0, 1.0, 1.0);
      ls.set_dephasing("e1", "g", 1.0);
      ls.set_dephasing("f", "g", 1.0);
      return ls;
    }();
    const CoherentState coh = coherent_gauss(1.0, 3.0);
    const SinglePhotonState single{coh.phi};
    b.rel("OPA single photon vs N=1 coherent", p_opa_single_photon(opa_mol, red, single),
          p_opa_coherent(opa_mol, red, coh), 1e-12);
    b.rel("OPA frequency vs time domain", p_opa_coherent(opa_mol, red, coh),
          oracle::p_opa_time_domain(opa_mol, red, coh), 1e-6);
  }

  // time-domain vs frequency-domain R on a moderately detuned full-mode fixture
  {
    LevelSystem near(40.0);
    near.add_intermediate("e1", 26.0, 1.0, 1.0);
    near.set_dephasing("f", "g", 0.6);
    near.set_dephasing("e1", "g", 0.8);
    near.set_dephasing("e1", "f", 0.9);
    const LightState st = LightState(coherent_exp(0.5, 1.0, 20.0));
    const auto td = oracle::time_domain_r(near, st, oracle::Pathway::DQC, 0, 0);
    const auto fq = oracle::quadrature_r(near, st, oracle::Pathway::DQC, 0, 0, oracle::Mode::Full, 1e-3);
    b.rel("time-domain vs full-mode frequency R (DQC exp)",
          std::abs(td.value - fq.value) / std::abs(fq.value) + 1.0, 1.0, 1e-5);
  }

  // Fourier relation on a Gaussian envelope
  {
    const std::size_t n = 2001;
    const double dt = 12.0 / double(n - 1);
    std::vector<cd> env(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = -6.0 + dt * double(i);
      env[i] = std::exp(-t * t);
    }
    b.abs("Fourier relation residual (gaussian)", oracle::fourier_relation_residual(env, dt), 0.0,
          1e-8);
  }

  // cross-section identities and the quasi-monochromatic worked example
  {
    const auto fx = si_1gm();
    const Sigma2Result s2 = sigma2_conventional(fx.level, fx.si, fx.omega0);
    b.rel("sigma2 density-matrix route vs amplitude route", s2.sigma2, s2.amplitude_form, 1e-12);
    b.rel("sigma2 calibration = 1 GM", s2.sigma2, kGM, 1e-12);
    const double flux = 1.0 / (kHbar * fx.omega0);  // 1 W of 800 nm photons
    const double rate = tpa_rate_quasimono(fx.level, fx.si, flux / fx.si.area, 0.0);
    b.rel("quasi-monochromatic TPA rate [1 W, 800 nm, 5 um^2]", rate, 64.0, 0.02);
  }

  Report rep;
  rep.seed = seed;
  rep.checks = std::move(b.checks);
  rep.all_pass = true;
  for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["all_pass"] = all_pass;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks)
    arr.push_back(nlohmann::json{{"name", c.name},
                                 {"computed", c.computed},
                                 {"target", c.target},
                                 {"tolerance", c.tolerance},
                                 {"pass", c.pass},
                                 {"margin", c.margin}});
  j["checks"] = arr;
  return j;
}

}  // namespace etpa::validate
