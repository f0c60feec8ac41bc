#include <doctest.h>

#include <cmath>

#include "etpa/constants.hpp"
#include "etpa/fixtures.hpp"
#include "etpa/oracle.hpp"
#include "etpa/quad.hpp"

using namespace etpa;
using namespace etpa::fixtures;

namespace {
const SIContext red = SIContext::reduced_units();
}

TEST_CASE("Kubo Monte Carlo") {
  SUBCASE("mean lands within three standard errors of exp(-gamma t)") {
    for (auto [gamma, t] : {std::pair{1.0, 0.5}, std::pair{1.0, 1.0}, std::pair{2.0, 1.0}}) {
      const auto mc = oracle::kubo_monte_carlo(gamma, t, 100000, 99);
      CHECK(std::abs(mc.mean - cd(std::exp(-gamma * t), 0.0)) <= 3.0 * mc.std_error);
    }
  }
  SUBCASE("zero duration is exact") {
    const auto mc = oracle::kubo_monte_carlo(1.0, 0.0, 1000, 1);
    CHECK(mc.mean == cd(1.0, 0.0));
    CHECK(mc.std_error == 0.0);
  }
  SUBCASE("phase variance tracks 2 gamma t within 5%") {
    const auto mc = oracle::kubo_monte_carlo(1.5, 0.8, 100000, 7);
    CHECK(mc.phase_variance == doctest::Approx(2.0 * 1.5 * 0.8).epsilon(0.05));
  }
  SUBCASE("fixed seeds replay bit-identically") {
    const auto a = oracle::kubo_monte_carlo(1.0, 1.0, 20000, 1234);
    const auto b = oracle::kubo_monte_carlo(1.0, 1.0, 20000, 1234);
    CHECK(a.mean.real() == b.mean.real());
    CHECK(a.mean.imag() == b.mean.imag());
    CHECK(a.std_error == b.std_error);
    const auto c = oracle::kubo_monte_carlo(1.0, 1.0, 20000, 1235);
    CHECK(a.mean.real() != c.mean.real());
  }
}

TEST_CASE("far-off quadrature matches closed forms across pathways") {
  const LevelSystem mol = two_intermediate(0.5, 0.3, 0.2);
  const LightState st = LightState(coherent_exp(0.5, 2.0));
  const PathwayResult dqc = p_dqc(mol, red, st);
  const PathwayResult step = p_nrp_rp(mol, red, st);
  for (std::size_t e = 0; e < 2; ++e)
    for (std::size_t ep = 0; ep < 2; ++ep) {
      const auto od = oracle::quadrature_r(mol, st, oracle::Pathway::DQC, e, ep);
      const std::size_t idx = e * 2 + ep;
      CHECK(std::abs(dqc.pairs[idx].dqc - od.value) <= 1e-6 * std::abs(od.value));
      const auto on = oracle::quadrature_r(mol, st, oracle::Pathway::NRP, e, ep);
      CHECK(std::abs(step.pairs[idx].nrp - on.value) <= 1e-6 * std::abs(on.value));
      const auto orp = oracle::quadrature_r(mol, st, oracle::Pathway::RP, e, ep);
      CHECK(std::abs(step.pairs[idx].rp - orp.value) <= 1e-6 * std::abs(orp.value));
    }
}

TEST_CASE("single-photon states have no fourth-order response") {
  const LevelSystem mol = single_intermediate(0.5);
  const LightState st = LightState(SinglePhotonState{SpectralAmplitude::exponential(1.0, 100.0)});
  CHECK(std::abs(oracle::quadrature_r(mol, st, oracle::Pathway::DQC, 0, 0).value) == 0.0);
  CHECK(std::abs(oracle::time_domain_r(mol, st, oracle::Pathway::DQC, 0, 0).value) == 0.0);
}

TEST_CASE("full mode approaches far-off mode for broad lines and huge detunings") {
  // gamma large relative to the pulse width, detunings much larger still
  LevelSystem mol(4000.0);
  mol.add_intermediate("e1", 2600.0, 1.0, 1.0);
  mol.set_dephasing("f", "g", 5.0);
  mol.set_dephasing("e1", "g", 5.0);
  mol.set_dephasing("e1", "f", 5.0);
  const LightState st = LightState(coherent_exp(0.5, 1.0, 2000.0));
  const auto full =
      oracle::quadrature_r(mol, st, oracle::Pathway::DQC, 0, 0, oracle::Mode::Full, 1e-4);
  const auto faroff =
      oracle::quadrature_r(mol, st, oracle::Pathway::DQC, 0, 0, oracle::Mode::FarOff, 1e-4);
  // far-off drops gamma and the pulse spectrum in the outer denominators:
  // first-order deviation ~ (gamma + width)/detuning
  const double bound = 3.0 * (5.0 + 1.0) / 600.0;
  CHECK(std::abs(full.value - faroff.value) <= bound * std::abs(faroff.value));
}

TEST_CASE("full-mode NRP/RP near-cancellation for a single intermediate") {
  // in full mode the single-intermediate cancellation is near-perfect: the
  // residual at gamma_fe -> 0 is suppressed by (widths + dephasing)/detuning
  // and vanishes only in the far-off limit (where the engine's combined
  // weight is exactly zero); significant gamma_fe then destroys it
  auto residual_ratio = [](double omega_e, double gamma_fe) {
    LevelSystem mol(40.0);
    mol.add_intermediate("e1", omega_e, 1.0, 1.0);
    mol.set_dephasing("f", "g", 0.6);
    mol.set_dephasing("e1", "g", 0.8);
    mol.set_dephasing("e1", "f", gamma_fe);
    const LightState st = LightState(coherent_gauss(0.5, 1.0, 20.0));
    const auto nrp =
        oracle::quadrature_r(mol, st, oracle::Pathway::NRP, 0, 0, oracle::Mode::Full, 1e-4);
    const auto rp =
        oracle::quadrature_r(mol, st, oracle::Pathway::RP, 0, 0, oracle::Mode::Full, 1e-4);
    return std::abs(nrp.value + rp.value) / std::abs(nrp.value);
  };
  const double near8 = residual_ratio(28.0, 1e-7);   // detuning a_e = 8
  const double near12 = residual_ratio(32.0, 1e-7);  // detuning a_e = 12
  CHECK(near8 <= 2.0 * (1.0 + 0.8) / 8.0);
  CHECK(near12 < near8);  // suppression grows with the detuning
  // gamma_fe = 2 visibly breaks the near-cancellation
  CHECK(residual_ratio(28.0, 2.0) > 1.5 * near8);
}

TEST_CASE("time-domain and frequency-domain oracles agree") {
  LevelSystem mol(40.0);
  mol.add_intermediate("e1", 26.0, 1.0, 1.0);
  mol.set_dephasing("f", "g", 0.6);
  mol.set_dephasing("e1", "g", 0.8);
  mol.set_dephasing("e1", "f", 0.9);
  SUBCASE("coherent exponential fixture, all pathways") {
    const LightState st = LightState(coherent_exp(0.5, 1.0, 20.0));
    for (auto p : {oracle::Pathway::DQC, oracle::Pathway::NRP, oracle::Pathway::RP}) {
      const auto td = oracle::time_domain_r(mol, st, p, 0, 0);
      const auto fq = oracle::quadrature_r(mol, st, p, 0, 0, oracle::Mode::Full);
      CHECK(std::abs(td.value - fq.value) <= 1e-5 * std::abs(fq.value));
    }
  }
  SUBCASE("gaussian coherent fixture") {
    const LightState st = LightState(coherent_gauss(0.5, 1.2, 20.0));
    const auto td = oracle::time_domain_r(mol, st, oracle::Pathway::DQC, 0, 0);
    const auto fq = oracle::quadrature_r(mol, st, oracle::Pathway::DQC, 0, 0, oracle::Mode::Full);
    CHECK(std::abs(td.value - fq.value) <= 1e-5 * std::abs(fq.value));
  }
  SUBCASE("EPP DQC (anti-diagonal gaussian fixture)") {
    const LightState st = LightState(epp_gauss(0.1, 0.8, 2.5, 40.0));
    const auto td = oracle::time_domain_r(mol, st, oracle::Pathway::DQC, 0, 0);
    const auto fq = oracle::quadrature_r(mol, st, oracle::Pathway::DQC, 0, 0, oracle::Mode::Full);
    CHECK(std::abs(td.value - fq.value) <= 2e-5 * std::abs(fq.value));
  }
  SUBCASE("EPP stepwise pathways are out of time-domain scope") {
    const LightState st = LightState(epp_exp_narrow(0.1, 0.8, 2.5, 40.0));
    CHECK_THROWS_AS(oracle::time_domain_r(mol, st, oracle::Pathway::NRP, 0, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("zero field gives zero") {
  const LevelSystem mol = single_intermediate(0.5);
  const LightState st = LightState(CoherentState{0.0, SpectralAmplitude::exponential(1.0, 100.0)});
  CHECK(std::abs(oracle::time_domain_r(mol, st, oracle::Pathway::DQC, 0, 0).value) == 0.0);
}

TEST_CASE("anti-diagonal autocorrelation reduces to the broad factor") {
  // the 2-D tensor definition against the one-dimensional reduction used by
  // the stepwise oracle path
  const double sb = 3.0;
  const TwoPhotonState tp = epp_gauss(0.1, 0.4, sb);
  const double flux = 4.0 * 0.01;
  for (double y : {0.0, 1.0, 3.5}) {
    const cd g2d = oracle::g_autocorrelation(LightState(tp), y);
    const double reduced = flux * std::exp(-y * y / (8.0 * sb * sb));
    CHECK(std::abs(g2d - cd(reduced, 0.0)) <= 1e-8 * reduced + 1e-12);
  }
}

TEST_CASE("numeric autocorrelation matches the closed forms") {
  CHECK(std::abs(oracle::c_num(SpectralAmplitude::exponential(1.5, 50.0), 0.8) -
                 cd(3.0, 0.0) / cd(3.0, -0.8)) < 1e-10);
  CHECK(oracle::c_num(SpectralAmplitude::rectangular(2.0, 50.0), 1.0).real() ==
        doctest::Approx(std::sin(1.0) / 1.0).epsilon(1e-7));
}

TEST_CASE("q_from_g reproduces the closed exponential Q") {
  // G(y) = 4 Gamma^2 / (y^2 + 4 Gamma^2): Q = Gamma / (gamma + 2 Gamma - i omega)
  const double Gamma = 2.0, gamma = 0.3, omega = 15.0;
  auto g = [Gamma](double y) { return cd(4.0 * Gamma * Gamma / (y * y + 4.0 * Gamma * Gamma), 0.0); };
  const cd q = oracle::q_from_g(g, 2.0 * Gamma, gamma, omega);
  const cd expect = Gamma / cd(gamma + 2.0 * Gamma, -omega);
  CHECK(std::abs(q - expect) <= 1e-9 * std::abs(expect));
}

TEST_CASE("Fourier relation residuals") {
  SUBCASE("gaussian envelope") {
    const std::size_t n = 2001;
    const double dt = 12.0 / double(n - 1);
    std::vector<cd> env(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = -6.0 + dt * double(i);
      env[i] = 0.8 * std::exp(-t * t);
    }
    CHECK(oracle::fourier_relation_residual(env, dt) <= 1e-8);
  }
  SUBCASE("rectangular envelope (edge-effect tolerance)") {
    const std::size_t n = 80001;
    const double dt = 4.0 / double(n - 1);
    std::vector<cd> env(n, cd(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      const double t = -2.0 + dt * double(i);
      if (std::abs(t) < 1.0) env[i] = 1.0;
      if (std::abs(std::abs(t) - 1.0) < 0.25 * dt) env[i] = 0.5;
    }
    CHECK(oracle::fourier_relation_residual(env, dt) <= 1e-6);
  }
  SUBCASE("zero envelope") {
    std::vector<cd> env(64, cd(0.0, 0.0));
    CHECK(oracle::fourier_relation_residual(env, 0.1) == 0.0);
  }
}

TEST_CASE("error estimates shrink with the grid") {
  const LevelSystem mol = single_intermediate(0.5);
  const TwoPhotonState ideal = epp_gauss(0.1, 1.0, 4.0);
  const TwoPhotonState coarse(0.1, JointSpectralAmplitude::sampled(sample_jsa(ideal.jsa, {601, 10.0})));
  const TwoPhotonState fine(0.1, JointSpectralAmplitude::sampled(sample_jsa(ideal.jsa, {1201, 10.0})));
  const auto rc = oracle::quadrature_r(mol, LightState(coarse), oracle::Pathway::DQC, 0, 0,
                                       oracle::Mode::FarOff, 1e-3);
  const auto rf = oracle::quadrature_r(mol, LightState(fine), oracle::Pathway::DQC, 0, 0,
                                       oracle::Mode::FarOff, 1e-3);
  CHECK(rf.error * 2.0 <= rc.error);
}
