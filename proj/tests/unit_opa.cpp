#include <doctest.h>

#include <cmath>

#include "etpa/constants.hpp"
#include "etpa/fixtures.hpp"
#include "etpa/opa.hpp"
#include "etpa/oracle.hpp"

using namespace etpa;

namespace {

LevelSystem opa_molecule(double gamma_eg, double mu = 1.0) {
  LevelSystem ls(200.0);
  ls.add_intermediate("e1", 100.0, mu, 1.0);
  ls.set_dephasing("e1", "g", gamma_eg);
  ls.set_dephasing("f", "g", 1.0);
  return ls;
}

}  // namespace

TEST_CASE("zero and negative spectral densities") {
  const LevelSystem ls = opa_molecule(1.0);
  const SIContext red = SIContext::reduced_units();
  CHECK(p_opa_general(ls, red, [](double) { return 0.0; }, 100.0, 10.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(p_opa_general(ls, red, [](double) { return -1.0; }, 100.0, 10.0),
                  std::invalid_argument);
}

TEST_CASE("narrow density of weight N drives the Lorentzian peak") {
  const LevelSystem ls = opa_molecule(2.0);
  const SIContext red = SIContext::reduced_units();
  const double n = 0.3, sig = 2e-4;
  auto density = [n, sig](double w) {
    // integrates to n in the dw/2pi measure
    return n * kTwoPi / (sig * std::sqrt(kTwoPi)) * std::exp(-0.5 * (w - 100.0) * (w - 100.0) / (sig * sig));
  };
  const double p = p_opa_general(ls, red, density, 100.0, 10.0 * sig);
  CHECK(p == doctest::Approx(n * 2.0 / 2.0).epsilon(1e-7));  // N * 2/gamma, |mu| = 1
}

TEST_CASE("single photon equals an N = 1 coherent state bit for bit") {
  const LevelSystem ls = opa_molecule(1.0);
  const SIContext red = SIContext::reduced_units();
  for (const SpectralAmplitude& phi :
       {SpectralAmplitude::gaussian(2.0, 100.0), SpectralAmplitude::exponential(1.5, 101.0),
        SpectralAmplitude::rectangular(2.0, 100.0)}) {
    const double pc = p_opa_coherent(ls, red, CoherentState{1.0, phi});
    const double ps = p_opa_single_photon(ls, red, SinglePhotonState{phi});
    CHECK(pc == ps);  // exact delegation equality
  }
}

TEST_CASE("exponential line overlap reproduces the Lorentzian convolution") {
  // Int dw/2pi [2g/(g^2+(w_eg-w)^2)][2G/(G^2+(w-w0)^2)] = 2(g+G)/((g+G)^2+D^2)
  const SIContext red = SIContext::reduced_units();
  for (auto [gamma, Gamma, det] : {std::tuple{1.0, 1.0, 0.0}, std::tuple{0.5, 2.0, 1.5}}) {
    const LevelSystem ls = opa_molecule(gamma);
    const CoherentState st{1.0, SpectralAmplitude::exponential(Gamma, 100.0 - det)};
    const double sum = gamma + Gamma;
    const double closed = 2.0 * sum / (sum * sum + det * det);
    CHECK(p_opa_coherent(ls, red, st) == doctest::Approx(closed).epsilon(1e-8));
  }
}

TEST_CASE("far-detuned spectrum is barely absorbed") {
  const LevelSystem ls = opa_molecule(1.0);
  const SIContext red = SIContext::reduced_units();
  const CoherentState st{1.0, SpectralAmplitude::gaussian(0.5, 160.0)};
  CHECK(p_opa_coherent(ls, red, st) < 1e-3);
  CHECK(p_opa_coherent(ls, red, st) > 0.0);  // positivity
}

TEST_CASE("probability is linear in the density") {
  const LevelSystem ls = opa_molecule(0.7);
  const SIContext red = SIContext::reduced_units();
  auto d1 = [](double w) { return std::exp(-0.1 * (w - 99.0) * (w - 99.0)); };
  auto d2 = [](double w) { return 0.4 / (1.0 + (w - 101.0) * (w - 101.0)); };
  const double p1 = p_opa_general(ls, red, d1, 100.0, 30.0);
  const double p2 = p_opa_general(ls, red, d2, 100.0, 30.0);
  const double p12 = p_opa_general(ls, red, [&](double w) { return d1(w) + d2(w); }, 100.0, 30.0);
  CHECK(p12 == doctest::Approx(p1 + p2).epsilon(1e-12));
}

TEST_CASE("frequency-domain probability matches the time-domain response") {
  const LevelSystem ls = opa_molecule(1.0);
  const SIContext red = SIContext::reduced_units();
  for (const SpectralAmplitude& phi :
       {SpectralAmplitude::gaussian(3.0, 100.0), SpectralAmplitude::exponential(2.0, 100.5)}) {
    const CoherentState st{std::sqrt(0.5), phi};
    const double pf = p_opa_coherent(ls, red, st);
    const double pt = oracle::p_opa_time_domain(ls, red, st);
    CHECK(pf == doctest::Approx(pt).epsilon(1e-6));
  }
}

TEST_CASE("narrowband SI input recovers P = N sigma1 / A0") {
  const double omega0 = kTwoPi * kC / 800e-9;
  const double gamma = 1e13;
  LevelSystem ls(2.0 * omega0);
  const double mu = 2.4e4;  // d ~ 2.5e-30 C m
  ls.add_intermediate("e1", omega0, mu, mu);
  ls.set_dephasing("e1", "g", gamma);
  const SIContext si = SIContext::si(omega0, 1.0, 5e-12);
  const double n_photons = 0.2;
  const CoherentState st{std::sqrt(n_photons), SpectralAmplitude::gaussian(1e10, omega0)};
  const double p = p_opa_coherent(ls, si, st);
  const double expect = n_photons * sigma1(ls, si, omega0) / si.area;
  CHECK(p == doctest::Approx(expect).epsilon(0.01));
}

TEST_CASE("perturbative validity flag") {
  CHECK(opa_perturbative_warning(0.2));
  CHECK(!opa_perturbative_warning(0.05));
}
