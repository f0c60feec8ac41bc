#pragma once

#include <cmath>

#include "etpa/constants.hpp"
#include "etpa/molecule.hpp"
#include "etpa/tpa.hpp"

// Reference molecules and states shared by the validation and acceptance
// suites. Reduced units unless noted; the TPA transition sits at
// omega_f = 200 with the carrier near 100.
namespace etpa::fixtures {

inline LevelSystem single_intermediate(double gamma_fg, double gamma_other = 0.0,
                                       double omega_f = 200.0, double omega_e = 140.0) {
  LevelSystem ls(omega_f);
  ls.add_intermediate("e1", omega_e, 1.0, 1.0);
  ls.set_dephasing("f", "g", gamma_fg);
  if (gamma_other > 0.0) {
    ls.set_dephasing("e1", "g", gamma_other);
    ls.set_dephasing("e1", "f", gamma_other);
  }
  return ls;
}

inline LevelSystem two_intermediate(double gamma_fg, double gamma_ee, double gamma_other = 0.0,
                                    double omega_e1 = 130.0, double omega_e2 = 145.0,
                                    double omega_f = 200.0) {
  LevelSystem ls(omega_f);
  ls.add_intermediate("e1", omega_e1, 1.0, 1.0);
  ls.add_intermediate("e2", omega_e2, 1.0, 1.0);
  ls.set_dephasing("f", "g", gamma_fg);
  ls.set_dephasing("e1", "e2", gamma_ee);
  if (gamma_other > 0.0)
    for (const char* a : {"e1", "e2"}) {
      ls.set_dephasing(a, "g", gamma_other);
      ls.set_dephasing(a, "f", gamma_other);
    }
  return ls;
}

inline CoherentState coherent_exp(double n, double gamma, double omega0 = 100.0) {
  return CoherentState{std::sqrt(n), SpectralAmplitude::exponential(gamma, omega0)};
}
inline CoherentState coherent_rect(double n, double duration, double omega0 = 100.0) {
  return CoherentState{std::sqrt(n), SpectralAmplitude::rectangular(duration, omega0)};
}
inline CoherentState coherent_gauss(double n, double sigma, double omega0 = 100.0) {
  return CoherentState{std::sqrt(n), SpectralAmplitude::gaussian(sigma, omega0)};
}

inline TwoPhotonState epp_gauss(double eps, double sigma_n, double sigma_b, double pump = 200.0) {
  return TwoPhotonState(
      eps, JointSpectralAmplitude::anti_diagonal(GaussianSpectral{sigma_n}, GaussianSpectral{sigma_b},
                                                 pump));
}
inline TwoPhotonState epp_exp_narrow(double eps, double gamma, double sigma_b, double pump = 200.0) {
  return TwoPhotonState(
      eps, JointSpectralAmplitude::anti_diagonal(ExponentialOneSided{gamma},
                                                 GaussianSpectral{sigma_b}, pump));
}

// SI calibration molecule: sigma^(2) = 1 GM at TPA resonance for an 800 nm
// carrier, gamma_fg = 1e13 / s, single intermediate detuned by omega0/2. The
// dipole follows from inverting the cross-section formula.
struct Si1GmFixture {
  LevelSystem level;
  SIContext si;
  double omega0;
};

inline Si1GmFixture si_1gm() {
  const double lambda = 800e-9;
  const double omega0 = kTwoPi * kC / lambda;
  const double gamma_fg = 1e13;
  const double area = 5e-12;  // 5 um^2
  const double det = 0.5 * omega0;
  const double unit = kHbar * kEps0 * kC / omega0;  // n = 1
  const double d4 = kGM * 2.0 * gamma_fg * det * det * unit * unit;
  const double d = std::pow(d4, 0.25);
  const double mu = d / kHbar;
  LevelSystem ls(2.0 * omega0);
  ls.add_intermediate("e1", 1.5 * omega0, mu, mu);
  ls.set_dephasing("f", "g", gamma_fg);
  return Si1GmFixture{std::move(ls), SIContext::si(omega0, 1.0, area), omega0};
}

}  // namespace etpa::fixtures
