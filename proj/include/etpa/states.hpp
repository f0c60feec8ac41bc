#pragma once

#include <complex>
#include <variant>

#include "etpa/constants.hpp"
#include "etpa/jsa.hpp"
#include "etpa/pulse.hpp"

namespace etpa {

// Field-quantization context. Reduced mode (the default) sets
// hbar = eps0 = c = n = 1 and L0 = A0 = 1; SI mode derives
// L0 = sqrt(hbar w0 / 2 eps0 n c A0) on demand.
struct SIContext {
  bool reduced = true;
  double omega0 = 0.0;  // rad/s (SI mode)
  double n = 1.0;
  double area = 1.0;  // A0, m^2
  double hbar = 1.0, eps0 = 1.0, c = 1.0;

  static SIContext reduced_units() { return SIContext{}; }
  static SIContext si(double omega0, double refractive_index, double beam_area);

  double L0() const;
};

struct CoherentState {
  cd alpha0;
  SpectralAmplitude phi;  // unit-normalized
  double mean_photons() const { return std::norm(alpha0); }
};

struct SinglePhotonState {
  SpectralAmplitude phi;  // unit-normalized
};

struct TwoPhotonState {
  double epsilon;  // pair amplitude, eps^2 = per-pulse pair probability
  JointSpectralAmplitude jsa;

  TwoPhotonState(double eps, JointSpectralAmplitude j);
  double mean_photons() const { return 2.0 * epsilon * epsilon; }
  // eps^2 > 0.1 leaves the isolated-pair regime (physical validity warning,
  // not an error).
  bool non_isolated_pair_warning() const { return epsilon * epsilon > 0.1; }
  // State-level symmetrization: renormalizes the JSA and folds the lost norm
  // into epsilon so the detection amplitude is unchanged.
  TwoPhotonState symmetrized() const;
};

using LightState = std::variant<CoherentState, SinglePhotonState, TwoPhotonState>;

double mean_photon_number(const LightState& state);
double state_omega0(const LightState& state);

// Four-frequency correlation <a+(w') a+(wt') a(w) a(wt)> with
// wt' = w + wt - w'. Zero for a single-photon state.
cd four_freq_correlation(const LightState& state, double wp, double w, double wt);

// Envelope two-photon detection amplitude
// 2 eps L0^2 Int dw/2pi dwt/2pi Psi(w,wt) e^{-i(w-w0)ta} e^{-i(wt-w0)tb};
// requires a symmetric JSA (symmetrize first).
cd two_photon_detection_amplitude(const TwoPhotonState& state, const SIContext& si, double ta,
                                  double tb);

}  // namespace etpa
