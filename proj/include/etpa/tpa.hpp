#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "etpa/molecule.hpp"
#include "etpa/special.hpp"
#include "etpa/states.hpp"

namespace etpa {

// Anti-diagonal projection K(x) on the offset x = w + wt - 2 w0. Closed-form
// families carry exact evaluators; Sampled is the general grid path.
struct ProjectionKernel {
  enum class Provenance { Coherent, Jsa };
  enum class Form {
    ComplexLorentzian,  // amp * G / (G - i x)
    Sinc,               // amp * sinc(x T / 2)
    Gaussian,           // amp * exp(-a x^2)
    Sampled,
  };
  Provenance provenance = Provenance::Coherent;
  Form form = Form::Gaussian;
  cd amp = 1.0;
  double param = 0.0;  // G, T, or a
  double x0 = 0.0, dx = 0.0;
  std::vector<cd> samples;

  cd eval(double x) const;
  bool closed_form() const { return form != Form::Sampled; }
};

ProjectionKernel k_projection_coherent(const SpectralAmplitude& phi);
// Requires a symmetric JSA (symmetrize first).
ProjectionKernel k_projection_jsa(const JointSpectralAmplitude& jsa);

// Standard (vertical) spectrum: |phi|^2 for coherent light, the partner-traced
// |Psi|^2 for a two-photon state.
std::function<double(double)> marginal_spectrum(const LightState& state);

struct PathwayResult {
  struct PairR {
    std::string e, ep;
    cd dqc{0.0}, nrp{0.0}, rp{0.0};
  };
  std::vector<PairR> pairs;

  // One-sided sums S = sum M R; assembled probabilities are the +cc closure
  // 2 Re S (asserted equal to S + conj(S) in tests).
  cd dqc_sum{0.0}, nrp_sum{0.0}, rp_sum{0.0}, nrp_rp_combined_sum{0.0};
  double p_dqc = 0.0;
  double p_nrp = 0.0, p_rp = 0.0;
  double p_nrp_rp = 0.0;  // combined, exact e'=e / degenerate cancellation

  double spectral_factor = 0.0;  // DQC: 2 Re Int dx/2pi |K|^2/(gamma_fg + i(x - Delta))
  double prefactor = 0.0;        // N^2 L0^4 or 4 eps^2 L0^4
  std::string method;            // "closed-form" | "quadrature"
  std::vector<std::string> warnings;

  double total() const { return p_dqc + p_nrp_rp; }
};

// DQC pathway. `detuning` = omega_fg - 2*omega0 must agree with the state's
// carrier (cross-check parameter); pass NaN to derive it.
PathwayResult p_dqc(const LevelSystem& level, const SIContext& si, const LightState& state,
                    double detuning = std::numeric_limits<double>::quiet_NaN());

// NRP + RP pathways (far-off-resonance). Requires a real dipole product M.
PathwayResult p_nrp_rp(const LevelSystem& level, const SIContext& si, const LightState& state);

// Both of the above merged into one result.
PathwayResult compute_pathways(const LevelSystem& level, const SIContext& si,
                               const LightState& state,
                               double detuning = std::numeric_limits<double>::quiet_NaN());

// Intermediate-pair autocorrelation integral Q_{e,e'} (includes the flux
// factor N^2 or 4 eps^2).
cd q_ee(const LevelSystem& level, std::size_t e, std::size_t ep, const LightState& state);
// Same with explicit (gamma, omega) line parameters.
cd q_autocorrelation_integral(double gamma_ee, double omega_ee, const LightState& state);

// P_DQC / |P_NRP + P_RP| on an exponential-narrow / Gaussian-broad EPP
// fixture; +infinity when the step-wise pathways vanish.
double pathway_dominance_ratio(const LevelSystem& level, const SIContext& si,
                               const TwoPhotonState& epp);

// Quasi-monochromatic TPA rate (per second): sigma2 * flux_density^2 *
// gamma^2/(gamma^2 + detuning^2).
double tpa_rate_quasimono(const LevelSystem& level, const SIContext& si, double flux_density,
                          double detuning);
// Time-resolved variant: P = sigma2 * Lorentz * Int F^2(t) dt for a sampled
// slow flux-density envelope.
double tpa_probability_pulse(const LevelSystem& level, const SIContext& si,
                             const std::vector<double>& flux_density, double dt, double detuning);

struct ImpulsiveResult {
  double p;
  bool bandwidth_warning;  // pulse bandwidth below ~100 gamma_fg
};
// Impulsive-limit DQC probability Re(Sigma2) L0^4 |Int A^2 dt|^2 for a sampled
// complex envelope A(t) (photon normalization Int |A|^2 dt = N).
ImpulsiveResult p_dqc_impulsive(const LevelSystem& level, const SIContext& si,
                                const std::vector<cd>& envelope, double dt);

struct QefResult {
  double analytic;        // 2 N_epp / N_coh^2 * (sigma_B / Gamma)
  double computed;        // p_dqc(epp) / p_dqc(coh)
  double agreement;       // computed / analytic
  double photon_factor;   // 2 N_epp / N_coh^2
  double spectral_ratio;  // sigma_B / Gamma
};
// Matched exponential fixtures: coherent exponential pulse vs
// exponential-narrow / Gaussian-broad EPP with the same Gamma.
QefResult qef(const LevelSystem& level, const SIContext& si, const CoherentState& coh,
              const TwoPhotonState& epp);

}  // namespace etpa
