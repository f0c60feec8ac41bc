#pragma once

#include <cstdint>
#include <functional>

#include "etpa/tpa.hpp"

// Independent brute-force validators. Everything here re-derives pathway
// integrals from the triple-frequency (or difference-time) definitions on its
// own grids; nothing calls the production closed forms or the production
// kernel projections. Reduced units (L0 = 1).
namespace etpa::oracle {

enum class Pathway { DQC, NRP, RP };
enum class Mode { FarOff, Full };

struct Result {
  cd value;
  double error;  // absolute estimate
};

// Triple d-omega quadrature of R_{e,e'}: exact resonant denominators in Full
// mode, the far-off-resonance reduction otherwise. Throws ConvergenceError
// when the internal error estimate exceeds rel_tol * |value|.
Result quadrature_r(const LevelSystem& level, const LightState& state, Pathway pathway,
                    std::size_t e, std::size_t ep, Mode mode = Mode::FarOff,
                    double rel_tol = 1e-6);

// Difference-time integral of R_{e,e'} (Eq.-88 form) via nested causal
// convolutions on a uniform time grid. Coherent states: all pathways;
// two-photon states: DQC only (the stepwise pathways cross the detection
// amplitude's time arguments).
Result time_domain_r(const LevelSystem& level, const LightState& state, Pathway pathway,
                     std::size_t e, std::size_t ep);

struct KuboResult {
  cd mean;
  double std_error;
  double phase_variance;
};
// Wiener-phase Monte Carlo of the dephasing average <exp(-i phi(t))>, phase
// variance 2 gamma t. Deterministic for a fixed seed.
KuboResult kubo_monte_carlo(double gamma, double t, std::size_t trajectories, std::uint64_t seed,
                            std::size_t steps = 1000);

// Relative residual between Int |A|^4 dt and its triple-frequency identity.
double fourier_relation_residual(const std::vector<cd>& envelope, double dt);

// Time-domain second-order OPA probability (Eq.-59 route) for cross-checking
// the frequency-domain production path.
double p_opa_time_domain(const LevelSystem& level, const SIContext& si, const CoherentState& state,
                         std::size_t target = 0);

// Q = Int dy/2pi G(y) / (gamma - i(omega + y)) for an analytic autocorrelation
// G; `scale` is the spectral width of G's structure.
cd q_from_g(const std::function<cd(double)>& g, double scale, double gamma, double omega);

// Spectral autocorrelation c(y) = Int dw/2pi phi*(w - y) phi(w) computed by
// direct quadrature (oscillation-aware for rectangular shapes).
cd c_num(const SpectralAmplitude& phi, double y);

// Anti-diagonal field autocorrelation G(y) by direct 2-D tensor quadrature of
// its definition (includes the flux factor).
cd g_autocorrelation(const LightState& state, double y);

}  // namespace etpa::oracle
