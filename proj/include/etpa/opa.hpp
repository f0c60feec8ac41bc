#pragma once

#include <functional>

#include "etpa/molecule.hpp"

namespace etpa {

// Second-order excitation probability
// P = (L0^2/hbar^2) d_ge d_eg Int dw/2pi [2 gamma / (gamma^2 + (w_eg - w)^2)] n(w)
// for a non-negative spectral density n(w) = <a+(w) a(w)>. The density is
// integrated on a pole-aware grid spanning `span` around `center`
// (defaults derived from the line and density scales by the callers below).
double p_opa_general(const LevelSystem& level, const SIContext& si,
                     const std::function<double(double)>& spectral_density, double center,
                     double span, std::size_t target = 0);

double p_opa_coherent(const LevelSystem& level, const SIContext& si, const CoherentState& state,
                      std::size_t target = 0);

double p_opa_single_photon(const LevelSystem& level, const SIContext& si,
                           const SinglePhotonState& state, std::size_t target = 0);

// Second-order result with no saturation: P > 0.1 leaves the perturbative
// regime.
inline bool opa_perturbative_warning(double p) { return p > 0.1; }

}  // namespace etpa
