#include "etpa/states.hpp"

#include <cmath>
#include <stdexcept>

#include "etpa/quad.hpp"

namespace etpa {

SIContext SIContext::si(double omega0, double refractive_index, double beam_area) {
  if (!(omega0 > 0.0) || !(refractive_index > 0.0) || !(beam_area > 0.0))
    throw std::invalid_argument("SIContext: omega0, n and A0 must be positive");
  SIContext ctx;
  ctx.reduced = false;
  ctx.omega0 = omega0;
  ctx.n = refractive_index;
  ctx.area = beam_area;
  ctx.hbar = kHbar;
  ctx.eps0 = kEps0;
  ctx.c = kC;
  return ctx;
}

double SIContext::L0() const {
  if (reduced) return 1.0;
  return std::sqrt(hbar * omega0 / (2.0 * eps0 * n * c * area));
}

TwoPhotonState::TwoPhotonState(double eps, JointSpectralAmplitude j)
    : epsilon(eps), jsa(std::move(j)) {
  if (eps < 0.0) throw std::invalid_argument("TwoPhotonState: epsilon must be >= 0");
}

TwoPhotonState TwoPhotonState::symmetrized() const {
  if (jsa.symmetric()) return *this;
  SymmetrizeResult r = symmetrize_jsa(jsa);
  return TwoPhotonState(epsilon * r.norm_before, std::move(r.jsa));
}

double mean_photon_number(const LightState& state) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CoherentState>) return s.mean_photons();
        if constexpr (std::is_same_v<T, SinglePhotonState>) return 1.0;
        if constexpr (std::is_same_v<T, TwoPhotonState>) return s.mean_photons();
      },
      state);
}

double state_omega0(const LightState& state) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, TwoPhotonState>) return s.jsa.omega0();
        else return s.phi.omega0;
      },
      state);
}

cd four_freq_correlation(const LightState& state, double wp, double w, double wt) {
  const double wtp = w + wt - wp;
  return std::visit(
      [&](const auto& s) -> cd {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CoherentState>) {
          const double n = s.mean_photons();
          return n * n * std::conj(s.phi.amplitude(wp) * s.phi.amplitude(wtp)) *
                 s.phi.amplitude(w) * s.phi.amplitude(wt);
        }
        if constexpr (std::is_same_v<T, SinglePhotonState>) return 0.0;
        if constexpr (std::is_same_v<T, TwoPhotonState>) {
          return 4.0 * s.epsilon * s.epsilon * std::conj(s.jsa.value_sym(wp, wtp)) *
                 s.jsa.value_sym(w, wt);
        }
      },
      state);
}

namespace {

// Envelope transform of a mode referred to a common carrier w0_ref.
cd mode_transform(const SpectralAmplitude& phi, double w0_ref, double t) {
  return std::exp(cd(0.0, -(phi.omega0 - w0_ref) * t)) * temporal_envelope(phi, t).value;
}

}  // namespace

cd two_photon_detection_amplitude(const TwoPhotonState& state, const SIContext& si, double ta,
                                  double tb) {
  if (!state.jsa.symmetric())
    throw std::invalid_argument("two_photon_detection_amplitude: JSA not symmetric; symmetrize first");
  const double L0 = si.L0();
  const double pref = 2.0 * state.epsilon * L0 * L0;
  const double w0 = state.jsa.omega0();

  return std::visit(
      [&](const auto& v) -> cd {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SeparableJsa>) {
          return pref * mode_transform(v.phi0, w0, ta) * mode_transform(v.phi0, w0, tb);
        }
        if constexpr (std::is_same_v<T, AntiDiagonalJsa>) {
          return pref * shape_envelope(v.narrow, 0.5 * (ta + tb)) * shape_envelope(v.broad, ta - tb);
        }
        if constexpr (std::is_same_v<T, TwoModeJsa>) {
          const cd fa = mode_transform(v.f, w0, ta), fb = mode_transform(v.f, w0, tb);
          const cd ga = mode_transform(v.g, w0, ta), gb = mode_transform(v.g, w0, tb);
          return pref * v.scale * 0.5 * (fa * gb + ga * fb);
        }
        if constexpr (std::is_same_v<T, Sampled2DJsa>) {
          quad::KahanSumC acc;
          const std::size_t na = v.grid_a.size(), nb = v.grid_b.size();
          std::vector<cd> ea(na), eb(nb);
          for (std::size_t i = 0; i < na; ++i)
            ea[i] = std::exp(cd(0.0, -(v.grid_a.point(i) - w0) * ta));
          for (std::size_t j = 0; j < nb; ++j)
            eb[j] = std::exp(cd(0.0, -(v.grid_b.point(j) - w0) * tb));
          for (std::size_t i = 0; i < na; ++i)
            for (std::size_t j = 0; j < nb; ++j) acc.add(v.values[i * nb + j] * ea[i] * eb[j]);
          const double measure = v.grid_a.spacing() * v.grid_b.spacing() / (kTwoPi * kTwoPi);
          return pref * acc.value() * measure;
        }
      },
      state.jsa.kind());
}

}  // namespace etpa
