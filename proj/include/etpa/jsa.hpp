#pragma once

#include <complex>
#include <cstddef>
#include <variant>
#include <vector>

#include "etpa/grid.hpp"
#include "etpa/pulse.hpp"

namespace etpa {

// psi(w, wt) = phi0(w) phi0(wt): no spectral correlation.
struct SeparableJsa {
  SpectralAmplitude phi0;
};

// psi(w, wt) = psi_B((w - wt)/2) * psi_N(w + wt - pump_omega), the
// narrow-pump/broad-phase-matching model. psi_B must be even; both factors are
// square-normalized in the dw/2pi measure, zero-centered.
struct AntiDiagonalJsa {
  PulseShape narrow;
  PulseShape broad;
  double pump_omega;
};

// Arbitrary complex matrix on uniform grids, row-major in the first index.
struct Sampled2DJsa {
  FrequencyGrid grid_a;
  FrequencyGrid grid_b;
  std::vector<cd> values;  // values[i * grid_b.size() + j] = psi(a_i, b_j)
};

// Two distinct spectral modes f, g (Type-II): psi = f(w) g(wt), or its
// symmetrized combination scale * (f g + g f)/2 after symmetrize().
struct TwoModeJsa {
  SpectralAmplitude f;
  SpectralAmplitude g;
  bool symmetrized = false;
  double scale = 1.0;
};

class JointSpectralAmplitude {
 public:
  using Variant = std::variant<SeparableJsa, AntiDiagonalJsa, Sampled2DJsa, TwoModeJsa>;

  explicit JointSpectralAmplitude(Variant v);

  static JointSpectralAmplitude separable(SpectralAmplitude phi0);
  static JointSpectralAmplitude anti_diagonal(PulseShape narrow, PulseShape broad, double pump_omega);
  static JointSpectralAmplitude sampled(Sampled2DJsa s);
  static JointSpectralAmplitude two_mode(SpectralAmplitude f, SpectralAmplitude g);

  const Variant& kind() const { return v_; }
  bool symmetric() const { return symmetric_; }
  double omega0() const;  // common carrier (pump/2 for anti-diagonal)

  cd value(double w, double wt) const;
  // Symmetrized evaluation (psi(w,wt) + psi(wt,w))/2; equals value() when the
  // state is symmetric.
  cd value_sym(double w, double wt) const;

  // Integral of |psi|^2 in the dw/2pi measure: analytic variants by
  // construction, 2-D trapezoid for Sampled2D.
  double norm_sq() const;

 private:
  Variant v_;
  bool symmetric_ = false;
};

struct SymmetrizeResult {
  JointSpectralAmplitude jsa;       // renormalized, symmetric
  double norm_before;               // sqrt(Int |(psi + psi^T)/2|^2) before renorm
};

// Throws DegenerateStateError when the symmetrized amplitude vanishes.
SymmetrizeResult symmetrize_jsa(const JointSpectralAmplitude& jsa);

// Effective broad width after group-delay dispersion D:
// sigma_B / sqrt(1 + 16 D^2 sigma_B^4).
double dispersed_broad_width(double sigma_b, double dispersion);

struct Jsa2DGridSpec {
  std::size_t n = 0;          // 0 -> automatic from structure scales
  double span_factor = 10.0;  // half-span in units of the broad scale
};

// Samples any JSA variant onto a common uniform 2-D grid.
Sampled2DJsa sample_jsa(const JointSpectralAmplitude& jsa, const Jsa2DGridSpec& spec = {});

// Multiplies by exp(i D/2 [(w-w0)^2 + (wt-w0)^2]) (envelope frequencies).
// D = 0 returns the input unchanged; otherwise the result is Sampled2D.
JointSpectralAmplitude apply_dispersion(const JointSpectralAmplitude& jsa, double dispersion,
                                        const Jsa2DGridSpec& spec = {});

// Structure scales used by grid builders and the pathway engine.
struct JsaScales {
  double narrow;  // anti-diagonal-sum direction (drives the TPA line)
  double broad;   // difference direction
};
JsaScales jsa_scales(const JointSpectralAmplitude& jsa);

}  // namespace etpa
