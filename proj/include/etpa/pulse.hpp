#pragma once

#include <complex>
#include <variant>
#include <vector>

#include "etpa/grid.hpp"

namespace etpa {

using cd = std::complex<double>;

// Constant amplitude for |t| < T/2 (quasi-monochromatic / CW window).
struct Rectangular {
  double duration;  // T > 0
};

// phi(w) = sqrt(2 Gamma) / (Gamma - i (w - w0)); single-sided exponential in
// time with decay Gamma.
struct ExponentialOneSided {
  double half_width;  // Gamma > 0, spectral half-width
};

// phi(w) = (sigma^2/2pi)^{-1/4} exp(-(w - w0)^2 / 4 sigma^2).
struct GaussianSpectral {
  double sigma;  // spectral std-width > 0
};

// Arbitrary complex spectrum on a uniform grid; square-normalizable.
struct SampledShape {
  FrequencyGrid grid;
  std::vector<cd> values;  // phi at grid points
};

using PulseShape = std::variant<Rectangular, ExponentialOneSided, GaussianSpectral, SampledShape>;

// Characteristic spectral width of a shape (used for default grid spans).
double spectral_width(const PulseShape& s);

// Full width at half maximum of |shape|^2; the common measure for comparing
// widths across shape families.
double shape_fwhm(const PulseShape& s);

// Shape evaluated as a zero-centered spectral function at offset x.
cd shape_value(const PulseShape& s, double x);

// Closed-form zero-centered temporal transform Integral dx/2pi s(x) e^{-ixt}
// for analytic shapes; Sampled uses its grid (see SpectralAmplitude below).
cd shape_envelope(const PulseShape& s, double t);

// Unit-normalized spectral envelope with carrier w0. `norm` is the target of
// Integral |phi|^2 dw/2pi (1 for unit-normalized); Sampled values are
// validated against it to 1e-9 relative.
struct SpectralAmplitude {
  PulseShape shape;
  double omega0 = 0.0;
  double norm = 1.0;

  SpectralAmplitude() = default;
  SpectralAmplitude(PulseShape s, double w0, double target_norm = 1.0);

  cd amplitude(double omega) const { return shape_value(shape, omega - omega0); }
  double width() const { return spectral_width(shape); }

  // Integral |phi|^2 dw/2pi computed by quadrature (trapezoid for Sampled).
  double norm_integral() const;

  static SpectralAmplitude rectangular(double T, double w0) {
    return SpectralAmplitude(Rectangular{T}, w0);
  }
  static SpectralAmplitude exponential(double Gamma, double w0) {
    return SpectralAmplitude(ExponentialOneSided{Gamma}, w0);
  }
  static SpectralAmplitude gaussian(double sigma, double w0) {
    return SpectralAmplitude(GaussianSpectral{sigma}, w0);
  }
  // Rescales arbitrary samples to unit norm before constructing.
  static SpectralAmplitude sampled_normalized(FrequencyGrid grid, std::vector<cd> values);
};

// Carrier-removed envelope Integral dw/2pi phi(w) e^{-i(w-w0)t}. For Sampled
// shapes the discrete transform sets quality_warning when the grid is too
// coarse to place t inside the alias-free window |t| < pi/spacing.
struct EnvelopeResult {
  cd value;
  bool quality_warning = false;
};
EnvelopeResult temporal_envelope(const SpectralAmplitude& phi, double t);

// Spectral autocorrelation c(y) = Integral dw/2pi phi*(w - y) phi(w); closed
// forms for analytic shapes, grid correlation for Sampled.
cd spectral_autocorrelation(const SpectralAmplitude& phi, double y);

// Default sampling of a spectral amplitude onto a uniform grid
// (span +-8 widths, 4096 points unless overridden).
SampledShape sample_shape(const SpectralAmplitude& phi, std::size_t n = 4096, double span_factor = 8.0);

}  // namespace etpa
