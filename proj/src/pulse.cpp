#include "etpa/pulse.hpp"

#include <cmath>
#include <stdexcept>

#include "etpa/constants.hpp"
#include "etpa/quad.hpp"

namespace etpa {

namespace {

double sinc(double u) {
  if (std::abs(u) < 1e-4) return 1.0 - u * u / 6.0 * (1.0 - u * u / 20.0);
  return std::sin(u) / u;
}

// Linear interpolation of sampled values at an arbitrary frequency; 0 outside.
cd interp(const SampledShape& s, double omega) {
  const double t = (omega - s.grid.min()) / s.grid.spacing();
  if (t < 0.0 || t > static_cast<double>(s.grid.size() - 1)) return 0.0;
  const std::size_t j = std::min(static_cast<std::size_t>(t), s.grid.size() - 2);
  const double f = t - static_cast<double>(j);
  return s.values[j] * (1.0 - f) + s.values[j + 1] * f;
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

double spectral_width(const PulseShape& s) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Rectangular>) return kTwoPi / v.duration;
        if constexpr (std::is_same_v<T, ExponentialOneSided>) return v.half_width;
        if constexpr (std::is_same_v<T, GaussianSpectral>) return v.sigma;
        if constexpr (std::is_same_v<T, SampledShape>)
          return 0.125 * (v.grid.max() - v.grid.min());
      },
      s);
}

double shape_fwhm(const PulseShape& s) {
  return std::visit(
      [&s](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Rectangular>)
          return 2.0 * 2.0 * 1.39155737825151 / v.duration;  // sinc^2 half maximum
        if constexpr (std::is_same_v<T, ExponentialOneSided>) return 2.0 * v.half_width;
        if constexpr (std::is_same_v<T, GaussianSpectral>)
          return 2.0 * std::sqrt(2.0 * std::log(2.0)) * v.sigma;
        if constexpr (std::is_same_v<T, SampledShape>) {
          double peak = 0.0;
          std::size_t ipk = 0;
          for (std::size_t i = 0; i < v.values.size(); ++i)
            if (std::norm(v.values[i]) > peak) {
              peak = std::norm(v.values[i]);
              ipk = i;
            }
          if (peak == 0.0) return 0.0;
          std::size_t lo = ipk, hi = ipk;
          while (lo > 0 && std::norm(v.values[lo]) > 0.5 * peak) --lo;
          while (hi + 1 < v.values.size() && std::norm(v.values[hi]) > 0.5 * peak) ++hi;
          return (hi > lo) ? (hi - lo) * v.grid.spacing() : v.grid.spacing();
        }
      },
      s);
}

cd shape_value(const PulseShape& s, double x) {
  return std::visit(
      [x](const auto& v) -> cd {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Rectangular>)
          return std::sqrt(v.duration) * sinc(0.5 * x * v.duration);
        if constexpr (std::is_same_v<T, ExponentialOneSided>)
          return std::sqrt(2.0 * v.half_width) / cd(v.half_width, -x);
        if constexpr (std::is_same_v<T, GaussianSpectral>)
          return std::pow(kTwoPi / (v.sigma * v.sigma), 0.25) *
                 std::exp(-x * x / (4.0 * v.sigma * v.sigma));
        if constexpr (std::is_same_v<T, SampledShape>)
          return interp(v, v.grid.center() + x);
      },
      s);
}

cd shape_envelope(const PulseShape& s, double t) {
  return std::visit(
      [t](const auto& v) -> cd {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Rectangular>) {
          const double half = 0.5 * v.duration, a = 1.0 / std::sqrt(v.duration);
          if (std::abs(t) < half) return a;
          if (std::abs(t) == half) return 0.5 * a;  // Fourier midpoint at the jumps
          return 0.0;
        }
        if constexpr (std::is_same_v<T, ExponentialOneSided>) {
          if (t < 0.0) return 0.0;
          return std::sqrt(2.0 * v.half_width) * std::exp(-v.half_width * t);
        }
        if constexpr (std::is_same_v<T, GaussianSpectral>) {
          return std::pow(kTwoPi / (v.sigma * v.sigma), 0.25) * (v.sigma / kSqrtPi) *
                 std::exp(-v.sigma * v.sigma * t * t);
        }
        if constexpr (std::is_same_v<T, SampledShape>) {
          // Discrete transform relative to the grid center.
          quad::KahanSumC acc;
          const double h = v.grid.spacing();
          for (std::size_t j = 0; j < v.grid.size(); ++j) {
            const double x = v.grid.point(j) - v.grid.center();
            acc.add(v.values[j] * std::exp(cd(0.0, -x * t)));
          }
          return acc.value() * (h / kTwoPi);
        }
      },
      s);
}

SpectralAmplitude::SpectralAmplitude(PulseShape s, double w0, double target_norm)
    : shape(std::move(s)), omega0(w0), norm(target_norm) {
  std::visit(
      [this](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Rectangular>) check_positive(v.duration, "Rectangular duration");
        if constexpr (std::is_same_v<T, ExponentialOneSided>)
          check_positive(v.half_width, "Exponential half-width");
        if constexpr (std::is_same_v<T, GaussianSpectral>) check_positive(v.sigma, "Gaussian sigma");
        if constexpr (std::is_same_v<T, SampledShape>) {
          if (v.values.size() != v.grid.size())
            throw std::invalid_argument("SampledShape: value count does not match grid");
          const double got = norm_integral();
          if (std::abs(got - norm) > 1e-9 * std::abs(norm))
            throw std::invalid_argument("SpectralAmplitude: sampled norm off target by >1e-9");
        }
      },
      shape);
}

double SpectralAmplitude::norm_integral() const {
  if (const auto* s = std::get_if<SampledShape>(&shape)) {
    std::vector<double> f(s->values.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::norm(s->values[i]);
    return quad::trapezoid(f, s->grid.spacing()) / kTwoPi;
  }
  return norm;  // analytic shapes are normalized in closed form
}

SpectralAmplitude SpectralAmplitude::sampled_normalized(FrequencyGrid grid, std::vector<cd> values) {
  std::vector<double> f(values.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::norm(values[i]);
  const double n2 = quad::trapezoid(f, grid.spacing()) / kTwoPi;
  if (n2 <= 0.0) throw std::invalid_argument("sampled_normalized: zero spectrum");
  const double scale = 1.0 / std::sqrt(n2);
  for (auto& v : values) v *= scale;
  const double center = grid.center();
  return SpectralAmplitude(SampledShape{std::move(grid), std::move(values)}, center);
}

EnvelopeResult temporal_envelope(const SpectralAmplitude& phi, double t) {
  EnvelopeResult r;
  if (const auto* s = std::get_if<SampledShape>(&phi.shape)) {
    r.value = shape_envelope(phi.shape, t);
    r.quality_warning = std::abs(t) > kPi / s->grid.spacing();
  } else {
    r.value = shape_envelope(phi.shape, t);
  }
  return r;
}

cd spectral_autocorrelation(const SpectralAmplitude& phi, double y) {
  return std::visit(
      [&](const auto& v) -> cd {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Rectangular>) return sinc(0.5 * y * v.duration);
        if constexpr (std::is_same_v<T, ExponentialOneSided>) {
          const double g2 = 2.0 * v.half_width;
          return g2 / cd(g2, -y);
        }
        if constexpr (std::is_same_v<T, GaussianSpectral>)
          return std::exp(-y * y / (8.0 * v.sigma * v.sigma));
        if constexpr (std::is_same_v<T, SampledShape>) {
          quad::KahanSumC acc;
          for (std::size_t j = 0; j < v.grid.size(); ++j)
            acc.add(std::conj(interp(v, v.grid.point(j) - y)) * v.values[j]);
          return acc.value() * (v.grid.spacing() / kTwoPi);
        }
      },
      phi.shape);
}

SampledShape sample_shape(const SpectralAmplitude& phi, std::size_t n, double span_factor) {
  FrequencyGrid g = FrequencyGrid::regular(phi.omega0, span_factor * phi.width(), n);
  std::vector<cd> vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = phi.amplitude(g.point(i));
  return SampledShape{std::move(g), std::move(vals)};
}

}  // namespace etpa
