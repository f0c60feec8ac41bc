#include "etpa/jsa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "etpa/constants.hpp"
#include "etpa/errors.hpp"
#include "etpa/quad.hpp"

namespace etpa {

namespace {

bool shape_is_even(const PulseShape& s) {
  if (std::holds_alternative<ExponentialOneSided>(s)) return false;
  if (const auto* sm = std::get_if<SampledShape>(&s)) {
    double vmax = 0.0;
    for (const auto& v : sm->values) vmax = std::max(vmax, std::abs(v));
    const double c = sm->grid.center();
    for (std::size_t j = 0; j < sm->grid.size(); ++j) {
      const double x = sm->grid.point(j) - c;
      if (std::abs(shape_value(s, x) - shape_value(s, -x)) > 1e-12 * vmax) return false;
    }
    return true;
  }
  return true;  // rectangular, gaussian
}

double trapezoid2d_norm(const Sampled2DJsa& s) {
  const std::size_t na = s.grid_a.size(), nb = s.grid_b.size();
  quad::KahanSum acc;
  for (std::size_t i = 0; i < na; ++i) {
    const double wi = (i == 0 || i == na - 1) ? 0.5 : 1.0;
    for (std::size_t j = 0; j < nb; ++j) {
      const double wj = (j == 0 || j == nb - 1) ? 0.5 : 1.0;
      acc.add(wi * wj * std::norm(s.values[i * nb + j]));
    }
  }
  const double measure = s.grid_a.spacing() * s.grid_b.spacing() / (kTwoPi * kTwoPi);
  return acc.value() * measure;
}

cd interp2(const Sampled2DJsa& s, double a, double b) {
  const double ta = (a - s.grid_a.min()) / s.grid_a.spacing();
  const double tb = (b - s.grid_b.min()) / s.grid_b.spacing();
  const std::size_t na = s.grid_a.size(), nb = s.grid_b.size();
  if (ta < 0.0 || tb < 0.0 || ta > double(na - 1) || tb > double(nb - 1)) return 0.0;
  const std::size_t i = std::min(std::size_t(ta), na - 2), j = std::min(std::size_t(tb), nb - 2);
  const double fa = ta - double(i), fb = tb - double(j);
  const cd v00 = s.values[i * nb + j], v01 = s.values[i * nb + j + 1];
  const cd v10 = s.values[(i + 1) * nb + j], v11 = s.values[(i + 1) * nb + j + 1];
  return v00 * ((1 - fa) * (1 - fb)) + v01 * ((1 - fa) * fb) + v10 * (fa * (1 - fb)) + v11 * (fa * fb);
}

}  // namespace

JointSpectralAmplitude::JointSpectralAmplitude(Variant v) : v_(std::move(v)) {
  if (const auto* ad = std::get_if<AntiDiagonalJsa>(&v_)) {
    if (!shape_is_even(ad->broad))
      throw std::invalid_argument("AntiDiagonalJsa: broad factor must be even");
    if (!(shape_fwhm(ad->narrow) < shape_fwhm(ad->broad)))
      throw std::invalid_argument("AntiDiagonalJsa: narrow FWHM must be below broad FWHM");
    symmetric_ = true;
  } else if (std::holds_alternative<SeparableJsa>(v_)) {
    symmetric_ = true;
  } else if (const auto* tm = std::get_if<TwoModeJsa>(&v_)) {
    symmetric_ = tm->symmetrized;
  } else if (const auto* s = std::get_if<Sampled2DJsa>(&v_)) {
    const std::size_t na = s->grid_a.size(), nb = s->grid_b.size();
    if (s->values.size() != na * nb)
      throw std::invalid_argument("Sampled2DJsa: value count does not match grids");
    if (s->grid_a == s->grid_b) {
      double vmax = 0.0;
      for (const auto& v : s->values) vmax = std::max(vmax, std::abs(v));
      symmetric_ = true;
      for (std::size_t i = 0; i < na && symmetric_; ++i)
        for (std::size_t j = 0; j < i; ++j)
          if (std::abs(s->values[i * nb + j] - s->values[j * nb + i]) > 1e-12 * vmax) {
            symmetric_ = false;
            break;
          }
    }
  }
}

JointSpectralAmplitude JointSpectralAmplitude::separable(SpectralAmplitude phi0) {
  return JointSpectralAmplitude(Variant(SeparableJsa{std::move(phi0)}));
}
JointSpectralAmplitude JointSpectralAmplitude::anti_diagonal(PulseShape narrow, PulseShape broad,
                                                             double pump_omega) {
  return JointSpectralAmplitude(Variant(AntiDiagonalJsa{std::move(narrow), std::move(broad), pump_omega}));
}
JointSpectralAmplitude JointSpectralAmplitude::sampled(Sampled2DJsa s) {
  return JointSpectralAmplitude(Variant(std::move(s)));
}
JointSpectralAmplitude JointSpectralAmplitude::two_mode(SpectralAmplitude f, SpectralAmplitude g) {
  return JointSpectralAmplitude(Variant(TwoModeJsa{std::move(f), std::move(g), false, 1.0}));
}

double JointSpectralAmplitude::omega0() const {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SeparableJsa>) return v.phi0.omega0;
        if constexpr (std::is_same_v<T, AntiDiagonalJsa>) return 0.5 * v.pump_omega;
        if constexpr (std::is_same_v<T, Sampled2DJsa>)
          return 0.5 * (v.grid_a.center() + v.grid_b.center());
        if constexpr (std::is_same_v<T, TwoModeJsa>) return 0.5 * (v.f.omega0 + v.g.omega0);
      },
      v_);
}

cd JointSpectralAmplitude::value(double w, double wt) const {
  return std::visit(
      [&](const auto& v) -> cd {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SeparableJsa>) return v.phi0.amplitude(w) * v.phi0.amplitude(wt);
        if constexpr (std::is_same_v<T, AntiDiagonalJsa>)
          return shape_value(v.broad, 0.5 * (w - wt)) * shape_value(v.narrow, w + wt - v.pump_omega);
        if constexpr (std::is_same_v<T, Sampled2DJsa>) return interp2(v, w, wt);
        if constexpr (std::is_same_v<T, TwoModeJsa>) {
          if (v.symmetrized)
            return v.scale * 0.5 *
                   (v.f.amplitude(w) * v.g.amplitude(wt) + v.g.amplitude(w) * v.f.amplitude(wt));
          return v.f.amplitude(w) * v.g.amplitude(wt);
        }
      },
      v_);
}

cd JointSpectralAmplitude::value_sym(double w, double wt) const {
  if (symmetric_) return value(w, wt);
  return 0.5 * (value(w, wt) + value(wt, w));
}

double JointSpectralAmplitude::norm_sq() const {
  if (const auto* s = std::get_if<Sampled2DJsa>(&v_)) return trapezoid2d_norm(*s);
  return 1.0;
}

SymmetrizeResult symmetrize_jsa(const JointSpectralAmplitude& jsa) {
  if (jsa.symmetric()) return {jsa, 1.0};

  if (const auto* tm = std::get_if<TwoModeJsa>(&jsa.kind())) {
    // ||(fg + gf)/2||^2 = (1 + |<f,g>|^2) / 2 for unit-normalized f, g.
    const double wmax = std::max(tm->f.width(), tm->g.width());
    const double mid = 0.5 * (tm->f.omega0 + tm->g.omega0);
    auto nodes = quad::tan_line(mid, 2.0 * wmax, 1200);
    quad::KahanSumC acc;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      acc.add(nodes.w[i] * std::conj(tm->f.amplitude(nodes.x[i])) * tm->g.amplitude(nodes.x[i]));
    const double ov2 = std::norm(acc.value() / kTwoPi);
    const double norm_before = std::sqrt(0.5 * (1.0 + ov2));
    TwoModeJsa out{tm->f, tm->g, true, 1.0 / norm_before};
    return {JointSpectralAmplitude(JointSpectralAmplitude::Variant(std::move(out))), norm_before};
  }

  const auto* s = std::get_if<Sampled2DJsa>(&jsa.kind());
  if (!s) throw std::logic_error("symmetrize_jsa: unreachable variant");
  if (!(s->grid_a == s->grid_b))
    throw std::invalid_argument("symmetrize_jsa: sampled JSA needs a common grid");
  const std::size_t n = s->grid_a.size();
  Sampled2DJsa sym{s->grid_a, s->grid_b, std::vector<cd>(n * n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      sym.values[i * n + j] = 0.5 * (s->values[i * n + j] + s->values[j * n + i]);
  const double n2 = trapezoid2d_norm(sym);
  if (n2 < 1e-24)
    throw DegenerateStateError("symmetrize_jsa: symmetrized amplitude vanishes (antisymmetric JSA)");
  const double norm_before = std::sqrt(n2);
  for (auto& v : sym.values) v /= norm_before;
  return {JointSpectralAmplitude::sampled(std::move(sym)), norm_before};
}

double dispersed_broad_width(double sigma_b, double dispersion) {
  const double d = 4.0 * dispersion * sigma_b * sigma_b;
  return sigma_b / std::sqrt(1.0 + d * d);
}

JsaScales jsa_scales(const JointSpectralAmplitude& jsa) {
  return std::visit(
      [&](const auto& v) -> JsaScales {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SeparableJsa>) {
          const double w = v.phi0.width();
          return {w, w};
        }
        if constexpr (std::is_same_v<T, AntiDiagonalJsa>)
          return {spectral_width(v.narrow), spectral_width(v.broad)};
        if constexpr (std::is_same_v<T, Sampled2DJsa>) {
          const double half = 0.5 * (v.grid_a.max() - v.grid_a.min());
          return {12.0 * v.grid_a.spacing(), 0.125 * half};
        }
        if constexpr (std::is_same_v<T, TwoModeJsa>) {
          const double w = std::max(v.f.width(), v.g.width());
          return {w, w};
        }
      },
      jsa.kind());
}

Sampled2DJsa sample_jsa(const JointSpectralAmplitude& jsa, const Jsa2DGridSpec& spec) {
  if (const auto* s = std::get_if<Sampled2DJsa>(&jsa.kind())) return *s;
  const JsaScales sc = jsa_scales(jsa);
  const double half_span = spec.span_factor * sc.broad + 2.0 * sc.narrow;
  std::size_t n = spec.n;
  if (n == 0) {
    const double h_needed = sc.narrow / 24.0;
    n = static_cast<std::size_t>(std::ceil(2.0 * half_span / h_needed)) + 1;
    n = std::max<std::size_t>(n, 257);
    if (n > 4097)
      throw ConvergenceError("sample_jsa: broad/narrow ratio too large for a sampled grid");
  }
  const double w0 = jsa.omega0();
  FrequencyGrid g = FrequencyGrid::regular(w0, half_span, n);
  Sampled2DJsa out{g, g, std::vector<cd>(n * n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double a = g.point(i);
    for (std::size_t j = 0; j < n; ++j) out.values[i * n + j] = jsa.value(a, g.point(j));
  }
  return out;
}

JointSpectralAmplitude apply_dispersion(const JointSpectralAmplitude& jsa, double dispersion,
                                        const Jsa2DGridSpec& spec) {
  if (dispersion == 0.0) return jsa;
  Sampled2DJsa s = sample_jsa(jsa, spec);
  const double w0 = jsa.omega0();
  const std::size_t na = s.grid_a.size(), nb = s.grid_b.size();
  std::vector<cd> phase_a(na), phase_b(nb);
  for (std::size_t i = 0; i < na; ++i) {
    const double x = s.grid_a.point(i) - w0;
    phase_a[i] = std::exp(cd(0.0, 0.5 * dispersion * x * x));
  }
  for (std::size_t j = 0; j < nb; ++j) {
    const double y = s.grid_b.point(j) - w0;
    phase_b[j] = std::exp(cd(0.0, 0.5 * dispersion * y * y));
  }
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) s.values[i * nb + j] *= phase_a[i] * phase_b[j];
  return JointSpectralAmplitude::sampled(std::move(s));
}

}  // namespace etpa
