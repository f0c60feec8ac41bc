#include "etpa/tpa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "etpa/constants.hpp"
#include "etpa/errors.hpp"
#include "etpa/quad.hpp"

namespace etpa {

namespace {

double sinc(double u) {
  if (std::abs(u) < 1e-4) return 1.0 - u * u / 6.0 * (1.0 - u * u / 20.0);
  return std::sin(u) / u;
}

// (1/z)(1 + (e^{-z} - 1)/z): the rectangular turn-on bracket, series-guarded
// against cancellation for small |z|.
cd rect_bracket(cd z) {
  if (std::abs(z) < 0.9) {
    cd term(0.5, 0.0), sum = term;
    double fact = 2.0;  // (m+1)! running
    cd zp = 1.0;
    for (int m = 2; m <= 16; ++m) {
      zp *= -z;
      fact *= (m + 1);
      term = zp / fact;
      sum += term;
    }
    return sum;
  }
  return (1.0 + (std::exp(-z) - 1.0) / z) / z;
}

// Int dx/2pi exp(-A x^2) / (gamma + i (x - delta)) = w(sqrt(A)(delta + i gamma))/2.
cd gaussian_lorentzian_integral(double A, double gamma, double delta) {
  const double ra = std::sqrt(A);
  return 0.5 * faddeeva_w(cd(ra * delta, ra * gamma));
}

// Int dx/2pi |K(x)|^2 / (gamma + i (x - delta)) for a projection kernel.
struct SpectralIntegral {
  cd value;
  bool closed;
};

SpectralIntegral dqc_spectral_integral(const ProjectionKernel& k, double gamma, double delta) {
  if (!(gamma > 0.0)) throw std::domain_error("p_dqc: gamma_fg must be positive");
  const double a2 = std::norm(k.amp);
  switch (k.form) {
    case ProjectionKernel::Form::ComplexLorentzian: {
      const double g = k.param;
      return {a2 * g / (2.0 * cd(gamma + g, -delta)), true};
    }
    case ProjectionKernel::Form::Sinc: {
      const cd zeta = cd(gamma, -delta) * k.param;
      return {a2 * rect_bracket(zeta), true};
    }
    case ProjectionKernel::Form::Gaussian:
      return {a2 * gaussian_lorentzian_integral(2.0 * k.param, gamma, delta), true};
    case ProjectionKernel::Form::Sampled: {
      std::vector<cd> f(k.samples.size());
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::norm(k.samples[i]);
      return {quad::lorentzian_product_integral(f, k.x0, k.dx, gamma, delta) / kTwoPi, false};
    }
  }
  throw std::logic_error("dqc_spectral_integral: unreachable");
}

std::vector<cd> self_convolution(const std::vector<cd>& v, double h) {
  // K[m] = (h/2pi) sum_j v_j v_{m-j}, m = 0 .. 2n-2
  const std::size_t n = v.size();
  std::vector<cd> out(2 * n - 1, cd(0.0, 0.0));
  for (std::size_t m = 0; m < out.size(); ++m) {
    const std::size_t jlo = m >= n ? m - n + 1 : 0;
    const std::size_t jhi = std::min(m, n - 1);
    quad::KahanSumC acc;
    for (std::size_t j = jlo; j <= jhi; ++j) acc.add(v[j] * v[m - j]);
    out[m] = acc.value() * (h / kTwoPi);
  }
  return out;
}

}  // namespace

cd ProjectionKernel::eval(double x) const {
  switch (form) {
    case Form::ComplexLorentzian:
      return amp * param / cd(param, -x);
    case Form::Sinc:
      return amp * sinc(0.5 * x * param);
    case Form::Gaussian:
      return amp * std::exp(-param * x * x);
    case Form::Sampled: {
      const double t = (x - x0) / dx;
      if (t < 0.0 || t > double(samples.size() - 1)) return 0.0;
      const std::size_t j = std::min(std::size_t(t), samples.size() - 2);
      const double f = t - double(j);
      return samples[j] * (1.0 - f) + samples[j + 1] * f;
    }
  }
  return 0.0;
}

ProjectionKernel k_projection_coherent(const SpectralAmplitude& phi) {
  ProjectionKernel k;
  k.provenance = ProjectionKernel::Provenance::Coherent;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Rectangular>) {
          k.form = ProjectionKernel::Form::Sinc;
          k.amp = 1.0;
          k.param = v.duration;
        } else if constexpr (std::is_same_v<T, ExponentialOneSided>) {
          k.form = ProjectionKernel::Form::ComplexLorentzian;
          k.amp = 1.0;
          k.param = 2.0 * v.half_width;
        } else if constexpr (std::is_same_v<T, GaussianSpectral>) {
          k.form = ProjectionKernel::Form::Gaussian;
          k.amp = 1.0;
          k.param = 1.0 / (8.0 * v.sigma * v.sigma);
        } else if constexpr (std::is_same_v<T, SampledShape>) {
          k.form = ProjectionKernel::Form::Sampled;
          std::vector<cd> env(v.values.size());
          for (std::size_t i = 0; i < env.size(); ++i) env[i] = v.values[i];
          k.samples = self_convolution(env, v.grid.spacing());
          k.dx = v.grid.spacing();
          // offsets x = (w - w0) + (w' - w0) span twice the grid
          k.x0 = 2.0 * (v.grid.min() - v.grid.center());
        }
      },
      phi.shape);
  return k;
}

ProjectionKernel k_projection_jsa(const JointSpectralAmplitude& jsa) {
  if (!jsa.symmetric())
    throw std::invalid_argument("k_projection_jsa: JSA not symmetric; symmetrize first");
  ProjectionKernel k;
  k.provenance = ProjectionKernel::Provenance::Jsa;

  if (const auto* sep = std::get_if<SeparableJsa>(&jsa.kind())) {
    k = k_projection_coherent(sep->phi0);
    k.provenance = ProjectionKernel::Provenance::Jsa;
    return k;
  }

  if (const auto* ad = std::get_if<AntiDiagonalJsa>(&jsa.kind())) {
    // K(x) = psi_N(x) * Int dz/2pi psi_B(z)
    cd b;  // broad integral
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, GaussianSpectral>)
            b = std::pow(2.0 / kPi, 0.25) * std::sqrt(v.sigma);
          else if constexpr (std::is_same_v<T, Rectangular>)
            b = 1.0 / std::sqrt(v.duration);
          else if constexpr (std::is_same_v<T, ExponentialOneSided>)
            throw std::logic_error("k_projection_jsa: odd broad factor passed validation");
          else if constexpr (std::is_same_v<T, SampledShape>) {
            quad::KahanSumC acc;
            for (std::size_t j = 0; j < v.grid.size(); ++j) acc.add(v.values[j]);
            b = acc.value() * (v.grid.spacing() / kTwoPi);
          }
        },
        ad->broad);
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, GaussianSpectral>) {
            k.form = ProjectionKernel::Form::Gaussian;
            k.amp = b * std::pow(kTwoPi / (v.sigma * v.sigma), 0.25);
            k.param = 1.0 / (4.0 * v.sigma * v.sigma);
          } else if constexpr (std::is_same_v<T, ExponentialOneSided>) {
            k.form = ProjectionKernel::Form::ComplexLorentzian;
            k.amp = b * std::sqrt(2.0 / v.half_width);
            k.param = v.half_width;
          } else if constexpr (std::is_same_v<T, Rectangular>) {
            k.form = ProjectionKernel::Form::Sinc;
            k.amp = b * std::sqrt(v.duration);
            k.param = v.duration;
          } else if constexpr (std::is_same_v<T, SampledShape>) {
            k.form = ProjectionKernel::Form::Sampled;
            k.x0 = v.grid.min() - v.grid.center();
            k.dx = v.grid.spacing();
            k.samples.resize(v.grid.size());
            for (std::size_t j = 0; j < v.grid.size(); ++j) k.samples[j] = b * v.values[j];
          }
        },
        ad->narrow);
    return k;
  }

  if (const auto* s = std::get_if<Sampled2DJsa>(&jsa.kind())) {
    if (!(s->grid_a == s->grid_b))
      throw std::invalid_argument("k_projection_jsa: sampled JSA needs a common grid");
    const std::size_t n = s->grid_a.size();
    const double h = s->grid_a.spacing();
    const double w0 = jsa.omega0();
    k.form = ProjectionKernel::Form::Sampled;
    k.dx = h;
    k.x0 = 2.0 * (s->grid_a.min() - w0);
    k.samples.assign(2 * n - 1, cd(0.0, 0.0));
    for (std::size_t m = 0; m < 2 * n - 1; ++m) {
      const std::size_t ilo = m >= n ? m - n + 1 : 0;
      const std::size_t ihi = std::min(m, n - 1);
      quad::KahanSumC acc;
      for (std::size_t i = ilo; i <= ihi; ++i) acc.add(s->values[i * n + (m - i)]);
      k.samples[m] = acc.value() * (h / kTwoPi);
    }
    return k;
  }

  // Symmetrized two-mode: cross convolution of f and g on a sampled grid.
  const auto* tm = std::get_if<TwoModeJsa>(&jsa.kind());
  const double w0 = jsa.omega0();
  const double wmax = std::max(tm->f.width(), tm->g.width());
  const double span = 8.0 * wmax + std::abs(tm->f.omega0 - tm->g.omega0);
  const std::size_t n = 4096;
  FrequencyGrid g = FrequencyGrid::regular(w0, span, n);
  std::vector<cd> fv(n), gv(n);
  for (std::size_t i = 0; i < n; ++i) {
    fv[i] = tm->f.amplitude(g.point(i));
    gv[i] = tm->g.amplitude(g.point(i));
  }
  k.form = ProjectionKernel::Form::Sampled;
  k.dx = g.spacing();
  k.x0 = 2.0 * (g.min() - w0);
  k.samples.assign(2 * n - 1, cd(0.0, 0.0));
  for (std::size_t m = 0; m < 2 * n - 1; ++m) {
    const std::size_t jlo = m >= n ? m - n + 1 : 0;
    const std::size_t jhi = std::min(m, n - 1);
    quad::KahanSumC acc;
    for (std::size_t j = jlo; j <= jhi; ++j) acc.add(fv[j] * gv[m - j]);
    k.samples[m] = acc.value() * (tm->scale * g.spacing() / kTwoPi);
  }
  return k;
}

std::function<double(double)> marginal_spectrum(const LightState& state) {
  if (const auto* coh = std::get_if<CoherentState>(&state)) {
    SpectralAmplitude phi = coh->phi;
    return [phi](double w) { return std::norm(phi.amplitude(w)); };
  }
  const auto* tp = std::get_if<TwoPhotonState>(&state);
  if (!tp) throw std::invalid_argument("marginal_spectrum: coherent or two-photon state required");

  if (const auto* s = std::get_if<Sampled2DJsa>(&tp->jsa.kind())) {
    Sampled2DJsa jsa = *s;
    return [jsa](double w) -> double {
      // interpolate along the first axis only
      const double t = (w - jsa.grid_a.min()) / jsa.grid_a.spacing();
      if (t < 0.0 || t > double(jsa.grid_a.size() - 1)) return 0.0;
      const std::size_t i = std::min(std::size_t(t), jsa.grid_a.size() - 2);
      const double f = t - double(i);
      const std::size_t nb = jsa.grid_b.size();
      std::vector<double> row(nb);
      for (std::size_t j = 0; j < nb; ++j)
        row[j] = std::norm(jsa.values[i * nb + j] * (1.0 - f) + jsa.values[(i + 1) * nb + j] * f);
      return quad::trapezoid(row, jsa.grid_b.spacing()) / kTwoPi;
    };
  }

  JointSpectralAmplitude jsa = tp->jsa;
  const double w0 = jsa.omega0();
  const JsaScales sc = jsa_scales(jsa);
  return [jsa, w0, sc](double w) {
    quad::Nodes nodes = quad::structured_line(
        {{2.0 * w0 - w, sc.narrow}, {w, 2.0 * sc.broad}, {w0, sc.broad}}, 12);
    quad::KahanSum acc;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      acc.add(nodes.w[i] * std::norm(jsa.value_sym(w, nodes.x[i])));
    return acc.value() / kTwoPi;
  };
}

namespace {

struct EngineSetup {
  double omega0;
  double delta;
  double flux4;  // N^2 or 4 eps^2
  bool is_single_photon = false;
  std::vector<std::string> warnings;
};

EngineSetup engine_setup(const LevelSystem& level, const LightState& state, double detuning) {
  level.validate();
  EngineSetup s;
  s.omega0 = state_omega0(state);
  s.delta = level.omega_f() - 2.0 * s.omega0;
  if (!std::isnan(detuning)) {
    const double scale = std::max({std::abs(s.delta), level.gamma_fg(), 1e-30});
    if (std::abs(detuning - s.delta) > 1e-9 * scale)
      throw std::invalid_argument(
          "detuning parameter disagrees with omega_fg - 2*omega0 of the supplied state");
  }
  if (const auto* coh = std::get_if<CoherentState>(&state)) {
    s.flux4 = coh->mean_photons() * coh->mean_photons();
  } else if (const auto* tp = std::get_if<TwoPhotonState>(&state)) {
    s.flux4 = 4.0 * tp->epsilon * tp->epsilon;
    if (tp->non_isolated_pair_warning()) s.warnings.push_back("non-isolated-pair regime (eps^2 > 0.1)");
  } else {
    s.is_single_photon = true;
    s.flux4 = 0.0;
  }
  return s;
}

ProjectionKernel state_projection(const LightState& state) {
  if (const auto* coh = std::get_if<CoherentState>(&state)) return k_projection_coherent(coh->phi);
  const auto* tp = std::get_if<TwoPhotonState>(&state);
  return k_projection_jsa(tp->jsa);
}

// Q for the spectral factor of phi with a given flux prefactor (coherent and
// separable two-photon states share this form, Eqs. 123-124).
cd q_from_phi(double flux4, const SpectralAmplitude& phi, double gamma, double omega) {
  return std::visit(
      [&](const auto& v) -> cd {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ExponentialOneSided>) {
          const double g2 = 2.0 * v.half_width;
          return flux4 * v.half_width / cd(gamma + g2, -omega);
        } else if constexpr (std::is_same_v<T, Rectangular>) {
          return flux4 * rect_bracket(cd(gamma, -omega) * v.duration);
        } else if constexpr (std::is_same_v<T, GaussianSpectral>) {
          return flux4 * gaussian_lorentzian_integral(1.0 / (4.0 * v.sigma * v.sigma), gamma, omega);
        } else {
          // grid path: G(y) = flux4 * c(y) c(-y) on the sample spacing
          const auto& sm = v;
          const std::size_t n = sm.grid.size();
          const double h = sm.grid.spacing();
          std::vector<cd> gvals(2 * n - 1);
          SpectralAmplitude tmp(sm, sm.grid.center());
          for (std::size_t m = 0; m < gvals.size(); ++m) {
            const double y = (double(m) - double(n - 1)) * h;
            gvals[m] = flux4 * spectral_autocorrelation(tmp, y) * spectral_autocorrelation(tmp, -y);
          }
          const double y0 = -double(n - 1) * h;
          const double g = std::max(gamma, 1e-12 * (std::abs(omega) + h));
          return quad::lorentzian_product_integral(gvals, y0, h, g, omega) / kTwoPi;
        }
      },
      phi.shape);
}

}  // namespace

cd q_autocorrelation_integral(double gamma_ee, double omega_ee, const LightState& state) {
  if (std::holds_alternative<SinglePhotonState>(state)) return 0.0;

  if (const auto* coh = std::get_if<CoherentState>(&state)) {
    const double n = coh->mean_photons();
    return q_from_phi(n * n, coh->phi, gamma_ee, omega_ee);
  }

  const auto& tp = std::get<TwoPhotonState>(state);
  const double flux4 = 4.0 * tp.epsilon * tp.epsilon;

  if (const auto* sep = std::get_if<SeparableJsa>(&tp.jsa.kind()))
    return q_from_phi(flux4, sep->phi0, gamma_ee, omega_ee);

  if (const auto* ad = std::get_if<AntiDiagonalJsa>(&tp.jsa.kind())) {
    // G(y) = flux4 * Int du/2pi psi_B*(u - y) psi_B(u): the narrow factor has
    // dropped out.
    if (const auto* g = std::get_if<GaussianSpectral>(&ad->broad)) {
      return flux4 *
             gaussian_lorentzian_integral(1.0 / (8.0 * g->sigma * g->sigma), gamma_ee, omega_ee);
    }
    // generic broad factor on a grid
    const double wb = spectral_width(ad->broad);
    const std::size_t n = 4097;
    const double half = 12.0 * wb;
    const double h = 2.0 * half / double(n - 1);
    std::vector<cd> bvals(n);
    for (std::size_t j = 0; j < n; ++j) bvals[j] = shape_value(ad->broad, -half + h * double(j));
    std::vector<cd> gvals(2 * n - 1);
    for (std::size_t m = 0; m < gvals.size(); ++m) {
      const long shift = long(m) - long(n - 1);
      quad::KahanSumC acc;
      const std::size_t jlo = shift > 0 ? std::size_t(shift) : 0;
      const std::size_t jhi = shift < 0 ? n - 1 + shift : n - 1;
      for (std::size_t j = jlo; j <= jhi; ++j) acc.add(std::conj(bvals[j - shift]) * bvals[j]);
      gvals[m] = flux4 * acc.value() * (h / kTwoPi);
    }
    const double g = std::max(gamma_ee, 1e-12 * (std::abs(omega_ee) + h));
    return quad::lorentzian_product_integral(gvals, -double(n - 1) * h, h, g, omega_ee) / kTwoPi;
  }

  // Sampled2D (and symmetrized two-mode via sampling): 2-D anti-diagonal
  // autocorrelation.
  Sampled2DJsa s = [&] {
    if (const auto* p = std::get_if<Sampled2DJsa>(&tp.jsa.kind())) return *p;
    return sample_jsa(tp.jsa, Jsa2DGridSpec{513, 10.0});
  }();
  if (!(s.grid_a == s.grid_b))
    throw std::invalid_argument("q_autocorrelation_integral: sampled JSA needs a common grid");
  const std::size_t n = s.grid_a.size();
  if (n > 768)
    throw ConvergenceError("q_autocorrelation_integral: sampled grid too large (n > 768)");
  const double h = s.grid_a.spacing();
  const double measure = h * h / (kTwoPi * kTwoPi);
  std::vector<cd> gvals(2 * n - 1);
  for (std::size_t m = 0; m < gvals.size(); ++m) {
    const long sh = long(m) - long(n - 1);  // y = sh * h
    quad::KahanSumC acc;
    for (std::size_t i = 0; i < n; ++i) {
      const long im = long(i) - sh;
      if (im < 0 || im >= long(n)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const long jp = long(j) + sh;
        if (jp < 0 || jp >= long(n)) continue;
        acc.add(std::conj(s.values[std::size_t(im) * n + std::size_t(jp)]) * s.values[i * n + j]);
      }
    }
    gvals[m] = flux4 * acc.value() * measure;
  }
  const double g = std::max(gamma_ee, 1e-12 * (std::abs(omega_ee) + h));
  return quad::lorentzian_product_integral(gvals, -double(n - 1) * h, h, g, omega_ee) / kTwoPi;
}

cd q_ee(const LevelSystem& level, std::size_t e, std::size_t ep, const LightState& state) {
  const double gamma = level.gamma_ee(e, ep);
  const double omega = level.intermediate(e).omega - level.intermediate(ep).omega;
  return q_autocorrelation_integral(gamma, omega, state);
}

PathwayResult p_dqc(const LevelSystem& level, const SIContext& si, const LightState& state,
                    double detuning) {
  EngineSetup setup = engine_setup(level, state, detuning);
  PathwayResult r;
  r.warnings = setup.warnings;
  const double l04 = std::pow(si.L0(), 4);
  r.prefactor = setup.flux4 * l04;
  if (setup.is_single_photon) {
    r.method = "closed-form";
    r.warnings.push_back("single-photon state drives no TPA (four-frequency correlation is zero)");
    return r;
  }

  const cd sigma2 = big_sigma2(level, setup.omega0);
  ProjectionKernel k = state_projection(state);
  const SpectralIntegral integ = dqc_spectral_integral(k, level.gamma_fg(), setup.delta);
  r.method = integ.closed ? "closed-form" : "quadrature";
  r.spectral_factor = 2.0 * integ.value.real();
  r.dqc_sum = r.prefactor * sigma2 * integ.value;
  r.p_dqc = 2.0 * r.dqc_sum.real();

  const std::size_t n = level.n_intermediates();
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t ep = 0; ep < n; ++ep) {
      const double d_up = level.intermediate(e).omega - setup.omega0;
      const double d_dn = setup.omega0 - (level.omega_f() - level.intermediate(ep).omega);
      PathwayResult::PairR pr;
      pr.e = level.intermediate(e).label;
      pr.ep = level.intermediate(ep).label;
      pr.dqc = setup.flux4 * l04 * integ.value / (d_dn * d_up);
      r.pairs.push_back(std::move(pr));
    }
  if (r.total() > 0.1) r.warnings.push_back("perturbative validity: P > 0.1");
  return r;
}

PathwayResult p_nrp_rp(const LevelSystem& level, const SIContext& si, const LightState& state) {
  EngineSetup setup = engine_setup(level, state, std::numeric_limits<double>::quiet_NaN());
  PathwayResult r;
  r.warnings = setup.warnings;
  const double l04 = std::pow(si.L0(), 4);
  r.prefactor = setup.flux4 * l04;
  r.method = "closed-form";
  if (setup.is_single_photon) return r;

  big_sigma2(level, setup.omega0);  // far-off-resonance guard
  if (!level.m_is_real())
    throw std::invalid_argument(
        "p_nrp_rp: real-M assumption violated (complex dipole product; no complex-M path)");

  const std::size_t n = level.n_intermediates();
  quad::KahanSumC nrp_sum, rp_sum, comb_sum;
  for (std::size_t e = 0; e < n; ++e) {
    const double d_e = level.intermediate(e).omega - setup.omega0;             // omega_eg - omega0
    const double a_e = setup.omega0 - (level.omega_f() - level.intermediate(e).omega);
    for (std::size_t ep = 0; ep < n; ++ep) {
      const double a_ep = setup.omega0 - (level.omega_f() - level.intermediate(ep).omega);
      const double omega_ee = level.intermediate(e).omega - level.intermediate(ep).omega;
      const cd m = level.dipole_product(e, ep);
      const cd q = q_ee(level, e, ep, state);
      PathwayResult::PairR pr;
      pr.e = level.intermediate(e).label;
      pr.ep = level.intermediate(ep).label;
      pr.nrp = l04 * q / (a_ep * d_e);
      pr.rp = -l04 * q / (a_e * d_e);
      nrp_sum.add(m * pr.nrp);
      rp_sum.add(m * pr.rp);
      if (e != ep && omega_ee != 0.0) {
        // exact combined weight; degenerate pairs cancel identically
        comb_sum.add(m * l04 * q * omega_ee / (a_e * a_ep * d_e));
        if (std::abs(omega_ee / a_ep) > 1.0)
          r.warnings.push_back("middle factor |omega_ee'/( -omega_fe' + omega0)| > 1 for (" + pr.e +
                               "," + pr.ep + ")");
      }
      r.pairs.push_back(std::move(pr));
    }
  }
  if (std::holds_alternative<CoherentState>(state)) {
    const auto& phi = std::get<CoherentState>(state).phi;
    if (std::holds_alternative<SampledShape>(phi.shape)) r.method = "quadrature";
  } else if (const auto* tp = std::get_if<TwoPhotonState>(&state)) {
    const auto& kind = tp->jsa.kind();
    const bool closed = std::holds_alternative<SeparableJsa>(kind) ||
                        (std::holds_alternative<AntiDiagonalJsa>(kind) &&
                         std::holds_alternative<GaussianSpectral>(
                             std::get<AntiDiagonalJsa>(kind).broad));
    if (!closed) r.method = "quadrature";
  }
  r.nrp_sum = nrp_sum.value();
  r.rp_sum = rp_sum.value();
  r.nrp_rp_combined_sum = comb_sum.value();
  r.p_nrp = 2.0 * r.nrp_sum.real();
  r.p_rp = 2.0 * r.rp_sum.real();
  r.p_nrp_rp = 2.0 * r.nrp_rp_combined_sum.real();
  return r;
}

PathwayResult compute_pathways(const LevelSystem& level, const SIContext& si,
                               const LightState& state, double detuning) {
  PathwayResult dqc = p_dqc(level, si, state, detuning);
  if (std::holds_alternative<SinglePhotonState>(state)) return dqc;
  PathwayResult step = p_nrp_rp(level, si, state);
  dqc.nrp_sum = step.nrp_sum;
  dqc.rp_sum = step.rp_sum;
  dqc.nrp_rp_combined_sum = step.nrp_rp_combined_sum;
  dqc.p_nrp = step.p_nrp;
  dqc.p_rp = step.p_rp;
  dqc.p_nrp_rp = step.p_nrp_rp;
  for (std::size_t i = 0; i < dqc.pairs.size() && i < step.pairs.size(); ++i) {
    dqc.pairs[i].nrp = step.pairs[i].nrp;
    dqc.pairs[i].rp = step.pairs[i].rp;
  }
  for (const auto& w : step.warnings)
    if (std::find(dqc.warnings.begin(), dqc.warnings.end(), w) == dqc.warnings.end())
      dqc.warnings.push_back(w);
  return dqc;
}

double pathway_dominance_ratio(const LevelSystem& level, const SIContext& si,
                               const TwoPhotonState& epp) {
  const auto* ad = std::get_if<AntiDiagonalJsa>(&epp.jsa.kind());
  if (!ad || !std::holds_alternative<ExponentialOneSided>(ad->narrow) ||
      !std::holds_alternative<GaussianSpectral>(ad->broad))
    throw std::invalid_argument(
        "pathway_dominance_ratio: needs an exponential-narrow / Gaussian-broad EPP");
  const PathwayResult dqc = p_dqc(level, si, LightState(epp));
  if (level.n_intermediates() < 2) return std::numeric_limits<double>::infinity();
  const PathwayResult step = p_nrp_rp(level, si, LightState(epp));
  if (step.p_nrp_rp == 0.0) return std::numeric_limits<double>::infinity();
  return dqc.p_dqc / std::abs(step.p_nrp_rp);
}

double tpa_rate_quasimono(const LevelSystem& level, const SIContext& si, double flux_density,
                          double detuning) {
  const double omega0 = 0.5 * (level.omega_f() - detuning);
  const double sigma2 = sigma2_conventional(level, si, omega0).sigma2;
  const double gamma = level.gamma_fg();
  const double lorentz = gamma * gamma / (gamma * gamma + detuning * detuning);
  return sigma2 * flux_density * flux_density * lorentz;
}

double tpa_probability_pulse(const LevelSystem& level, const SIContext& si,
                             const std::vector<double>& flux_density, double dt, double detuning) {
  const double omega0 = 0.5 * (level.omega_f() - detuning);
  const double sigma2 = sigma2_conventional(level, si, omega0).sigma2;
  const double gamma = level.gamma_fg();
  const double lorentz = gamma * gamma / (gamma * gamma + detuning * detuning);
  std::vector<double> f2(flux_density.size());
  for (std::size_t i = 0; i < f2.size(); ++i) f2[i] = flux_density[i] * flux_density[i];
  return sigma2 * lorentz * quad::trapezoid(f2, dt);
}

ImpulsiveResult p_dqc_impulsive(const LevelSystem& level, const SIContext& si,
                                const std::vector<cd>& envelope, double dt) {
  level.validate();
  const double omega0 = 0.5 * level.omega_f();  // impulsive limit at TPA resonance
  const cd sigma2 = big_sigma2(level, omega0);
  std::vector<cd> a2(envelope.size());
  std::vector<double> absq(envelope.size());
  for (std::size_t i = 0; i < envelope.size(); ++i) {
    a2[i] = envelope[i] * envelope[i];
    absq[i] = std::norm(envelope[i]);
  }
  const cd k0 = quad::trapezoid(a2, dt);
  const double l04 = std::pow(si.L0(), 4);
  ImpulsiveResult r;
  r.p = sigma2.real() * l04 * std::norm(k0);

  // bandwidth ~ 1/(2 rms duration)
  quad::KahanSum w, wt, wt2;
  for (std::size_t i = 0; i < absq.size(); ++i) {
    const double t = dt * double(i);
    w.add(absq[i]);
    wt.add(absq[i] * t);
    wt2.add(absq[i] * t * t);
  }
  const double mean = wt.value() / std::max(w.value(), 1e-300);
  const double var = std::max(wt2.value() / std::max(w.value(), 1e-300) - mean * mean, 0.0);
  const double bandwidth = var > 0.0 ? 0.5 / std::sqrt(var) : std::numeric_limits<double>::infinity();
  r.bandwidth_warning = bandwidth < 100.0 * level.gamma_fg();
  return r;
}

QefResult qef(const LevelSystem& level, const SIContext& si, const CoherentState& coh,
              const TwoPhotonState& epp) {
  const auto* gc = std::get_if<ExponentialOneSided>(&coh.phi.shape);
  const auto* ad = std::get_if<AntiDiagonalJsa>(&epp.jsa.kind());
  if (!gc || !ad)
    throw std::invalid_argument("qef: matched exponential coherent / exponential-narrow EPP required");
  const auto* gn = std::get_if<ExponentialOneSided>(&ad->narrow);
  const auto* gb = std::get_if<GaussianSpectral>(&ad->broad);
  if (!gn || !gb || std::abs(gn->half_width - gc->half_width) > 1e-9 * gc->half_width)
    throw std::invalid_argument("qef: pulse shapes not matched (same-Gamma exponentials required)");

  const double n_coh = coh.mean_photons();
  const double n_epp = epp.mean_photons();
  if (n_coh <= 0.0) throw std::domain_error("qef: coherent photon number must be positive");

  QefResult r;
  r.photon_factor = 2.0 * n_epp / (n_coh * n_coh);
  r.spectral_ratio = gb->sigma / gc->half_width;
  r.analytic = r.photon_factor * r.spectral_ratio;

  const double p_coh = p_dqc(level, si, LightState(coh)).p_dqc;
  if (p_coh == 0.0) throw std::domain_error("qef: zero coherent-state probability");
  const double p_epp = p_dqc(level, si, LightState(epp)).p_dqc;
  r.computed = p_epp / p_coh;
  r.agreement = r.computed / r.analytic;
  return r;
}

}  // namespace etpa
