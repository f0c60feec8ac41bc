#include "etpa/molecule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "etpa/errors.hpp"

namespace etpa {

namespace {

std::pair<std::string, std::string> ordered(const std::string& a, const std::string& b) {
  return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

LevelSystem::LevelSystem(double omega_f) : omega_f_(omega_f) {
  if (!(omega_f > 0.0)) throw std::invalid_argument("LevelSystem: omega_f must be positive");
}

void LevelSystem::add_intermediate(std::string label, double omega, cd mu_ge, cd mu_ef) {
  if (label == "g" || label == "f")
    throw std::invalid_argument("LevelSystem: 'g' and 'f' are reserved labels");
  for (const auto& l : levels_)
    if (l.label == label) throw std::invalid_argument("LevelSystem: duplicate label " + label);
  levels_.push_back(Intermediate{std::move(label), omega, mu_ge, mu_ef});
}

void LevelSystem::set_dephasing(const std::string& i, const std::string& j, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("LevelSystem: dephasing rate must be >= 0");
  if (i == j) throw std::invalid_argument("LevelSystem: dephasing needs two distinct levels");
  dephasing_[ordered(i, j)] = gamma;
}

void LevelSystem::set_decay(const std::string& level, double rate) {
  if (rate < 0.0) throw std::invalid_argument("LevelSystem: decay rate must be >= 0");
  decay_[level] = rate;
}

std::size_t LevelSystem::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < levels_.size(); ++i)
    if (levels_[i].label == label) return i;
  throw std::invalid_argument("LevelSystem: unknown intermediate " + label);
}

double LevelSystem::dephasing(const std::string& i, const std::string& j) const {
  auto it = dephasing_.find(ordered(i, j));
  return it == dephasing_.end() ? 0.0 : it->second;
}

double LevelSystem::decay(const std::string& level) const {
  auto it = decay_.find(level);
  return it == decay_.end() ? 0.0 : it->second;
}

double LevelSystem::gamma_eff(const std::string& i, const std::string& j) const {
  return dephasing(i, j) + 0.5 * (decay(i) + decay(j));
}

double LevelSystem::max_gamma_eff() const {
  double m = gamma_fg();
  for (std::size_t e = 0; e < levels_.size(); ++e) {
    m = std::max(m, gamma_eg(e));
    m = std::max(m, gamma_fe(e));
    for (std::size_t ep = 0; ep < levels_.size(); ++ep)
      if (ep != e) m = std::max(m, gamma_ee(e, ep));
  }
  return m;
}

cd LevelSystem::dipole_product(std::size_t e, std::size_t ep) const {
  // mu_{fe'} = conj(mu_{e'f}), mu_{e'g} = conj(mu_{ge'})
  const Intermediate& a = levels_.at(e);
  const Intermediate& b = levels_.at(ep);
  return std::conj(b.mu_ef) * std::conj(b.mu_ge) * a.mu_ge * a.mu_ef;
}

double LevelSystem::m_real_violation() const {
  double mmax = 0.0, imax = 0.0;
  for (std::size_t e = 0; e < levels_.size(); ++e)
    for (std::size_t ep = 0; ep < levels_.size(); ++ep) {
      const cd m = dipole_product(e, ep);
      mmax = std::max(mmax, std::abs(m));
      imax = std::max(imax, std::abs(m.imag()));
    }
  return mmax == 0.0 ? 0.0 : imax / mmax;
}

void LevelSystem::validate() const {
  if (levels_.empty()) throw std::invalid_argument("LevelSystem: needs at least one intermediate");
}

cd kubo_decay_factor(double gamma, double omega, double t) {
  if (t < 0.0) throw std::domain_error("kubo_decay_factor: t must be >= 0");
  if (gamma < 0.0) throw std::domain_error("kubo_decay_factor: gamma must be >= 0");
  return std::exp(cd(-gamma * t, omega * t));
}

double sigma1(const LevelSystem& level, const SIContext& si, double omega_drive,
              std::size_t target) {
  level.validate();
  const Intermediate& e = level.intermediate(target);
  const double gamma = level.gamma_eg(target);
  const double det = e.omega - omega_drive;
  if (gamma == 0.0 && det == 0.0)
    throw std::domain_error("sigma1: zero linewidth at exact resonance");
  // |d|^2 = hbar^2 |mu|^2
  const double d2 = si.hbar * si.hbar * std::norm(e.mu_ge);
  return omega_drive / (si.eps0 * si.hbar * si.n * si.c) * d2 * gamma / (gamma * gamma + det * det);
}

cd big_sigma2(const LevelSystem& level, double omega0, double guard_factor) {
  level.validate();
  const double guard = guard_factor * level.max_gamma_eff();
  const std::size_t n = level.n_intermediates();
  for (std::size_t e = 0; e < n; ++e) {
    const double d_up = level.intermediate(e).omega - omega0;               // omega_eg - omega0
    const double d_dn = omega0 - (level.omega_f() - level.intermediate(e).omega);  // -omega_fe + omega0
    if (std::abs(d_up) <= guard || d_up == 0.0 || std::abs(d_dn) <= guard || d_dn == 0.0)
      throw NearResonanceError("big_sigma2: intermediate '" + level.intermediate(e).label +
                               "' inside far-off-resonance guard band");
  }
  cd sum = 0.0;
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t ep = 0; ep < n; ++ep) {
      const double d_up = level.intermediate(e).omega - omega0;
      const double d_dn = omega0 - (level.omega_f() - level.intermediate(ep).omega);
      sum += level.dipole_product(e, ep) / (d_dn * d_up);
    }
  return sum;
}

Sigma2Result sigma2_conventional(const LevelSystem& level, const SIContext& si, double omega0) {
  const double gamma_fg = level.gamma_fg();
  if (gamma_fg == 0.0) throw std::domain_error("sigma2_conventional: gamma_fg must be positive");
  const cd s2 = big_sigma2(level, omega0);
  const double h2 = si.hbar * si.hbar;
  const double pref = omega0 * h2 / (si.hbar * si.eps0 * si.n * si.c);  // (omega0/..)* hbar^2 folds d = hbar mu
  Sigma2Result r;
  r.sigma2 = pref * pref / (2.0 * gamma_fg) * s2.real();

  cd amp = 0.0;
  for (std::size_t e = 0; e < level.n_intermediates(); ++e) {
    const Intermediate& lv = level.intermediate(e);
    amp += lv.mu_ef * lv.mu_ge / (lv.omega - omega0);
  }
  r.amplitude_form = pref * pref / (2.0 * gamma_fg) * std::norm(amp);
  return r;
}

LevelSystem build_symmetric_nmer(std::size_t n_monomers, cd mu_g, cd mu_f,
                                 const std::vector<std::vector<cd>>& U,
                                 std::vector<double> intermediate_energies, double omega_f) {
  const std::size_t n = n_monomers;
  if (U.size() != n) throw std::invalid_argument("build_symmetric_nmer: U must be N x N");
  for (const auto& row : U)
    if (row.size() != n) throw std::invalid_argument("build_symmetric_nmer: U must be N x N");
  // unitarity: max |(U U^dag - I)_{jk}| <= 1e-12
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      cd s = 0.0;
      for (std::size_t m = 0; m < n; ++m) s += U[j][m] * std::conj(U[k][m]);
      if (std::abs(s - (j == k ? 1.0 : 0.0)) > 1e-12)
        throw std::invalid_argument("build_symmetric_nmer: U is not unitary to 1e-12");
    }
  if (intermediate_energies.empty()) {
    intermediate_energies.resize(n);
    for (std::size_t j = 0; j < n; ++j)
      intermediate_energies[j] = 0.6 * omega_f + 0.025 * omega_f * static_cast<double>(j);
  }
  if (intermediate_energies.size() != n)
    throw std::invalid_argument("build_symmetric_nmer: energy count must be N");

  LevelSystem ls(omega_f);
  for (std::size_t j = 0; j < n; ++j) {
    cd s = 0.0;
    for (std::size_t m = 0; m < n; ++m) s += U[j][m];
    // <j|mu|g> = mu_g sum_m U*_{jm}  =>  mu_ge = conj of that
    const cd mu_ge = std::conj(mu_g) * s;
    const cd mu_ef = mu_f * std::conj(s);
    ls.add_intermediate("e" + std::to_string(j), intermediate_energies[j], mu_ge, mu_ef);
  }
  return ls;
}

cd induced_dipole_steady_state(const LevelSystem& level, const SIContext& si, cd amplitude,
                               double omega0) {
  level.validate();
  cd sum = 0.0;
  for (std::size_t k = 0; k < level.n_intermediates(); ++k) {
    const Intermediate& lv = level.intermediate(k);
    const double gamma = level.gamma_eg(k);
    sum += std::norm(lv.mu_ge) / cd(gamma, -(lv.omega - omega0));
  }
  // (L0 / i hbar) A* sum d_gk d_kg ...  with d^2 = hbar^2 mu^2
  return si.L0() * si.hbar / cd(0.0, 1.0) * std::conj(amplitude) * sum;
}

}  // namespace etpa
