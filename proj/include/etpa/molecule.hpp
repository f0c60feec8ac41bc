#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "etpa/states.hpp"

namespace etpa {

// One singly-excited level: transition dipoles are stored reduced,
// mu = d/hbar, as <g|mu|e> and <e|mu|f>.
struct Intermediate {
  std::string label;
  double omega;  // omega_e (omega_g = 0)
  cd mu_ge;
  cd mu_ef;
};

// g / {e} / f level scheme with Kubo dephasing rates gamma_ij and population
// decay rates A_i. Effective off-diagonal damping is always
// gamma_ij + (A_i + A_j)/2.
class LevelSystem {
 public:
  explicit LevelSystem(double omega_f);

  void add_intermediate(std::string label, double omega, cd mu_ge, cd mu_ef);
  void set_dephasing(const std::string& i, const std::string& j, double gamma);
  void set_decay(const std::string& level, double rate);

  double omega_f() const { return omega_f_; }
  std::size_t n_intermediates() const { return levels_.size(); }
  const Intermediate& intermediate(std::size_t i) const { return levels_.at(i); }
  std::size_t index_of(const std::string& label) const;

  double dephasing(const std::string& i, const std::string& j) const;  // raw gamma_ij
  double decay(const std::string& level) const;                        // A_i
  // gamma_ij + (A_i + A_j)/2
  double gamma_eff(const std::string& i, const std::string& j) const;

  double gamma_eg(std::size_t e) const { return gamma_eff(levels_[e].label, "g"); }
  double gamma_fg() const { return gamma_eff("f", "g"); }
  double gamma_fe(std::size_t e) const { return gamma_eff("f", levels_[e].label); }
  double gamma_ee(std::size_t e, std::size_t ep) const {
    return gamma_eff(levels_[e].label, levels_[ep].label);
  }
  double max_gamma_eff() const;

  // M_{f e' e g} = mu_{fe'} mu_{e'g} mu_{ge} mu_{ef}
  cd dipole_product(std::size_t e, std::size_t ep) const;
  // max |Im M| / max |M| over all intermediate pairs
  double m_real_violation() const;
  bool m_is_real(double tol = 1e-12) const { return m_real_violation() <= tol; }

  void validate() const;  // >= 1 intermediate, omega_f > 0

  const std::map<std::pair<std::string, std::string>, double>& dephasing_map() const {
    return dephasing_;
  }
  const std::map<std::string, double>& decay_map() const { return decay_; }

 private:
  double omega_f_;
  std::vector<Intermediate> levels_;
  std::map<std::pair<std::string, std::string>, double> dephasing_;
  std::map<std::string, double> decay_;
};

// e^{-(gamma - i omega) t}, the Kubo-dephased oscillation factor.
// Throws std::domain_error for t < 0.
cd kubo_decay_factor(double gamma, double omega, double t);

// One-photon cross section, Eq.-64 form (m^2 in SI mode). `target` selects the
// OPA e-level.
double sigma1(const LevelSystem& level, const SIContext& si, double omega_drive,
              std::size_t target = 0);

// Far-off-resonance double sum Sigma^(2) (Eq. 101 form, reduced dipoles).
// Throws NearResonanceError when omega0 is within guard_factor * max(gamma)
// of any |omega_eg - omega0| or |omega_fe - omega0|.
cd big_sigma2(const LevelSystem& level, double omega0, double guard_factor = 10.0);

struct Sigma2Result {
  double sigma2;          // density-matrix route (m^4 s in SI mode)
  double amplitude_form;  // conventional |sum over e|^2 route at TPA resonance
};
Sigma2Result sigma2_conventional(const LevelSystem& level, const SIContext& si, double omega0);

// Symmetric N-mer construction: singly-excited eigenstates from a unitary
// mixing, which guarantees a real dipole product M for every pair.
LevelSystem build_symmetric_nmer(std::size_t n_monomers, cd mu_g, cd mu_f,
                                 const std::vector<std::vector<cd>>& U,
                                 std::vector<double> intermediate_energies = {},
                                 double omega_f = 2.0);

// Steady-state induced dipole envelope (carrier factored out):
// (L0 / i hbar) A* sum_k d_gk d_kg / (gamma_kg - i (omega_kg - omega0)).
cd induced_dipole_steady_state(const LevelSystem& level, const SIContext& si, cd amplitude,
                               double omega0);

}  // namespace etpa
