#pragma once

#include <complex>
#include <vector>

#include "recollide/core.hpp"
#include "recollide/molstruct.hpp"

namespace recollide {

// First-Born e- + D2+ (Sigma_g -> Sigma_u) excitation with two-center LCAO 1s orbitals.
// The molecular axis lies along the polarization axis (x).
struct ImpactModel {
  double orbital_decay = 1.24;  // 1s exponent zeta, 1/bohr
  double coupling_norm = 1.0;
  int j_max = 9;
  double q_min = 1e-3;

  void validate() const;
  // Odd J up to j_max.
  std::vector<int> partial_waves() const;
};

// Dimensionless electronic transition factor (q/2zeta) F(q), F the 1s density form factor.
// The full Born electronic amplitude is 4 pi eps(q) / q^2.
double electronic_form_factor(const ImpactModel& model, double q);

// (2J+1)(-1)^((J-1)/2) for odd J, 0 for even J: sin(x mu) = sum_J c_J j_J(x) P_J(mu).
double partial_wave_coefficient(int j);

// c_J <chi_u(E,J)| j_J(qR/2) |chi> on the shared grid.
double nuclear_transition(const ContinuumState& u, const std::vector<double>& bound,
                          const RadialGrid& grid, double q);
// Same with chi = Sigma_g level n, solving the continuum at e_rel (above the Sigma_u asymptote).
double nuclear_transition(const MolecularData& mol, double e_rel, int j, int n, double q);

// Angular factor of order J at the scattering geometry (cos of the angle between q and x).
double angular_factor(int j, double cos_gamma);

// <phi_u(E,J); k_f | V_ee | phi_g(n); k_i>.
std::complex<double> vee_matrix_element(const ImpactModel& model, const MolecularData& mol,
                                        double e_rel, int j, int n, const Vec3& k_i,
                                        const Vec3& k_f);

// Radial integrals tabulated on a uniform q grid for fixed continuum energies, partial waves and
// channels; cubic Hermite interpolation with exact q-derivatives. Immutable after construction.
class ImpactTable {
 public:
  ImpactTable(const ImpactModel& model, const MolecularData& mol, std::vector<double> e_rel,
              std::vector<int> channels, double q_max, int n_q = 0);

  const ImpactModel& model() const { return model_; }
  const std::vector<double>& energies() const { return e_rel_; }
  const std::vector<int>& partial_waves() const { return js_; }
  const std::vector<int>& channels() const { return channels_; }
  double q_max() const { return q_max_; }

  // Nuclear transition for energy index ie, partial-wave index ij, channel index ic.
  double nuclear(int ie, int ij, int ic, double q) const;
  // All partial waves at once: out[ij] = element for k_i, k_f.
  void elements(int ie, int ic, const Vec3& k_i, const Vec3& k_f,
                std::complex<double>* out) const;
  std::complex<double> element(int ie, int ij, int ic, const Vec3& k_i, const Vec3& k_f) const;

 private:
  std::size_t at(int ie, int ij, int ic) const;

  ImpactModel model_;
  std::vector<double> e_rel_;
  std::vector<int> js_, channels_;
  double q_max_ = 0.0, dq_ = 0.0;
  int n_q_ = 0;
  std::vector<double> val_, der_;
};

}  // namespace recollide
