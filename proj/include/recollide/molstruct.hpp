#pragma once

#include <string>
#include <vector>

#include "recollide/core.hpp"

namespace recollide {

struct RadialGrid {
  double r_min = 0.5;
  double r_max = 40.0;
  int n = 8000;

  double step() const { return (r_max - r_min) / (n - 1); }
  double r(int i) const { return r_min + i * step(); }
  RadialGrid refined(int factor) const { return {r_min, r_max, (n - 1) * factor + 1}; }
  bool operator==(const RadialGrid&) const = default;
};

class PotentialCurve {
 public:
  enum class Kind { AnalyticMorse, AnalyticRepulsive, Tabulated };

  // V = asymptote - depth + depth*(1 - exp(-width*(R - r_eq)))^2
  static PotentialCurve morse(double depth, double r_eq, double width, double asymptote);
  // V = asymptote + amplitude*exp(-R/decay_length)
  static PotentialCurve repulsive(double amplitude, double decay_length, double asymptote);
  // Monotone cubic (Fritsch-Carlson) through the samples; constant beyond the last one.
  static PotentialCurve tabulated(std::vector<double> r, std::vector<double> v);
  // Two-column whitespace-separated (R, V) text file in au; '#' starts a comment.
  static PotentialCurve from_file(const std::string& path);

  double operator()(double r) const;
  double asymptote() const;
  Kind kind() const { return kind_; }
  PotentialCurve shifted(double dv) const;

  double depth() const { return p_[0]; }
  double r_eq() const { return p_[1]; }
  double width() const { return p_[2]; }

 private:
  Kind kind_ = Kind::AnalyticMorse;
  double p_[3] = {0.0, 0.0, 0.0};
  double shift_ = 0.0;
  std::vector<double> tr_, tv_, tm_;
};

struct VibrationalState {
  int nu = 0;
  int j = 0;
  double energy = 0.0;
  RadialGrid grid;
  std::vector<double> radial;
};

struct ContinuumState {
  double energy = 0.0;  // above the curve asymptote
  int j = 0;
  RadialGrid grid;
  std::vector<double> radial;  // energy normalized
};

// All bound states below min(V(r_min), V(r_max)), at most max_states if positive.
std::vector<VibrationalState> solve_bound(const PotentialCurve& curve, int j,
                                          const RadialGrid& grid, double reduced_mass,
                                          int max_states = -1);
ContinuumState solve_continuum(const PotentialCurve& curve, double energy, int j,
                               const RadialGrid& grid, double reduced_mass);
// Local asymptotic amplitude of a continuum function at each of the last `fraction` of the
// grid points, corrected to the free-wave limit.
std::vector<double> asymptotic_amplitudes(const ContinuumState& state, const PotentialCurve& curve,
                                          double reduced_mass, double fraction = 0.1);

double overlap(const std::vector<double>& a, const std::vector<double>& b, double h);
double franck_condon(const VibrationalState& a, const VibrationalState& b);
inline double dissociation_energy(double e_total, double e_n) { return e_total - e_n; }

struct CurveSpec {
  std::string kind = "morse";  // morse | repulsive | table
  double p1 = 0.0;             // morse depth / repulsive amplitude
  double p2 = 0.0;             // morse r_eq / repulsive decay length
  double p3 = 0.0;             // morse width
  double asymptote = 0.0;
  std::string table;

  PotentialCurve build() const;
};

struct MolecularConfig {
  RadialGrid grid{0.5, 40.0, 8000};
  double reduced_mass = 0.5 * units::kDeuteronMass;
  double vertical_ip = 0.58;
  int n_neutral = 2;
  // The neutral Morse width gives E1 - E0 = 0.0135 au with the deuteron reduced mass.
  CurveSpec neutral{"morse", 0.1745, 1.4011, 1.0203, 0.0, ""};
  CurveSpec ion_g{"morse", 0.1026, 2.0, 0.68, 0.1026, ""};
  CurveSpec ion_u{"repulsive", 1.84, 1.168, 0.0, 0.1026, ""};
};

class MolecularData {
 public:
  static MolecularData build(const MolecularConfig& config);

  const RadialGrid& grid() const { return grid_; }
  double reduced_mass() const { return mu_; }
  const PotentialCurve& neutral_curve() const { return neutral_curve_; }
  const PotentialCurve& ion_g_curve() const { return ion_g_curve_; }
  const PotentialCurve& ion_u_curve() const { return ion_u_curve_; }

  const std::vector<VibrationalState>& neutral() const { return neutral_; }
  const VibrationalState& d2_ground() const { return neutral_.front(); }
  const std::vector<VibrationalState>& ion_bound() const { return ion_bound_; }
  int n_ion() const { return static_cast<int>(ion_bound_.size()); }
  int n_neutral() const { return static_cast<int>(neutral_.size()); }

  // <phi_g(n)|phi_i(i)>
  double fc(int n, int i) const { return fc_[i][n]; }
  double e_i(int i) const { return neutral_[i].energy; }
  double e_n(int n) const { return ion_bound_[n].energy; }
  double i_p(int n, int i) const { return e_n(n) - e_i(i); }
  // Continuum energy origin of the Sigma_u channel on the common scale.
  double u_asymptote() const { return ion_u_curve_.asymptote(); }
  // Total energy for a continuum energy measured above the Sigma_u asymptote.
  double total_energy(double e_rel) const { return u_asymptote() + e_rel; }
  double fc_sum(int i) const;

 private:
  RadialGrid grid_;
  double mu_ = 0.0;
  PotentialCurve neutral_curve_, ion_g_curve_, ion_u_curve_;
  std::vector<VibrationalState> neutral_, ion_bound_;
  std::vector<std::vector<double>> fc_;
};

// Bond length after time t of a classical particle released at rest at the neutral ground-state
// mean bond length and moving on the Sigma_g curve.
double classical_bond_length(const MolecularData& mol, double t);
// Sigma_u energy above its asymptote at that bond length (the vertical release energy).
double classical_release_energy(const MolecularData& mol, double t);

}  // namespace recollide
