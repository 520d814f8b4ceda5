#pragma once

#include <complex>
#include <string>
#include <vector>

#include "recollide/fields.hpp"
#include "recollide/impact.hpp"
#include "recollide/molstruct.hpp"
#include "recollide/saddle.hpp"

namespace recollide {

using cplx = std::complex<double>;

// Superposition sum_i C_i |nu_i> of neutral vibrational levels, normalized on construction.
class InitialSuperposition {
 public:
  InitialSuperposition(std::vector<int> states, std::vector<cplx> coeffs);
  static InitialSuperposition level(int nu);
  // (|0> + e^{i phi} |1>) / sqrt 2
  static InitialSuperposition two_level(double phi);

  const std::vector<int>& states() const { return states_; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }
  // Coefficients expanded onto a member list (zero for absent levels).
  std::vector<cplx> on(const std::vector<int>& members) const;

 private:
  std::vector<int> states_;
  std::vector<cplx> coeffs_;
};

double ionization_prefactor(double i_p, double e_at_birth);
// Throws TravelTooShort for travel <= min_travel (or non-positive travel).
cplx spreading_prefactor(double travel, double min_travel = 0.0);

// Continuum-energy grid (midpoints, above the Sigma_u asymptote) and the cylindrical k_f grid
// (k_par along the polarization, k_perp with the azimuth integrated analytically).
struct SpectrumGrid {
  double e_max = 30.0 / units::kHartreeEv;
  int n_e = 120;
  double kpar_max = 3.0;
  int n_kpar = 128;
  double kperp_max = 2.5;
  int n_kperp = 64;
  bool auto_extend = true;

  void validate() const;
  double e_step() const { return e_max / n_e; }
  double e_rel(int i) const { return (i + 0.5) * e_step(); }
  std::vector<double> energies() const;
  // Grid widened so the recollision momenta of `field` fit.
  SpectrumGrid fitted(const LaserField& field) const;
};

struct SfaOptions {
  // Empty: all half-cycle events of the pulse.
  std::vector<int> events;
  std::vector<int> members{0, 1};
  // Channels n with max_i |FC(n,i)| below this fraction of the largest are skipped.
  double channel_cut = 1e-3;
  // Events whose peak tunneling amplitude is below this fraction of the strongest are skipped.
  double event_cut = 1e-8;
  bool fast_periodic = true;
  int threads = 1;
};

// Member-resolved yields: gram[e][j](a, b) = int d^3k_f A_a A_b^*, so that for coefficients C
// W(E) = sum_j sum_ab C_a C_b^* gram.
struct GramSpectrum {
  std::vector<double> e_rel;
  std::vector<int> partial_waves;
  std::vector<int> members;
  std::vector<cplx> coherent;    // [e][j][a][b]
  std::vector<cplx> incoherent;  // short and long branches added in intensity
  SpectrumGrid grid;
  int events_used = 0;
  int channels_used = 0;
  long long trajectories = 0;

  cplx at(const std::vector<cplx>& g, int ie, int ij, int a, int b) const;
};

struct SpectrumResult {
  std::vector<double> e_rel;  // au
  std::vector<double> w;      // per au
  std::vector<double> e_d;    // au
  std::vector<double> w_d;
  double w_t = 0.0;
  std::vector<double> w_by_j;  // integrated yield per partial wave
  // Fraction of W_T carried by the highest partial wave.
  double jsum_tail = 0.0;

  int peak_index() const;
  double peak_e_d() const;
};

SpectrumResult spectrum(const GramSpectrum& g, const InitialSuperposition& psi,
                        bool branch_coherent = true);
double total_yield(const GramSpectrum& g, const std::vector<cplx>& c, bool branch_coherent = true);

// Slices of the joint electron / D+ distribution at k_z = 0.
struct CoincidenceSlice {
  enum class Kind { MomentumPlane, EnergyMomentum };
  Kind kind = Kind::MomentumPlane;
  double e_d = 6.0 / units::kHartreeEv;  // MomentumPlane: fixed D+ energy
  double k_max = 2.5;                    // k_x (and k_y) in [-k_max, k_max]
  int n_k = 121;
  double k_y = 0.0;  // EnergyMomentum: fixed transverse momentum
  double e_d_min = 1.0 / units::kHartreeEv;
  double e_d_max = 10.0 / units::kHartreeEv;
  int n_e_d = 181;
};

struct CoincidenceMap {
  std::vector<double> x;        // k_x
  std::vector<double> y;        // k_y or E_D
  std::vector<double> density;  // [iy * x.size() + ix]
};

class SfaEngine {
 public:
  SfaEngine(const LaserField& field, const MolecularData& mol, const ImpactModel& model,
            const SpectrumGrid& grid, const SfaOptions& options);

  GramSpectrum run() const;

  // Amplitudes (no C_i) at arbitrary final momenta for the given continuum energies:
  // out[((p * n_e) + ie) * n_j + ij][member].
  std::vector<std::vector<cplx>> amplitudes(const std::vector<Vec3>& k_f,
                                            const std::vector<double>& e_rel) const;

  // sum_J |sum_i C_i A_i|^2 on a slice; SliceOutOfRange for energies outside the grid.
  CoincidenceMap coincidence_map(const InitialSuperposition& psi,
                                 const CoincidenceSlice& slice) const;
  // Density at fixed D+ energy integrated over the in-plane emission angle (k_z = 0), one value
  // per electron momentum in k.
  std::vector<double> ring_profile(const InitialSuperposition& psi, double e_d,
                                   const std::vector<double>& k, int n_angle = 96) const;

  const std::vector<int>& channels() const { return channels_; }
  const std::vector<HalfCycleEvent>& events() const { return events_; }
  const SpectrumGrid& grid() const { return grid_; }
  double observation_time() const { return t_obs_; }
  // Trajectories of the first used event at one final state (for dumps).
  std::vector<Trajectory> sample_trajectories(const Vec3& k_f, double e_rel, int n) const;

 private:
  struct Context {
    const ImpactTable* table;
    const VolkovIntegrator* volkov;
    std::vector<double> e_total;
  };
  Context context(const ImpactTable& table, const VolkovIntegrator& volkov) const;
  ImpactTable make_table(const std::vector<double>& e_rel, double kf_max) const;
  // Adds the amplitudes of one final momentum into acc[branch][e][j][member].
  void cell(double kpar, double kperp, const Context& ctx, std::vector<cplx>& acc) const;

  LaserField field_;
  const MolecularData* mol_;
  ImpactModel model_;
  SpectrumGrid grid_;
  SfaOptions opt_;
  std::vector<int> channels_;
  std::vector<HalfCycleEvent> events_;
  bool periodic_ = false;
  int periods_ = 1;
  double t_obs_ = 0.0;
};

}  // namespace recollide
