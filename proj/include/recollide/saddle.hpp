#pragma once

#include <vector>

#include "recollide/core.hpp"
#include "recollide/fields.hpp"

namespace recollide {

enum class Branch { Short, Long };

struct Trajectory {
  double t_b = 0.0;
  double t_c = 0.0;
  Vec3 k0;  // = -A(t_b)
  Branch branch = Branch::Short;
  double return_energy = 0.0;
  int half_cycle = 0;

  double travel() const { return t_c - t_b; }
};

inline constexpr double kMinTravelCycles = 0.05;
inline constexpr int kPrescanPoints = 200;

// First return phase of the reduced map (theta_c - theta_b) sin(theta_b) = cos(theta_b) -
// cos(theta_c), birth phase measured from the crest.
double return_phase(double birth_phase);
double return_time(const LaserField& field, double t_b);

// Latest birth phase whose travel reaches kMinTravelCycles.
double birth_phase_cutoff();
// Birth phase of the maximal-return-energy trajectory and that energy in units of U_p.
double max_energy_birth_phase();
double max_return_energy_factor();

// Travel time averaged over birth phases with the quasi-static tunneling rate at i_p.
double dominant_travel_time(const LaserField& field, double i_p);

// Solutions of the energy equation for one half-cycle event. The trajectory family is
// parametrized by the return phase u = omega (t_c - T_n), which keeps it smooth at the crest.
class FinalStateSolver {
 public:
  FinalStateSolver(const LaserField& field, const HalfCycleEvent& event);

  void set_final_momentum(double k_par, double k_perp);
  // Largest dissociation energy reachable for the current final momentum.
  double max_deposit() const { return gmax_; }
  // Return phases of all solutions, sorted ascending (Short first).
  int solve(double d, double* u_out, int max_out) const;
  Trajectory trajectory(double u) const;
  std::vector<Trajectory> trajectories(double d) const;
  // Birth phase for a given return phase.
  double birth_phase(double u) const;
  double deposit(double u) const;

  const LocalField& local() const { return local_; }
  int half_cycle() const { return index_; }

 private:
  double deposit_and_slope(double u, double* slope) const;

  LocalField local_;
  int index_ = 0;
  double kpar_ = 0.0, kperp_ = 0.0;
  std::vector<double> g_;     // deposit at the prescan nodes
  std::vector<double> knot_;  // segment boundaries (monotone pieces), in u
  std::vector<double> kval_;
  double gmax_ = 0.0;
  double umax_ = 0.0;
};

std::vector<Trajectory> solve_final_state(const LaserField& field, const HalfCycleEvent& event,
                                          const Vec3& k_f, double dissociation_energy);

// Time integrals of the continued carrier potential, for O(1) Volkov phases.
class VolkovIntegrator {
 public:
  VolkovIntegrator(const LaserField& field, double t_max);
  double int_a(double t) const;   // int_0^t A
  double int_a2(double t) const;  // int_0^t A^2
  double phase(const Vec3& k, double t1, double t2) const;

 private:
  double omega_;
  std::vector<double> amp_, start_, s1_, s2_;
  int piece(double t) const;
};

double volkov_phase(const Vec3& k, double t1, double t2, const LaserField& field);

struct ChannelEnergies {
  double e_total = 0.0;
  double e_n = 0.0;
  double e_i = 0.0;
};

// Intermediate Volkov phase 1/2 int_{t_b}^{t_c} (k0 + A)^2 on the event's local sinusoid.
double intermediate_volkov_phase(const Trajectory& traj, const LocalField& local);

double total_phase(const Trajectory& traj, const LaserField& field, const Vec3& k_f,
                   const ChannelEnergies& energies, double t, double t0 = 0.0);
// Same with a prebuilt integrator covering t and the event's local field.
double total_phase(const Trajectory& traj, const VolkovIntegrator& volkov, const LocalField& local,
                   const Vec3& k_f, const ChannelEnergies& energies, double t, double t0 = 0.0);

}  // namespace recollide
