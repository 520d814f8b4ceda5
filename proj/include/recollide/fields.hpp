#pragma once

#include <vector>

#include "recollide/core.hpp"

namespace recollide {

enum class FieldMode { Monochromatic, TwoColor };

// Linearly polarized (x) flat-top pulse. TwoColor is the equal-amplitude
// superposition of omega +- delta_omega/2, i.e. a carrier at omega under a
// cos((delta_omega t + rel_phase)/2) beat envelope.
class LaserField {
 public:
  static LaserField monochromatic(double e0, double omega, int n_cycles);
  static LaserField two_color(double e0, double omega, double delta_omega, int n_cycles,
                              double rel_phase = 0.0);

  double e0() const { return e0_; }
  double omega() const { return omega_; }
  double delta_omega() const { return delta_omega_; }
  double rel_phase() const { return rel_phase_; }
  int n_cycles() const { return n_cycles_; }
  FieldMode mode() const { return mode_; }

  double period() const { return 2.0 * kPi / omega_; }
  double duration() const { return n_cycles_ * period(); }
  bool in_window(double t) const { return t >= 0.0 && t <= duration(); }

  // Beat envelope (1 for monochromatic).
  double envelope(double t) const;
  // Index of the crest nearest to t (crests at n*pi/omega).
  int crest_index(double t) const;
  double crest_time(int n) const { return n * kPi / omega_; }
  // Envelope frozen at the crest of the enclosing half-cycle.
  double frozen_envelope(double t) const { return envelope(crest_time(crest_index(t))); }

 private:
  LaserField(FieldMode mode, double e0, double omega, double delta_omega, int n_cycles,
             double rel_phase);

  FieldMode mode_;
  double e0_;
  double omega_;
  double delta_omega_;
  int n_cycles_;
  double rel_phase_;
};

struct HalfCycleEvent {
  int index = 0;
  double t_peak = 0.0;
  double effective_e0 = 0.0;  // signed: field at the crest is effective_e0
};

// Exact field inside the pulse window, zero outside.
Vec3 electric_field(const LaserField& field, double t);
// Frozen-envelope vector potential inside the window, zero outside.
Vec3 vector_potential(const LaserField& field, double t);
// -dA/dt of the frozen-envelope potential (equals electric_field when monochromatic).
Vec3 frozen_electric_field(const LaserField& field, double t);
// x-component of the frozen-envelope potential continued past the pulse end, so that
// every half-cycle event sees a complete excursion.
double carrier_potential(const LaserField& field, double t);

double ponderomotive(const LaserField& field);
HalfCycleEvent half_cycle_event(const LaserField& field, int index);
std::vector<HalfCycleEvent> half_cycle_events(const LaserField& field);

// One half-cycle treated as a pure sinusoid about its crest.
struct LocalField {
  double omega = 0.0;
  double t_peak = 0.0;
  double amplitude = 0.0;  // signed crest field

  double electric(double t) const { return amplitude * std::cos(omega * (t - t_peak)); }
  double potential(double t) const {
    return -amplitude / omega * std::sin(omega * (t - t_peak));
  }
  double quiver() const { return amplitude / omega; }
  double ponderomotive() const { return 0.25 * quiver() * quiver(); }
};

LocalField local_field(const LaserField& field, const HalfCycleEvent& event);

}  // namespace recollide
