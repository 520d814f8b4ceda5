#include "recollide/fields.hpp"

#include <cmath>

namespace recollide {

LaserField::LaserField(FieldMode mode, double e0, double omega, double delta_omega, int n_cycles,
                       double rel_phase)
    : mode_(mode),
      e0_(e0),
      omega_(omega),
      delta_omega_(delta_omega),
      n_cycles_(n_cycles),
      rel_phase_(rel_phase) {
  if (!(e0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "field amplitude must be positive");
  if (!(omega > 0.0)) throw Error(ErrorCode::InvalidArgument, "carrier frequency must be positive");
  if (!(delta_omega >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "beat frequency must be non-negative");
  if (n_cycles < 1) throw Error(ErrorCode::InvalidArgument, "n_cycles must be at least 1");
  if (mode == FieldMode::TwoColor && !(delta_omega < omega))
    throw Error(ErrorCode::InvalidArgument, "beat frequency must be below the carrier");
  if (!std::isfinite(rel_phase))
    throw Error(ErrorCode::InvalidArgument, "relative phase must be finite");
}

LaserField LaserField::monochromatic(double e0, double omega, int n_cycles) {
  return LaserField(FieldMode::Monochromatic, e0, omega, 0.0, n_cycles, 0.0);
}

LaserField LaserField::two_color(double e0, double omega, double delta_omega, int n_cycles,
                                 double rel_phase) {
  return LaserField(FieldMode::TwoColor, e0, omega, delta_omega, n_cycles, rel_phase);
}

double LaserField::envelope(double t) const {
  if (mode_ == FieldMode::Monochromatic) return 1.0;
  return std::cos(0.5 * (delta_omega_ * t + rel_phase_));
}

int LaserField::crest_index(double t) const {
  return static_cast<int>(std::floor(omega_ * t / kPi + 0.5));
}

Vec3 electric_field(const LaserField& field, double t) {
  if (!field.in_window(t)) return {};
  return {field.e0() * field.envelope(t) * std::cos(field.omega() * t), 0.0, 0.0};
}

double carrier_potential(const LaserField& field, double t) {
  return -field.e0() / field.omega() * field.frozen_envelope(t) * std::sin(field.omega() * t);
}

Vec3 vector_potential(const LaserField& field, double t) {
  if (!field.in_window(t)) return {};
  return {carrier_potential(field, t), 0.0, 0.0};
}

Vec3 frozen_electric_field(const LaserField& field, double t) {
  if (!field.in_window(t)) return {};
  return {field.e0() * field.frozen_envelope(t) * std::cos(field.omega() * t), 0.0, 0.0};
}

double ponderomotive(const LaserField& field) {
  const double q = field.e0() / field.omega();
  return 0.25 * q * q;
}

HalfCycleEvent half_cycle_event(const LaserField& field, int index) {
  const double t = field.crest_time(index);
  const double sign = (index % 2 == 0) ? 1.0 : -1.0;
  return {index, t, sign * field.e0() * field.envelope(t)};
}

std::vector<HalfCycleEvent> half_cycle_events(const LaserField& field) {
  std::vector<HalfCycleEvent> events;
  const int n = 2 * field.n_cycles();
  events.reserve(n);
  for (int i = 0; i < n; ++i) events.push_back(half_cycle_event(field, i));
  return events;
}

LocalField local_field(const LaserField& field, const HalfCycleEvent& event) {
  return {field.omega(), event.t_peak, event.effective_e0};
}

}  // namespace recollide
