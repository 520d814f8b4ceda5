#include "doctest.h"
#include "recollide/fields.hpp"

using namespace recollide;

namespace {
const LaserField kMono = LaserField::monochromatic(0.065, 0.0569, 5);
}

TEST_CASE("electric field crest and nodes") {
  CHECK(electric_field(kMono, 0.0).x == doctest::Approx(0.065));
  CHECK(std::abs(electric_field(kMono, kPi / (2 * 0.0569)).x) < 1e-15);
  CHECK(electric_field(kMono, -1.0).x == 0.0);
  CHECK(electric_field(kMono, kMono.duration() + 1.0).x == 0.0);

  const auto tc = LaserField::two_color(0.065, 0.0569, 0.0135, 11);
  const double node = kPi / 0.0135;  // cos(dw t / 2) = 0
  CHECK(std::abs(electric_field(tc, node).x) < 1e-14);
  const double t = 123.4;
  CHECK(electric_field(tc, t).x ==
        doctest::Approx(0.065 * std::cos(0.0135 * t / 2) * std::cos(0.0569 * t)).epsilon(1e-14));
}

TEST_CASE("vector potential values") {
  CHECK(vector_potential(kMono, 0.0).x == 0.0);
  CHECK(vector_potential(kMono, kPi / (2 * 0.0569)).x == doctest::Approx(-1.14236).epsilon(1e-5));
  const auto tc0 = LaserField::two_color(0.065, 0.0569, 0.0, 5);
  for (double t = 0.0; t < kMono.duration(); t += 7.3) {
    CHECK(vector_potential(tc0, t).x == doctest::Approx(vector_potential(kMono, t).x));
    CHECK(electric_field(tc0, t).x == doctest::Approx(electric_field(kMono, t).x));
  }
}

TEST_CASE("ponderomotive energy") {
  CHECK(ponderomotive(kMono) == doctest::Approx(0.32625).epsilon(1e-4));
  CHECK(ponderomotive(LaserField::monochromatic(0.1, 0.05, 1)) == doctest::Approx(1.0));
  const double u1 = ponderomotive(LaserField::monochromatic(0.03, 0.05, 1));
  const double u2 = ponderomotive(LaserField::monochromatic(0.06, 0.05, 1));
  CHECK(u2 == doctest::Approx(4 * u1));
}

TEST_CASE("E = -dA/dt by central differences") {
  const double h = 1e-3;
  double worst = 0.0;
  for (double t = 0.5; t < kMono.period(); t += 0.37) {
    const double fd =
        -(vector_potential(kMono, t + h).x - vector_potential(kMono, t - h).x) / (2 * h);
    worst = std::max(worst, std::abs(fd - electric_field(kMono, t).x) / kMono.e0());
  }
  CHECK(worst < 1e-8);

  // Two-color: frozen envelope inside each half-cycle.
  const auto tc = LaserField::two_color(0.065, 0.0569, 0.0135, 11);
  worst = 0.0;
  for (double t = 0.5; t < tc.duration(); t += 0.37) {
    if (tc.crest_index(t - h) != tc.crest_index(t + h)) continue;
    const double fd = -(vector_potential(tc, t + h).x - vector_potential(tc, t - h).x) / (2 * h);
    worst = std::max(worst, std::abs(fd - frozen_electric_field(tc, t).x) / tc.e0());
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("monochromatic potential is periodic") {
  for (double t = 0.0; t < 3 * kMono.period(); t += 3.1)
    CHECK(vector_potential(kMono, t + kMono.period()).x ==
          doctest::Approx(vector_potential(kMono, t).x).epsilon(1e-12).scale(1.0));
}

TEST_CASE("half-cycle events") {
  CHECK(half_cycle_events(LaserField::monochromatic(0.065, 0.0569, 1)).size() == 2);
  const auto ev = half_cycle_events(kMono);
  REQUIRE(ev.size() == 10);
  for (std::size_t i = 0; i < ev.size(); ++i) {
    CHECK(std::abs(std::abs(std::cos(0.0569 * ev[i].t_peak)) - 1.0) < 1e-12);
    CHECK(std::abs(ev[i].effective_e0) == doctest::Approx(0.065));
    CHECK(electric_field(kMono, ev[i].t_peak).x == doctest::Approx(ev[i].effective_e0));
    if (i > 0) CHECK(ev[i].t_peak > ev[i - 1].t_peak);
  }

  const auto tc = LaserField::two_color(0.065, 0.0569, 0.0135, 11);
  const auto et = half_cycle_events(tc);
  REQUIRE(et.size() == 22);
  int sign_changes = 0;
  for (std::size_t i = 0; i < et.size(); ++i) {
    const double env = 0.065 * std::cos(0.0135 / 2 * et[i].t_peak);
    CHECK(std::abs(et[i].effective_e0) == doctest::Approx(std::abs(env)).epsilon(1e-15));
    const double carrier = std::cos(0.0569 * et[i].t_peak);
    CHECK(et[i].effective_e0 == doctest::Approx(env * carrier).epsilon(1e-12));
    if (i > 0 && (std::cos(0.0135 / 2 * et[i].t_peak) < 0) !=
                     (std::cos(0.0135 / 2 * et[i - 1].t_peak) < 0))
      ++sign_changes;
  }
  // Eleven carrier cycles span about 2.6 beat periods of |envelope|.
  CHECK(sign_changes >= 2);
}

TEST_CASE("local field matches the global field on its half-cycle") {
  const auto tc = LaserField::two_color(0.065, 0.0569, 0.0135, 11);
  for (const auto& ev : half_cycle_events(tc)) {
    const LocalField lf = local_field(tc, ev);
    for (double d = -0.4; d <= 0.4; d += 0.1) {
      const double t = ev.t_peak + d * kPi / tc.omega();
      if (!tc.in_window(t)) continue;
      CHECK(lf.potential(t) == doctest::Approx(vector_potential(tc, t).x).scale(1.0));
      CHECK(lf.electric(t) == doctest::Approx(frozen_electric_field(tc, t).x).scale(1.0));
    }
  }
}

TEST_CASE("invalid fields are rejected") {
  CHECK_THROWS_AS(LaserField::monochromatic(0.0, 0.05, 1), Error);
  CHECK_THROWS_AS(LaserField::monochromatic(0.05, -1.0, 1), Error);
  CHECK_THROWS_AS(LaserField::monochromatic(0.05, 0.05, 0), Error);
  CHECK_THROWS_AS(LaserField::two_color(0.05, 0.05, 0.06, 1), Error);
}
