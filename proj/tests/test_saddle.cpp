#include <algorithm>
#include <cmath>
#include <functional>

#include "doctest.h"
#include "recollide/saddle.hpp"

using namespace recollide;

namespace {

const LaserField kField = LaserField::monochromatic(0.065, 0.0569, 1);

double reduced_residual(double tb, double tc) {
  return (tc - tb) * std::sin(tb) - std::cos(tb) + std::cos(tc);
}

// Adaptive Simpson quadrature oracle.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
    return left + right + (left + right - whole) / 15;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), tol, 30);
}

}  // namespace

TEST_CASE("return map basics") {
  CHECK(return_phase(0.0) == doctest::Approx(2 * kPi).epsilon(1e-14));
  for (double tb = 0.01; tb < 1.2; tb += 0.05) {
    const double tc = return_phase(tb);
    CHECK(std::abs(reduced_residual(tb, tc)) < 1e-12);
    CHECK(tc > tb);
  }
  const double t_b = 0.3 / kField.omega();
  CHECK(return_time(kField, t_b) * kField.omega() == doctest::Approx(return_phase(0.3)));
  // Same birth phase one half-cycle later.
  const double t_b2 = t_b + kPi / kField.omega();
  CHECK(return_time(kField, t_b2) - t_b2 == doctest::Approx(return_time(kField, t_b) - t_b));
}

TEST_CASE("no return at the field zero") {
  CHECK_THROWS_AS(return_phase(0.5 * kPi), Error);
  try {
    return_phase(0.5 * kPi);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoReturn);
  }
  // Dense oracle: the reduced equation never changes sign after the birth.
  const double tb = 0.5 * kPi;
  bool sign_change = false;
  double prev = reduced_residual(tb, tb + 1e-6);
  for (double tc = tb + 1e-3; tc < tb + 6 * kPi; tc += 1e-3) {
    const double f = reduced_residual(tb, tc);
    if ((f > 0) != (prev > 0)) sign_change = true;
    prev = f;
  }
  CHECK_FALSE(sign_change);
  CHECK_THROWS_AS(return_time(kField, 0.5 * kPi / kField.omega() + 1.0), Error);
}

TEST_CASE("return-energy plateau and travel times") {
  const double factor = max_return_energy_factor();
  CHECK(factor > 3.15);
  CHECK(factor < 3.19);
  CHECK(factor == doctest::Approx(3.1731).epsilon(1e-4));
  CHECK(max_energy_birth_phase() * 180 / kPi == doctest::Approx(17.96).epsilon(1e-3));
  const double up = ponderomotive(kField);
  CHECK(std::sqrt(2 * 3.17 * up) == doctest::Approx(1.44).epsilon(0.01 / 1.44));
  const double tau = units::au_to_fs(dominant_travel_time(kField, 0.55));
  CHECK(tau == doctest::Approx(2.0).epsilon(0.1));
  // Ionization weighting favours births near the crest: about 3/4 cycle.
  CHECK(dominant_travel_time(kField, 0.55) / kField.period() == doctest::Approx(0.73).epsilon(0.02));
  const double cut = birth_phase_cutoff();
  CHECK(return_phase(cut) - cut == doctest::Approx(2 * kPi * kMinTravelCycles).epsilon(1e-9));
}

TEST_CASE("final-state solutions") {
  const auto ev = half_cycle_events(kField)[0];
  const Vec3 kf{0.3, 0.2, 0.0};
  FinalStateSolver s(kField, ev);
  s.set_final_momentum(kf.x, std::hypot(kf.y, kf.z));
  const double gmax = s.max_deposit();
  CHECK(gmax > 0.0);
  CHECK(solve_final_state(kField, ev, kf, gmax + 1e-6).empty());
  const double up = ponderomotive(kField);
  CHECK(solve_final_state(kField, ev, kf, 3.2 * up).empty());

  // Dense birth-phase oracle: count sign changes of the energy equation.
  auto count_oracle = [&](double d) {
    const int n = 200000;
    const double cut = birth_phase_cutoff();
    int changes = 0;
    double prev = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double tb = cut * i / n;
      const double tc = return_phase(tb);
      const double a = ev.effective_e0 / kField.omega();
      const double v = std::sin(tb) - std::sin(tc);
      const double p = kf.x - a * std::sin(tc);
      const double g = 0.5 * a * a * v * v - 0.5 * p * p - 0.5 * kf.y * kf.y - d;
      if (i > 0 && (g > 0) != (prev > 0)) ++changes;
      prev = g;
    }
    return changes;
  };

  for (double frac : {0.1, 0.5, 0.9, 0.999}) {
    const double d = frac * gmax;
    const auto sols = solve_final_state(kField, ev, kf, d);
    CHECK(static_cast<int>(sols.size()) == count_oracle(d));
    for (const auto& t : sols) {
      const double tb = kField.omega() * (t.t_b - ev.t_peak);
      const double tc = kField.omega() * (t.t_c - ev.t_peak);
      CHECK(std::abs(reduced_residual(tb, tc)) < 1e-10);
      const double ac = -ev.effective_e0 / kField.omega() * std::sin(tc);
      const double final_ke = 0.5 * ((kf.x + ac) * (kf.x + ac) + kf.y * kf.y);
      CHECK(std::abs(final_ke - (t.return_energy - d)) < 1e-10);
      CHECK(t.k0.x == doctest::Approx(-vector_potential(kField, t.t_b).x).epsilon(1e-12));
      CHECK(t.t_b < t.t_c);
      CHECK(t.travel() >= kMinTravelCycles * kField.period() - 1e-9);
      CHECK(t.t_c - ev.t_peak <= kField.period() + 1e-9);
    }
    if (sols.size() == 2) {
      CHECK(sols[0].branch == Branch::Short);
      CHECK(sols[1].branch == Branch::Long);
      CHECK(sols[0].travel() < sols[1].travel());
    }
  }

  // Near the maximum both branches exist and approach each other.
  const auto near = solve_final_state(kField, ev, kf, gmax - 1e-4);
  REQUIRE(near.size() == 2);
  const auto nearer = solve_final_state(kField, ev, kf, gmax - 1e-8);
  REQUIRE(nearer.size() == 2);
  CHECK(nearer[1].t_c - nearer[0].t_c < near[1].t_c - near[0].t_c);
  const auto at = solve_final_state(kField, ev, kf, gmax);
  REQUIRE(at.size() == 2);
  CHECK(std::abs(at[0].t_b - at[1].t_b) < 1e-6);
  CHECK(std::abs(at[0].t_c - at[1].t_c) < 1e-6);
}

TEST_CASE("odd half-cycle mirrors the even one") {
  const auto ev = half_cycle_events(kField);
  const auto a = solve_final_state(kField, ev[0], {0.4, 0.3, 0.0}, 0.1);
  const auto b = solve_final_state(kField, ev[1], {-0.4, 0.3, 0.0}, 0.1);
  REQUIRE(!a.empty());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(b[i].t_b - a[i].t_b == doctest::Approx(kPi / kField.omega()));
    CHECK(b[i].k0.x == doctest::Approx(-a[i].k0.x));
  }
}

TEST_CASE("Volkov phase closed form") {
  const Vec3 zero{};
  const auto mono = LaserField::monochromatic(0.065, 0.0569, 3);
  CHECK(volkov_phase(zero, 10.0, 10.0, mono) == 0.0);
  const double up = ponderomotive(mono);
  CHECK(volkov_phase(zero, 13.0, 13.0 + mono.period(), mono) ==
        doctest::Approx(up * mono.period()).epsilon(1e-12));

  const Vec3 k{0.7, -0.3, 0.2};
  for (const auto& field : {mono, LaserField::two_color(0.065, 0.0569, 0.0135, 11, 0.4)}) {
    for (double t1 : {0.0, 37.0, 410.0}) {
      const double t2 = t1 + field.period();
      // Integrate piece by piece with the envelope held at each crest.
      double oracle = 0.0;
      for (int n = field.crest_index(t1); n <= field.crest_index(t2); ++n) {
        const double lo = std::max(t1, (n - 0.5) * kPi / field.omega());
        const double hi = std::min(t2, (n + 0.5) * kPi / field.omega());
        if (hi <= lo) continue;
        const double q = -field.e0() / field.omega() * field.envelope(field.crest_time(n));
        auto integrand = [&](double t) {
          const double ax = q * std::sin(field.omega() * t);
          return 0.5 * ((k.x + ax) * (k.x + ax) + k.y * k.y + k.z * k.z);
        };
        oracle += integrate(integrand, lo, hi, 1e-13);
      }
      CHECK(volkov_phase(k, t1, t2, field) == doctest::Approx(oracle).epsilon(1e-10));
    }
  }
}

TEST_CASE("total phase bookkeeping") {
  const auto field = LaserField::monochromatic(0.065, 0.0569, 3);
  const auto ev = half_cycle_events(field);
  const Vec3 kf{0.2, 0.3, 0.0};
  const double d = 0.15;
  const auto a = solve_final_state(field, ev[0], kf, d);
  const auto b = solve_final_state(field, ev[3], kf, d);
  REQUIRE(!a.empty());
  REQUIRE(!b.empty());
  const ChannelEnergies en{0.45, 0.05, -0.55};
  const double t1 = field.duration() + 5.0;
  const double t2 = t1 + 123.456;
  const double d1 = total_phase(a[0], field, kf, en, t1) - total_phase(b[0], field, kf, en, t1);
  const double d2 = total_phase(a[0], field, kf, en, t2) - total_phase(b[0], field, kf, en, t2);
  CHECK(std::remainder(d1 - d2, 2 * kPi) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));

  // Explicit five-term sum.
  const auto& t = a[0];
  const LocalField lf = local_field(field, ev[0]);
  const double expect = -volkov_phase(kf, t.t_c, t1, field) - en.e_total * (t1 - t.t_c) -
                        intermediate_volkov_phase(t, lf) - en.e_n * (t.t_c - t.t_b) -
                        en.e_i * t.t_b;
  CHECK(total_phase(t, field, kf, en, t1) == doctest::Approx(expect).epsilon(1e-13));

  // Intermediate phase against quadrature.
  auto integrand = [&](double tau) {
    const double v = t.k0.x + lf.potential(tau);
    return 0.5 * v * v;
  };
  CHECK(intermediate_volkov_phase(t, lf) ==
        doctest::Approx(integrate(integrand, t.t_b, t.t_c, 1e-13)).epsilon(1e-10));
}

TEST_CASE("short-long phase difference is converged") {
  const auto field = LaserField::monochromatic(0.065, 0.0569, 1);
  const auto ev = half_cycle_events(field)[0];
  const Vec3 kf{0.1, 0.3, 0.0};
  FinalStateSolver s(field, ev);
  s.set_final_momentum(kf.x, kf.y);
  const double d = 0.5 * s.max_deposit();
  const auto sols = s.trajectories(d);
  REQUIRE(sols.size() == 2);
  const ChannelEnergies en{0.6, 0.01, -0.55};
  const double t = field.duration();
  const double diff = total_phase(sols[1], field, kf, en, t) - total_phase(sols[0], field, kf, en, t);
  CHECK(std::abs(std::remainder(diff, 2 * kPi)) > 1e-3);

  // Bisection-only oracle with a tighter tolerance on the return phase.
  auto g = [&](double u) { return s.deposit(u) - d; };
  auto bisect = [&](double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if ((g(mid) > 0) == (g(lo) > 0))
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double w = field.omega();
  const double us = bisect(w * sols[0].t_c - 1e-3, w * sols[0].t_c + 1e-3);
  const double ul = bisect(w * sols[1].t_c - 1e-3, w * sols[1].t_c + 1e-3);
  const double ref = total_phase(s.trajectory(ul), field, kf, en, t) -
                     total_phase(s.trajectory(us), field, kf, en, t);
  CHECK(diff == doctest::Approx(ref).epsilon(1e-8));
}
