#include <cmath>
#include <complex>

#include "doctest.h"
#include "recollide/sfa.hpp"

using namespace recollide;

namespace {

const MolecularData& mol() {
  static const MolecularData m = MolecularData::build(MolecularConfig{});
  return m;
}

SpectrumGrid small_grid() {
  SpectrumGrid g;
  g.n_e = 40;
  g.n_kpar = 32;
  g.n_kperp = 16;
  return g;
}

LaserField field800(int cycles) {
  return LaserField::monochromatic(0.065, units::omega_from_wavelength_nm(800), cycles);
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const std::vector<cplx>& a) {
  double m = 0.0;
  for (const auto& v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("ionization prefactor") {
  CHECK(ionization_prefactor(1.0, 0.1) == doctest::Approx(5.361234e-4).epsilon(1e-6));
  CHECK(ionization_prefactor(1.0, -0.1) == ionization_prefactor(1.0, 0.1));
  CHECK(ionization_prefactor(0.9, 0.1) > ionization_prefactor(1.0, 0.1));
  CHECK(ionization_prefactor(1.0, 0.2) > ionization_prefactor(1.0, 0.1));
  try {
    ionization_prefactor(1.0, 0.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroField);
  }
}

TEST_CASE("spreading prefactor") {
  const cplx a = spreading_prefactor(2.0 * kPi);
  CHECK(std::abs(a) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::arg(a) == doctest::Approx(-0.75 * kPi).epsilon(1e-14));
  const cplx b = spreading_prefactor(2.0 * kPi * std::pow(2.0, 2.0 / 3.0));
  CHECK(std::abs(b) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(std::arg(spreading_prefactor(37.0)) == doctest::Approx(-0.75 * kPi).epsilon(1e-14));
  try {
    spreading_prefactor(1.0, 5.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TravelTooShort);
  }
}

TEST_CASE("initial superposition") {
  const InitialSuperposition s({0, 1}, {cplx(3.0, 0.0), cplx(0.0, 4.0)});
  CHECK(std::norm(s.coeffs()[0]) + std::norm(s.coeffs()[1]) == doctest::Approx(1.0));
  CHECK(s.coeffs()[0].real() == doctest::Approx(0.6));
  const auto on = s.on({1, 0, 2});
  CHECK(on[0].imag() == doctest::Approx(0.8));
  CHECK(on[2] == cplx(0.0));
  CHECK_THROWS_AS(InitialSuperposition({0, 0}, {1.0, 1.0}), Error);
  CHECK_THROWS_AS(InitialSuperposition({0}, {0.0}), Error);
  CHECK_THROWS_AS(s.on({0}), Error);
  const auto p = InitialSuperposition::two_level(0.7);
  CHECK(std::arg(p.coeffs()[1] / p.coeffs()[0]) == doctest::Approx(0.7));
}

TEST_CASE("grid fitting covers the recollision momenta") {
  SpectrumGrid g;
  const auto f = LaserField::monochromatic(0.065, units::omega_from_wavelength_nm(1850), 1);
  const auto h = g.fitted(f);
  const double alpha = 0.065 / f.omega();
  CHECK(h.kpar_max > alpha);
  CHECK(h.n_kpar == g.n_kpar);
  g.auto_extend = false;
  CHECK(g.fitted(f).kpar_max == g.kpar_max);
  CHECK(g.e_rel(0) == doctest::Approx(0.5 * g.e_step()));
}

TEST_CASE("single-event spectrum: quadrature, positivity and superposition identities") {
  SfaOptions o;
  o.events = {0};
  const SfaEngine eng(field800(1), mol(), ImpactModel{}, small_grid(), o);
  CHECK(eng.channels().size() > 10);
  const GramSpectrum g = eng.run();
  CHECK(g.events_used == 1);

  const auto r0 = spectrum(g, InitialSuperposition::level(0));
  const auto r1 = spectrum(g, InitialSuperposition::level(1));
  const auto rp = spectrum(g, InitialSuperposition::two_level(0.0));
  const auto rm = spectrum(g, InitialSuperposition::two_level(kPi));
  CHECK(r0.w_t > 0.0);

  double sum = 0.0, sum_j = 0.0;
  for (std::size_t i = 0; i < r0.w.size(); ++i) {
    CHECK(r0.w[i] >= 0.0);
    CHECK(r0.w_d[i] == 2.0 * r0.w[i]);
    CHECK(r0.e_d[i] == 0.5 * r0.e_rel[i]);
    sum += r0.w[i] * g.grid.e_step();
  }
  for (double v : r0.w_by_j) sum_j += v;
  CHECK(std::abs(r0.w_t - sum) < 1e-10 * r0.w_t);
  CHECK(std::abs(r0.w_t - sum_j) < 1e-10 * r0.w_t);
  CHECK(r0.jsum_tail < 5e-3);

  // |+> and |-> average to the incoherent mixture of |0> and |1>.
  CHECK(0.5 * (rp.w_t + rm.w_t) == doctest::Approx(0.5 * (r0.w_t + r1.w_t)).epsilon(1e-10));
  CHECK(std::abs(rp.w_t - rm.w_t) > 1e-3 * rp.w_t);
  CHECK(total_yield(g, InitialSuperposition::level(0).on(g.members)) ==
        doctest::Approx(r0.w_t).epsilon(1e-12));
}

TEST_CASE("short/long cross terms average out on the default grid") {
  SfaOptions o;
  o.events = {0};
  const GramSpectrum g = SfaEngine(field800(1), mol(), ImpactModel{}, SpectrumGrid{}, o).run();
  const auto coh = spectrum(g, InitialSuperposition::level(0));
  const auto inc = spectrum(g, InitialSuperposition::level(0), false);
  CHECK(std::abs(inc.w_t - coh.w_t) < 0.02 * coh.w_t);
  const double top = coh.w[coh.peak_index()];
  double worst = 0.0;
  for (std::size_t i = 0; i < coh.w.size(); ++i)
    if (coh.w[i] > 0.1 * top) worst = std::max(worst, std::abs(inc.w[i] / coh.w[i] - 1.0));
  CHECK(worst < 0.02);
}

TEST_CASE("threads do not change the result") {
  SfaOptions o;
  o.events = {1};
  SpectrumGrid grid = small_grid();
  grid.n_kpar = 12;
  const auto a = SfaEngine(field800(1), mol(), ImpactModel{}, grid, o).run();
  o.threads = 3;
  const auto b = SfaEngine(field800(1), mol(), ImpactModel{}, grid, o).run();
  REQUIRE(a.coherent.size() == b.coherent.size());
  for (std::size_t i = 0; i < a.coherent.size(); ++i) {
    CHECK(a.coherent[i] == b.coherent[i]);
    CHECK(a.incoherent[i] == b.incoherent[i]);
  }
}

TEST_CASE("single-event yield does not depend on trailing cycles") {
  SfaOptions o;
  o.events = {0};
  SpectrumGrid grid = small_grid();
  grid.n_kpar = 12;
  const auto a = SfaEngine(field800(1), mol(), ImpactModel{}, grid, o).run();
  const auto b = SfaEngine(field800(3), mol(), ImpactModel{}, grid, o).run();
  CHECK(max_abs_diff(a.coherent, b.coherent) < 1e-9 * max_abs(a.coherent));
}

TEST_CASE("periodic shortcut matches the explicit event sum") {
  SpectrumGrid grid = small_grid();
  grid.n_kpar = 12;
  grid.n_kperp = 8;
  SfaOptions o;
  const auto fast = SfaEngine(field800(3), mol(), ImpactModel{}, grid, o).run();
  o.fast_periodic = false;
  const auto slow = SfaEngine(field800(3), mol(), ImpactModel{}, grid, o).run();
  CHECK(fast.events_used == 6);
  CHECK(slow.events_used == 6);
  CHECK(max_abs_diff(fast.coherent, slow.coherent) < 1e-8 * max_abs(slow.coherent));
}

TEST_CASE("adjacent half-cycles are mirror images") {
  const auto f = field800(1);
  SfaOptions o0, o1;
  o0.events = {0};
  o1.events = {1};
  const SfaEngine e0(f, mol(), ImpactModel{}, small_grid(), o0);
  const SfaEngine e1(f, mol(), ImpactModel{}, small_grid(), o1);
  const std::vector<double> es{0.2, 0.35};
  const std::vector<Vec3> k{{0.4, 0.3, 0.0}, {-1.1, 0.2, 0.0}, {2.3, 0.5, 0.0}};
  const std::vector<Vec3> km{{-0.4, 0.3, 0.0}, {1.1, 0.2, 0.0}, {-2.3, 0.5, 0.0}};
  const auto a = e0.amplitudes(k, es);
  const auto b = e1.amplitudes(km, es);
  double big = 0.0;
  for (const auto& v : a)
    for (const auto& x : v) big = std::max(big, std::abs(x));
  REQUIRE(big > 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t m = 0; m < a[i].size(); ++m)
      CHECK(std::abs(std::abs(a[i][m]) - std::abs(b[i][m])) < 1e-9 * big);
}

TEST_CASE("classically forbidden final states give no amplitude") {
  SfaOptions o;
  o.events = {0};
  const SfaEngine eng(field800(1), mol(), ImpactModel{}, small_grid(), o);
  const auto a = eng.amplitudes({Vec3{0.0, 3.0, 0.0}}, {0.3});
  for (const auto& v : a)
    for (const auto& x : v) CHECK(x == cplx(0.0));
}

TEST_CASE("invalid engine options") {
  SfaOptions o;
  o.events = {5};
  CHECK_THROWS_AS(SfaEngine(field800(1), mol(), ImpactModel{}, small_grid(), o), Error);
  o.events = {};
  o.members = {7};
  CHECK_THROWS_AS(SfaEngine(field800(1), mol(), ImpactModel{}, small_grid(), o), Error);
  o.members = {0};
  o.threads = 0;
  CHECK_THROWS_AS(SfaEngine(field800(1), mol(), ImpactModel{}, small_grid(), o), Error);
}
