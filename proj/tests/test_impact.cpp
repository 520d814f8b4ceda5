#include <algorithm>
#include <cmath>
#include <complex>

#include "doctest.h"
#include "recollide/impact.hpp"

using namespace recollide;

namespace {

const MolecularData& mol() {
  static const MolecularData m = MolecularData::build(MolecularConfig{});
  return m;
}

double jsum_modulus2(const ImpactModel& model, double e, int n, const Vec3& ki, const Vec3& kf) {
  double s = 0.0;
  for (int j : model.partial_waves()) s += std::norm(vee_matrix_element(model, mol(), e, j, n, ki, kf));
  return s;
}

}  // namespace

TEST_CASE("electronic form factor") {
  ImpactModel m;
  CHECK(electronic_form_factor(m, 0.0) == 0.0);
  CHECK(electronic_form_factor(m, 0.5 * m.q_min) == 0.0);
  // Power-law tail q^-3.
  const double a = electronic_form_factor(m, 200.0) * std::pow(200.0, 3);
  const double b = electronic_form_factor(m, 400.0) * std::pow(400.0, 3);
  CHECK(a == doctest::Approx(b).epsilon(1e-3));
  CHECK(electronic_form_factor(m, 1e3) < 1e-6);

  // Direct scan: peak moves to larger q with a tighter orbital.
  auto peak = [](double zeta) {
    ImpactModel mm;
    mm.orbital_decay = zeta;
    double best = 0.0, qbest = 0.0;
    for (double q = 0.001; q < 10.0; q += 0.0005) {
      const double v = electronic_form_factor(mm, q);
      if (v > best) best = v, qbest = q;
    }
    return qbest;
  };
  const double p1 = peak(1.0), p2 = peak(1.24), p3 = peak(2.0);
  CHECK(p1 < p2);
  CHECK(p2 < p3);
  CHECK(p2 == doctest::Approx(2 * 1.24 / std::sqrt(3.0)).epsilon(1e-3));
}

TEST_CASE("partial-wave expansion of the two-center factor") {
  CHECK(partial_wave_coefficient(2) == 0.0);
  CHECK(partial_wave_coefficient(1) == 3.0);
  CHECK(partial_wave_coefficient(3) == -7.0);
  for (double x : {0.3, 1.7, 4.2}) {
    for (double mu : {-0.9, 0.2, 1.0}) {
      double s = 0.0;
      for (int j = 1; j <= 41; j += 2)
        s += partial_wave_coefficient(j) * std::sph_bessel(j, x) * angular_factor(j, mu);
      CHECK(s == doctest::Approx(std::sin(x * mu)).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("parity and forward limit") {
  ImpactModel m;
  const Vec3 ki{1.2, 0.0, 0.0}, kf{0.3, 0.7, 0.0};
  for (int j : {2, 4, 8}) {
    CHECK(nuclear_transition(mol(), 0.3, j, 0, 1.5) == 0.0);
    CHECK(vee_matrix_element(m, mol(), 0.3, j, 0, ki, kf) == std::complex<double>(0.0, 0.0));
  }
  for (int j : {1, 3, 5}) {
    CHECK(nuclear_transition(mol(), 0.3, j, 1, 0.0) == 0.0);
    CHECK(vee_matrix_element(m, mol(), 0.3, j, 1, ki, ki) == std::complex<double>(0.0, 0.0));
  }
  CHECK(std::abs(vee_matrix_element(m, mol(), 0.3, 1, 0, ki, kf)) > 0.0);
}

TEST_CASE("exchange of incoming and outgoing momenta conjugates the element") {
  ImpactModel m;
  const Vec3 ki{1.3, 0.1, -0.2}, kf{-0.4, 0.6, 0.3};
  for (int j : {1, 3, 7}) {
    const auto a = vee_matrix_element(m, mol(), 0.35, j, 2, ki, kf);
    const auto b = vee_matrix_element(m, mol(), 0.35, j, 2, kf, ki);
    CHECK(a.real() == doctest::Approx(b.real()).scale(1.0).epsilon(1e-14));
    CHECK(a.imag() == doctest::Approx(-b.imag()).epsilon(1e-13));
  }
}

TEST_CASE("J-sum truncation converges") {
  ImpactModel m9, m11;
  m11.j_max = 11;
  // Recollision-scale momentum transfers.
  const Vec3 ki{1.44, 0.0, 0.0};
  for (const Vec3& kf : {Vec3{-0.5, 0.4, 0.0}, Vec3{0.2, 1.0, 0.0}, Vec3{-1.2, 0.3, 0.0}}) {
    for (double e : {0.2, 0.35, 0.5}) {
      const double a = jsum_modulus2(m9, e, 0, ki, kf);
      const double b = jsum_modulus2(m11, e, 0, ki, kf);
      CHECK(std::abs(b - a) < 1e-3 * b);
    }
  }
}

TEST_CASE("element falls with dissociation energy past the form-factor peak") {
  ImpactModel m;
  const Vec3 ki{1.44, 0.0, 0.0}, kf{-0.9, 0.6, 0.0};
  CHECK((ki - kf).norm() > 2 * m.orbital_decay / std::sqrt(3.0));
  double prev = jsum_modulus2(m, 0.40, 0, ki, kf);
  for (double e = 0.45; e < 1.0; e += 0.05) {
    const double v = jsum_modulus2(m, e, 0, ki, kf);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("stretched bond dissociates more easily") {
  ImpactModel m;
  const auto& g = mol().ion_bound()[0];
  const RadialGrid& grid = mol().grid();
  // Ground level translated outward by 0.6 bohr.
  std::vector<double> stretched(grid.n, 0.0);
  const int shift = static_cast<int>(std::lround(0.6 / grid.step()));
  for (int i = shift; i < grid.n; ++i) stretched[i] = g.radial[i - shift];

  const double q = 1.5;
  double plain = 0.0, wide = 0.0;
  for (double e = 0.005; e < 1.5; e += 0.01) {
    for (int j : m.partial_waves()) {
      const auto u = solve_continuum(mol().ion_u_curve(), e, j, grid, mol().reduced_mass());
      const double a = nuclear_transition(u, g.radial, grid, q);
      const double b = nuclear_transition(u, stretched, grid, q);
      plain += a * a;
      wide += b * b;
    }
  }
  CHECK(wide > 1.2 * plain);
}

TEST_CASE("table interpolation matches direct integrals") {
  ImpactModel m;
  const std::vector<double> es{0.1, 0.33, 0.7};
  const std::vector<int> ch{0, 3, 7};
  const ImpactTable t(m, mol(), es, ch, 6.0);
  CHECK(t.partial_waves().size() == 5);
  for (int ie = 0; ie < 3; ++ie)
    for (int ij = 0; ij < 5; ++ij)
      for (int ic = 0; ic < 3; ++ic)
        for (double q : {0.0137, 0.9, 2.345, 5.99}) {
          const double direct = nuclear_transition(mol(), es[ie], t.partial_waves()[ij], ch[ic], q);
          const double scale = std::abs(nuclear_transition(mol(), es[ie], 1, ch[ic], 1.0)) + 1e-30;
          CHECK(std::abs(t.nuclear(ie, ij, ic, q) - direct) < 1e-6 * scale);
        }
  const Vec3 ki{1.1, 0.0, 0.0}, kf{0.2, -0.5, 0.4};
  std::complex<double> buf[5];
  t.elements(1, 1, ki, kf, buf);
  std::complex<double> ref[5];
  double big = 0.0;
  for (int ij = 0; ij < 5; ++ij) {
    ref[ij] = vee_matrix_element(m, mol(), 0.33, t.partial_waves()[ij], 3, ki, kf);
    big = std::max(big, std::abs(ref[ij]));
  }
  for (int ij = 0; ij < 5; ++ij) CHECK(std::abs(buf[ij] - ref[ij]) < 1e-6 * big);
  CHECK_THROWS_AS(t.nuclear(0, 0, 0, 7.0), Error);
}

TEST_CASE("grid mismatch") {
  const RadialGrid other{0.5, 30.0, 4000};
  const auto u = solve_continuum(mol().ion_u_curve(), 0.3, 1, other, mol().reduced_mass());
  try {
    nuclear_transition(u, mol().ion_bound()[0].radial, mol().grid(), 1.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridMismatch);
  }
}
