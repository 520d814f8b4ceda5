// Acceptance criteria 1-10: one PASS/FAIL line each; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>

#include "json.hpp"
#include "recollide/numeric.hpp"
#include "recollide/runner.hpp"

using namespace recollide;
using json = nlohmann::json;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& detail, double seconds) {
  std::printf("criterion %2d %s  %s  (%.1f s)\n", n, ok ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string f(const char* fmt, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// Numeric rows of a CSV, skipping '#' lines and the header.
std::vector<std::vector<double>> csv_rows(const std::string& csv) {
  std::vector<std::vector<double>> out;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    out.push_back(row);
  }
  return out;
}

const double kWavelengths[] = {800.0, 1200.0, 1530.0, 1850.0};

// Largest return energy over births in the quarter cycle after a crest, from the field's own
// vector potential, in units of U_p.
double plateau_factor(double nm) {
  const auto field = LaserField::monochromatic(0.065, units::omega_from_wavelength_nm(nm), 3);
  const double quarter = 0.25 * field.period();
  auto energy = [&](double t_b) {
    const double t_c = return_time(field, t_b);
    const double dv = vector_potential(field, t_c).x - vector_potential(field, t_b).x;
    return 0.5 * dv * dv;
  };
  const auto best = numeric::golden_max(energy, 1e-6 * quarter, 0.999 * quarter, 1e-10 * quarter);
  return best.second / ponderomotive(field);
}

void criterion_1() {
  Timer t;
  bool ok = true;
  std::string d;
  for (double nm : kWavelengths) {
    const double r = plateau_factor(nm);
    ok = ok && r >= 3.15 && r <= 3.19;
    d += f("%g nm: ", nm) + f("%.4f Up  ", r);
  }
  report(1, ok, "max return energy in [3.15, 3.19] Up; " + d, t.seconds());
}

void criterion_2(const MolecularData& mol) {
  Timer t;
  const auto field = LaserField::monochromatic(0.065, units::omega_from_wavelength_nm(800), 1);
  const double tau = units::au_to_fs(dominant_travel_time(field, mol.i_p(0, 0)));
  report(2, std::abs(tau - 2.0) <= 0.2,
         "dominant travel " + f("%.3f fs", tau) + f(" = %.3f cycles (2.0 +- 0.2 fs)", units::fs_to_au(tau) / field.period()),
         t.seconds());
}

void criterion_3() {
  Timer t;
  const auto field = LaserField::monochromatic(0.065, units::omega_from_wavelength_nm(800), 1);
  const double p = std::sqrt(2.0 * 3.17 * ponderomotive(field));
  const double p_scan = std::sqrt(2.0 * plateau_factor(800.0) * ponderomotive(field));
  report(3, std::abs(p - 1.44) <= 0.01 && std::abs(p_scan - 1.44) <= 0.01,
         "p_max " + f("%.4f au", p) + f(" (from the scanned plateau %.4f au), 1.44 +- 0.01", p_scan), t.seconds());
}

double morse_level(double depth, double width, double mu, int n) {
  const double w = width * std::sqrt(2.0 * depth / mu);
  const double x = n + 0.5;
  return w * x - w * w * x * x / (4.0 * depth);
}

void criterion_4(const MolecularData& mol) {
  Timer t;
  const double mu = mol.reduced_mass();
  const auto curve = PotentialCurve::morse(0.1026, 2.0, 0.68, 0.1026);
  const auto states = solve_bound(curve, 0, RadialGrid{}, mu);
  double worst = 0.0;
  for (int n = 0; n <= 15 && n < static_cast<int>(states.size()); ++n) {
    const double exact = morse_level(0.1026, 0.68, mu, n);
    worst = std::max(worst, std::abs(states[n].energy - exact) / exact);
  }
  const double gap = mol.e_i(1) - mol.e_i(0);
  const double s0 = mol.fc_sum(0), s1 = mol.fc_sum(1);
  const bool ok = worst < 1e-6 && std::abs(gap / 0.0135 - 1.0) <= 0.04 && s0 >= 0.9 && s0 <= 1.0 &&
                  s1 >= 0.9 && s1 <= 1.0;
  report(4, ok,
         "Morse levels 0-15 max rel err " + f("%.2e", worst) + f("; E1-E0 = %.5f au", gap) +
             f("; FC sums %.4f", s0) + f(", %.4f", s1),
         t.seconds());
}

void criterion_5(const RunConfig& cfg) {
  Timer t;
  const auto r = run_pump_dump(cfg);
  const auto s = json::parse(r.summary);
  bool ok = s["peaks_strictly_decreasing"].get<bool>() && r.converged;
  std::string d;
  for (const auto& row : s["spectra"]) {
    const double peak = row["peak_E_D_eV"], cl = row["classical_E_D_eV"];
    ok = ok && std::abs(peak / cl - 1.0) <= 0.3;
    d += f("%g nm ", row["wavelength_nm"].get<double>()) + f("%.2f eV", peak) + f(" (classical %.2f)  ", cl);
  }
  // Support: yield below 20 eV and nothing piling up at the top of the energy grid.
  double worst_edge = 0.0, worst_out = 0.0;
  for (const auto& file : r.files) {
    if (file.name == "pump_dump_peaks.csv") continue;
    const auto rows = csv_rows(file.content);
    const double step = rows[1][0] - rows[0][0], top = rows.back()[0];
    double total = 0.0, edge = 0.0, out = 0.0;
    for (const auto& row : rows) {
      total += row[1] * step;
      if (row[0] > top - 1.5) edge += row[1] * step;
      if (row[0] > 20.0) out += row[1] * step;
    }
    worst_edge = std::max(worst_edge, edge / total);
    worst_out = std::max(worst_out, out / total);
  }
  ok = ok && worst_edge < 1e-3 && worst_out < 1e-3;
  report(5, ok,
         "peaks decreasing; " + d + f("max share above 20 eV %.1e", worst_out) +
             f(", in the top 1.5 eV of the grid %.1e", worst_edge),
         t.seconds());
}

void criterion_6(const RunConfig& cfg) {
  Timer t;
  const auto s = json::parse(run_bichromatic(cfg).summary);
  const double r2 = s["fit"]["R2"], c = s["fit"]["contrast"], d = s["plus_minus_difference_at_main_peak"];
  report(6, r2 > 0.95 && c > 0.1 && d > 0.1,
         f("R2 %.4f", r2) + f(", B/A %.3f", c) + f(", |+>/|-> differ by %.1f%% at the main peak", 100 * d),
         t.seconds());
}

void criterion_7(const RunConfig& cfg) {
  Timer t;
  const auto r = run_two_color(cfg);
  const auto s = json::parse(r.summary);
  const double mono = s["mono_contrast_ratio"], two = s["two_color_contrast_ratio"];
  double ext = 1.0;
  if (s.contains("extension_contrast_ratio")) ext = s["extension_contrast_ratio"];
  // Each column of the scan averages to one.
  double worst_mean = 0.0;
  const auto rows = csv_rows(r.files.front().content);
  for (std::size_t k = 1; k < rows[0].size(); ++k) {
    double mean = 0.0;
    for (const auto& row : rows) mean += row[k] / rows.size();
    worst_mean = std::max(worst_mean, std::abs(mean - 1.0));
  }
  report(7, mono < 0.2 && two > 0.5 && std::abs(ext - 1.0) <= 0.2 && worst_mean < 1e-8,
         f("11-cycle mono / 1-cycle contrast %.3f (< 0.2)", mono) + f(", two-color %.3f (> 0.5)", two) +
             f(", 13/11-cycle two-color %.3f", ext) + f(", phase averages within %.0e of 1", worst_mean),
         t.seconds());
}

void criterion_8(const RunConfig& cfg) {
  Timer t;
  const auto s = json::parse(run_field_free(cfg).summary);
  const int cells = s["max_peak_cell_difference"];
  const double r = s["phase_scan"]["pearson_relative_vs_strong_field"];
  const double rl = s["phase_scan"]["pearson_lab_vs_strong_field"];
  const bool rise = s["height_increases_with_tau_relative"].get<bool>() && s["height_increases_with_tau_lab"].get<bool>();
  std::string heights;
  for (const auto& row : s["spectra"])
    heights += f(" %.3g", row["height_lab"].get<double>());
  report(8, cells <= 1 && r > 0.9 && rl > 0.9 && rise,
         "Lab vs RelativeCOM peak cells differ by " + std::to_string(cells) + f("; Pearson vs strong field %.4f", r) +
             f(" (Lab %.4f)", rl) + "; Lab peak heights over tau_d" + heights,
         t.seconds());
}

void criterion_9(const RunConfig& cfg) {
  Timer t;
  const auto s = json::parse(run_coincidence(cfg).summary);
  const double spacing = s["rings"]["spacing_photons"], vis = s["rings"]["visibility"];
  const double ref_vis = s["reference"]["visibility"];
  const int ref_peaks = s["reference"]["peaks"];
  const double ati = s["ati_along_E_D"]["spacing_photons"], ati_vis = s["ati_along_E_D"]["visibility"];
  const int ati_peaks = s["ati_along_E_D"]["peaks"];
  const bool rings = std::abs(spacing - 1.0) <= 0.05 && vis > 0.5;
  const bool absent = ref_peaks < 3 || ref_vis < 0.2;
  const bool along = ati_peaks >= 3 && ati_vis > 0.5;
  report(9, rings && absent && along,
         f("ring spacing %.4f omega", spacing) + f(" (visibility %.3f)", vis) + "; 1-cycle: " +
             std::to_string(ref_peaks) + f(" peaks, visibility %.3f", ref_vis) + "; along E_D: " +
             std::to_string(ati_peaks) + f(" peaks spaced %.3f omega", ati) + f(", visibility %.3f", ati_vis),
         t.seconds());
}

void criterion_10(const RunConfig& cfg, const MolecularData& mol) {
  Timer t;
  std::string d;
  // Parity of the impact elements.
  const ImpactModel model = cfg.impact;
  double odd = 0.0, even = 0.0;
  const Vec3 ki{1.3, 0.0, 0.0}, kf{0.4, 0.8, 0.1};
  for (int j = 1; j <= 8; ++j) {
    const double a = std::abs(vee_matrix_element(model, mol, 0.3, j, 0, ki, kf));
    (j % 2 ? odd : even) = std::max(j % 2 ? odd : even, a);
  }
  const bool parity = even < 1e-12 * odd;
  d += f("even/odd J %.1e", even / odd);

  // Lab <-> relative momenta round trips.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double m = ion_mass(mol);
  double trip = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p{u(rng), u(rng), u(rng)}, P{u(rng), u(rng), u(rng)};
    const auto r = lab_to_relative(p, P, m);
    const auto l = relative_to_lab(r.K, r.k, m);
    trip = std::max(trip, std::max((l.p - p).norm(), (l.P - P).norm()));
  }
  const bool round = trip < 1e-13;
  d += f("; round trip %.1e", trip);

  // Doubling the k_f grid.
  SfaOptions o;
  o.events = {0};
  o.members = {0};
  const auto field = LaserField::monochromatic(cfg.field.e0, cfg.field.carrier(), 1);
  SpectrumGrid fine = cfg.grid;
  fine.n_kpar *= 2;
  fine.n_kperp *= 2;
  const auto a = spectrum(SfaEngine(field, mol, model, cfg.grid, o).run(), InitialSuperposition::level(0));
  const auto b = spectrum(SfaEngine(field, mol, model, fine, o).run(), InitialSuperposition::level(0));
  double change = 0.0;
  const double top = a.w[a.peak_index()];
  for (std::size_t i = 0; i < a.w.size(); ++i) change = std::max(change, std::abs(b.w[i] - a.w[i]) / top);
  const double wt_change = std::abs(b.w_t / a.w_t - 1.0);
  const bool refine = change < 0.02 && wt_change < 0.02;
  // W >= 0 and the quadrature identities.
  bool positive = true;
  double quad = 0.0;
  for (const auto* s : {&a, &b}) {
    double sum = 0.0, sum_j = 0.0;
    for (std::size_t i = 0; i < s->w.size(); ++i) {
      positive = positive && s->w[i] >= 0.0;
      sum += s->w[i] * (s->e_rel[1] - s->e_rel[0]);
    }
    for (double v : s->w_by_j) sum_j += v;
    quad = std::max({quad, std::abs(sum - s->w_t) / s->w_t, std::abs(sum_j - s->w_t) / s->w_t});
  }
  d += std::string("; W >= 0 ") + (positive ? "yes" : "no") + f("; quadrature %.1e", quad);

  d += f("; 2x k_f grid: max change %.2f%% of peak", 100 * change) + f(", W_T %.2f%%", 100 * wt_change);

  // Byte-identical outputs across repeats and thread counts.
  RunConfig small = cfg;
  small.pump_dump.wavelengths_nm = {800.0};
  small.grid.n_kpar = 32;
  small.grid.n_kperp = 16;
  const auto r1 = run_pump_dump(small, {1, false});
  const auto r2 = run_pump_dump(small, {1, false});
  const auto r3 = run_pump_dump(small, {2, false});
  bool same = r1.summary == r2.summary && r1.summary == r3.summary && r1.files.size() == r3.files.size();
  for (std::size_t i = 0; same && i < r1.files.size(); ++i)
    same = r1.files[i].content == r2.files[i].content && r1.files[i].content == r3.files[i].content;
  d += std::string("; byte-identical ") + (same ? "yes" : "no");

  report(10, parity && round && positive && quad < 1e-10 && refine && same, d, t.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg = argc > 1 ? load_config(argv[1]) : parse_config("");
  const auto mol = MolecularData::build(cfg.molecule);
  criterion_1();
  criterion_2(mol);
  criterion_3();
  criterion_4(mol);
  criterion_5(cfg);
  criterion_6(cfg);
  criterion_7(cfg);
  criterion_8(cfg);
  criterion_9(cfg);
  criterion_10(cfg, mol);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
