#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "recollide/runner.hpp"

namespace recollide {

using json = nlohmann::ordered_json;

namespace {

// CSV with '#' metadata lines, one header row and numeric rows.
class Csv {
 public:
  Csv(const RunConfig& cfg, Scenario s) : precision_(cfg.precision) {
    meta("scenario", scenario_name(s));
    meta("config_hash", cfg.hash());
  }
  void meta(const std::string& key, const std::string& value) { head_ += "# " + key + " = " + value + "\n"; }
  void meta(const std::string& key, double value) { meta(key, num(value)); }
  void columns(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) head_ += (i ? "," : "") + names[i];
    head_ += "\n";
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) body_ += (i ? "," : "") + num(values[i]);
    body_ += "\n";
  }
  std::string text() const { return head_ + body_; }

 private:
  std::string num(double v) const {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", precision_, v);
    return buf;
  }
  int precision_;
  std::string head_, body_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double ev(double au) { return units::au_to_ev(au); }

// Tracks the J-sum convergence of every spectrum a scenario produces.
struct Convergence {
  explicit Convergence(double tol) : tolerance(tol) {}
  double tolerance;
  double worst = 0.0;
  std::string where;

  void add(const SpectrumResult& r, const std::string& label) {
    if (r.jsum_tail > worst) {
      worst = r.jsum_tail;
      where = label;
    }
  }
  bool ok() const { return worst <= tolerance; }
  void finish(ScenarioResult& out, json& summary) const {
    out.converged = ok();
    if (!ok())
      out.convergence_note = "J-sum not converged at j_max: highest partial wave carries " +
                             fmt("%.3g", worst) + " of W_T in " + where;
    summary["converged"] = ok();
    summary["worst_jsum_tail"] = worst;
  }
};

SfaOptions sfa_options(const RunConfig& cfg, const RunOptions& opt) {
  SfaOptions o;
  o.channel_cut = cfg.channel_cut;
  o.event_cut = cfg.event_cut;
  o.fast_periodic = cfg.fast_periodic;
  o.threads = opt.threads;
  return o;
}

void grid_meta(Csv& csv, const SpectrumGrid& g, const ImpactModel& m) {
  csv.meta("e_max_ev", ev(g.e_max));
  csv.meta("n_e", g.n_e);
  csv.meta("kpar_max", g.kpar_max);
  csv.meta("n_kpar", g.n_kpar);
  csv.meta("kperp_max", g.kperp_max);
  csv.meta("n_kperp", g.n_kperp);
  csv.meta("j_max", m.j_max);
}

json grid_json(const SpectrumGrid& g) {
  return {{"e_max_ev", ev(g.e_max)}, {"n_e", g.n_e},          {"kpar_max", g.kpar_max},
          {"n_kpar", g.n_kpar},      {"kperp_max", g.kperp_max}, {"n_kperp", g.n_kperp}};
}

// W_D per eV of D+ energy, so that the column integrates to W_T over E_D_eV.
double per_ev(double w_d) { return w_d / units::kHartreeEv; }

std::vector<double> phases(int n) {
  std::vector<double> phi;
  for (int i = 0; i < n; ++i) phi.push_back(2.0 * kPi * i / n);
  return phi;
}

std::vector<double> phase_scan(const GramSpectrum& g, const std::vector<double>& phi) {
  std::vector<double> w;
  for (double p : phi) w.push_back(total_yield(g, InitialSuperposition::two_level(p).on(g.members)));
  return w;
}

json fit_json(const CosineFit& f) {
  return {{"A", f.a}, {"B", f.b}, {"phi0", f.phi0}, {"R2", f.r2}, {"contrast", f.contrast()}};
}

void add_trajectories(ScenarioResult& out, const RunConfig& cfg, Scenario s, const SfaEngine& eng,
                      const std::vector<Vec3>& k_f, double e_rel) {
  Csv csv(cfg, s);
  csv.meta("e_rel_ev", ev(e_rel));
  csv.meta("branch", "0 short, 1 long");
  csv.columns({"k_f_x", "k_f_y", "k_f_z", "half_cycle", "branch", "t_b_fs", "t_c_fs", "travel_fs",
               "k0_x", "return_energy_ev"});
  for (const auto& k : k_f)
    for (const auto& t : eng.sample_trajectories(k, e_rel, 16))
      csv.row({k.x, k.y, k.z, double(t.half_cycle), t.branch == Branch::Short ? 0.0 : 1.0,
               units::au_to_fs(t.t_b), units::au_to_fs(t.t_c), units::au_to_fs(t.travel()), t.k0.x,
               ev(t.return_energy)});
  out.files.push_back({std::string(scenario_name(s)) + "_trajectories.csv", csv.text()});
}

std::string label_nm(double nm) { return fmt("%gnm", nm); }

}  // namespace

Scenario parse_scenario(const std::string& name) {
  for (Scenario s : {Scenario::PumpDump, Scenario::Bichromatic, Scenario::TwoColor,
                     Scenario::FieldFree, Scenario::Coincidence})
    if (name == scenario_name(s)) return s;
  throw Error(ErrorCode::Config,
              "unknown scenario '" + name +
                  "' (pump_dump, bichromatic, two_color, field_free, coincidence)");
}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::PumpDump: return "pump_dump";
    case Scenario::Bichromatic: return "bichromatic";
    case Scenario::TwoColor: return "two_color";
    case Scenario::FieldFree: return "field_free";
    case Scenario::Coincidence: return "coincidence";
  }
  return "?";
}

ScenarioResult run_scenario(Scenario s, const RunConfig& cfg, const RunOptions& opt) {
  if (opt.threads < 1) throw Error(ErrorCode::Config, "threads must be at least 1");
  switch (s) {
    case Scenario::PumpDump: return run_pump_dump(cfg, opt);
    case Scenario::Bichromatic: return run_bichromatic(cfg, opt);
    case Scenario::TwoColor: return run_two_color(cfg, opt);
    case Scenario::FieldFree: return run_field_free(cfg, opt);
    case Scenario::Coincidence: return run_coincidence(cfg, opt);
  }
  throw Error(ErrorCode::InvalidArgument, "bad scenario");
}

ScenarioResult run_pump_dump(const RunConfig& cfg, const RunOptions& opt) {
  const auto& pd = cfg.pump_dump;
  if (pd.wavelengths_nm.empty()) cfg.fail("pump_dump.wavelengths_nm", "wavelength list is empty");
  if (pd.event >= 2 * cfg.field.n_cycles)
    cfg.fail("pump_dump.event", "event index beyond the pulse (2 per cycle)");
  const auto mol = MolecularData::build(cfg.molecule);
  ScenarioResult out;
  Convergence conv{cfg.jsum_tolerance};
  json summary{{"scenario", "pump_dump"}, {"config_hash", cfg.hash()}};
  json rows = json::array();
  Csv peaks(cfg, Scenario::PumpDump);
  peaks.meta("level", pd.level);
  peaks.meta("event", pd.event);
  peaks.columns({"wavelength_nm", "tau_d_fs", "peak_E_D_eV", "classical_E_D_eV", "W_T_arb", "jsum_tail"});
  std::vector<double> peak_list;
  for (double nm : pd.wavelengths_nm) {
    const auto field = cfg.field.build(units::omega_from_wavelength_nm(nm), cfg.field.n_cycles,
                                       FieldMode::Monochromatic);
    SfaOptions o = sfa_options(cfg, opt);
    o.events = {pd.event};
    o.members = {pd.level};
    const SfaEngine eng(field, mol, cfg.impact, cfg.grid, o);
    const auto g = eng.run();
    const auto r = spectrum(g, InitialSuperposition::level(pd.level));
    conv.add(r, label_nm(nm));
    const double tau = dominant_travel_time(field, mol.i_p(0, pd.level));
    const double classical = 0.5 * classical_release_energy(mol, tau);

    Csv csv(cfg, Scenario::PumpDump);
    csv.meta("wavelength_nm", nm);
    csv.meta("level", pd.level);
    csv.meta("event", pd.event);
    grid_meta(csv, g.grid, cfg.impact);
    csv.meta("events_used", g.events_used);
    csv.meta("channels_used", g.channels_used);
    csv.meta("jsum_tail", r.jsum_tail);
    csv.meta("W_T", r.w_t);
    csv.columns({"E_D_eV", "W_D_arb"});
    for (std::size_t i = 0; i < r.e_d.size(); ++i) csv.row({ev(r.e_d[i]), per_ev(r.w_d[i])});
    out.files.push_back({"pump_dump_" + label_nm(nm) + ".csv", csv.text()});

    peaks.row({nm, units::au_to_fs(tau), ev(r.peak_e_d()), ev(classical), r.w_t, r.jsum_tail});
    peak_list.push_back(ev(r.peak_e_d()));
    rows.push_back({{"wavelength_nm", nm},
                    {"tau_d_fs", units::au_to_fs(tau)},
                    {"peak_E_D_eV", ev(r.peak_e_d())},
                    {"classical_E_D_eV", ev(classical)},
                    {"W_T", r.w_t},
                    {"jsum_tail", r.jsum_tail},
                    {"grid", grid_json(g.grid)}});
    if (opt.dump_trajectories && nm == pd.wavelengths_nm.front()) {
      const double k = std::sqrt(std::max(0.0, r.e_rel[r.peak_index()]));
      add_trajectories(out, cfg, Scenario::PumpDump, eng, {{k, 0.0, 0.0}, {0.5 * k, 0.5 * k, 0.0}},
                       r.e_rel[r.peak_index()]);
    }
  }
  out.files.push_back({"pump_dump_peaks.csv", peaks.text()});
  bool decreasing = true;
  for (std::size_t i = 1; i < peak_list.size(); ++i)
    if (!(peak_list[i] < peak_list[i - 1])) decreasing = false;
  summary["spectra"] = rows;
  summary["peaks_strictly_decreasing"] = decreasing;
  conv.finish(out, summary);
  out.summary = summary.dump(2);
  return out;
}

ScenarioResult run_bichromatic(const RunConfig& cfg, const RunOptions& opt) {
  const auto& bc = cfg.bichromatic;
  const auto field = cfg.field.build();
  if (bc.event >= 2 * field.n_cycles()) cfg.fail("bichromatic.event", "event index beyond the pulse");
  const auto mol = MolecularData::build(cfg.molecule);
  SfaOptions o = sfa_options(cfg, opt);
  o.events = {bc.event};
  const SfaEngine eng(field, mol, cfg.impact, cfg.grid, o);
  const auto g = eng.run();
  ScenarioResult out;
  Convergence conv{cfg.jsum_tolerance};

  const auto phi = phases(bc.phase_points);
  const auto w = phase_scan(g, phi);
  const auto norm = normalized_to_mean(w);
  const auto fit = fit_cosine(phi, w);
  Csv scan(cfg, Scenario::Bichromatic);
  grid_meta(scan, g.grid, cfg.impact);
  scan.meta("event", bc.event);
  scan.meta("fit", "W_T = A + B cos(phi + phi0)");
  scan.meta("A", fit.a);
  scan.meta("B", fit.b);
  scan.meta("phi0", fit.phi0);
  scan.meta("R2", fit.r2);
  scan.columns({"phi_rad", "W_T_arb", "W_T_norm"});
  for (std::size_t i = 0; i < phi.size(); ++i) scan.row({phi[i], w[i], norm[i]});

  const auto r0 = spectrum(g, InitialSuperposition::level(0));
  const auto r1 = spectrum(g, InitialSuperposition::level(1));
  const auto rp = spectrum(g, InitialSuperposition::two_level(0.0));
  const auto rm = spectrum(g, InitialSuperposition::two_level(kPi));
  conv.add(r0, "|0>");
  conv.add(r1, "|1>");
  conv.add(rp, "|+>");
  conv.add(rm, "|->");
  Csv spec(cfg, Scenario::Bichromatic);
  grid_meta(spec, g.grid, cfg.impact);
  spec.meta("event", bc.event);
  spec.meta("jsum_tail", std::max({r0.jsum_tail, r1.jsum_tail, rp.jsum_tail, rm.jsum_tail}));
  spec.columns({"E_D_eV", "W_D_0", "W_D_1", "W_D_plus", "W_D_minus"});
  for (std::size_t i = 0; i < r0.e_d.size(); ++i)
    spec.row({ev(r0.e_d[i]), per_ev(r0.w_d[i]), per_ev(r1.w_d[i]), per_ev(rp.w_d[i]), per_ev(rm.w_d[i])});
  // Main peak of the incoherent mixture, where |+> and |-> are compared.
  std::size_t main = 0;
  for (std::size_t i = 0; i < r0.w_d.size(); ++i)
    if (r0.w_d[i] + r1.w_d[i] > r0.w_d[main] + r1.w_d[main]) main = i;
  const double diff =
      std::abs(rp.w_d[main] - rm.w_d[main]) / std::max(rp.w_d[main], rm.w_d[main]);

  out.files.push_back({"bichromatic_scan.csv", scan.text()});
  out.files.push_back({"bichromatic_spectra.csv", spec.text()});
  if (opt.dump_trajectories) {
    const double e = r0.e_rel[r0.peak_index()];
    add_trajectories(out, cfg, Scenario::Bichromatic, eng, {{std::sqrt(e), 0.0, 0.0}}, e);
  }
  json summary{{"scenario", "bichromatic"},
               {"config_hash", cfg.hash()},
               {"grid", grid_json(g.grid)},
               {"fit", fit_json(fit)},
               {"W_T", {{"level0", r0.w_t}, {"level1", r1.w_t}, {"plus", rp.w_t}, {"minus", rm.w_t}}},
               {"peak_E_D_eV",
                {{"level0", ev(r0.peak_e_d())}, {"level1", ev(r1.peak_e_d())},
                 {"plus", ev(rp.peak_e_d())}, {"minus", ev(rm.peak_e_d())}}},
               {"main_peak_E_D_eV", ev(r0.e_d[main])},
               {"plus_minus_difference_at_main_peak", diff}};
  conv.finish(out, summary);
  out.summary = summary.dump(2);
  return out;
}

ScenarioResult run_two_color(const RunConfig& cfg, const RunOptions& opt) {
  const auto& tc = cfg.two_color;
  const auto mol = MolecularData::build(cfg.molecule);
  const auto phi = phases(tc.phase_points);
  const double w0 = cfg.field.carrier();
  struct Run {
    std::string name;
    LaserField field;
  };
  std::vector<Run> runs{
      {"mono_" + std::to_string(tc.reference_cycles), cfg.field.build(w0, tc.reference_cycles, FieldMode::Monochromatic)},
      {"mono_" + std::to_string(tc.cycles), cfg.field.build(w0, tc.cycles, FieldMode::Monochromatic)},
      {"two_color_" + std::to_string(tc.cycles), cfg.field.build(w0, tc.cycles, FieldMode::TwoColor)}};
  if (tc.extended_cycles > 0)
    runs.push_back({"two_color_" + std::to_string(tc.extended_cycles),
                    cfg.field.build(w0, tc.extended_cycles, FieldMode::TwoColor)});

  ScenarioResult out;
  Convergence conv{cfg.jsum_tolerance};
  json summary{{"scenario", "two_color"}, {"config_hash", cfg.hash()}, {"delta_omega", cfg.field.delta_omega}};
  json scans = json::object();
  std::vector<std::vector<double>> cols;
  std::vector<std::string> names{"phi_rad"};
  Csv csv(cfg, Scenario::TwoColor);
  std::vector<double> contrast;
  for (const auto& run : runs) {
    const SfaEngine eng(run.field, mol, cfg.impact, cfg.grid, sfa_options(cfg, opt));
    const auto g = eng.run();
    const auto norm = normalized_to_mean(phase_scan(g, phi));
    for (int lvl : {0, 1}) conv.add(spectrum(g, InitialSuperposition::level(lvl)), run.name);
    const auto fit = fit_cosine(phi, norm);
    contrast.push_back(fit.contrast());
    csv.meta(run.name + "_events_used", g.events_used);
    csv.meta(run.name + "_contrast", fit.contrast());
    scans[run.name] = {{"cycles", run.field.n_cycles()},
                       {"events_used", g.events_used},
                       {"fit", fit_json(fit)},
                       {"grid", grid_json(g.grid)}};
    cols.push_back(norm);
    names.push_back(run.name);
    if (opt.dump_trajectories && &run == &runs.front()) {
      const double e = cfg.grid.e_rel(cfg.grid.n_e / 4);
      add_trajectories(out, cfg, Scenario::TwoColor, eng, {{std::sqrt(e), 0.0, 0.0}}, e);
    }
  }
  grid_meta(csv, cfg.grid, cfg.impact);
  csv.meta("normalization", "each column divided by its phase average");
  csv.columns(names);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    std::vector<double> row{phi[i]};
    for (const auto& c : cols) row.push_back(c[i]);
    csv.row(row);
  }
  out.files.push_back({"two_color_scan.csv", csv.text()});
  summary["scans"] = scans;
  summary["mono_contrast_ratio"] = contrast[1] / contrast[0];
  summary["two_color_contrast_ratio"] = contrast[2] / contrast[0];
  if (contrast.size() > 3) summary["extension_contrast_ratio"] = contrast[3] / contrast[2];
  conv.finish(out, summary);
  out.summary = summary.dump(2);
  return out;
}

ScenarioResult run_field_free(const RunConfig& cfg, const RunOptions& opt) {
  const auto& ff = cfg.field_free;
  const auto mol = MolecularData::build(cfg.molecule);
  const double m_ion = ion_mass(mol);
  std::vector<double> taus = ff.tau_d_fs;
  if (taus.empty()) {
    taus.push_back(0.0);
    for (double nm : ff.wavelengths_nm) {
      const auto f = LaserField::monochromatic(ff.birth_field, units::omega_from_wavelength_nm(nm), 1);
      taus.push_back(units::au_to_fs(dominant_travel_time(f, mol.i_p(0, 0))));
    }
  }
  if (taus.empty()) cfg.fail("field_free.tau_d_fs", "no delays to evaluate");
  std::vector<int> states;
  for (std::size_t i = 0; i < ff.neutral_coeffs.size(); ++i) states.push_back(static_cast<int>(i));
  const InitialSuperposition psi(states, ff.neutral_coeffs);

  WavePacketSpec lab = ff.lab;
  lab.frame = Frame::Lab;
  WavePacketSpec rel = ff.match_marginals ? matched_relative(lab, m_ion) : ff.relative;
  rel.frame = Frame::RelativeCOM;
  const auto g_rel = FreeScatterEngine(mol, cfg.impact, ff.grid, rel, opt.threads).run();
  const auto g_lab = FreeScatterEngine(mol, cfg.impact, ff.grid, lab, opt.threads).run();

  ScenarioResult out;
  Convergence conv{cfg.jsum_tolerance};
  std::vector<SpectrumResult> rr, rl;
  for (double t : taus) {
    const auto a = vib_coeffs_recollision(mol, ff.birth_field, units::fs_to_au(t), psi);
    rr.push_back(yields(g_rel, a));
    rl.push_back(yields(g_lab, a));
    conv.add(rr.back(), "relative tau_d " + fmt("%g fs", t));
    conv.add(rl.back(), "lab tau_d " + fmt("%g fs", t));
  }
  auto free_meta = [&](Csv& csv) {
    csv.meta("e_max_ev", ev(ff.grid.e_max));
    csv.meta("n_e", ff.grid.n_e);
    csv.meta("k_max", g_rel.k_max);
    csv.meta("n_k", ff.grid.n_k);
    csv.meta("n_mu", ff.grid.n_mu);
    csv.meta("j_max", cfg.impact.j_max);
    csv.meta("lab_packet", fmt("p0 %g", lab.p0) + fmt(" dp %g", lab.dp) + fmt(" P0 %g", lab.P0) + fmt(" dP %g", lab.dP));
    csv.meta("relative_packet", fmt("k0 %g", rel.k0) + fmt(" dk %g", rel.dk) + fmt(" K0 %g", rel.K0) + fmt(" dK %g", rel.dK));
  };

  Csv spectra(cfg, Scenario::FieldFree);
  free_meta(spectra);
  std::vector<std::string> names{"E_D_eV"};
  for (double t : taus) {
    names.push_back("relative_" + fmt("%.4g", t) + "fs");
    names.push_back("lab_" + fmt("%.4g", t) + "fs");
  }
  spectra.columns(names);
  for (std::size_t i = 0; i < rr[0].e_d.size(); ++i) {
    std::vector<double> row{ev(rr[0].e_d[i])};
    for (std::size_t k = 0; k < taus.size(); ++k) {
      row.push_back(per_ev(rr[k].w_d[i]));
      row.push_back(per_ev(rl[k].w_d[i]));
    }
    spectra.row(row);
  }
  out.files.push_back({"field_free_spectra.csv", spectra.text()});

  Csv peaks(cfg, Scenario::FieldFree);
  free_meta(peaks);
  peaks.columns({"tau_d_fs", "peak_E_D_relative_eV", "peak_E_D_lab_eV", "peak_cell_relative",
                 "peak_cell_lab", "height_relative", "height_lab", "W_T_relative", "W_T_lab"});
  json rows = json::array();
  int worst_cells = 0;
  bool rising_rel = true, rising_lab = true;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    const int ir = rr[k].peak_index(), il = rl[k].peak_index();
    worst_cells = std::max(worst_cells, std::abs(ir - il));
    const double hr = per_ev(rr[k].w_d[ir]), hl = per_ev(rl[k].w_d[il]);
    if (k > 0) {
      rising_rel = rising_rel && hr > per_ev(rr[k - 1].w_d[rr[k - 1].peak_index()]);
      rising_lab = rising_lab && hl > per_ev(rl[k - 1].w_d[rl[k - 1].peak_index()]);
    }
    peaks.row({taus[k], ev(rr[k].peak_e_d()), ev(rl[k].peak_e_d()), double(ir), double(il), hr, hl,
               rr[k].w_t, rl[k].w_t});
    rows.push_back({{"tau_d_fs", taus[k]},
                    {"peak_E_D_relative_eV", ev(rr[k].peak_e_d())},
                    {"peak_E_D_lab_eV", ev(rl[k].peak_e_d())},
                    {"height_relative", hr},
                    {"height_lab", hl},
                    {"W_T_relative", rr[k].w_t},
                    {"W_T_lab", rl[k].w_t}});
  }
  out.files.push_back({"field_free_peaks.csv", peaks.text()});

  json summary{{"scenario", "field_free"},
               {"config_hash", cfg.hash()},
               {"grid", {{"e_max_ev", ev(ff.grid.e_max)}, {"n_e", ff.grid.n_e}, {"k_max", g_rel.k_max},
                         {"n_k", ff.grid.n_k}, {"n_mu", ff.grid.n_mu}}},
               {"spectra", rows},
               {"max_peak_cell_difference", worst_cells},
               {"height_increases_with_tau_relative", rising_rel},
               {"height_increases_with_tau_lab", rising_lab}};

  // Phase scan of (|0> + e^{i phi}|1>) / sqrt 2 at one delay.
  const auto field = cfg.field.build(cfg.field.carrier(), 1, FieldMode::Monochromatic);
  const double tau_fs = ff.phase_tau_fs > 0.0
                            ? ff.phase_tau_fs
                            : units::au_to_fs(dominant_travel_time(field, mol.i_p(0, 0)));
  const auto phi = phases(ff.phase_points);
  std::vector<double> wr, wl;
  for (double p : phi) {
    const auto a = vib_coeffs_recollision(mol, ff.birth_field, units::fs_to_au(tau_fs),
                                          InitialSuperposition::two_level(p));
    wr.push_back(yields(g_rel, a).w_t);
    wl.push_back(yields(g_lab, a).w_t);
  }
  const auto nr = normalized_to_mean(wr), nl = normalized_to_mean(wl);
  std::vector<double> ns;
  Csv scan(cfg, Scenario::FieldFree);
  free_meta(scan);
  scan.meta("tau_d_fs", tau_fs);
  std::vector<std::string> scan_names{"phi_rad", "W_T_relative_norm", "W_T_lab_norm"};
  summary["phase_scan"] = {{"tau_d_fs", tau_fs},
                           {"fit_relative", fit_json(fit_cosine(phi, nr))},
                           {"fit_lab", fit_json(fit_cosine(phi, nl))}};
  if (ff.compare_strong_field) {
    SfaOptions o = sfa_options(cfg, opt);
    o.events = {0};
    const auto g = SfaEngine(field, mol, cfg.impact, cfg.grid, o).run();
    ns = normalized_to_mean(phase_scan(g, phi));
    scan_names.push_back("W_T_strong_field_norm");
    summary["phase_scan"]["pearson_relative_vs_strong_field"] = pearson(nr, ns);
    summary["phase_scan"]["pearson_lab_vs_strong_field"] = pearson(nl, ns);
    summary["phase_scan"]["fit_strong_field"] = fit_json(fit_cosine(phi, ns));
    scan.meta("strong_field_pearson_relative", pearson(nr, ns));
  }
  scan.columns(scan_names);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    std::vector<double> row{phi[i], nr[i], nl[i]};
    if (!ns.empty()) row.push_back(ns[i]);
    scan.row(row);
  }
  out.files.push_back({"field_free_phase.csv", scan.text()});
  conv.finish(out, summary);
  out.summary = summary.dump(2);
  return out;
}

ScenarioResult run_coincidence(const RunConfig& cfg, const RunOptions& opt) {
  const auto& co = cfg.coincidence;
  const auto mol = MolecularData::build(cfg.molecule);
  if (co.level >= mol.n_neutral()) cfg.fail("coincidence.level", "level not bound");
  const auto psi = InitialSuperposition::level(co.level);
  const double w = cfg.field.carrier();
  const double e_d = units::ev_to_au(co.e_d_ev);
  const auto engine = [&](int cycles) {
    return SfaEngine(cfg.field.build(w, cycles, FieldMode::Monochromatic), mol, cfg.impact, cfg.grid,
                     sfa_options(cfg, opt));
  };
  const SfaEngine eng = engine(co.n_cycles);
  ScenarioResult out;
  auto meta = [&](Csv& csv, int cycles) {
    csv.meta("n_cycles", cycles);
    csv.meta("level", co.level);
    csv.meta("omega_au", w);
    csv.meta("j_max", cfg.impact.j_max);
    csv.meta("k_f_z", 0.0);
  };

  CoincidenceSlice plane;
  plane.kind = CoincidenceSlice::Kind::MomentumPlane;
  plane.e_d = e_d;
  plane.k_max = co.k_max;
  plane.n_k = co.n_k;
  const auto m1 = eng.coincidence_map(psi, plane);
  Csv c1(cfg, Scenario::Coincidence);
  meta(c1, co.n_cycles);
  c1.meta("E_D_eV", co.e_d_ev);
  c1.columns({"k_x", "k_y", "density"});
  for (std::size_t iy = 0; iy < m1.y.size(); ++iy)
    for (std::size_t ix = 0; ix < m1.x.size(); ++ix)
      c1.row({m1.x[ix], m1.y[iy], m1.density[iy * m1.x.size() + ix]});
  out.files.push_back({"coincidence_kx_ky.csv", c1.text()});

  CoincidenceSlice em;
  em.kind = CoincidenceSlice::Kind::EnergyMomentum;
  em.k_max = co.k_max;
  em.n_k = co.n_k;
  em.k_y = co.map_k_y;
  em.e_d_min = units::ev_to_au(co.e_d_min_ev);
  em.e_d_max = units::ev_to_au(co.e_d_max_ev);
  em.n_e_d = co.n_e_d;
  const auto m2 = eng.coincidence_map(psi, em);
  Csv c2(cfg, Scenario::Coincidence);
  meta(c2, co.n_cycles);
  c2.meta("k_y", co.map_k_y);
  c2.columns({"k_x", "E_D_eV", "density"});
  for (std::size_t iy = 0; iy < m2.y.size(); ++iy)
    for (std::size_t ix = 0; ix < m2.x.size(); ++ix)
      c2.row({m2.x[ix], ev(m2.y[iy]), m2.density[iy * m2.x.size() + ix]});
  out.files.push_back({"coincidence_ed_kx.csv", c2.text()});

  // D+ energy line at fixed k_f = (line_k_x, map_k_y, 0).
  CoincidenceSlice line = em;
  line.n_k = 2;
  line.k_max = std::max(std::abs(co.line_k_x), 1e-6);
  const auto m3 = eng.coincidence_map(psi, line);
  const std::size_t col = co.line_k_x < 0.0 ? 0 : 1;
  std::vector<double> ed_w, ed_line;
  for (std::size_t iy = 0; iy < m3.y.size(); ++iy) {
    ed_w.push_back(m3.y[iy] / w);
    ed_line.push_back(m3.density[iy * 2 + col]);
  }
  const auto ati = analyze_comb(ed_w, ed_line, 0.5);
  Csv c3(cfg, Scenario::Coincidence);
  meta(c3, co.n_cycles);
  c3.meta("k_x", co.line_k_x);
  c3.meta("k_y", co.map_k_y);
  c3.meta("peak_spacing_photons", ati.spacing);
  c3.meta("visibility", ati.visibility);
  c3.columns({"E_D_eV", "E_D_over_omega", "density"});
  for (std::size_t i = 0; i < ed_line.size(); ++i) c3.row({ev(m3.y[i]), ed_w[i], ed_line[i]});
  out.files.push_back({"coincidence_ed_line.csv", c3.text()});

  // Angle-integrated electron-energy profile at fixed E_D.
  std::vector<double> ee, k;
  const int n_ring = static_cast<int>(std::lround((co.ring_photons - 0.5) * co.ring_points_per_photon)) + 1;
  for (int i = 0; i < n_ring; ++i) {
    ee.push_back(0.5 + static_cast<double>(i) / co.ring_points_per_photon);
    k.push_back(std::sqrt(2.0 * ee.back() * w));
  }
  const auto ring = eng.ring_profile(psi, e_d, k, co.n_angle);
  const auto comb = analyze_comb(ee, ring, 1.0);
  std::vector<double> ref;
  PeakComb ref_comb;
  if (co.reference_cycles > 0) {
    ref = engine(co.reference_cycles).ring_profile(psi, e_d, k, co.n_angle);
    ref_comb = analyze_comb(ee, ref, 1.0);
  }
  Csv c4(cfg, Scenario::Coincidence);
  meta(c4, co.n_cycles);
  c4.meta("reference_cycles", co.reference_cycles);
  c4.meta("E_D_eV", co.e_d_ev);
  c4.meta("ring_spacing_photons", comb.spacing);
  c4.meta("ring_visibility", comb.visibility);
  if (!ref.empty()) c4.meta("reference_visibility", ref_comb.visibility);
  std::vector<std::string> names{"E_e_eV", "E_e_over_omega", "density"};
  if (!ref.empty()) names.push_back("density_reference");
  c4.columns(names);
  for (std::size_t i = 0; i < ring.size(); ++i) {
    std::vector<double> row{ev(ee[i] * w), ee[i], ring[i]};
    if (!ref.empty()) row.push_back(ref[i]);
    c4.row(row);
  }
  out.files.push_back({"coincidence_rings.csv", c4.text()});
  if (opt.dump_trajectories) {
    const auto top = std::max_element(ring.begin(), ring.end()) - ring.begin();
    add_trajectories(out, cfg, Scenario::Coincidence, eng, {{k[top], 0.0, 0.0}, {0.0, k[top], 0.0}}, 2.0 * e_d);
  }

  json summary{{"scenario", "coincidence"},
               {"config_hash", cfg.hash()},
               {"grid", grid_json(eng.grid())},
               {"n_cycles", co.n_cycles},
               {"E_D_eV", co.e_d_ev},
               {"omega_au", w},
               {"rings",
                {{"peaks", comb.positions.size()},
                 {"spacing_photons", comb.spacing},
                 {"visibility", comb.visibility}}},
               {"ati_along_E_D",
                {{"k_x", co.line_k_x},
                 {"k_y", co.map_k_y},
                 {"peaks", ati.positions.size()},
                 {"spacing_photons", ati.spacing},
                 {"visibility", ati.visibility}}}};
  if (!ref.empty())
    summary["reference"] = {{"n_cycles", co.reference_cycles},
                            {"peaks", ref_comb.positions.size()},
                            {"spacing_photons", ref_comb.spacing},
                            {"visibility", ref_comb.visibility}};
  summary["converged"] = true;
  out.summary = summary.dump(2);
  return out;
}

void write_outputs(const ScenarioResult& r, Scenario s, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Config, dir + ": cannot create output directory");
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw Error(ErrorCode::Config, (fs::path(dir) / name).string() + ": cannot write");
    f << text;
  };
  for (const auto& f : r.files) put(f.name, f.content);
  put(std::string(scenario_name(s)) + "_summary.json", r.summary + "\n");
}

}  // namespace recollide
