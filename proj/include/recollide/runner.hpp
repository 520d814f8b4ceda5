#pragma once

#include <map>
#include <string>
#include <vector>

#include "recollide/freescatter.hpp"
#include "recollide/sfa.hpp"

namespace recollide {

enum class Scenario { PumpDump, Bichromatic, TwoColor, FieldFree, Coincidence };

Scenario parse_scenario(const std::string& name);
const char* scenario_name(Scenario s);

struct FieldBlock {
  double e0 = 0.065;
  double wavelength_nm = 800.0;
  double omega = 0.0;  // au; overrides wavelength_nm when positive
  FieldMode mode = FieldMode::Monochromatic;
  double delta_omega = 0.0135;
  double rel_phase = 0.0;
  int n_cycles = 1;

  double carrier() const;
  LaserField build() const;
  LaserField build(double omega, int n_cycles, FieldMode mode) const;
};

struct PumpDumpBlock {
  std::vector<double> wavelengths_nm{800.0, 1200.0, 1530.0, 1850.0};
  int level = 0;
  int event = 0;
};

struct BichromaticBlock {
  int phase_points = 32;
  int event = 0;
};

struct TwoColorBlock {
  int phase_points = 32;
  int reference_cycles = 1;
  int cycles = 11;
  int extended_cycles = 13;  // 0: skipped
};

struct FieldFreeBlock {
  std::vector<double> tau_d_fs;  // empty: 0 plus the travel times of wavelengths_nm
  std::vector<double> wavelengths_nm{800.0, 1200.0, 1530.0, 1850.0};
  double birth_field = 0.065;
  WavePacketSpec lab{Frame::Lab};
  WavePacketSpec relative{};
  bool match_marginals = true;  // relative spec taken from the Lab marginals
  std::vector<cplx> neutral_coeffs{1.0};  // C_i over neutral levels 0, 1, ...
  int phase_points = 32;
  double phase_tau_fs = 0.0;  // 0: travel time at the [field] carrier
  bool compare_strong_field = true;
  FreeScatterGrid grid{};
};

struct CoincidenceBlock {
  int n_cycles = 5;
  int reference_cycles = 1;  // 0: skipped
  int level = 0;
  double e_d_ev = 6.0;
  double k_max = 2.5;
  int n_k = 121;
  double map_k_y = 0.0;
  double e_d_min_ev = 1.0;
  double e_d_max_ev = 10.0;
  int n_e_d = 181;
  double line_k_x = 1.0;
  double ring_photons = 16.0;
  int ring_points_per_photon = 20;
  int n_angle = 96;
};

struct RunConfig {
  std::string origin = "<config>";
  FieldBlock field;
  MolecularConfig molecule;
  ImpactModel impact;
  SpectrumGrid grid;
  double channel_cut = 1e-3;
  double event_cut = 1e-8;
  bool fast_periodic = true;
  double jsum_tolerance = 5e-3;
  PumpDumpBlock pump_dump;
  BichromaticBlock bichromatic;
  TwoColorBlock two_color;
  FieldFreeBlock field_free;
  CoincidenceBlock coincidence;
  std::string out_dir = ".";
  int precision = 10;
  // "section.key" -> line it was set on
  std::map<std::string, int> lines;

  // Every resolved value, one "section.key = value" per line, in a fixed order.
  std::string canonical() const;
  std::string hash() const;
  // Config error pointing at the line of `key` when it was given.
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;
};

RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

// 64-bit FNV-1a, 16 hex digits.
std::string fnv1a_hex(const std::string& data);

struct RunOptions {
  int threads = 1;
  bool dump_trajectories = false;
};

struct OutputFile {
  std::string name;
  std::string content;
};

struct ScenarioResult {
  std::vector<OutputFile> files;
  std::string summary;  // JSON
  bool converged = true;
  std::string convergence_note;
};

ScenarioResult run_scenario(Scenario s, const RunConfig& cfg, const RunOptions& opt = {});
ScenarioResult run_pump_dump(const RunConfig& cfg, const RunOptions& opt = {});
ScenarioResult run_bichromatic(const RunConfig& cfg, const RunOptions& opt = {});
ScenarioResult run_two_color(const RunConfig& cfg, const RunOptions& opt = {});
ScenarioResult run_field_free(const RunConfig& cfg, const RunOptions& opt = {});
ScenarioResult run_coincidence(const RunConfig& cfg, const RunOptions& opt = {});

// Writes every file plus <scenario>_summary.json into dir (created if missing).
void write_outputs(const ScenarioResult& r, Scenario s, const std::string& dir);

// Least-squares w = A + B cos(phi + phi0) with B >= 0.
struct CosineFit {
  double a = 0.0;
  double b = 0.0;
  double phi0 = 0.0;
  double r2 = 0.0;

  double contrast() const { return b / a; }
};

CosineFit fit_cosine(const std::vector<double>& phi, const std::vector<double>& w);
std::vector<double> normalized_to_mean(const std::vector<double>& w);
double pearson(const std::vector<double>& a, const std::vector<double>& b);

// Principal maxima of a sampled profile: each is the largest value within +-0.4 period and above
// 1e-3 of the global maximum. Spacing is the least-squares slope of the refined peak positions;
// visibility the mean (p - v) / (p + v) over neighbouring peaks, p the lower peak, v the valley.
struct PeakComb {
  std::vector<double> positions;
  double spacing = 0.0;  // 0 with fewer than three peaks
  double visibility = 0.0;
};

PeakComb analyze_comb(const std::vector<double>& x, const std::vector<double>& y, double period);

}  // namespace recollide
