#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "recollide/runner.hpp"

namespace recollide {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

// Thrown by value parsers; the caller adds the location.
struct BadValue {
  std::string message;
};

double to_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (s.empty() || r.ec != std::errc() || r.ptr != end || !std::isfinite(v))
    throw BadValue{"expected a number, got '" + s + "'"};
  return v;
}

int to_int(const std::string& s) {
  int v = 0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (s.empty() || r.ec != std::errc() || r.ptr != end)
    throw BadValue{"expected an integer, got '" + s + "'"};
  return v;
}

double positive(const std::string& s) {
  const double v = to_double(s);
  if (!(v > 0.0)) throw BadValue{"must be positive"};
  return v;
}

double non_negative(const std::string& s) {
  const double v = to_double(s);
  if (!(v >= 0.0)) throw BadValue{"must not be negative"};
  return v;
}

int at_least(const std::string& s, int lo) {
  const int v = to_int(s);
  if (v < lo) throw BadValue{"must be at least " + std::to_string(lo)};
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw BadValue{"expected true or false, got '" + s + "'"};
}

std::vector<double> positive_list(const std::string& s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (const auto& item : split(s, ',')) out.push_back(positive(item));
  return out;
}

std::vector<double> non_negative_list(const std::string& s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (const auto& item : split(s, ',')) out.push_back(non_negative(item));
  return out;
}

std::vector<cplx> complex_list(const std::string& s) {
  // "re[:im], re[:im], ..."
  std::vector<cplx> out;
  for (const auto& item : split(s, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1)
      out.emplace_back(to_double(parts[0]), 0.0);
    else if (parts.size() == 2)
      out.emplace_back(to_double(parts[0]), to_double(parts[1]));
    else
      throw BadValue{"expected re or re:im, got '" + item + "'"};
  }
  return out;
}

CurveSpec curve(const std::string& s) {
  const auto w = words(s);
  if (w.empty()) throw BadValue{"empty curve"};
  CurveSpec c;
  c.kind = w[0];
  if (c.kind == "morse") {
    if (w.size() != 5) throw BadValue{"morse takes depth r_eq width asymptote"};
    c.p1 = positive(w[1]);
    c.p2 = positive(w[2]);
    c.p3 = positive(w[3]);
    c.asymptote = to_double(w[4]);
  } else if (c.kind == "repulsive") {
    if (w.size() != 4) throw BadValue{"repulsive takes amplitude decay_length asymptote"};
    c.p1 = positive(w[1]);
    c.p2 = positive(w[2]);
    c.asymptote = to_double(w[3]);
  } else if (c.kind == "table") {
    if (w.size() != 2) throw BadValue{"table takes one path"};
    c.table = w[1];
  } else {
    throw BadValue{"unknown curve kind '" + c.kind + "' (morse, repulsive, table)"};
  }
  return c;
}

std::string curve_text(const CurveSpec& c) {
  char buf[160];
  if (c.kind == "morse")
    std::snprintf(buf, sizeof buf, "morse %.17g %.17g %.17g %.17g", c.p1, c.p2, c.p3, c.asymptote);
  else if (c.kind == "repulsive")
    std::snprintf(buf, sizeof buf, "repulsive %.17g %.17g %.17g", c.p1, c.p2, c.asymptote);
  else
    return "table " + c.table;
  return buf;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;
using Schema = std::map<std::string, std::map<std::string, Setter>>;

const Schema& schema() {
  static const Schema s = [] {
    Schema m;
    auto& f = m["field"];
    f["e0"] = [](RunConfig& c, const std::string& v) { c.field.e0 = positive(v); };
    f["wavelength_nm"] = [](RunConfig& c, const std::string& v) { c.field.wavelength_nm = positive(v); };
    f["omega"] = [](RunConfig& c, const std::string& v) { c.field.omega = positive(v); };
    f["mode"] = [](RunConfig& c, const std::string& v) {
      if (v == "monochromatic")
        c.field.mode = FieldMode::Monochromatic;
      else if (v == "two_color")
        c.field.mode = FieldMode::TwoColor;
      else
        throw BadValue{"expected monochromatic or two_color, got '" + v + "'"};
    };
    f["delta_omega"] = [](RunConfig& c, const std::string& v) { c.field.delta_omega = non_negative(v); };
    f["rel_phase"] = [](RunConfig& c, const std::string& v) { c.field.rel_phase = to_double(v); };
    f["n_cycles"] = [](RunConfig& c, const std::string& v) { c.field.n_cycles = at_least(v, 1); };

    auto& mo = m["molecule"];
    mo["r_min"] = [](RunConfig& c, const std::string& v) { c.molecule.grid.r_min = positive(v); };
    mo["r_max"] = [](RunConfig& c, const std::string& v) { c.molecule.grid.r_max = positive(v); };
    mo["grid_points"] = [](RunConfig& c, const std::string& v) { c.molecule.grid.n = at_least(v, 100); };
    mo["reduced_mass"] = [](RunConfig& c, const std::string& v) { c.molecule.reduced_mass = positive(v); };
    mo["vertical_ip"] = [](RunConfig& c, const std::string& v) { c.molecule.vertical_ip = positive(v); };
    mo["n_neutral"] = [](RunConfig& c, const std::string& v) { c.molecule.n_neutral = at_least(v, 1); };
    mo["neutral"] = [](RunConfig& c, const std::string& v) { c.molecule.neutral = curve(v); };
    mo["ion_g"] = [](RunConfig& c, const std::string& v) { c.molecule.ion_g = curve(v); };
    mo["ion_u"] = [](RunConfig& c, const std::string& v) { c.molecule.ion_u = curve(v); };

    auto& im = m["impact"];
    im["orbital_decay"] = [](RunConfig& c, const std::string& v) { c.impact.orbital_decay = positive(v); };
    im["coupling_norm"] = [](RunConfig& c, const std::string& v) { c.impact.coupling_norm = positive(v); };
    im["j_max"] = [](RunConfig& c, const std::string& v) { c.impact.j_max = at_least(v, 1); };
    im["q_min"] = [](RunConfig& c, const std::string& v) { c.impact.q_min = positive(v); };

    auto& g = m["grid"];
    g["e_max_ev"] = [](RunConfig& c, const std::string& v) {
      c.grid.e_max = units::ev_to_au(positive(v));
      c.field_free.grid.e_max = c.grid.e_max;
    };
    g["n_e"] = [](RunConfig& c, const std::string& v) {
      c.grid.n_e = at_least(v, 2);
      c.field_free.grid.n_e = c.grid.n_e;
    };
    g["kpar_max"] = [](RunConfig& c, const std::string& v) { c.grid.kpar_max = positive(v); };
    g["n_kpar"] = [](RunConfig& c, const std::string& v) { c.grid.n_kpar = at_least(v, 2); };
    g["kperp_max"] = [](RunConfig& c, const std::string& v) { c.grid.kperp_max = positive(v); };
    g["n_kperp"] = [](RunConfig& c, const std::string& v) { c.grid.n_kperp = at_least(v, 1); };
    g["auto_extend"] = [](RunConfig& c, const std::string& v) { c.grid.auto_extend = to_bool(v); };
    g["channel_cut"] = [](RunConfig& c, const std::string& v) { c.channel_cut = non_negative(v); };
    g["event_cut"] = [](RunConfig& c, const std::string& v) { c.event_cut = non_negative(v); };
    g["fast_periodic"] = [](RunConfig& c, const std::string& v) { c.fast_periodic = to_bool(v); };
    g["jsum_tolerance"] = [](RunConfig& c, const std::string& v) { c.jsum_tolerance = positive(v); };

    auto& pd = m["pump_dump"];
    pd["wavelengths_nm"] = [](RunConfig& c, const std::string& v) { c.pump_dump.wavelengths_nm = positive_list(v); };
    pd["level"] = [](RunConfig& c, const std::string& v) { c.pump_dump.level = at_least(v, 0); };
    pd["event"] = [](RunConfig& c, const std::string& v) { c.pump_dump.event = at_least(v, 0); };

    auto& bi = m["bichromatic"];
    bi["phase_points"] = [](RunConfig& c, const std::string& v) { c.bichromatic.phase_points = at_least(v, 4); };
    bi["event"] = [](RunConfig& c, const std::string& v) { c.bichromatic.event = at_least(v, 0); };

    auto& tc = m["two_color"];
    tc["phase_points"] = [](RunConfig& c, const std::string& v) { c.two_color.phase_points = at_least(v, 4); };
    tc["reference_cycles"] = [](RunConfig& c, const std::string& v) { c.two_color.reference_cycles = at_least(v, 1); };
    tc["cycles"] = [](RunConfig& c, const std::string& v) { c.two_color.cycles = at_least(v, 1); };
    tc["extended_cycles"] = [](RunConfig& c, const std::string& v) { c.two_color.extended_cycles = at_least(v, 0); };

    auto& ff = m["field_free"];
    ff["tau_d_fs"] = [](RunConfig& c, const std::string& v) { c.field_free.tau_d_fs = non_negative_list(v); };
    ff["wavelengths_nm"] = [](RunConfig& c, const std::string& v) { c.field_free.wavelengths_nm = positive_list(v); };
    ff["birth_field"] = [](RunConfig& c, const std::string& v) { c.field_free.birth_field = positive(v); };
    ff["p0"] = [](RunConfig& c, const std::string& v) { c.field_free.lab.p0 = to_double(v); };
    ff["dp"] = [](RunConfig& c, const std::string& v) { c.field_free.lab.dp = positive(v); };
    ff["P0"] = [](RunConfig& c, const std::string& v) { c.field_free.lab.P0 = to_double(v); };
    ff["dP"] = [](RunConfig& c, const std::string& v) { c.field_free.lab.dP = positive(v); };
    ff["k0"] = [](RunConfig& c, const std::string& v) { c.field_free.relative.k0 = to_double(v); };
    ff["dk"] = [](RunConfig& c, const std::string& v) { c.field_free.relative.dk = positive(v); };
    ff["K0"] = [](RunConfig& c, const std::string& v) { c.field_free.relative.K0 = to_double(v); };
    ff["dK"] = [](RunConfig& c, const std::string& v) { c.field_free.relative.dK = positive(v); };
    ff["match_marginals"] = [](RunConfig& c, const std::string& v) { c.field_free.match_marginals = to_bool(v); };
    ff["phase_points"] = [](RunConfig& c, const std::string& v) { c.field_free.phase_points = at_least(v, 4); };
    ff["phase_tau_fs"] = [](RunConfig& c, const std::string& v) { c.field_free.phase_tau_fs = non_negative(v); };
    ff["compare_strong_field"] = [](RunConfig& c, const std::string& v) { c.field_free.compare_strong_field = to_bool(v); };
    ff["k_max"] = [](RunConfig& c, const std::string& v) { c.field_free.grid.k_max = non_negative(v); };
    ff["n_k"] = [](RunConfig& c, const std::string& v) { c.field_free.grid.n_k = at_least(v, 2); };
    ff["n_mu"] = [](RunConfig& c, const std::string& v) { c.field_free.grid.n_mu = at_least(v, 2); };
    ff["cut_sigma"] = [](RunConfig& c, const std::string& v) { c.field_free.grid.cut_sigma = positive(v); };
    ff["neutral_coeffs"] = [](RunConfig& c, const std::string& v) { c.field_free.neutral_coeffs = complex_list(v); };

    auto& co = m["coincidence"];
    co["n_cycles"] = [](RunConfig& c, const std::string& v) { c.coincidence.n_cycles = at_least(v, 1); };
    co["reference_cycles"] = [](RunConfig& c, const std::string& v) { c.coincidence.reference_cycles = at_least(v, 0); };
    co["level"] = [](RunConfig& c, const std::string& v) { c.coincidence.level = at_least(v, 0); };
    co["e_d_ev"] = [](RunConfig& c, const std::string& v) { c.coincidence.e_d_ev = positive(v); };
    co["k_max"] = [](RunConfig& c, const std::string& v) { c.coincidence.k_max = positive(v); };
    co["n_k"] = [](RunConfig& c, const std::string& v) { c.coincidence.n_k = at_least(v, 2); };
    co["map_k_y"] = [](RunConfig& c, const std::string& v) { c.coincidence.map_k_y = to_double(v); };
    co["e_d_min_ev"] = [](RunConfig& c, const std::string& v) { c.coincidence.e_d_min_ev = positive(v); };
    co["e_d_max_ev"] = [](RunConfig& c, const std::string& v) { c.coincidence.e_d_max_ev = positive(v); };
    co["n_e_d"] = [](RunConfig& c, const std::string& v) { c.coincidence.n_e_d = at_least(v, 2); };
    co["line_k_x"] = [](RunConfig& c, const std::string& v) { c.coincidence.line_k_x = to_double(v); };
    co["ring_photons"] = [](RunConfig& c, const std::string& v) { c.coincidence.ring_photons = positive(v); };
    co["ring_points_per_photon"] = [](RunConfig& c, const std::string& v) { c.coincidence.ring_points_per_photon = at_least(v, 4); };
    co["n_angle"] = [](RunConfig& c, const std::string& v) { c.coincidence.n_angle = at_least(v, 2); };

    auto& out = m["output"];
    out["dir"] = [](RunConfig& c, const std::string& v) {
      if (v.empty()) throw BadValue{"empty directory"};
      c.out_dir = v;
    };
    out["precision"] = [](RunConfig& c, const std::string& v) {
      c.precision = at_least(v, 3);
      if (c.precision > 17) throw BadValue{"must be at most 17"};
    };
    return m;
  }();
  return s;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string list_text(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + g17(v[i]);
  return s;
}

std::string complex_text(const std::vector<cplx>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? ", " : "") + g17(v[i].real()) + ":" + g17(v[i].imag());
  return s;
}

// Cross-field checks, run once all keys are in.
void check(const RunConfig& c) {
  if (c.lines.count("field.omega") && c.lines.count("field.wavelength_nm"))
    c.fail("field.omega", "give either omega or wavelength_nm, not both");
  if (c.field.mode == FieldMode::TwoColor && !(c.field.delta_omega < c.field.carrier()))
    c.fail("field.delta_omega", "delta_omega must be below the carrier frequency");
  if (!(c.molecule.grid.r_min < c.molecule.grid.r_max)) c.fail("molecule.r_max", "r_max must exceed r_min");
  if (!(c.coincidence.e_d_min_ev < c.coincidence.e_d_max_ev))
    c.fail("coincidence.e_d_max_ev", "e_d_max_ev must exceed e_d_min_ev");
  const double ed_top = 0.5 * units::au_to_ev(c.grid.e_max);
  if (c.coincidence.e_d_max_ev > ed_top) c.fail("coincidence.e_d_max_ev", "beyond half of [grid] e_max_ev");
  if (c.coincidence.e_d_ev > ed_top) c.fail("coincidence.e_d_ev", "beyond half of [grid] e_max_ev");
  if (c.pump_dump.level >= c.molecule.n_neutral) c.fail("pump_dump.level", "level exceeds n_neutral - 1");
  if (c.coincidence.level >= c.molecule.n_neutral) c.fail("coincidence.level", "level exceeds n_neutral - 1");
  if (c.molecule.n_neutral < 2) c.fail("molecule.n_neutral", "the phase scans need two neutral levels");
  if (static_cast<int>(c.field_free.neutral_coeffs.size()) > c.molecule.n_neutral)
    c.fail("field_free.neutral_coeffs", "more coefficients than neutral levels");
  double norm = 0.0;
  for (const auto& a : c.field_free.neutral_coeffs) norm += std::norm(a);
  if (!(norm > 0.0)) c.fail("field_free.neutral_coeffs", "coefficients have zero norm");
  if (c.two_color.extended_cycles != 0 && c.two_color.extended_cycles <= c.two_color.cycles)
    c.fail("two_color.extended_cycles", "extended_cycles must exceed cycles (or be 0)");
  try {
    c.impact.validate();
    c.grid.validate();
    c.field_free.grid.validate();
    c.field_free.lab.validate();
    c.field_free.relative.validate();
  } catch (const Error& e) {
    c.fail("", e.what());
  }
}

}  // namespace

double FieldBlock::carrier() const {
  return omega > 0.0 ? omega : units::omega_from_wavelength_nm(wavelength_nm);
}

LaserField FieldBlock::build() const { return build(carrier(), n_cycles, mode); }

LaserField FieldBlock::build(double w, int cycles, FieldMode m) const {
  if (m == FieldMode::TwoColor) return LaserField::two_color(e0, w, delta_omega, cycles, rel_phase);
  return LaserField::monochromatic(e0, w, cycles);
}

void RunConfig::fail(const std::string& key, const std::string& message) const {
  const auto it = lines.find(key);
  if (it != lines.end())
    throw Error(ErrorCode::Config, origin + ":" + std::to_string(it->second) + ": " + message);
  throw Error(ErrorCode::Config, origin + ": " + message);
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig c;
  c.origin = origin;
  auto at = [&](int line, const std::string& msg) -> Error {
    return Error(ErrorCode::Config, origin + ":" + std::to_string(line) + ": " + msg);
  };
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw at(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!schema().count(section)) throw at(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw at(line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (section.empty()) throw at(line, "key '" + key + "' outside any section");
    const auto& keys = schema().at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) throw at(line, "unknown key '" + key + "' in [" + section + "]");
    const std::string full = section + "." + key;
    if (c.lines.count(full))
      throw at(line, "duplicate key '" + key + "' (first set on line " +
                         std::to_string(c.lines.at(full)) + ")");
    try {
      it->second(c, value);
    } catch (const BadValue& e) {
      throw at(line, key + ": " + e.message);
    }
    c.lines[full] = line;
  }
  check(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunConfig::canonical() const {
  std::ostringstream o;
  auto kv = [&](const std::string& k, const std::string& v) { o << k << " = " << v << "\n"; };
  kv("field.e0", g17(field.e0));
  kv("field.omega", g17(field.carrier()));
  kv("field.mode", field.mode == FieldMode::TwoColor ? "two_color" : "monochromatic");
  kv("field.delta_omega", g17(field.delta_omega));
  kv("field.rel_phase", g17(field.rel_phase));
  kv("field.n_cycles", std::to_string(field.n_cycles));
  kv("molecule.r_min", g17(molecule.grid.r_min));
  kv("molecule.r_max", g17(molecule.grid.r_max));
  kv("molecule.grid_points", std::to_string(molecule.grid.n));
  kv("molecule.reduced_mass", g17(molecule.reduced_mass));
  kv("molecule.vertical_ip", g17(molecule.vertical_ip));
  kv("molecule.n_neutral", std::to_string(molecule.n_neutral));
  kv("molecule.neutral", curve_text(molecule.neutral));
  kv("molecule.ion_g", curve_text(molecule.ion_g));
  kv("molecule.ion_u", curve_text(molecule.ion_u));
  kv("impact.orbital_decay", g17(impact.orbital_decay));
  kv("impact.coupling_norm", g17(impact.coupling_norm));
  kv("impact.j_max", std::to_string(impact.j_max));
  kv("impact.q_min", g17(impact.q_min));
  kv("grid.e_max", g17(grid.e_max));
  kv("grid.n_e", std::to_string(grid.n_e));
  kv("grid.kpar_max", g17(grid.kpar_max));
  kv("grid.n_kpar", std::to_string(grid.n_kpar));
  kv("grid.kperp_max", g17(grid.kperp_max));
  kv("grid.n_kperp", std::to_string(grid.n_kperp));
  kv("grid.auto_extend", grid.auto_extend ? "true" : "false");
  kv("grid.channel_cut", g17(channel_cut));
  kv("grid.event_cut", g17(event_cut));
  kv("grid.fast_periodic", fast_periodic ? "true" : "false");
  kv("grid.jsum_tolerance", g17(jsum_tolerance));
  kv("pump_dump.wavelengths_nm", list_text(pump_dump.wavelengths_nm));
  kv("pump_dump.level", std::to_string(pump_dump.level));
  kv("pump_dump.event", std::to_string(pump_dump.event));
  kv("bichromatic.phase_points", std::to_string(bichromatic.phase_points));
  kv("bichromatic.event", std::to_string(bichromatic.event));
  kv("two_color.phase_points", std::to_string(two_color.phase_points));
  kv("two_color.reference_cycles", std::to_string(two_color.reference_cycles));
  kv("two_color.cycles", std::to_string(two_color.cycles));
  kv("two_color.extended_cycles", std::to_string(two_color.extended_cycles));
  const auto& ff = field_free;
  kv("field_free.tau_d_fs", list_text(ff.tau_d_fs));
  kv("field_free.wavelengths_nm", list_text(ff.wavelengths_nm));
  kv("field_free.birth_field", g17(ff.birth_field));
  kv("field_free.lab", g17(ff.lab.p0) + " " + g17(ff.lab.dp) + " " + g17(ff.lab.P0) + " " + g17(ff.lab.dP));
  kv("field_free.relative",
     g17(ff.relative.k0) + " " + g17(ff.relative.dk) + " " + g17(ff.relative.K0) + " " + g17(ff.relative.dK));
  kv("field_free.neutral_coeffs", complex_text(ff.neutral_coeffs));
  kv("field_free.match_marginals", ff.match_marginals ? "true" : "false");
  kv("field_free.phase_points", std::to_string(ff.phase_points));
  kv("field_free.phase_tau_fs", g17(ff.phase_tau_fs));
  kv("field_free.compare_strong_field", ff.compare_strong_field ? "true" : "false");
  kv("field_free.grid", g17(ff.grid.k_max) + " " + std::to_string(ff.grid.n_k) + " " +
                            std::to_string(ff.grid.n_mu) + " " + g17(ff.grid.cut_sigma));
  const auto& co = coincidence;
  kv("coincidence.n_cycles", std::to_string(co.n_cycles));
  kv("coincidence.reference_cycles", std::to_string(co.reference_cycles));
  kv("coincidence.level", std::to_string(co.level));
  kv("coincidence.e_d_ev", g17(co.e_d_ev));
  kv("coincidence.k_max", g17(co.k_max));
  kv("coincidence.n_k", std::to_string(co.n_k));
  kv("coincidence.map_k_y", g17(co.map_k_y));
  kv("coincidence.e_d_range", g17(co.e_d_min_ev) + " " + g17(co.e_d_max_ev) + " " + std::to_string(co.n_e_d));
  kv("coincidence.line_k_x", g17(co.line_k_x));
  kv("coincidence.ring", g17(co.ring_photons) + " " + std::to_string(co.ring_points_per_photon) + " " +
                             std::to_string(co.n_angle));
  kv("output.precision", std::to_string(precision));
  return o.str();
}

std::string RunConfig::hash() const { return fnv1a_hex(canonical()); }

}  // namespace recollide
