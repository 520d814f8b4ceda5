#include "recollide/molstruct.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace recollide {

PotentialCurve PotentialCurve::morse(double depth, double r_eq, double width, double asymptote) {
  if (!(depth > 0.0) || !(r_eq > 0.0) || !(width > 0.0))
    throw Error(ErrorCode::InvalidArgument, "Morse parameters must be positive");
  PotentialCurve c;
  c.kind_ = Kind::AnalyticMorse;
  c.p_[0] = depth;
  c.p_[1] = r_eq;
  c.p_[2] = width;
  c.shift_ = asymptote;
  return c;
}

PotentialCurve PotentialCurve::repulsive(double amplitude, double decay_length, double asymptote) {
  if (!(amplitude > 0.0) || !(decay_length > 0.0))
    throw Error(ErrorCode::InvalidArgument, "repulsive-curve parameters must be positive");
  PotentialCurve c;
  c.kind_ = Kind::AnalyticRepulsive;
  c.p_[0] = amplitude;
  c.p_[1] = decay_length;
  c.shift_ = asymptote;
  return c;
}

PotentialCurve PotentialCurve::tabulated(std::vector<double> r, std::vector<double> v) {
  if (r.size() != v.size() || r.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "potential table needs at least two (R, V) rows");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "potential table R values must be strictly increasing");
  const std::size_t n = r.size();
  std::vector<double> delta(n - 1), m(n);
  for (std::size_t k = 0; k + 1 < n; ++k) delta[k] = (v[k + 1] - v[k]) / (r[k + 1] - r[k]);
  m[0] = delta[0];
  m[n - 1] = delta[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) {
      m[k] = 0.0;
      continue;
    }
    const double h0 = r[k] - r[k - 1];
    const double h1 = r[k + 1] - r[k];
    const double w1 = 2.0 * h1 + h0;
    const double w2 = h1 + 2.0 * h0;
    m[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
  }
  PotentialCurve c;
  c.kind_ = Kind::Tabulated;
  c.tr_ = std::move(r);
  c.tv_ = std::move(v);
  c.tm_ = std::move(m);
  return c;
}

PotentialCurve PotentialCurve::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open potential table '" + path + "'");
  std::vector<double> r, v;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ss(line);
    double a, b;
    if (!(ss >> a)) continue;
    if (!(ss >> b))
      throw Error(ErrorCode::InvalidArgument,
                  path + ":" + std::to_string(lineno) + ": expected two columns (R V)");
    r.push_back(a);
    v.push_back(b);
  }
  return tabulated(std::move(r), std::move(v));
}

double PotentialCurve::operator()(double r) const {
  switch (kind_) {
    case Kind::AnalyticMorse: {
      const double e = 1.0 - std::exp(-p_[2] * (r - p_[1]));
      return shift_ - p_[0] + p_[0] * e * e;
    }
    case Kind::AnalyticRepulsive:
      return shift_ + p_[0] * std::exp(-r / p_[1]);
    case Kind::Tabulated: {
      if (r >= tr_.back()) return shift_ + tv_.back();
      if (r <= tr_.front()) return shift_ + tv_.front() + tm_.front() * (r - tr_.front());
      const auto it = std::upper_bound(tr_.begin(), tr_.end(), r);
      const std::size_t k = static_cast<std::size_t>(it - tr_.begin()) - 1;
      const double h = tr_[k + 1] - tr_[k];
      const double t = (r - tr_[k]) / h;
      const double t2 = t * t, t3 = t2 * t;
      return shift_ + (2 * t3 - 3 * t2 + 1) * tv_[k] + (t3 - 2 * t2 + t) * h * tm_[k] +
             (-2 * t3 + 3 * t2) * tv_[k + 1] + (t3 - t2) * h * tm_[k + 1];
    }
  }
  return 0.0;
}

double PotentialCurve::asymptote() const {
  if (kind_ == Kind::Tabulated) return shift_ + tv_.back();
  return shift_;
}

PotentialCurve PotentialCurve::shifted(double dv) const {
  PotentialCurve c = *this;
  c.shift_ += dv;
  return c;
}

namespace {

struct Numerov {
  std::vector<double> veff;  // 2*mu*V + J(J+1)/R^2
  double h = 0.0;
  double mu = 0.0;

  Numerov(const PotentialCurve& curve, int j, const RadialGrid& grid, double reduced_mass)
      : veff(grid.n), h(grid.step()), mu(reduced_mass) {
    const double cent = j * (j + 1.0);
    for (int i = 0; i < grid.n; ++i) {
      const double r = grid.r(i);
      veff[i] = 2.0 * mu * curve(r) + cent / (r * r);
    }
  }
  double g(int i, double e) const { return 2.0 * mu * e - veff[i]; }
  double f(int i, double e) const { return 1.0 + h * h / 12.0 * g(i, e); }

  int count_nodes(double e) const {
    const int n = static_cast<int>(veff.size());
    double u0 = 0.0, u1 = 1e-20;
    double f0 = f(0, e), f1 = f(1, e);
    int nodes = 0;
    for (int i = 1; i + 1 < n; ++i) {
      const double f2 = f(i + 1, e);
      const double u2 = ((12.0 - 10.0 * f1) * u1 - f0 * u0) / f2;
      if ((u2 < 0.0) != (u1 < 0.0) && u2 != 0.0) ++nodes;
      u0 = u1;
      u1 = u2;
      if (std::abs(u1) > 1e150) {
        u0 *= 1e-150;
        u1 *= 1e-150;
      }
      f0 = f1;
      f1 = f2;
    }
    return nodes;
  }

  // Outward solution from index 0 up to and including `last`.
  std::vector<double> outward(double e, int last, double seed) const {
    std::vector<double> u(last + 1, 0.0);
    if (last >= 1) u[1] = seed;
    double f0 = f(0, e), f1 = f(1, e);
    for (int i = 1; i < last; ++i) {
      const double f2 = f(i + 1, e);
      u[i + 1] = ((12.0 - 10.0 * f1) * u[i] - f0 * u[i - 1]) / f2;
      if (std::abs(u[i + 1]) > 1e150)
        for (int k = 0; k <= i + 1; ++k) u[k] *= 1e-150;
      f0 = f1;
      f1 = f2;
    }
    return u;
  }
};

}  // namespace

std::vector<VibrationalState> solve_bound(const PotentialCurve& curve, int j,
                                          const RadialGrid& grid, double reduced_mass,
                                          int max_states) {
  if (grid.n < 16 || !(grid.r_max > grid.r_min) || !(grid.r_min > 0.0))
    throw Error(ErrorCode::InvalidArgument, "invalid radial grid");
  const Numerov nm(curve, j, grid, reduced_mass);
  const int n = grid.n;
  const double two_mu = 2.0 * reduced_mass;
  const double ceiling = std::min(nm.veff.front(), nm.veff.back()) / two_mu;
  const double floor_e = *std::min_element(nm.veff.begin(), nm.veff.end()) / two_mu;

  int n_states = nm.count_nodes(ceiling);
  if (n_states == 0) throw Error(ErrorCode::NoBoundStates, "potential well supports no bound state");
  {
    const Numerov fine(curve, j, grid.refined(2), reduced_mass);
    if (fine.count_nodes(ceiling) != n_states)
      throw Error(ErrorCode::GridTooCoarse, "bound-state count changes under 2x grid refinement");
  }
  if (max_states > 0) n_states = std::min(n_states, max_states);

  std::vector<VibrationalState> states;
  states.reserve(n_states);
  const double h = grid.step();
  for (int v = 0; v < n_states; ++v) {
    double lo = floor_e, hi = ceiling;
    if (!states.empty()) lo = states.back().energy;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (nm.count_nodes(mid) > v)
        hi = mid;
      else
        lo = mid;
    }
    const double e = 0.5 * (lo + hi);

    // Outer classical turning point.
    int turn = n - 2;
    while (turn > 1 && nm.g(turn, e) < 0.0) --turn;
    turn = std::max(turn, 2);
    // Start the inward solution where the WKB decay exponent from the turning point reaches 40.
    int start = n - 1;
    double kappa_sum = 0.0;
    for (int i = turn + 1; i < n; ++i) {
      const double gi = nm.g(i, e);
      if (gi < 0.0) kappa_sum += std::sqrt(-gi) * h;
      if (kappa_sum > 40.0) {
        start = i;
        break;
      }
    }
    std::vector<double> u = nm.outward(e, turn, 1e-20);
    std::vector<double> w(start + 1, 0.0);
    w[start] = 0.0;
    w[start - 1] = 1e-20;
    for (int i = start - 1; i > turn; --i) {
      w[i - 1] = ((12.0 - 10.0 * nm.f(i, e)) * w[i] - nm.f(i + 1, e) * w[i + 1]) / nm.f(i - 1, e);
      if (std::abs(w[i - 1]) > 1e150)
        for (int k = i - 1; k <= start; ++k) w[k] *= 1e-150;
    }
    const double scale = u[turn] / w[turn];
    std::vector<double> chi(n, 0.0);
    for (int i = 0; i <= turn; ++i) chi[i] = u[i];
    for (int i = turn + 1; i <= start; ++i) chi[i] = w[i] * scale;

    const double norm = overlap(chi, chi, h);
    const double inv = 1.0 / std::sqrt(norm);
    // Positive lobe near the inner turning point.
    double peak = 0.0;
    for (double x : chi) peak = std::max(peak, std::abs(x));
    double first = 0.0;
    for (int i = 0; i < n && first == 0.0; ++i)
      if (std::abs(chi[i]) > 1e-3 * peak) first = chi[i];
    const double sgn = first < 0.0 ? -1.0 : 1.0;
    for (double& x : chi) x *= inv * sgn;

    int nodes = 0;
    for (int i = 1; i < n; ++i)
      if ((chi[i] < 0.0) != (chi[i - 1] < 0.0) && chi[i] != 0.0 && chi[i - 1] != 0.0) ++nodes;
    if (nodes != v)
      throw Error(ErrorCode::GridTooCoarse, "eigenfunction node count does not match its index");
    states.push_back({v, j, e, grid, std::move(chi)});
  }
  return states;
}

ContinuumState solve_continuum(const PotentialCurve& curve, double energy, int j,
                               const RadialGrid& grid, double reduced_mass) {
  if (!(energy > 0.0))
    throw Error(ErrorCode::EnergyBelowAsymptote, "continuum energy must lie above the asymptote");
  const PotentialCurve rel = curve.shifted(-curve.asymptote());
  const Numerov nm(rel, j, grid, reduced_mass);
  ContinuumState st;
  st.energy = energy;
  st.j = j;
  st.grid = grid;
  st.radial = nm.outward(energy, grid.n - 1, 1e-30);

  const int n = grid.n;
  const int first = n - 1 - std::max(2, n / 10);
  const double k = std::sqrt(2.0 * reduced_mass * energy);
  double acc = 0.0;
  int cnt = 0;
  for (int i = first; i + 1 < n; ++i) {
    const double fi = nm.f(i, energy);
    const double c = (6.0 - 5.0 * fi) / fi;
    const double s2 = 1.0 - c * c;
    const double u0 = st.radial[i], u1 = st.radial[i + 1];
    const double amp = std::sqrt((u0 * u0 + u1 * u1 - 2.0 * c * u0 * u1) / s2);
    acc += amp * std::sqrt(std::sqrt(nm.g(i, energy)) / k);
    ++cnt;
  }
  const double target = std::sqrt(2.0 * reduced_mass / (kPi * k));
  const double scale = target / (acc / cnt);
  for (double& x : st.radial) x *= scale;
  return st;
}

std::vector<double> asymptotic_amplitudes(const ContinuumState& state, const PotentialCurve& curve,
                                          double reduced_mass, double fraction) {
  const PotentialCurve rel = curve.shifted(-curve.asymptote());
  const Numerov nm(rel, state.j, state.grid, reduced_mass);
  const int n = state.grid.n;
  const int first = n - 1 - std::max(2, static_cast<int>(n * fraction));
  const double k = std::sqrt(2.0 * reduced_mass * state.energy);
  std::vector<double> out;
  for (int i = first; i + 1 < n; ++i) {
    const double fi = nm.f(i, state.energy);
    const double c = (6.0 - 5.0 * fi) / fi;
    const double u0 = state.radial[i], u1 = state.radial[i + 1];
    const double amp = std::sqrt((u0 * u0 + u1 * u1 - 2.0 * c * u0 * u1) / (1.0 - c * c));
    out.push_back(amp * std::sqrt(std::sqrt(nm.g(i, state.energy)) / k));
  }
  return out;
}

double overlap(const std::vector<double>& a, const std::vector<double>& b, double h) {
  const std::size_t n = std::min(a.size(), b.size());
  if (n == 0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  s -= 0.5 * a[0] * b[0];
  if (a.size() == b.size()) s -= 0.5 * a[n - 1] * b[n - 1];
  return s * h;
}

double franck_condon(const VibrationalState& a, const VibrationalState& b) {
  if (!(a.grid == b.grid)) throw Error(ErrorCode::GridMismatch, "states live on different grids");
  return overlap(a.radial, b.radial, a.grid.step());
}

PotentialCurve CurveSpec::build() const {
  if (kind == "morse") return PotentialCurve::morse(p1, p2, p3, asymptote);
  if (kind == "repulsive") return PotentialCurve::repulsive(p1, p2, asymptote);
  if (kind == "table") return PotentialCurve::from_file(table);
  throw Error(ErrorCode::InvalidArgument, "unknown curve kind '" + kind + "'");
}

namespace {

void check_asymptote(const PotentialCurve& c, const RadialGrid& g, const char* name) {
  if (c.kind() == PotentialCurve::Kind::Tabulated) return;
  if (std::abs(c(g.r_max) - c.asymptote()) > 1e-6)
    throw Error(ErrorCode::InvalidArgument,
                std::string(name) + " curve has not reached its asymptote at the grid edge");
}

double curve_minimum(const PotentialCurve& c, const RadialGrid& g) {
  if (c.kind() == PotentialCurve::Kind::AnalyticMorse) return c.r_eq();
  double best = g.r_min, vbest = c(g.r_min);
  for (int i = 1; i < g.n; ++i)
    if (c(g.r(i)) < vbest) {
      vbest = c(g.r(i));
      best = g.r(i);
    }
  return best;
}

}  // namespace

MolecularData MolecularData::build(const MolecularConfig& config) {
  if (!(config.reduced_mass > 0.0))
    throw Error(ErrorCode::InvalidArgument, "reduced mass must be positive");
  if (config.n_neutral < 1)
    throw Error(ErrorCode::InvalidArgument, "at least one neutral vibrational state is needed");
  MolecularData m;
  m.grid_ = config.grid;
  m.mu_ = config.reduced_mass;
  m.ion_g_curve_ = config.ion_g.build();
  m.ion_u_curve_ = config.ion_u.build();
  PotentialCurve neutral = config.neutral.build();
  check_asymptote(m.ion_g_curve_, m.grid_, "Sigma_g");
  check_asymptote(m.ion_u_curve_, m.grid_, "Sigma_u");

  // Place the neutral so that the vertical gap at its equilibrium equals vertical_ip.
  const double r0 = curve_minimum(neutral, m.grid_);
  const double shift = m.ion_g_curve_(r0) - config.vertical_ip - neutral(r0);
  m.neutral_curve_ = neutral.shifted(shift);

  m.ion_bound_ = solve_bound(m.ion_g_curve_, 0, m.grid_, m.mu_);
  m.neutral_ = solve_bound(m.neutral_curve_, 0, m.grid_, m.mu_, config.n_neutral);
  if (m.n_neutral() < config.n_neutral)
    throw Error(ErrorCode::NoBoundStates, "neutral curve supports fewer states than requested");
  m.fc_.assign(m.neutral_.size(), std::vector<double>(m.ion_bound_.size()));
  for (std::size_t i = 0; i < m.neutral_.size(); ++i)
    for (std::size_t n = 0; n < m.ion_bound_.size(); ++n)
      m.fc_[i][n] = franck_condon(m.ion_bound_[n], m.neutral_[i]);
  return m;
}

double MolecularData::fc_sum(int i) const {
  double s = 0.0;
  for (double f : fc_[i]) s += f * f;
  return s;
}

double classical_bond_length(const MolecularData& mol, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "time must be non-negative");
  const auto& g = mol.d2_ground();
  double r = 0.0;
  for (int i = 0; i < g.grid.n; ++i) r += g.grid.r(i) * g.radial[i] * g.radial[i];
  r *= g.grid.step();
  const PotentialCurve& v = mol.ion_g_curve();
  const double mu = mol.reduced_mass();
  auto accel = [&](double x) {
    const double h = 1e-5;
    return -(v(x + h) - v(x - h)) / (2.0 * h * mu);
  };
  const int steps = std::max(1, static_cast<int>(std::ceil(t / 0.25)));
  const double dt = t / steps;
  double p = 0.0;  // velocity
  for (int i = 0; i < steps; ++i) {
    const double k1x = p, k1v = accel(r);
    const double k2x = p + 0.5 * dt * k1v, k2v = accel(r + 0.5 * dt * k1x);
    const double k3x = p + 0.5 * dt * k2v, k3v = accel(r + 0.5 * dt * k2x);
    const double k4x = p + dt * k3v, k4v = accel(r + dt * k3x);
    r += dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    p += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  return r;
}

double classical_release_energy(const MolecularData& mol, double t) {
  return mol.ion_u_curve()(classical_bond_length(mol, t)) - mol.u_asymptote();
}

}  // namespace recollide
