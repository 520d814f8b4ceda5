#include "recollide/sfa.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace recollide {

InitialSuperposition::InitialSuperposition(std::vector<int> states, std::vector<cplx> coeffs)
    : states_(std::move(states)), coeffs_(std::move(coeffs)) {
  if (states_.empty() || states_.size() != coeffs_.size())
    throw Error(ErrorCode::InvalidArgument, "superposition needs one coefficient per level");
  double norm = 0.0;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (states_[i] < 0) throw Error(ErrorCode::InvalidArgument, "negative vibrational index");
    for (std::size_t j = 0; j < i; ++j)
      if (states_[j] == states_[i])
        throw Error(ErrorCode::InvalidArgument, "repeated level in superposition");
    norm += std::norm(coeffs_[i]);
  }
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw Error(ErrorCode::InvalidArgument, "superposition has zero norm");
  const double s = 1.0 / std::sqrt(norm);
  for (auto& c : coeffs_) c *= s;
}

InitialSuperposition InitialSuperposition::level(int nu) { return {{nu}, {1.0}}; }

InitialSuperposition InitialSuperposition::two_level(double phi) {
  return {{0, 1}, {1.0, std::polar(1.0, phi)}};
}

std::vector<cplx> InitialSuperposition::on(const std::vector<int>& members) const {
  std::vector<cplx> c(members.size(), 0.0);
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const auto it = std::find(members.begin(), members.end(), states_[i]);
    if (it == members.end())
      throw Error(ErrorCode::InvalidArgument, "level " + std::to_string(states_[i]) +
                                                  " is not among the computed members");
    c[it - members.begin()] = coeffs_[i];
  }
  return c;
}

double ionization_prefactor(double i_p, double e_at_birth) {
  const double e = std::abs(e_at_birth);
  if (!(e > 0.0)) throw Error(ErrorCode::ZeroField, "no tunneling in a vanishing field");
  if (!(i_p > 0.0)) throw Error(ErrorCode::InvalidArgument, "ionization potential must be positive");
  return std::sqrt(kPi) * std::pow(2.0 / (i_p * e * e), 0.25) *
         std::exp(-std::pow(2.0 * i_p, 1.5) / (3.0 * e));
}

cplx spreading_prefactor(double travel, double min_travel) {
  if (!(travel > 0.0) || !(travel > min_travel))
    throw Error(ErrorCode::TravelTooShort, "excursion shorter than the minimal travel time");
  return std::polar(std::pow(2.0 * kPi / travel, 1.5), -0.75 * kPi);
}

void SpectrumGrid::validate() const {
  if (!(e_max > 0.0) || n_e < 1) throw Error(ErrorCode::InvalidArgument, "bad energy grid");
  if (!(kpar_max > 0.0) || !(kperp_max > 0.0) || n_kpar < 2 || n_kperp < 1)
    throw Error(ErrorCode::InvalidArgument, "bad momentum grid");
}

std::vector<double> SpectrumGrid::energies() const {
  std::vector<double> e(n_e);
  for (int i = 0; i < n_e; ++i) e[i] = e_rel(i);
  return e;
}

SpectrumGrid SpectrumGrid::fitted(const LaserField& field) const {
  SpectrumGrid g = *this;
  if (!auto_extend) return g;
  const double alpha = field.e0() / field.omega();
  const double pmax = std::sqrt(2.0 * max_return_energy_factor() * ponderomotive(field));
  g.kpar_max = std::max(kpar_max, 1.05 * (alpha + pmax));
  g.kperp_max = std::max(kperp_max, 1.05 * pmax);
  return g;
}

cplx GramSpectrum::at(const std::vector<cplx>& g, int ie, int ij, int a, int b) const {
  const std::size_t m = members.size();
  return g[((static_cast<std::size_t>(ie) * partial_waves.size() + ij) * m + a) * m + b];
}

int SpectrumResult::peak_index() const {
  return static_cast<int>(std::max_element(w_d.begin(), w_d.end()) - w_d.begin());
}

double SpectrumResult::peak_e_d() const {
  const int i = peak_index();
  if (i == 0 || i + 1 >= static_cast<int>(w_d.size())) return e_d[i];
  // Parabola through the three samples around the maximum.
  const double a = w_d[i - 1], b = w_d[i], c = w_d[i + 1];
  const double den = a - 2 * b + c;
  const double shift = den < 0.0 ? 0.5 * (a - c) / den : 0.0;
  return e_d[i] + shift * (e_d[i + 1] - e_d[i]);
}

SpectrumResult spectrum(const GramSpectrum& g, const InitialSuperposition& psi,
                        bool branch_coherent) {
  const auto c = psi.on(g.members);
  const auto& gm = branch_coherent ? g.coherent : g.incoherent;
  const int ne = static_cast<int>(g.e_rel.size());
  const int nj = static_cast<int>(g.partial_waves.size());
  const int nm = static_cast<int>(g.members.size());
  const double de = g.grid.e_step();
  SpectrumResult r;
  r.e_rel = g.e_rel;
  r.w.assign(ne, 0.0);
  r.w_by_j.assign(nj, 0.0);
  for (int ie = 0; ie < ne; ++ie) {
    for (int ij = 0; ij < nj; ++ij) {
      double s = 0.0;
      for (int a = 0; a < nm; ++a)
        for (int b = 0; b < nm; ++b) s += (c[a] * std::conj(c[b]) * g.at(gm, ie, ij, a, b)).real();
      // A positive semidefinite form; clip rounding below zero.
      s = std::max(s, 0.0);
      r.w[ie] += s;
      r.w_by_j[ij] += s * de;
    }
    r.w_t += r.w[ie] * de;
  }
  r.e_d.resize(ne);
  r.w_d.resize(ne);
  for (int ie = 0; ie < ne; ++ie) {
    r.e_d[ie] = 0.5 * g.e_rel[ie];
    r.w_d[ie] = 2.0 * r.w[ie];
  }
  r.jsum_tail = r.w_t > 0.0 && nj > 0 ? r.w_by_j.back() / r.w_t : 0.0;
  return r;
}

double total_yield(const GramSpectrum& g, const std::vector<cplx>& c, bool branch_coherent) {
  const auto& gm = branch_coherent ? g.coherent : g.incoherent;
  const int nm = static_cast<int>(g.members.size());
  if (static_cast<int>(c.size()) != nm)
    throw Error(ErrorCode::InvalidArgument, "coefficient count does not match the members");
  double w = 0.0;
  for (std::size_t ie = 0; ie < g.e_rel.size(); ++ie)
    for (std::size_t ij = 0; ij < g.partial_waves.size(); ++ij) {
      double s = 0.0;
      for (int a = 0; a < nm; ++a)
        for (int b = 0; b < nm; ++b)
          s += (c[a] * std::conj(c[b]) * g.at(gm, ie, ij, a, b)).real();
      w += std::max(s, 0.0);
    }
  return w * g.grid.e_step();
}

SfaEngine::SfaEngine(const LaserField& field, const MolecularData& mol, const ImpactModel& model,
                     const SpectrumGrid& grid, const SfaOptions& options)
    : field_(field), mol_(&mol), model_(model), grid_(grid.fitted(field)), opt_(options) {
  model_.validate();
  grid_.validate();
  if (opt_.members.empty()) throw Error(ErrorCode::InvalidArgument, "no initial levels requested");
  for (int m : opt_.members)
    if (m < 0 || m >= mol.n_neutral())
      throw Error(ErrorCode::InvalidArgument, "initial level " + std::to_string(m) +
                                                  " was not computed");
  if (opt_.threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be at least 1");

  double fc_max = 0.0;
  for (int n = 0; n < mol.n_ion(); ++n)
    for (int m : opt_.members) fc_max = std::max(fc_max, std::abs(mol.fc(n, m)));
  for (int n = 0; n < mol.n_ion(); ++n) {
    double f = 0.0;
    for (int m : opt_.members) f = std::max(f, std::abs(mol.fc(n, m)));
    if (f >= opt_.channel_cut * fc_max) channels_.push_back(n);
  }

  const auto all = half_cycle_events(field);
  std::vector<HalfCycleEvent> chosen;
  if (opt_.events.empty()) {
    chosen = all;
  } else {
    for (int e : opt_.events) {
      if (e < 0 || e >= static_cast<int>(all.size()))
        throw Error(ErrorCode::InvalidArgument, "event index out of range");
      chosen.push_back(all[e]);
    }
  }
  periodic_ = opt_.fast_periodic && opt_.events.empty() &&
              field.mode() == FieldMode::Monochromatic && field.n_cycles() > 1;
  if (periodic_) {
    periods_ = field.n_cycles();
    chosen.resize(2);
  }

  // Drop events whose tunneling factor is negligible next to the strongest one.
  double ip_min = 1e300;
  for (int n : channels_)
    for (int m : opt_.members) ip_min = std::min(ip_min, mol.i_p(n, m));
  const double kappa = std::pow(2.0 * ip_min, 1.5) / 3.0;
  double emax = 0.0;
  for (const auto& e : chosen) emax = std::max(emax, std::abs(e.effective_e0));
  for (const auto& e : chosen) {
    const double f = std::abs(e.effective_e0);
    if (f == 0.0) continue;
    if (std::exp(-kappa / f + kappa / emax) >= opt_.event_cut) events_.push_back(e);
  }
  t_obs_ = field.duration() + field.period();
}

ImpactTable SfaEngine::make_table(const std::vector<double>& e_rel, double kf_max) const {
  double amax = 0.0;
  for (const auto& e : events_) amax = std::max(amax, std::abs(e.effective_e0) / field_.omega());
  return ImpactTable(model_, *mol_, e_rel, channels_, 1.01 * (amax + kf_max) + 0.05);
}

SfaEngine::Context SfaEngine::context(const ImpactTable& table,
                                      const VolkovIntegrator& volkov) const {
  Context c{&table, &volkov, {}};
  for (double e : table.energies()) c.e_total.push_back(mol_->total_energy(e));
  return c;
}

void SfaEngine::cell(double kpar, double kperp, const Context& ctx, std::vector<cplx>& acc) const {
  const ImpactTable& table = *ctx.table;
  const int ne = static_cast<int>(ctx.e_total.size());
  const int nj = static_cast<int>(table.partial_waves().size());
  const int nm = static_cast<int>(opt_.members.size());
  const Vec3 kf{kpar, kperp, 0.0};
  const double w = field_.omega();
  const double min_travel = kMinTravelCycles * field_.period();
  cplx vbuf[64];
  std::vector<double> ei(nm);
  for (int a = 0; a < nm; ++a) ei[a] = mol_->e_i(opt_.members[a]);
  std::vector<cplx> member(nm);

  for (const auto& ev : events_) {
    FinalStateSolver solver(field_, ev);
    solver.set_final_momentum(kpar, kperp);
    const double gmax = solver.max_deposit();
    if (!(gmax > 0.0)) continue;
    const LocalField& local = solver.local();
    for (std::size_t ic = 0; ic < channels_.size(); ++ic) {
      const int n = channels_[ic];
      const double en = mol_->e_n(n);
      for (int ie = 0; ie < ne; ++ie) {
        const double d = ctx.e_total[ie] - en;
        if (d > gmax) break;
        double us[8];
        const int nr = solver.solve(d, us, 8);
        for (int r = 0; r < nr; ++r) {
          const Trajectory t = solver.trajectory(us[r]);
          if (!(t.travel() > min_travel)) continue;
          const double sb = w * (t.t_b - ev.t_peak);
          const double eb = local.electric(t.t_b);
          if (eb == 0.0) continue;
          const double phase = total_phase(t, *ctx.volkov, local, kf, {ctx.e_total[ie], en, 0.0},
                                           t_obs_);
          const double temporal = (ev.effective_e0 > 0.0 ? 1.0 : -1.0) * std::cos(sb);
          const cplx base = std::polar(1.0, phase) * spreading_prefactor(t.travel()) * temporal;
          for (int a = 0; a < nm; ++a) {
            const int i = opt_.members[a];
            member[a] = mol_->fc(n, i) * ionization_prefactor(mol_->i_p(n, i), eb) *
                        std::polar(1.0, -ei[a] * t.t_b) * base;
          }
          table.elements(ie, static_cast<int>(ic), t.k0, kf, vbuf);
          const int br = t.branch == Branch::Short ? 0 : 1;
          cplx* out = &acc[((static_cast<std::size_t>(br) * ne + ie) * nj) * nm];
          for (int ij = 0; ij < nj; ++ij)
            for (int a = 0; a < nm; ++a) out[ij * nm + a] += member[a] * vbuf[ij];
        }
      }
    }
  }

  if (periodic_ && periods_ > 1) {
    // Later cycles are exact translates by one period.
    const double period = field_.period();
    const double up = ponderomotive(field_);
    for (int ie = 0; ie < ne; ++ie)
      for (int a = 0; a < nm; ++a) {
        const double x = period * (0.5 * kf.norm2() + up + ctx.e_total[ie] - ei[a]);
        cplx s = 0.0;
        for (int m = 0; m < periods_; ++m) s += std::polar(1.0, m * x);
        for (int br = 0; br < 2; ++br)
          for (int ij = 0; ij < nj; ++ij)
            acc[(((static_cast<std::size_t>(br) * ne + ie) * nj) + ij) * nm + a] *= s;
      }
  }
}

GramSpectrum SfaEngine::run() const {
  const auto e_rel = grid_.energies();
  const ImpactTable table = make_table(e_rel, std::hypot(grid_.kpar_max, grid_.kperp_max));
  const VolkovIntegrator volkov(field_, t_obs_);
  const Context ctx = context(table, volkov);

  const int ne = grid_.n_e;
  const int nj = static_cast<int>(table.partial_waves().size());
  const int nm = static_cast<int>(opt_.members.size());
  const std::size_t gsize = static_cast<std::size_t>(ne) * nj * nm * nm;
  const double dpar = 2.0 * grid_.kpar_max / grid_.n_kpar;
  const double dperp = grid_.kperp_max / grid_.n_kperp;

  // One chunk per k_par row; partial sums are reduced in row order.
  std::vector<std::vector<cplx>> coh(grid_.n_kpar), inc(grid_.n_kpar);
  std::atomic<int> next{0};
  auto worker = [&]() {
    std::vector<cplx> acc(2 * static_cast<std::size_t>(ne) * nj * nm);
    for (int row; (row = next.fetch_add(1)) < grid_.n_kpar;) {
      std::vector<cplx> c(gsize, 0.0), in(gsize, 0.0);
      const double kpar = -grid_.kpar_max + (row + 0.5) * dpar;
      for (int col = 0; col < grid_.n_kperp; ++col) {
        const double kperp = (col + 0.5) * dperp;
        const double wt = 2.0 * kPi * kperp * dpar * dperp;
        std::fill(acc.begin(), acc.end(), cplx(0.0));
        cell(kpar, kperp, ctx, acc);
        for (int ie = 0; ie < ne; ++ie)
          for (int ij = 0; ij < nj; ++ij) {
            const cplx* s = &acc[(static_cast<std::size_t>(ie) * nj + ij) * nm];
            const cplx* l = &acc[((static_cast<std::size_t>(ne) + ie) * nj + ij) * nm];
            cplx* gc = &c[(static_cast<std::size_t>(ie) * nj + ij) * nm * nm];
            cplx* gi = &in[(static_cast<std::size_t>(ie) * nj + ij) * nm * nm];
            for (int a = 0; a < nm; ++a)
              for (int b = 0; b < nm; ++b) {
                gc[a * nm + b] += wt * (s[a] + l[a]) * std::conj(s[b] + l[b]);
                gi[a * nm + b] += wt * (s[a] * std::conj(s[b]) + l[a] * std::conj(l[b]));
              }
          }
      }
      coh[row] = std::move(c);
      inc[row] = std::move(in);
    }
  };
  const int nt = std::min(opt_.threads, grid_.n_kpar);
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  GramSpectrum g;
  g.e_rel = e_rel;
  g.partial_waves = table.partial_waves();
  g.members = opt_.members;
  g.grid = grid_;
  g.coherent.assign(gsize, 0.0);
  g.incoherent.assign(gsize, 0.0);
  for (int row = 0; row < grid_.n_kpar; ++row)
    for (std::size_t k = 0; k < gsize; ++k) {
      g.coherent[k] += coh[row][k];
      g.incoherent[k] += inc[row][k];
    }
  g.events_used = static_cast<int>(events_.size()) * (periodic_ ? periods_ : 1);
  g.channels_used = static_cast<int>(channels_.size());
  return g;
}

std::vector<std::vector<cplx>> SfaEngine::amplitudes(const std::vector<Vec3>& k_f,
                                                     const std::vector<double>& e_rel) const {
  double kmax = 0.0;
  for (const auto& k : k_f) kmax = std::max(kmax, k.norm());
  const ImpactTable table = make_table(e_rel, kmax);
  const VolkovIntegrator volkov(field_, t_obs_);
  const Context ctx = context(table, volkov);
  const int ne = static_cast<int>(e_rel.size());
  const int nj = static_cast<int>(table.partial_waves().size());
  const int nm = static_cast<int>(opt_.members.size());

  std::vector<std::vector<cplx>> out(k_f.size() * ne * nj, std::vector<cplx>(nm));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    std::vector<cplx> acc(2 * static_cast<std::size_t>(ne) * nj * nm);
    for (std::size_t p; (p = next.fetch_add(1)) < k_f.size();) {
      std::fill(acc.begin(), acc.end(), cplx(0.0));
      cell(k_f[p].x, std::hypot(k_f[p].y, k_f[p].z), ctx, acc);
      for (int ie = 0; ie < ne; ++ie)
        for (int ij = 0; ij < nj; ++ij)
          for (int a = 0; a < nm; ++a)
            out[(p * ne + ie) * nj + ij][a] =
                acc[((static_cast<std::size_t>(ie)) * nj + ij) * nm + a] +
                acc[((static_cast<std::size_t>(ne) + ie) * nj + ij) * nm + a];
    }
  };
  const int nt = std::max(1, std::min<int>(opt_.threads, static_cast<int>(k_f.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

std::vector<Trajectory> SfaEngine::sample_trajectories(const Vec3& k_f, double e_rel, int n) const {
  std::vector<Trajectory> out;
  if (events_.empty()) return out;
  FinalStateSolver solver(field_, events_.front());
  solver.set_final_momentum(k_f.x, std::hypot(k_f.y, k_f.z));
  for (int c : channels_) {
    if (static_cast<int>(out.size()) >= n) break;
    for (const auto& t : solver.trajectories(mol_->total_energy(e_rel) - mol_->e_n(c)))
      out.push_back(t);
  }
  if (static_cast<int>(out.size()) > n) out.resize(n);
  return out;
}

namespace {

void check_energy(double e_d, const SpectrumGrid& grid) {
  if (!(e_d > 0.0) || !(2.0 * e_d <= grid.e_max))
    throw Error(ErrorCode::SliceOutOfRange, "D+ energy outside the spectrum grid");
}

double density(const std::vector<std::vector<cplx>>& amp, std::size_t first, int nj,
               const std::vector<cplx>& c) {
  double s = 0.0;
  for (int ij = 0; ij < nj; ++ij) {
    cplx a = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m) a += c[m] * amp[first + ij][m];
    s += std::norm(a);
  }
  return s;
}

}  // namespace

CoincidenceMap SfaEngine::coincidence_map(const InitialSuperposition& psi,
                                          const CoincidenceSlice& slice) const {
  const auto c = psi.on(opt_.members);
  if (!(slice.k_max > 0.0) || slice.n_k < 2)
    throw Error(ErrorCode::SliceOutOfRange, "bad momentum range");
  const int nj = static_cast<int>(model_.partial_waves().size());
  CoincidenceMap map;
  for (int i = 0; i < slice.n_k; ++i)
    map.x.push_back(-slice.k_max + 2.0 * slice.k_max * i / (slice.n_k - 1));
  if (slice.kind == CoincidenceSlice::Kind::MomentumPlane) {
    check_energy(slice.e_d, grid_);
    map.y = map.x;
    std::vector<Vec3> k;
    for (double ky : map.y)
      for (double kx : map.x) k.push_back({kx, ky, 0.0});
    const auto amp = amplitudes(k, {2.0 * slice.e_d});
    for (std::size_t p = 0; p < k.size(); ++p) map.density.push_back(density(amp, p * nj, nj, c));
    return map;
  }
  if (slice.n_e_d < 2 || !(slice.e_d_min < slice.e_d_max))
    throw Error(ErrorCode::SliceOutOfRange, "bad D+ energy range");
  check_energy(slice.e_d_min, grid_);
  check_energy(slice.e_d_max, grid_);
  std::vector<double> e;
  for (int i = 0; i < slice.n_e_d; ++i) {
    map.y.push_back(slice.e_d_min + (slice.e_d_max - slice.e_d_min) * i / (slice.n_e_d - 1));
    e.push_back(2.0 * map.y.back());
  }
  std::vector<Vec3> k;
  for (double kx : map.x) k.push_back({kx, slice.k_y, 0.0});
  const auto amp = amplitudes(k, e);
  const std::size_t ne = e.size();
  map.density.resize(ne * k.size());
  for (std::size_t p = 0; p < k.size(); ++p)
    for (std::size_t ie = 0; ie < ne; ++ie)
      map.density[ie * k.size() + p] = density(amp, (p * ne + ie) * nj, nj, c);
  return map;
}

std::vector<double> SfaEngine::ring_profile(const InitialSuperposition& psi, double e_d,
                                            const std::vector<double>& k, int n_angle) const {
  check_energy(e_d, grid_);
  if (n_angle < 2) throw Error(ErrorCode::InvalidArgument, "need at least two angles");
  const auto c = psi.on(opt_.members);
  const int nj = static_cast<int>(model_.partial_waves().size());
  // k_y -> -k_y symmetry: half the circle, doubled.
  std::vector<Vec3> pts;
  for (double kk : k)
    for (int a = 0; a < n_angle; ++a) {
      const double th = kPi * (a + 0.5) / n_angle;
      pts.push_back({kk * std::cos(th), kk * std::sin(th), 0.0});
    }
  const auto amp = amplitudes(pts, {2.0 * e_d});
  std::vector<double> out(k.size(), 0.0);
  const double dth = kPi / n_angle;
  for (std::size_t i = 0; i < k.size(); ++i)
    for (int a = 0; a < n_angle; ++a)
      out[i] += 2.0 * dth * density(amp, (i * n_angle + a) * nj, nj, c);
  return out;
}

}  // namespace recollide
