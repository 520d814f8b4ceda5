#include "recollide/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "recollide/numeric.hpp"

namespace recollide {

namespace {

constexpr double kMinTravelPhase = 2.0 * kPi * kMinTravelCycles;

// Birth phase for return phase u; F(tb) = (u - tb) sin tb - cos tb + cos u is increasing.
double solve_birth(double u, double lo, double hi) {
  auto f = [u](double tb, double* df) {
    *df = (u - tb) * std::cos(tb);
    return (u - tb) * std::sin(tb) - std::cos(tb) + std::cos(u);
  };
  return numeric::newton_bisect(f, lo, hi, 1e-15);
}

struct ReturnMap {
  double tb_cut = 0.0;
  double u_cut = 0.0;
  std::vector<double> u, tb, sb, su, cu;

  ReturnMap() {
    double lo = 0.0, hi = 0.5 * kPi - 1e-9;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (return_phase(mid) - mid > kMinTravelPhase)
        lo = mid;
      else
        hi = mid;
    }
    tb_cut = lo;
    u_cut = return_phase(tb_cut);
    const int n = kPrescanPoints;
    u.resize(n);
    tb.resize(n);
    sb.resize(n);
    su.resize(n);
    cu.resize(n);
    for (int j = 0; j < n; ++j) {
      u[j] = u_cut + (2.0 * kPi - u_cut) * j / (n - 1);
      tb[j] = j == n - 1 ? 0.0 : (j == 0 ? tb_cut : solve_birth(u[j], 0.0, 0.5 * kPi));
      sb[j] = std::sin(tb[j]);
      su[j] = std::sin(u[j]);
      cu[j] = std::cos(u[j]);
    }
  }

  // Index j with u[j] <= x <= u[j+1].
  int cell(double x) const {
    const double t = (x - u.front()) / (u.back() - u.front()) * (u.size() - 1);
    return std::clamp(static_cast<int>(t), 0, static_cast<int>(u.size()) - 2);
  }
};

const ReturnMap& return_map() {
  static const ReturnMap map;
  return map;
}

}  // namespace

double return_phase(double birth_phase) {
  const double tb = birth_phase;
  if (!(tb >= 0.0) || !(tb < 0.5 * kPi))
    throw Error(ErrorCode::NoReturn, "birth phase outside the returning window");
  const double s = std::sin(tb), c = std::cos(tb);
  auto f = [&](double tc, double* df) {
    *df = s - std::sin(tc);
    return (tc - tb) * s - c + std::cos(tc);
  };
  const double lo = kPi - tb, hi = 2.0 * kPi + tb;
  double d;
  if (f(hi, &d) <= 0.0) {
    if (tb == 0.0) return 2.0 * kPi;
    throw Error(ErrorCode::NoReturn, "no return for this birth phase");
  }
  return numeric::newton_bisect(f, lo, hi, 1e-13);
}

double return_time(const LaserField& field, double t_b) {
  const double w = field.omega();
  const int n = static_cast<int>(std::floor(w * t_b / kPi));
  const double tb = w * t_b - n * kPi;
  if (tb >= 0.5 * kPi) throw Error(ErrorCode::NoReturn, "birth after the field zero does not return");
  return (n * kPi + return_phase(tb)) / w;
}

double birth_phase_cutoff() { return return_map().tb_cut; }

namespace {
struct MaxEnergy {
  double tb = 0.0;
  double factor = 0.0;
  MaxEnergy() {
    auto e = [](double tb) {
      const double d = std::sin(return_phase(tb)) - std::sin(tb);
      return 2.0 * d * d;
    };
    auto [x, fx] = numeric::golden_max(e, 0.05, 0.8, 1e-12);
    tb = x;
    factor = fx;
  }
};
const MaxEnergy& max_energy() {
  static const MaxEnergy m;
  return m;
}
}  // namespace

double max_energy_birth_phase() { return max_energy().tb; }
double max_return_energy_factor() { return max_energy().factor; }

double dominant_travel_time(const LaserField& field, double i_p) {
  const int n = 4000;
  const double cut = birth_phase_cutoff();
  const double k = std::pow(2.0 * i_p, 1.5) / 3.0;
  double wsum = 0.0, tsum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double tb = (i + 0.5) * cut / n;
    const double e = field.e0() * std::cos(tb);
    // Squared quasi-static tunneling amplitude.
    const double w = std::exp(-2.0 * k / e) / e;
    wsum += w;
    tsum += w * (return_phase(tb) - tb);
  }
  return tsum / wsum / field.omega();
}

FinalStateSolver::FinalStateSolver(const LaserField& field, const HalfCycleEvent& event)
    : local_(local_field(field, event)), index_(event.index) {
  g_.resize(kPrescanPoints);
}

double FinalStateSolver::birth_phase(double u) const {
  const ReturnMap& m = return_map();
  const int j = m.cell(u);
  // Birth phase decreases with u.
  const double lo = std::max(0.0, m.tb[j + 1] - 1e-12);
  const double hi = std::min(0.5 * kPi, m.tb[j] + 1e-12);
  return solve_birth(u, lo, hi);
}

double FinalStateSolver::deposit_and_slope(double u, double* slope) const {
  const double a = local_.quiver();
  const double tb = birth_phase(u);
  const double sb = std::sin(tb), cb = std::cos(tb);
  const double su = std::sin(u), cu = std::cos(u);
  const double v = sb - su;
  const double p = kpar_ - a * su;
  if (slope) {
    const double dtb = (u - tb) * cb > 0.0 ? (su - sb) / ((u - tb) * cb) : 0.0;
    *slope = a * a * v * (cb * dtb - cu) + a * cu * p;
  }
  return 0.5 * a * a * v * v - 0.5 * p * p - 0.5 * kperp_ * kperp_;
}

double FinalStateSolver::deposit(double u) const { return deposit_and_slope(u, nullptr); }

void FinalStateSolver::set_final_momentum(double k_par, double k_perp) {
  kpar_ = k_par;
  kperp_ = k_perp;
  knot_.clear();
  kval_.clear();
  const ReturnMap& m = return_map();
  const double a = local_.quiver();
  if (a == 0.0) {
    gmax_ = -std::numeric_limits<double>::infinity();
    return;
  }
  const int n = kPrescanPoints;
  for (int j = 0; j < n; ++j) {
    const double v = m.sb[j] - m.su[j];
    const double p = k_par - a * m.su[j];
    g_[j] = 0.5 * a * a * v * v - 0.5 * p * p - 0.5 * k_perp * k_perp;
  }
  knot_.push_back(m.u.front());
  kval_.push_back(g_.front());
  for (int j = 1; j + 1 < n; ++j) {
    const bool is_max = g_[j] >= g_[j - 1] && g_[j] > g_[j + 1];
    const bool is_min = g_[j] <= g_[j - 1] && g_[j] < g_[j + 1];
    if (!is_max && !is_min) continue;
    const double sgn = is_max ? 1.0 : -1.0;
    auto f = [&](double u) { return sgn * deposit(u); };
    auto [x, fx] = numeric::golden_max(f, m.u[j - 1], m.u[j + 1], 1e-11);
    knot_.push_back(x);
    kval_.push_back(sgn * fx);
  }
  knot_.push_back(m.u.back());
  kval_.push_back(g_.back());
  gmax_ = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < knot_.size(); ++i)
    if (kval_[i] > gmax_) {
      gmax_ = kval_[i];
      umax_ = knot_[i];
    }
}

int FinalStateSolver::solve(double d, double* u_out, int max_out) const {
  if (!(d <= gmax_)) return 0;
  const ReturnMap& m = return_map();
  int count = 0;
  auto fdf = [&](double u, double* df) { return deposit_and_slope(u, df) - d; };
  for (std::size_t i = 0; i + 1 < knot_.size() && count < max_out; ++i) {
    const double ua = knot_[i], ub = knot_[i + 1];
    const double ga = kval_[i], gb = kval_[i + 1];
    if ((d - ga) * (d - gb) > 0.0) continue;
    if (ga == gb) continue;
    // Narrow the bracket with the prescan nodes inside the piece.
    double lo = ua, hi = ub, glo = ga;
    const int ja = m.cell(ua) + 1, jb = m.cell(ub);
    for (int j = ja; j <= jb; ++j) {
      if (m.u[j] <= lo || m.u[j] >= hi) continue;
      if ((g_[j] - d) * (glo - d) > 0.0) {
        lo = m.u[j];
        glo = g_[j];
      } else {
        hi = m.u[j];
        break;
      }
    }
    u_out[count++] = numeric::newton_bisect(fdf, lo, hi, 1e-14);
  }
  return count;
}

Trajectory FinalStateSolver::trajectory(double u) const {
  const double w = local_.omega;
  const double a = local_.quiver();
  const double tb = birth_phase(u);
  const double v = std::sin(tb) - std::sin(u);
  Trajectory t;
  t.t_b = local_.t_peak + tb / w;
  t.t_c = local_.t_peak + u / w;
  t.k0 = {a * std::sin(tb), 0.0, 0.0};
  t.return_energy = 0.5 * a * a * v * v;
  t.half_cycle = index_;
  t.branch = u <= umax_ ? Branch::Short : Branch::Long;
  return t;
}

std::vector<Trajectory> FinalStateSolver::trajectories(double d) const {
  double u[8];
  const int n = solve(d, u, 8);
  std::vector<Trajectory> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(trajectory(u[i]));
    // A double root at the maximum belongs to both branches.
    if (i > 0 && u[i] == u[i - 1]) {
      out[i - 1].branch = Branch::Short;
      out[i].branch = Branch::Long;
    }
  }
  return out;
}

std::vector<Trajectory> solve_final_state(const LaserField& field, const HalfCycleEvent& event,
                                          const Vec3& k_f, double dissociation_energy) {
  FinalStateSolver s(field, event);
  s.set_final_momentum(k_f.x, std::hypot(k_f.y, k_f.z));
  return s.trajectories(dissociation_energy);
}

VolkovIntegrator::VolkovIntegrator(const LaserField& field, double t_max) : omega_(field.omega()) {
  const int pieces = std::max(1, field.crest_index(std::max(t_max, 0.0)) + 2);
  amp_.resize(pieces);
  start_.resize(pieces);
  s1_.resize(pieces);
  s2_.resize(pieces);
  const double w = omega_;
  double i1 = 0.0, i2 = 0.0;
  for (int p = 0; p < pieces; ++p) {
    const double s = std::max(0.0, (p - 0.5) * kPi / w);
    const double e = (p + 0.5) * kPi / w;
    const double c = -field.e0() / w * field.envelope(field.crest_time(p));
    amp_[p] = c;
    start_[p] = s;
    s1_[p] = i1;
    s2_[p] = i2;
    i1 += c * (std::cos(w * s) - std::cos(w * e)) / w;
    i2 += c * c * (0.5 * (e - s) - (std::sin(2 * w * e) - std::sin(2 * w * s)) / (4 * w));
  }
}

int VolkovIntegrator::piece(double t) const {
  const int p = static_cast<int>(std::floor(omega_ * t / kPi + 0.5));
  return std::clamp(p, 0, static_cast<int>(amp_.size()) - 1);
}

double VolkovIntegrator::int_a(double t) const {
  if (t <= 0.0) return 0.0;
  const int p = piece(t);
  const double s = start_[p];
  return s1_[p] + amp_[p] * (std::cos(omega_ * s) - std::cos(omega_ * t)) / omega_;
}

double VolkovIntegrator::int_a2(double t) const {
  if (t <= 0.0) return 0.0;
  const int p = piece(t);
  const double s = start_[p], w = omega_;
  return s2_[p] +
         amp_[p] * amp_[p] * (0.5 * (t - s) - (std::sin(2 * w * t) - std::sin(2 * w * s)) / (4 * w));
}

double VolkovIntegrator::phase(const Vec3& k, double t1, double t2) const {
  return 0.5 * k.norm2() * (t2 - t1) + k.x * (int_a(t2) - int_a(t1)) +
         0.5 * (int_a2(t2) - int_a2(t1));
}

double volkov_phase(const Vec3& k, double t1, double t2, const LaserField& field) {
  return VolkovIntegrator(field, t2).phase(k, t1, t2);
}

double intermediate_volkov_phase(const Trajectory& traj, const LocalField& local) {
  const double w = local.omega;
  const double a = local.quiver();
  const double tb = w * (traj.t_b - local.t_peak);
  const double tc = w * (traj.t_c - local.t_peak);
  const double sb = std::sin(tb);
  const double d = tc - tb;
  const double integral = sb * sb * d + 2.0 * sb * (std::cos(tc) - std::cos(tb)) + 0.5 * d -
                          0.25 * (std::sin(2 * tc) - std::sin(2 * tb));
  return 0.5 * a * a * integral / w;
}

double total_phase(const Trajectory& traj, const LaserField& field, const Vec3& k_f,
                   const ChannelEnergies& en, double t, double t0) {
  const LocalField local = local_field(field, half_cycle_event(field, traj.half_cycle));
  const VolkovIntegrator vi(field, std::max(t, traj.t_c));
  return total_phase(traj, vi, local, k_f, en, t, t0);
}

double total_phase(const Trajectory& traj, const VolkovIntegrator& volkov, const LocalField& local,
                   const Vec3& k_f, const ChannelEnergies& en, double t, double t0) {
  return -volkov.phase(k_f, traj.t_c, t) - en.e_total * (t - traj.t_c) -
         intermediate_volkov_phase(traj, local) - en.e_n * (traj.t_c - traj.t_b) -
         en.e_i * (traj.t_b - t0);
}

}  // namespace recollide
