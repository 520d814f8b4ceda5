#include "recollide/freescatter.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <cblas.h>

#include "recollide/numeric.hpp"

namespace recollide {

void WavePacketSpec::validate() const {
  const double w[] = {dk, dK, dp, dP};
  for (double x : w)
    if (!(x > 0.0) || !std::isfinite(x))
      throw Error(ErrorCode::InvalidArgument, "wave-packet widths must be positive");
  double norm = 0.0;
  for (const auto& a : vib_coeffs) norm += std::norm(a);
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw Error(ErrorCode::InvalidArgument, "vibrational coefficients have zero norm");
  if (!(tau_d_fs >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tau_d must be non-negative");
}

WavePacketSpec WavePacketSpec::normalized() const {
  validate();
  WavePacketSpec s = *this;
  double norm = 0.0;
  for (const auto& a : s.vib_coeffs) norm += std::norm(a);
  for (auto& a : s.vib_coeffs) a /= std::sqrt(norm);
  return s;
}

double ion_mass(const MolecularData& mol) { return 4.0 * mol.reduced_mass() + 1.0; }

RelativeMomenta lab_to_relative(const Vec3& p, const Vec3& P, double m_ion) {
  if (!(m_ion > 0.0)) throw Error(ErrorCode::InvalidArgument, "ion mass must be positive");
  return {p + P, (p * m_ion - P) * (1.0 / (m_ion + 1.0))};
}

LabMomenta relative_to_lab(const Vec3& K, const Vec3& k, double m_ion) {
  if (!(m_ion > 0.0)) throw Error(ErrorCode::InvalidArgument, "ion mass must be positive");
  const Vec3 p = k + K * (1.0 / (m_ion + 1.0));
  return {p, K - p};
}

WavePacketSpec matched_relative(const WavePacketSpec& lab, double m_ion) {
  const double u1 = 1.0 / (m_ion + 1.0), u2 = m_ion / (m_ion + 1.0);
  WavePacketSpec s = lab;
  s.frame = Frame::RelativeCOM;
  s.k0 = u2 * lab.p0 - u1 * lab.P0;
  s.dk = std::hypot(u2 * lab.dp, u1 * lab.dP);
  s.K0 = lab.p0 + lab.P0;
  s.dK = std::hypot(lab.dp, lab.dP);
  return s;
}

std::vector<cplx> recollision_mimic(const MolecularData& mol, int level, double birth_field,
                                    double tau_d) {
  if (!(std::abs(birth_field) > 0.0)) throw Error(ErrorCode::ZeroField, "birth field is zero");
  if (level < 0 || level >= mol.n_neutral())
    throw Error(ErrorCode::InvalidArgument, "neutral level was not computed");
  std::vector<cplx> a(mol.n_ion());
  for (int n = 0; n < mol.n_ion(); ++n) {
    const double ip = mol.i_p(n, level);
    const double tunnel = std::exp(-std::pow(2.0 * ip, 1.5) / (3.0 * std::abs(birth_field)));
    a[n] = mol.fc(n, level) * tunnel * std::polar(1.0, -mol.e_n(n) * tau_d);
  }
  return a;
}

std::vector<cplx> vib_coeffs_recollision(const MolecularData& mol, double birth_field, double tau_d,
                                         const InitialSuperposition& psi) {
  std::vector<cplx> a(mol.n_ion(), 0.0);
  double ref = 0.0;
  for (std::size_t i = 0; i < psi.states().size(); ++i) {
    const auto m = recollision_mimic(mol, psi.states()[i], birth_field, tau_d);
    double norm = 0.0;
    for (int n = 0; n < mol.n_ion(); ++n) {
      a[n] += psi.coeffs()[i] * m[n];
      norm += std::norm(m[n]);
    }
    ref += std::norm(psi.coeffs()[i]) * norm;
  }
  for (auto& x : a) x /= std::sqrt(ref);
  return a;
}

cplx initial_projection(const WavePacketSpec& spec, int n, double k_i, double K, double m_ion) {
  if (n < 0 || n >= static_cast<int>(spec.vib_coeffs.size())) return 0.0;
  double norm = 0.0;
  for (const auto& a : spec.vib_coeffs) norm += std::norm(a);
  const cplx a = spec.vib_coeffs[n] / std::sqrt(norm);
  if (spec.frame == Frame::RelativeCOM) {
    const double x = (k_i - spec.k0) / spec.dk, y = (K - spec.K0) / spec.dK;
    return a * std::exp(-0.5 * (x * x + y * y)) / std::sqrt(kPi * spec.dk * spec.dK);
  }
  const auto lab = relative_to_lab({K, 0, 0}, {k_i, 0, 0}, m_ion);
  const double x = (lab.p.x - spec.p0) / spec.dp, y = (lab.P.x - spec.P0) / spec.dP;
  return a * std::exp(-0.5 * (x * x + y * y)) / std::sqrt(kPi * spec.dp * spec.dP);
}

double k_i0(double e_total, double e_n, const Vec3& k_f) {
  const double arg = k_f.norm2() + 2.0 * (e_total - e_n);
  if (arg < 0.0) throw Error(ErrorCode::ClosedChannel, "channel is closed at this final momentum");
  return std::sqrt(arg);
}

cplx scattered_projection(const WavePacketSpec& spec, const ImpactModel& model,
                          const MolecularData& mol, double e_rel, int j, const Vec3& k_f, double K) {
  const double m_ion = ion_mass(mol);
  const double e = mol.total_energy(e_rel);
  const int nc = std::min(mol.n_ion(), static_cast<int>(spec.vib_coeffs.size()));
  cplx s = 0.0;
  for (int n = 0; n < nc; ++n) {
    if (spec.vib_coeffs[n] == cplx(0.0)) continue;
    if (k_f.norm2() + 2.0 * (e - mol.e_n(n)) <= 0.0) continue;
    const double k = k_i0(e, mol.e_n(n), k_f);
    s += 2.0 * kPi / k * vee_matrix_element(model, mol, e_rel, j, n, {k, 0.0, 0.0}, k_f) *
         initial_projection(spec, n, k, K, m_ion);
  }
  return s;
}

void FreeScatterGrid::validate() const {
  if (!(e_max > 0.0) || n_e < 1) throw Error(ErrorCode::InvalidArgument, "bad energy grid");
  if (!(k_max >= 0.0) || n_k < 2 || n_mu < 2)
    throw Error(ErrorCode::InvalidArgument, "bad momentum grid");
  if (!(cut_sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "cut_sigma must be positive");
}

cplx ChannelGram::at(int ie, int ij, int n, int m) const {
  const std::size_t nc = n_channels;
  return h[((static_cast<std::size_t>(ie) * partial_waves.size() + ij) * nc + n) * nc + m];
}

SpectrumResult yields(const ChannelGram& g, const std::vector<cplx>& a) {
  if (static_cast<int>(a.size()) > g.n_channels)
    throw Error(ErrorCode::InvalidArgument, "more coefficients than computed channels");
  const int ne = static_cast<int>(g.e_rel.size());
  const int nj = static_cast<int>(g.partial_waves.size());
  const int nc = static_cast<int>(a.size());
  SpectrumResult r;
  r.e_rel = g.e_rel;
  r.w.assign(ne, 0.0);
  r.w_by_j.assign(nj, 0.0);
  for (int ie = 0; ie < ne; ++ie) {
    for (int ij = 0; ij < nj; ++ij) {
      double s = 0.0;
      for (int n = 0; n < nc; ++n)
        for (int m = 0; m < nc; ++m) s += (a[n] * std::conj(a[m]) * g.at(ie, ij, n, m)).real();
      s = std::max(s, 0.0);
      r.w[ie] += s;
      r.w_by_j[ij] += s * g.e_step;
    }
    r.w_t += r.w[ie] * g.e_step;
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

FreeScatterEngine::FreeScatterEngine(const MolecularData& mol, const ImpactModel& model,
                                     const FreeScatterGrid& grid, const WavePacketSpec& spec,
                                     int threads)
    : mol_(&mol), model_(model), grid_(grid), spec_(spec.normalized()), threads_(threads),
      m_ion_(ion_mass(mol)) {
  model_.validate();
  grid_.validate();
  if (threads_ < 1) throw Error(ErrorCode::InvalidArgument, "threads must be at least 1");
  double center, width;
  if (spec_.frame == Frame::RelativeCOM) {
    center = spec_.k0;
    width = spec_.dk;
  } else {
    const auto m = matched_relative(spec_, m_ion_);
    center = m.k0;
    width = m.dk;
    // Gaussian K integral of two Lab packets evaluated at k and k'.
    const double u1 = 1.0 / (m_ion_ + 1.0), u2 = m_ion_ / (m_ion_ + 1.0);
    const double vp = spec_.dp * spec_.dp, vP = spec_.dP * spec_.dP;
    const double a = u1 * u1 / vp + u2 * u2 / vP;
    const double b1 = -u1 / vp + u2 / vP;
    const double b0 = 2.0 * u1 * spec_.p0 / vp + 2.0 * u2 * spec_.P0 / vP;
    cross_ = b1 * b1 / (2.0 * a);
    lab_ = {a, b1, b0};
  }
  k_lo_ = std::max(0.0, center - grid_.cut_sigma * width);
  k_hi_ = center + grid_.cut_sigma * width;
  if (!(k_hi_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "wave packet moves away from the ion");
}

double FreeScatterEngine::log_weight(double k) const {
  if (spec_.frame == Frame::RelativeCOM) {
    const double x = (k - spec_.k0) / spec_.dk;
    return -0.25 * std::log(kPi * spec_.dk * spec_.dk) - 0.5 * x * x;
  }
  const auto [a, b1, b0] = lab_;
  const double vp = spec_.dp * spec_.dp, vP = spec_.dP * spec_.dP;
  const double c = -std::log(kPi * spec_.dp * spec_.dP) + 0.5 * std::log(kPi / a) + b0 * b0 / (4 * a);
  return 0.5 * c + b1 * b1 * k * k / (4 * a) + b1 * b0 * k / (2 * a) -
         (k - spec_.p0) * (k - spec_.p0) / (2 * vp) - (k + spec_.P0) * (k + spec_.P0) / (2 * vP);
}

ChannelGram FreeScatterEngine::run() const {
  const int ne = grid_.n_e;
  const int nc = mol_->n_ion();
  std::vector<double> e_rel(ne);
  for (int i = 0; i < ne; ++i) e_rel[i] = grid_.e_rel(i);
  std::vector<int> channels(nc);
  for (int n = 0; n < nc; ++n) channels[n] = n;
  const double k_max = grid_.k_max > 0.0 ? grid_.k_max : k_hi_;
  const ImpactTable table(model_, *mol_, e_rel, channels, 1.01 * (k_hi_ + k_max) + 0.05);
  const auto& js = table.partial_waves();
  const int nj = static_cast<int>(js.size());

  std::vector<double> mu, wmu;
  numeric::gauss_legendre(grid_.n_mu, mu, wmu);
  const double dkf = k_max / grid_.n_k;

  ChannelGram g;
  g.e_rel = e_rel;
  g.partial_waves = js;
  g.n_channels = nc;
  g.e_step = grid_.e_step();
  g.k_max = k_max;
  const std::size_t block = static_cast<std::size_t>(nc) * nc;
  g.h.assign(static_cast<std::size_t>(ne) * nj * block, 0.0);

  constexpr int kCols = 2048;
  std::atomic<int> next{0};
  auto worker = [&]() {
    std::vector<cplx> cols(static_cast<std::size_t>(nj) * kCols * nc);
    std::vector<cplx> hj(block);
    std::vector<double> kn(nc), lw(nc);
    std::vector<char> open(nc);
    cplx v[64];
    for (int ie; (ie = next.fetch_add(1)) < ne;) {
      const double e = mol_->total_energy(e_rel[ie]);
      cplx* out = &g.h[static_cast<std::size_t>(ie) * nj * block];
      int used = 0;
      auto flush = [&]() {
        for (int ij = 0; ij < nj && used > 0; ++ij) {
          std::fill(hj.begin(), hj.end(), cplx(0.0));
          cblas_zherk(CblasColMajor, CblasUpper, CblasNoTrans, nc, used, 1.0,
                      &cols[static_cast<std::size_t>(ij) * kCols * nc], nc, 0.0, hj.data(), nc);
          cplx* o = out + ij * block;
          for (int c = 0; c < nc; ++c)
            for (int r = 0; r <= c; ++r) {
              // Column-major upper triangle: element (r, c).
              o[r * nc + c] += hj[static_cast<std::size_t>(c) * nc + r];
              if (r != c) o[c * nc + r] += std::conj(hj[static_cast<std::size_t>(c) * nc + r]);
            }
        }
        used = 0;
      };
      for (int ik = 0; ik < grid_.n_k; ++ik) {
        const double kf = (ik + 0.5) * dkf;
        for (int im = 0; im < grid_.n_mu; ++im) {
          const Vec3 kvec{kf * mu[im], kf * std::sqrt(1.0 - mu[im] * mu[im]), 0.0};
          int active = 0;
          double kbar = 0.0, dmax = 0.0;
          for (int n = 0; n < nc; ++n) {
            const double arg = kf * kf + 2.0 * (e - mol_->e_n(n));
            open[n] = 0;
            if (arg <= 0.0) continue;
            kn[n] = std::sqrt(arg);
            if (kn[n] < k_lo_ || kn[n] > k_hi_) continue;
            open[n] = 1;
            kbar += kn[n];
            ++active;
          }
          if (active == 0) continue;
          kbar /= active;
          for (int n = 0; n < nc; ++n)
            if (open[n]) dmax = std::max(dmax, std::abs(kn[n] - kbar));
          // exp(cross dk dk') expanded to the order where the next term is negligible.
          int terms = 1;
          if (cross_ > 0.0) {
            double t = 1.0;
            const double x = cross_ * dmax * dmax;
            while (terms < 40 && t > 1e-17) {
              t *= x / terms;
              ++terms;
            }
          }
          if (used + terms > kCols) flush();
          const double wt = std::sqrt(2.0 * kPi * kf * kf * dkf * wmu[im]);
          for (int n = 0; n < nc; ++n) {
            for (int ij = 0; ij < nj; ++ij)
              for (int t = 0; t < terms; ++t)
                cols[(static_cast<std::size_t>(ij) * kCols + used + t) * nc + n] = 0.0;
            if (!open[n]) continue;
            table.elements(ie, n, {kn[n], 0.0, 0.0}, kvec, v);
            const double f = wt * 2.0 * kPi / kn[n] *
                             std::exp(log_weight(kn[n]) + cross_ * kbar * (kn[n] - 0.5 * kbar));
            const double d = kn[n] - kbar;
            double pw = 1.0;
            for (int t = 0; t < terms; ++t) {
              for (int ij = 0; ij < nj; ++ij)
                cols[(static_cast<std::size_t>(ij) * kCols + used + t) * nc + n] = f * pw * v[ij];
              pw *= d * std::sqrt(cross_ / (t + 1));
            }
          }
          used += terms;
        }
      }
      flush();
    }
  };
  const int nt = std::max(1, std::min(threads_, ne));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return g;
}

SpectrumResult yields(const WavePacketSpec& spec, const MolecularData& mol,
                      const ImpactModel& model, const FreeScatterGrid& grid, int threads) {
  const WavePacketSpec s = spec.normalized();
  return yields(FreeScatterEngine(mol, model, grid, s, threads).run(), s.vib_coeffs);
}

}  // namespace recollide
