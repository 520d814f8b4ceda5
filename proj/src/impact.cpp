#include "recollide/impact.hpp"

#include <algorithm>
#include <cmath>

#include <cblas.h>

namespace recollide {

namespace {

double sph_j(int l, double x) { return x == 0.0 ? (l == 0 ? 1.0 : 0.0) : std::sph_bessel(l, x); }


// j_0..j_lmax at x: upward recurrence where stable, otherwise Miller's downward recurrence
// normalized with sum (2l+1) j_l^2 = 1.
void sph_j_all(int lmax, double x, double* out) {
  if (x < 1e-3) {
    double pw = 1.0, dfact = 1.0;
    for (int l = 0; l <= lmax; ++l) {
      dfact *= 2 * l + 1;
      out[l] = pw / dfact * (1.0 - x * x / (2.0 * (2 * l + 3)));
      pw *= x;
    }
    return;
  }
  if (x > lmax) {
    out[0] = std::sin(x) / x;
    if (lmax >= 1) out[1] = std::sin(x) / (x * x) - std::cos(x) / x;
    for (int l = 1; l < lmax; ++l) out[l + 1] = (2 * l + 1) / x * out[l] - out[l - 1];
    return;
  }
  const int top = lmax + 20 + static_cast<int>(x);
  double jn = 0.0, j = 1e-100, norm = 0.0;  // j_{l+1}, j_l
  for (int l = top; l >= 0; --l) {
    if (l <= lmax) out[l] = j;
    norm += (2 * l + 1) * j * j;
    if (l == 0) break;
    const double jm = (2 * l + 1) / x * j - jn;
    jn = j;
    j = jm;
    if (std::abs(j) > 1e120) {
      j *= 1e-120;
      jn *= 1e-120;
      norm *= 1e-240;
      for (int k = l; k <= lmax; ++k) out[k] *= 1e-120;
    }
  }
  const double s = 1.0 / std::sqrt(norm);
  for (int l = 0; l <= lmax; ++l) out[l] *= s;
}

// P_0..P_lmax at x by the three-term recurrence.
void legendre_all(int lmax, double x, double* p) {
  p[0] = 1.0;
  if (lmax >= 1) p[1] = x;
  for (int l = 2; l <= lmax; ++l) p[l] = ((2 * l - 1) * x * p[l - 1] - (l - 1) * p[l - 2]) / l;
}

}  // namespace

void ImpactModel::validate() const {
  if (!(orbital_decay > 0.0)) throw Error(ErrorCode::InvalidArgument, "orbital_decay must be positive");
  if (j_max < 1) throw Error(ErrorCode::InvalidArgument, "j_max must be at least 1");
  if (!(q_min > 0.0)) throw Error(ErrorCode::InvalidArgument, "q_min must be positive");
  if (!std::isfinite(coupling_norm)) throw Error(ErrorCode::InvalidArgument, "coupling_norm must be finite");
}

std::vector<int> ImpactModel::partial_waves() const {
  std::vector<int> js;
  for (int j = 1; j <= j_max; j += 2) js.push_back(j);
  return js;
}

double electronic_form_factor(const ImpactModel& model, double q) {
  if (q < model.q_min) return 0.0;
  const double s = q / (2.0 * model.orbital_decay);
  const double f = 1.0 / ((1.0 + s * s) * (1.0 + s * s));
  return s * f;
}

double partial_wave_coefficient(int j) {
  if (j < 1 || j % 2 == 0) return 0.0;
  return (2 * j + 1) * (((j - 1) / 2) % 2 == 0 ? 1.0 : -1.0);
}

double nuclear_transition(const ContinuumState& u, const std::vector<double>& bound,
                          const RadialGrid& grid, double q) {
  if (!(u.grid == grid) || static_cast<int>(bound.size()) != grid.n ||
      static_cast<int>(u.radial.size()) != grid.n)
    throw Error(ErrorCode::GridMismatch, "radial functions live on different grids");
  const double c = partial_wave_coefficient(u.j);
  if (c == 0.0 || q == 0.0) return 0.0;
  const double h = grid.step();
  double s = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double w = (i == 0 || i == grid.n - 1) ? 0.5 : 1.0;
    s += w * u.radial[i] * bound[i] * sph_j(u.j, 0.5 * q * grid.r(i));
  }
  return c * s * h;
}

double nuclear_transition(const MolecularData& mol, double e_rel, int j, int n, double q) {
  if (n < 0 || n >= mol.n_ion()) throw Error(ErrorCode::InvalidArgument, "channel out of range");
  if (partial_wave_coefficient(j) == 0.0) return 0.0;
  const auto u = solve_continuum(mol.ion_u_curve(), e_rel, j, mol.grid(), mol.reduced_mass());
  return nuclear_transition(u, mol.ion_bound()[n].radial, mol.grid(), q);
}

double angular_factor(int j, double cos_gamma) {
  if (j < 0) return 0.0;
  std::vector<double> p(j + 1);
  legendre_all(j, cos_gamma, p.data());
  return p[j];
}

std::complex<double> vee_matrix_element(const ImpactModel& model, const MolecularData& mol,
                                        double e_rel, int j, int n, const Vec3& k_i,
                                        const Vec3& k_f) {
  if (partial_wave_coefficient(j) == 0.0) return 0.0;
  const Vec3 q = k_i - k_f;
  const double qn = q.norm();
  if (qn < model.q_min) return 0.0;
  const double radial = nuclear_transition(mol, e_rel, j, n, qn);
  const double v = model.coupling_norm * 4.0 * kPi / (qn * qn) * electronic_form_factor(model, qn) *
                   radial * angular_factor(j, q.x / qn);
  return {0.0, v};
}

ImpactTable::ImpactTable(const ImpactModel& model, const MolecularData& mol,
                         std::vector<double> e_rel, std::vector<int> channels, double q_max,
                         int n_q)
    : model_(model), e_rel_(std::move(e_rel)), js_(model.partial_waves()),
      channels_(std::move(channels)), q_max_(q_max) {
  model_.validate();
  if (!(q_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "q_max must be positive");
  for (int c : channels_)
    if (c < 0 || c >= mol.n_ion()) throw Error(ErrorCode::InvalidArgument, "channel out of range");
  n_q_ = n_q > 1 ? n_q : std::max(64, static_cast<int>(std::ceil(q_max / 0.03)) + 1);
  dq_ = q_max_ / (n_q_ - 1);

  // Radial windows where the bound functions are non-negligible.
  const RadialGrid& grid = mol.grid();
  auto support = [](const std::vector<double>& f, double rel, int& first, int& last) {
    double peak = 0.0;
    for (double v : f) peak = std::max(peak, std::abs(v));
    first = static_cast<int>(f.size());
    last = 0;
    for (int i = 0; i < static_cast<int>(f.size()); ++i)
      if (std::abs(f[i]) > rel * peak) {
        first = std::min(first, i);
        last = std::max(last, i);
      }
  };
  std::vector<int> c_lo(channels_.size()), c_hi(channels_.size());
  int lo = grid.n, hi = 0;
  for (std::size_t ic = 0; ic < channels_.size(); ++ic) {
    support(mol.ion_bound()[channels_[ic]].radial, 1e-10, c_lo[ic], c_hi[ic]);
    lo = std::min(lo, c_lo[ic]);
    hi = std::max(hi, c_hi[ic]);
  }
  if (channels_.empty()) lo = hi = 0;
  const int nr = hi - lo + 1;
  const double h = grid.step();

  const int nj = static_cast<int>(js_.size());
  std::vector<double> bes(static_cast<std::size_t>(nj) * n_q_ * nr);
  std::vector<double> dbes(bes.size());
  const int lmax = js_.empty() ? 0 : js_.back();
  std::vector<double> jl(lmax + 1);
  for (int iq = 0; iq < n_q_; ++iq) {
    const double q = iq * dq_;
    for (int k = 0; k < nr; ++k) {
      const double r = grid.r(lo + k);
      const double x = 0.5 * q * r;
      sph_j_all(lmax, x, jl.data());
      for (int ij = 0; ij < nj; ++ij) {
        const int l = js_[ij];
        const std::size_t idx = (static_cast<std::size_t>(ij) * n_q_ + iq) * nr + k;
        bes[idx] = jl[l];
        const double dj = x < 1e-8 ? (l == 1 ? 1.0 / 3.0 : 0.0) : jl[l - 1] - (l + 1) / x * jl[l];
        dbes[idx] = 0.5 * r * dj;
      }
    }
  }

  const std::size_t total = e_rel_.size() * js_.size() * channels_.size() * n_q_;
  val_.assign(total, 0.0);
  der_.assign(total, 0.0);
  if (channels_.empty() || e_rel_.empty()) return;

  // Per partial wave: continuum functions at all energies, then one matrix product per channel
  // over that channel's radial window.
  const int nc = static_cast<int>(channels_.size());
  const int ne = static_cast<int>(e_rel_.size());
  std::vector<double> cont(static_cast<std::size_t>(ne) * nr);
  std::vector<double> prod(static_cast<std::size_t>(ne) * nr);
  std::vector<double> out(static_cast<std::size_t>(ne) * n_q_);
  for (int ij = 0; ij < nj; ++ij) {
    const double c = partial_wave_coefficient(js_[ij]) * h;
    int u_lo = nr;
    for (int ie = 0; ie < ne; ++ie) {
      const auto u = solve_continuum(mol.ion_u_curve(), e_rel_[ie], js_[ij], grid, mol.reduced_mass());
      // The continuum function is evanescent inside its turning point.
      int first, last;
      support(u.radial, 1e-12, first, last);
      u_lo = std::min(u_lo, std::max(first - lo, 0));
      std::copy_n(&u.radial[lo], nr, &cont[static_cast<std::size_t>(ie) * nr]);
    }
    for (int ic = 0; ic < nc; ++ic) {
      const int a = std::max(c_lo[ic] - lo, u_lo);
      const int len = c_hi[ic] - lo - a + 1;
      if (len <= 0) continue;
      const auto& f = mol.ion_bound()[channels_[ic]].radial;
      for (int ie = 0; ie < ne; ++ie) {
        const double* u = &cont[static_cast<std::size_t>(ie) * nr + a];
        double* row = &prod[static_cast<std::size_t>(ie) * len];
        for (int k = 0; k < len; ++k) row[k] = u[k] * f[lo + a + k];
      }
      for (int pass = 0; pass < 2; ++pass) {
        const double* bj = &(pass == 0 ? bes : dbes)[static_cast<std::size_t>(ij) * n_q_ * nr + a];
        cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, ne, n_q_, len, c, prod.data(), len, bj,
                    nr, 0.0, out.data(), n_q_);
        auto& dst = pass == 0 ? val_ : der_;
        for (int ie = 0; ie < ne; ++ie)
          std::copy_n(&out[static_cast<std::size_t>(ie) * n_q_], n_q_, &dst[at(ie, ij, ic)]);
      }
    }
  }
}

std::size_t ImpactTable::at(int ie, int ij, int ic) const {
  return ((static_cast<std::size_t>(ie) * js_.size() + ij) * channels_.size() + ic) * n_q_;
}

double ImpactTable::nuclear(int ie, int ij, int ic, double q) const {
  if (q < 0.0 || q > q_max_ * (1.0 + 1e-12))
    throw Error(ErrorCode::InvalidArgument, "momentum transfer outside the tabulated range");
  const double x = std::min(q / dq_, n_q_ - 1.0);
  const int i = std::min(static_cast<int>(x), n_q_ - 2);
  const double t = x - i;
  const double* v = &val_[at(ie, ij, ic)];
  const double* d = &der_[at(ie, ij, ic)];
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * v[i] + h10 * dq_ * d[i] + h01 * v[i + 1] + h11 * dq_ * d[i + 1];
}

void ImpactTable::elements(int ie, int ic, const Vec3& k_i, const Vec3& k_f,
                           std::complex<double>* out) const {
  const Vec3 q = k_i - k_f;
  const double qn = q.norm();
  const int nj = static_cast<int>(js_.size());
  if (qn < model_.q_min) {
    std::fill(out, out + nj, std::complex<double>(0.0, 0.0));
    return;
  }
  const double pref =
      model_.coupling_norm * 4.0 * kPi / (qn * qn) * electronic_form_factor(model_, qn);
  double p[64];
  const int lmax = js_.empty() ? 0 : js_.back();
  if (lmax >= 64) throw Error(ErrorCode::InvalidArgument, "j_max too large");
  legendre_all(lmax, q.x / qn, p);
  for (int ij = 0; ij < nj; ++ij)
    out[ij] = {0.0, pref * nuclear(ie, ij, ic, qn) * p[js_[ij]]};
}

std::complex<double> ImpactTable::element(int ie, int ij, int ic, const Vec3& k_i,
                                          const Vec3& k_f) const {
  std::complex<double> buf[64];
  elements(ie, ic, k_i, k_f, buf);
  return buf[ij];
}

}  // namespace recollide
