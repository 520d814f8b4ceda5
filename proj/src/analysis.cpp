#include <algorithm>
#include <cmath>

#include "recollide/runner.hpp"

namespace recollide {

CosineFit fit_cosine(const std::vector<double>& phi, const std::vector<double>& w) {
  if (phi.size() != w.size() || phi.size() < 3)
    throw Error(ErrorCode::InvalidArgument, "cosine fit needs at least three matching samples");
  // Normal equations for w = a + b cos + c sin.
  double m[3][4] = {};
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double f[3] = {1.0, std::cos(phi[i]), std::sin(phi[i])};
    for (int r = 0; r < 3; ++r) {
      for (int k = 0; k < 3; ++k) m[r][k] += f[r] * f[k];
      m[r][3] += f[r] * w[i];
    }
  }
  for (int p = 0; p < 3; ++p) {
    int best = p;
    for (int r = p + 1; r < 3; ++r)
      if (std::abs(m[r][p]) > std::abs(m[best][p])) best = r;
    std::swap(m[p], m[best]);
    if (m[p][p] == 0.0) throw Error(ErrorCode::InvalidArgument, "degenerate phase sampling");
    for (int r = 0; r < 3; ++r) {
      if (r == p) continue;
      const double s = m[r][p] / m[p][p];
      for (int k = p; k < 4; ++k) m[r][k] -= s * m[p][k];
    }
  }
  const double a = m[0][3] / m[0][0], b = m[1][3] / m[1][1], c = m[2][3] / m[2][2];
  CosineFit fit;
  fit.a = a;
  fit.b = std::hypot(b, c);
  fit.phi0 = std::atan2(-c, b);
  double mean = 0.0;
  for (double v : w) mean += v;
  mean /= w.size();
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double model = a + b * std::cos(phi[i]) + c * std::sin(phi[i]);
    ss_res += (w[i] - model) * (w[i] - model);
    ss_tot += (w[i] - mean) * (w[i] - mean);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

std::vector<double> normalized_to_mean(const std::vector<double>& w) {
  double mean = 0.0;
  for (double v : w) mean += v;
  mean /= w.size();
  if (!(mean > 0.0)) throw Error(ErrorCode::InvalidArgument, "mean yield is not positive");
  std::vector<double> out;
  for (double v : w) out.push_back(v / mean);
  return out;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "pearson needs two equal-length series");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

PeakComb analyze_comb(const std::vector<double>& x, const std::vector<double>& y, double period) {
  if (x.size() != y.size() || x.size() < 3 || !(period > 0.0))
    throw Error(ErrorCode::InvalidArgument, "bad comb input");
  const double top = *std::max_element(y.begin(), y.end());
  const double half = 0.4 * period;
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (!(y[i] > 1e-3 * top) || y[i] < y[i - 1] || y[i] < y[i + 1]) continue;
    bool principal = true;
    for (std::size_t j = 0; j < y.size() && principal; ++j)
      if (j != i && std::abs(x[j] - x[i]) <= half && y[j] > y[i]) principal = false;
    // Flat tops: keep the first sample only.
    if (principal && !idx.empty() && std::abs(x[idx.back()] - x[i]) <= half) principal = false;
    if (principal) idx.push_back(i);
  }
  PeakComb out;
  for (std::size_t i : idx) {
    // Parabola through the three samples around the maximum.
    const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
    const double den = y0 - 2.0 * y1 + y2;
    double d = den < 0.0 ? 0.5 * (y0 - y2) / den : 0.0;
    d = std::clamp(d, -0.5, 0.5);
    const double h = d >= 0.0 ? x[i + 1] - x[i] : x[i] - x[i - 1];
    out.positions.push_back(x[i] + d * h);
  }
  const std::size_t n = out.positions.size();
  if (n >= 3) {
    double mi = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mi += static_cast<double>(i) / n;
      mx += out.positions[i] / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sxy += (i - mi) * (out.positions[i] - mx);
      sxx += (i - mi) * (i - mi);
    }
    out.spacing = sxy / sxx;
  }
  if (n >= 2) {
    double v = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const std::size_t a = idx[k], b = idx[k + 1];
      const double valley = *std::min_element(y.begin() + a, y.begin() + b + 1);
      const double p = std::min(y[a], y[b]);
      v += (p - valley) / (p + valley);
    }
    out.visibility = v / (n - 1);
  }
  return out;
}

}  // namespace recollide
