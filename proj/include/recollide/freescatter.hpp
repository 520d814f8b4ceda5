#pragma once

#include <array>
#include <complex>
#include <vector>

#include "recollide/impact.hpp"
#include "recollide/molstruct.hpp"
#include "recollide/sfa.hpp"

namespace recollide {

enum class Frame { RelativeCOM, Lab };

// Collinear electron + ion wave packet. The beam axis is the polarization axis x; momenta
// below are signed components along it. RelativeCOM is separable in (k, K), Lab in (p, P).
struct WavePacketSpec {
  Frame frame = Frame::RelativeCOM;
  double k0 = 1.5, dk = 0.5, K0 = 0.0, dK = 1.0;
  double p0 = 1.5, dp = 0.5, P0 = 0.0, dP = 1.0;
  std::vector<cplx> vib_coeffs{1.0};  // a_n over ion levels
  double tau_d_fs = 2.0;

  void validate() const;
  // Copy with sum |a_n|^2 = 1.
  WavePacketSpec normalized() const;
};

struct RelativeMomenta {
  Vec3 K;
  Vec3 k;
};
struct LabMomenta {
  Vec3 p;
  Vec3 P;
};

// Ion mass in electron masses (two deuterons and one electron).
double ion_mass(const MolecularData& mol);
RelativeMomenta lab_to_relative(const Vec3& p, const Vec3& P, double m_ion);
LabMomenta relative_to_lab(const Vec3& K, const Vec3& k, double m_ion);
// RelativeCOM spec whose relative-momentum marginal equals that of a Lab spec.
WavePacketSpec matched_relative(const WavePacketSpec& lab, double m_ion);

// Untruncated recollision-mimic amplitudes FC(n, i) exp(-(2 I_p)^{3/2} / 3|E| - i E_n tau) of
// neutral level i, before normalization.
std::vector<cplx> recollision_mimic(const MolecularData& mol, int level, double birth_field,
                                    double tau_d);
// a_n for an initial neutral superposition, normalized so that single levels give sum |a_n|^2 = 1:
// a = sum_i C_i a^(i) / sqrt(sum_i |C_i|^2 |a^(i)|^2).
std::vector<cplx> vib_coeffs_recollision(const MolecularData& mol, double birth_field, double tau_d,
                                         const InitialSuperposition& psi = InitialSuperposition::level(0));

// <phi_g(n); k_i; K | Psi_0> for the normalized spec.
cplx initial_projection(const WavePacketSpec& spec, int n, double k_i, double K, double m_ion);

// Energy-shell incident momentum sqrt(|k_f|^2 + 2 (E - E_n)); ClosedChannel when negative.
double k_i0(double e_total, double e_n, const Vec3& k_f);

// Sum over open channels of (2 pi / k_i0) <u, E, J; k_f | V | g, n; k_i0 x> <g, n; k_i0; K | Psi_0>.
cplx scattered_projection(const WavePacketSpec& spec, const ImpactModel& model,
                          const MolecularData& mol, double e_rel, int j, const Vec3& k_f, double K);

// Spherical k_f grid: midpoints in |k_f| on [0, k_max] times Gauss-Legendre in the polar cosine.
struct FreeScatterGrid {
  double e_max = 30.0 / units::kHartreeEv;
  int n_e = 120;
  double k_max = 0.0;  // 0: derived from the wave-packet extent
  int n_k = 160;
  int n_mu = 48;
  double cut_sigma = 7.0;  // packet tails beyond this many widths are dropped

  void validate() const;
  double e_step() const { return e_max / n_e; }
  double e_rel(int i) const { return (i + 0.5) * e_step(); }
};

// Channel-resolved yields h[e][j](n, n') = int d^3k_f dK X_n X_n'^*, so that
// W(E) = sum_j sum_nn' a_n a_n'^* h for vibrational amplitudes a.
struct ChannelGram {
  std::vector<double> e_rel;
  std::vector<int> partial_waves;
  int n_channels = 0;
  double e_step = 0.0;
  double k_max = 0.0;
  std::vector<cplx> h;

  cplx at(int ie, int ij, int n, int m) const;
};

SpectrumResult yields(const ChannelGram& g, const std::vector<cplx>& a);

class FreeScatterEngine {
 public:
  FreeScatterEngine(const MolecularData& mol, const ImpactModel& model,
                    const FreeScatterGrid& grid, const WavePacketSpec& spec, int threads = 1);
  ChannelGram run() const;

 private:
  double log_weight(double k) const;

  const MolecularData* mol_;
  ImpactModel model_;
  FreeScatterGrid grid_;
  WavePacketSpec spec_;
  int threads_;
  double m_ion_;
  // X_n carries exp(log_weight(k_n)); the K integral adds exp(cross k_n k_n').
  double cross_ = 0.0;
  std::array<double, 3> lab_{};  // a, b1, b0 of the Lab K integral
  double k_lo_ = 0.0, k_hi_ = 0.0;
};

SpectrumResult yields(const WavePacketSpec& spec, const MolecularData& mol,
                      const ImpactModel& model, const FreeScatterGrid& grid = {}, int threads = 1);

}  // namespace recollide
