#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace recollide {

inline constexpr double kPi = std::numbers::pi;

namespace units {
inline constexpr double kHartreeEv = 27.211386245988;
inline constexpr double kTimeFs = 0.024188843265857;  // one atomic time unit in fs
inline constexpr double kBohrNm = 0.0529177210903;
inline constexpr double kSpeedOfLight = 137.035999084;
inline constexpr double kDeuteronMass = 3670.48296788;  // electron masses

inline double omega_from_wavelength_nm(double nm) {
  return 2.0 * kPi * kSpeedOfLight * kBohrNm / nm;
}
inline double ev_to_au(double ev) { return ev / kHartreeEv; }
inline double au_to_ev(double au) { return au * kHartreeEv; }
inline double fs_to_au(double fs) { return fs / kTimeFs; }
inline double au_to_fs(double t) { return t * kTimeFs; }
}  // namespace units

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
  bool operator==(const Vec3&) const = default;
};

enum class ErrorCode {
  InvalidArgument,
  NoBoundStates,
  GridTooCoarse,
  EnergyBelowAsymptote,
  GridMismatch,
  NoReturn,
  ZeroField,
  TravelTooShort,
  ClosedChannel,
  SliceOutOfRange,
  Config,
  Convergence,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace recollide
