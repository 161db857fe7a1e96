#ifndef PHOTODYN_MODEL_UNITS_HPP
#define PHOTODYN_MODEL_UNITS_HPP

#include <compare>

namespace photodyn {

// Times are carried in nanoseconds throughout the library. Rate coefficients
// are stored per nanosecond and converted explicitly at the MHz boundary
// (1 MHz = 1e-3 ns^-1).
inline constexpr double kMhzPerInverseNs = 1e3;
inline constexpr double kNsPerUs = 1e3;
inline constexpr double kPsPerNs = 1e3;
inline constexpr double kNsPerSecond = 1e9;

class Rate {
 public:
  constexpr Rate() = default;

  static constexpr Rate per_ns(double v) { return Rate(v); }
  static constexpr Rate mhz(double v) { return Rate(v / kMhzPerInverseNs); }

  constexpr double per_ns() const { return per_ns_; }
  constexpr double mhz() const { return per_ns_ * kMhzPerInverseNs; }
  // Mean dwell time for a process running at this rate.
  constexpr double lifetime_ns() const { return 1.0 / per_ns_; }

  constexpr Rate operator+(Rate o) const { return Rate(per_ns_ + o.per_ns_); }
  constexpr Rate operator-(Rate o) const { return Rate(per_ns_ - o.per_ns_); }
  constexpr Rate operator*(double s) const { return Rate(per_ns_ * s); }
  constexpr double operator/(Rate o) const { return per_ns_ / o.per_ns_; }
  constexpr auto operator<=>(const Rate&) const = default;

 private:
  constexpr explicit Rate(double v) : per_ns_(v) {}
  double per_ns_ = 0.0;
};

// Rate corresponding to a decay time given in nanoseconds.
constexpr Rate rate_from_lifetime(double tau_ns) { return Rate::per_ns(1.0 / tau_ns); }

namespace literals {
constexpr Rate operator""_MHz(long double v) { return Rate::mhz(static_cast<double>(v)); }
constexpr Rate operator""_MHz(unsigned long long v) { return Rate::mhz(static_cast<double>(v)); }
}  // namespace literals

}  // namespace photodyn

#endif  // PHOTODYN_MODEL_UNITS_HPP
