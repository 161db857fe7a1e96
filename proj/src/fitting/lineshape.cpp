#include "photodyn/fitting/lineshape.hpp"

#include <cmath>
#include <numbers>

namespace photodyn::fit {

namespace {

constexpr double kPi = std::numbers::pi;
// FWHM = 2 sqrt(2 ln 2) sigma
const double kFwhmPerSigma = 2.0 * std::sqrt(2.0 * std::numbers::ln2);

struct Profile {
  double value;
  double d_x;     // derivative with respect to x
  double d_fwhm;
};

Profile lorentzian(double dx, double fwhm) {
  const double g = 0.5 * fwhm;
  const double den = dx * dx + g * g;
  const double v = g / (kPi * den);
  // dv/dg = (den - 2 g^2) / (pi den^2) = (dx^2 - g^2) / (pi den^2)
  return {v, -2.0 * dx * g / (kPi * den * den), 0.5 * (dx * dx - g * g) / (kPi * den * den)};
}

Profile gaussian(double dx, double fwhm) {
  const double s = fwhm / kFwhmPerSigma;
  const double z = dx / s;
  const double v = std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * kPi));
  // dv/ds = v (z^2 - 1) / s
  return {v, -v * z / s, v * (z * z - 1.0) / s / kFwhmPerSigma};
}

}  // namespace

std::optional<LineShape> parse_line_shape(std::string_view name) {
  if (name == "lorentzian") return LineShape::kLorentzian;
  if (name == "gaussian") return LineShape::kGaussian;
  if (name == "pseudo-voigt" || name == "pseudovoigt") return LineShape::kPseudoVoigt;
  return std::nullopt;
}

std::string_view line_shape_name(LineShape shape) {
  switch (shape) {
    case LineShape::kLorentzian:
      return "lorentzian";
    case LineShape::kGaussian:
      return "gaussian";
    case LineShape::kPseudoVoigt:
      return "pseudo-voigt";
  }
  return "unknown";
}

double line_value(LineShape shape, const LinePeak& peak, double x_nm, LineGradient* gradient) {
  const double dx = x_nm - peak.center_nm;
  Profile p{};
  double d_eta = 0.0;
  switch (shape) {
    case LineShape::kLorentzian:
      p = lorentzian(dx, peak.fwhm_nm);
      break;
    case LineShape::kGaussian:
      p = gaussian(dx, peak.fwhm_nm);
      break;
    case LineShape::kPseudoVoigt: {
      const Profile l = lorentzian(dx, peak.fwhm_nm);
      const Profile g = gaussian(dx, peak.fwhm_nm);
      const double e = peak.eta;
      p = {e * l.value + (1.0 - e) * g.value, e * l.d_x + (1.0 - e) * g.d_x, e * l.d_fwhm + (1.0 - e) * g.d_fwhm};
      d_eta = l.value - g.value;
      break;
    }
  }
  if (gradient != nullptr) {
    gradient->d_center = -peak.area * p.d_x;
    gradient->d_fwhm = peak.area * p.d_fwhm;
    gradient->d_area = p.value;
    gradient->d_eta = peak.area * d_eta;
  }
  return peak.area * p.value;
}

double peak_height(LineShape shape, const LinePeak& peak) { return line_value(shape, peak, peak.center_nm); }

}  // namespace photodyn::fit
