#ifndef PHOTODYN_FITTING_LINESHAPE_HPP
#define PHOTODYN_FITTING_LINESHAPE_HPP

#include <optional>
#include <string_view>

namespace photodyn::fit {

enum class LineShape { kLorentzian, kGaussian, kPseudoVoigt };

std::optional<LineShape> parse_line_shape(std::string_view name);
std::string_view line_shape_name(LineShape shape);

// Area-normalised peak. For the pseudo-Voigt, eta is the Lorentzian fraction
// and both components share the FWHM.
struct LinePeak {
  double center_nm = 0.0;
  double fwhm_nm = 0.0;
  double area = 0.0;
  double eta = 0.5;
};

struct LineGradient {
  double d_center = 0.0;
  double d_fwhm = 0.0;
  double d_area = 0.0;
  double d_eta = 0.0;
};

double line_value(LineShape shape, const LinePeak& peak, double x_nm, LineGradient* gradient = nullptr);

// Maximum of the profile.
double peak_height(LineShape shape, const LinePeak& peak);

}  // namespace photodyn::fit

#endif  // PHOTODYN_FITTING_LINESHAPE_HPP
