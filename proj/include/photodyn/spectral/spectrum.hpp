#ifndef PHOTODYN_SPECTRAL_SPECTRUM_HPP
#define PHOTODYN_SPECTRAL_SPECTRUM_HPP

#include <optional>
#include <vector>

#include "photodyn/error.hpp"

namespace photodyn::spectral {

struct Spectrum {
  std::vector<double> wavelength_nm;  // strictly ascending
  std::vector<double> intensity;
  std::optional<double> temperature_k;
  bool background_subtracted = false;

  std::size_t size() const { return wavelength_nm.size(); }

  void validate() const {
    if (wavelength_nm.size() != intensity.size()) throw DataError("spectrum wavelength/intensity length mismatch");
    if (wavelength_nm.size() < 2) throw DataError("spectrum needs at least two samples");
    for (std::size_t i = 1; i < wavelength_nm.size(); ++i) {
      if (!(wavelength_nm[i] > wavelength_nm[i - 1])) throw DataError("spectrum wavelengths must be strictly ascending");
    }
  }
};

}  // namespace photodyn::spectral

#endif  // PHOTODYN_SPECTRAL_SPECTRUM_HPP
