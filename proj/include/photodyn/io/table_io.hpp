#ifndef PHOTODYN_IO_TABLE_IO_HPP
#define PHOTODYN_IO_TABLE_IO_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "photodyn/correlation/histogram.hpp"
#include "photodyn/spectral/spectrum.hpp"

namespace photodyn::io {

// Comma separated table preceded by '#'-prefixed "key: value" metadata:
//
//   # photodyn 0.1.0
//   # kind: histogram
//   # input_sha256: ...
//   tau_lo_ns,tau_hi_ns,...
//   -50,-49.9,...
struct Table {
  std::vector<std::pair<std::string, std::string>> metadata;  // in file order
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  const std::string* meta(const std::string& key) const;
  void set_meta(const std::string& key, const std::string& value);
  // Column index; throws DataError if missing.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
  std::vector<double> column_values(const std::string& name) const;
};

// Shortest round-trip decimal form; identical input gives identical text.
std::string format_number(double v);

std::string render_table(const Table& table);
Table parse_table(const std::string& text, const std::string& source = "<table>");
Table read_table(const std::filesystem::path& path);
void write_table(const std::filesystem::path& path, const Table& table);

// Columns tau_lo_ns, tau_hi_ns, tau_ns, counts, g2, sigma_g2; metadata
// duration_ns, rate_a_cps, rate_b_cps, total_pairs.
Table histogram_table(const corr::CorrelationHistogram& hist);
corr::CorrelationHistogram histogram_from_table(const Table& table);

// Columns wavelength_nm, intensity; optional metadata temperature_k.
Table spectrum_table(const spectral::Spectrum& spectrum);
spectral::Spectrum spectrum_from_table(const Table& table);

}  // namespace photodyn::io

#endif  // PHOTODYN_IO_TABLE_IO_HPP
