#include "photodyn/io/table_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "photodyn/error.hpp"
#include "photodyn/io/timestamp_file.hpp"

namespace photodyn::io {

const std::string* Table::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return &v;
  }
  return nullptr;
}

void Table::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : metadata) {
    if (k == key) {
      v = value;
      return;
    }
  }
  metadata.emplace_back(key, value);
}

bool Table::has_column(const std::string& name) const {
  for (const auto& c : columns) {
    if (c == name) return true;
  }
  return false;
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw DataError("table has no column '" + name + "'");
}

std::vector<double> Table::column_values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string render_table(const Table& t) {
  std::ostringstream out;
  for (const auto& [k, v] : t.metadata) {
    if (k.empty()) {
      out << "# " << v << "\n";
    } else {
      out << "# " << k << ": " << v << "\n";
    }
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_number(r[i]);
    out << "\n";
  }
  return out.str();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto c = line.find(',');
    out.push_back(trim(line.substr(0, c)));
    if (c == std::string_view::npos) break;
    line = line.substr(c + 1);
  }
  return out;
}

bool parse_number(std::string_view s, double& v) {
  if (s == "nan") {
    v = std::nan("");
    return true;
  }
  if (s == "inf" || s == "-inf") {
    v = s[0] == '-' ? -INFINITY : INFINITY;
    return true;
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Table parse_table(const std::string& text, const std::string& source) {
  Table t;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool have_header = false;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string_view line = trim(std::string_view(text.data() + pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      const auto colon = body.find(": ");
      if (colon == std::string_view::npos || body.substr(0, colon).find(' ') != std::string_view::npos) {
        t.metadata.emplace_back("", std::string(body));
      } else {
        t.metadata.emplace_back(std::string(body.substr(0, colon)), std::string(trim(body.substr(colon + 2))));
      }
      continue;
    }
    const auto fields = split(line);
    if (!have_header) {
      for (auto f : fields) {
        if (f.empty()) throw DataError(where + ": empty column name");
        t.columns.emplace_back(f);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != t.columns.size()) {
      throw DataError(where + ": expected " + std::to_string(t.columns.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!parse_number(fields[i], row[i])) {
        throw DataError(where + ": column '" + t.columns[i] + "' is not a number: '" + std::string(fields[i]) + "'");
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw DataError(source + ": no column header found");
  return t;
}

Table read_table(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_table(std::string(bytes.begin(), bytes.end()), path.string());
}

void write_table(const std::filesystem::path& path, const Table& table) {
  write_file_bytes(path, render_table(table));
}

Table histogram_table(const corr::CorrelationHistogram& h) {
  Table t;
  t.set_meta("kind", "histogram");
  t.set_meta("duration_ns", format_number(h.duration_ns));
  t.set_meta("rate_a_cps", format_number(h.rate_a_cps));
  t.set_meta("rate_b_cps", format_number(h.rate_b_cps));
  t.set_meta("total_pairs", std::to_string(h.total_pairs));
  t.columns = {"tau_lo_ns", "tau_hi_ns", "tau_ns", "counts", "g2", "sigma_g2"};
  for (std::size_t k = 0; k < h.size(); ++k) {
    t.rows.push_back({h.bin_edges_ns[k], h.bin_edges_ns[k + 1], h.center(k), static_cast<double>(h.counts[k]),
                      h.g2[k], h.sigma_g2[k]});
  }
  return t;
}

namespace {

double meta_number(const Table& t, const std::string& key, double fallback) {
  const std::string* v = t.meta(key);
  if (v == nullptr) return fallback;
  double out = 0.0;
  if (!parse_number(trim(*v), out)) throw DataError("metadata '" + key + "' is not a number");
  return out;
}

}  // namespace

corr::CorrelationHistogram histogram_from_table(const Table& t) {
  if (t.rows.empty()) throw DataError("histogram has no bins");
  const auto lo = t.column_values("tau_lo_ns");
  const auto hi = t.column_values("tau_hi_ns");
  const auto g2 = t.column_values("g2");
  corr::CorrelationHistogram h;
  h.bin_edges_ns = lo;
  h.bin_edges_ns.push_back(hi.back());
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (!(hi[k] > lo[k])) throw DataError("histogram bin " + std::to_string(k + 1) + " has non-positive width");
    if (k > 0 && std::abs(lo[k] - hi[k - 1]) > 1e-9 * std::max(1.0, std::abs(lo[k]))) {
      throw DataError("histogram bins are not contiguous at row " + std::to_string(k + 1));
    }
  }
  h.g2 = g2;
  h.counts.assign(lo.size(), 0);
  if (t.has_column("counts")) {
    const auto c = t.column_values("counts");
    for (std::size_t k = 0; k < c.size(); ++k) h.counts[k] = static_cast<std::uint64_t>(std::llround(std::max(0.0, c[k])));
  }
  if (t.has_column("sigma_g2")) {
    h.sigma_g2 = t.column_values("sigma_g2");
  } else {
    h.sigma_g2.assign(lo.size(), 1.0);
  }
  for (double s : h.sigma_g2) {
    if (!(s > 0.0)) throw DataError("histogram sigma_g2 must be positive");
  }
  h.duration_ns = meta_number(t, "duration_ns", 0.0);
  h.rate_a_cps = meta_number(t, "rate_a_cps", 0.0);
  h.rate_b_cps = meta_number(t, "rate_b_cps", 0.0);
  h.total_pairs = static_cast<std::uint64_t>(meta_number(t, "total_pairs", 0.0));
  return h;
}

Table spectrum_table(const spectral::Spectrum& s) {
  Table t;
  t.set_meta("kind", "spectrum");
  if (s.temperature_k) t.set_meta("temperature_k", format_number(*s.temperature_k));
  t.set_meta("background_subtracted", s.background_subtracted ? "true" : "false");
  t.columns = {"wavelength_nm", "intensity"};
  for (std::size_t i = 0; i < s.size(); ++i) t.rows.push_back({s.wavelength_nm[i], s.intensity[i]});
  return t;
}

spectral::Spectrum spectrum_from_table(const Table& t) {
  spectral::Spectrum s;
  s.wavelength_nm = t.column_values("wavelength_nm");
  s.intensity = t.column_values("intensity");
  if (const std::string* v = t.meta("temperature_k")) {
    double k = 0.0;
    if (!parse_number(trim(*v), k)) throw DataError("metadata 'temperature_k' is not a number");
    s.temperature_k = k;
  }
  if (const std::string* v = t.meta("background_subtracted")) s.background_subtracted = *v == "true";
  s.validate();
  return s;
}

}  // namespace photodyn::io
