#include "photodyn/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <variant>

#include "photodyn/correlation/histogram.hpp"
#include "photodyn/error.hpp"
#include "photodyn/fitting/curve_fits.hpp"
#include "photodyn/fitting/g2_fit.hpp"
#include "photodyn/fitting/line_fit.hpp"
#include "photodyn/io/digest.hpp"
#include "photodyn/io/table_io.hpp"
#include "photodyn/io/timestamp_file.hpp"
#include "photodyn/model/emission.hpp"
#include "photodyn/model/g2.hpp"
#include "photodyn/model/limits.hpp"
#include "photodyn/model/presets.hpp"
#include "photodyn/spectral/metrics.hpp"

#ifndef PHOTODYN_VERSION
#define PHOTODYN_VERSION "0.0.0"
#endif

namespace photodyn::cli {

namespace fs = std::filesystem;
using io::format_number;

std::string tool_version() { return std::string("photodyn ") + PHOTODYN_VERSION; }

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "model.preset", "model.sigma_mhz_per_uw", "model.k21_mhz", "model.k23_mhz", "model.k31_mhz",
      "model.k31_0_mhz", "model.d_mhz", "model.c_uw",
      "excitation.power_uw", "excitation.power_psat",
      "detector.eta_det", "detector.split_ratio", "detector.jitter_sigma_ps", "detector.dead_time_ns",
      "detector.background_rate_cps",
      "run.duration_ns", "run.seed",
      "manifest.tool_version", "manifest.config_sha256", "manifest.file_a", "manifest.file_b",
      "manifest.events_a", "manifest.events_b", "manifest.sha256_a", "manifest.sha256_b",
      "beam.waist_um", "beam.transmission", "beam.eta_coll", "beam.eta_qe",
      "correlate.bin_width_ns", "correlate.tau_max_ns", "correlate.fine_extent_ns", "correlate.coarse_width_ns",
      "correlate.normalization", "correlate.workers", "correlate.duration_ns",
      "fit.kind", "fit.irf_sigma_ps", "fit.init_a", "fit.init_tau1_ns", "fit.init_tau2_ns", "fit.fit_amplitude",
      "fit.fit_background", "fit.bin_average", "fit.n_peaks", "fit.shape", "fit.baseline", "fit.centers_nm",
      "fit.k21_mhz", "fit.k23_mhz", "fit.k31_0_mhz", "fit.d_mhz", "fit.a_inf", "fit.tau1_zero_ns",
      "fit.tau2_zero_ns", "fit.tau2_inf_ns", "fit.init_c_uw", "fit.init_sigma_mhz_per_uw", "fit.max_iterations",
      "spectral.zpl_window_nm", "spectral.subtract_baseline", "spectral.debye_waller",
      "predict.powers_uw", "predict.p_min_uw", "predict.p_max_uw", "predict.points_per_decade",
      "predict.include_zero",
  };
  return keys;
}

namespace {

double positive(const io::Config& c, const std::string& key) {
  const auto v = c.find_double(key);
  if (!v) throw ConfigError("missing key '" + key + "'");
  if (!(*v > 0.0)) throw ConfigError("key '" + key + "' must be positive, got " + format_number(*v));
  return *v;
}

double non_negative(const io::Config& c, const std::string& key, double fallback) {
  const double v = c.get_double(key, fallback);
  if (!(v >= 0.0)) throw ConfigError("key '" + key + "' must be non-negative, got " + format_number(v));
  return v;
}

template <class F>
auto as_config_error(const std::string& context, F&& f) {
  try {
    return f();
  } catch (const ModelError& e) {
    throw ConfigError(context + ": " + e.what());
  }
}

}  // namespace

model::EmitterModel resolve_model(const io::Config& c) {
  model::EmitterModel m;
  bool have_base = false;
  if (auto name = c.get("model.preset")) {
    auto p = model::preset_model(*name);
    if (!p) throw ConfigError("key 'model.preset': unknown preset '" + *name + "'");
    m = *p;
    have_base = true;
  }
  auto field = [&](const std::string& key, double current, bool allow_zero) {
    if (!c.has(key)) {
      if (!have_base) throw ConfigError("missing key '" + key + "'");
      return current;
    }
    return allow_zero ? non_negative(c, key, 0.0) : positive(c, key);
  };
  m.sigma_mhz_per_uw = field("model.sigma_mhz_per_uw", m.sigma_mhz_per_uw, false);
  m.k21 = Rate::mhz(field("model.k21_mhz", m.k21.mhz(), false));
  m.k23 = Rate::mhz(field("model.k23_mhz", m.k23.mhz(), true));

  const bool constant_key = c.has("model.k31_mhz");
  const bool saturating_key = c.has("model.k31_0_mhz") || c.has("model.d_mhz") || c.has("model.c_uw");
  if (constant_key && saturating_key) {
    throw ConfigError("key 'model.k31_mhz' cannot be combined with k31_0_mhz/d_mhz/c_uw");
  }
  if (constant_key) {
    m.deshelving = model::ConstantDeshelving{Rate::mhz(positive(c, "model.k31_mhz"))};
  } else if (saturating_key || !have_base) {
    const auto* base = std::get_if<model::SaturatingDeshelving>(&m.deshelving);
    const bool inherit = have_base && base != nullptr;
    auto law_field = [&](const std::string& key, double current, bool allow_zero) {
      if (!c.has(key)) {
        if (!inherit) throw ConfigError("missing key '" + key + "'");
        return current;
      }
      return allow_zero ? non_negative(c, key, 0.0) : positive(c, key);
    };
    model::SaturatingDeshelving law;
    law.k31_0 = Rate::mhz(law_field("model.k31_0_mhz", inherit ? base->k31_0.mhz() : 0.0, true));
    law.d = Rate::mhz(law_field("model.d_mhz", inherit ? base->d.mhz() : 0.0, true));
    law.c_uw = law_field("model.c_uw", inherit ? base->c_uw : 0.0, false);
    m.deshelving = law;
  }
  as_config_error("model", [&] {
    m.validate();
    return 0;
  });
  return m;
}

sim::DetectorConfig resolve_detector(const io::Config& c) {
  sim::DetectorConfig d;
  d.eta_det = c.get_double("detector.eta_det", d.eta_det);
  d.split_ratio = c.get_double("detector.split_ratio", d.split_ratio);
  d.jitter_sigma_ps = non_negative(c, "detector.jitter_sigma_ps", d.jitter_sigma_ps);
  d.dead_time_ns = non_negative(c, "detector.dead_time_ns", d.dead_time_ns);
  d.background_rate_cps = non_negative(c, "detector.background_rate_cps", d.background_rate_cps);
  as_config_error("detector", [&] {
    d.validate();
    return 0;
  });
  return d;
}

model::BeamConfig resolve_beam(const io::Config& c) {
  model::BeamConfig b;
  b.waist_um = c.get_double("beam.waist_um", b.waist_um);
  b.transmission = c.get_double("beam.transmission", b.transmission);
  b.eta_coll = c.get_double("beam.eta_coll", b.eta_coll);
  b.eta_qe = c.get_double("beam.eta_qe", b.eta_qe);
  as_config_error("beam", [&] {
    b.validate();
    return 0;
  });
  return b;
}

namespace {

// Writes a model back as explicit keys, so a manifest does not depend on the
// preset table.
void store_model(io::Config& c, const model::EmitterModel& m) {
  c.set("model.sigma_mhz_per_uw", format_number(m.sigma_mhz_per_uw));
  c.set("model.k21_mhz", format_number(m.k21.mhz()));
  c.set("model.k23_mhz", format_number(m.k23.mhz()));
  if (const auto* law = std::get_if<model::ConstantDeshelving>(&m.deshelving)) {
    c.set("model.k31_mhz", format_number(law->k31.mhz()));
  } else {
    const auto& s = std::get<model::SaturatingDeshelving>(m.deshelving);
    c.set("model.k31_0_mhz", format_number(s.k31_0.mhz()));
    c.set("model.d_mhz", format_number(s.d.mhz()));
    c.set("model.c_uw", format_number(s.c_uw));
  }
}

fs::path output_dir(const Invocation& inv) {
  if (inv.out) return *inv.out;
  if (inv.default_out_dir) return *inv.default_out_dir;
  return fs::path(".");
}

// Destination of the machine-readable table, if any.
std::optional<fs::path> output_file(const Invocation& inv, const std::string& default_name) {
  if (inv.out) return inv.out;
  if (inv.default_out_dir) return *inv.default_out_dir / default_name;
  return std::nullopt;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::uint64_t resolve_seed(const Invocation& inv) {
  if (inv.seed) return *inv.seed;
  const long long s = inv.config.get_int("run.seed", 1);
  if (s < 0) throw ConfigError("key 'run.seed' must be non-negative");
  return static_cast<std::uint64_t>(s);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void run_simulate(const Invocation& inv, std::ostream& out) {
  const io::Config& c = inv.config;
  const model::EmitterModel m = resolve_model(c);
  const sim::DetectorConfig det = resolve_detector(c);
  const double duration = non_negative(c, "run.duration_ns", 0.0);
  if (!c.has("run.duration_ns")) throw ConfigError("missing key 'run.duration_ns'");
  double power = 0.0;
  if (c.has("excitation.power_uw") && c.has("excitation.power_psat")) {
    throw ConfigError("key 'excitation.power_uw' cannot be combined with 'excitation.power_psat'");
  } else if (c.has("excitation.power_uw")) {
    power = non_negative(c, "excitation.power_uw", 0.0);
  } else if (c.has("excitation.power_psat")) {
    power = non_negative(c, "excitation.power_psat", 0.0) * model::saturation_power(m);
  } else {
    throw ConfigError("missing key 'excitation.power_uw'");
  }
  const std::uint64_t seed = resolve_seed(inv);

  io::Config resolved;
  store_model(resolved, m);
  resolved.set("excitation.power_uw", format_number(power));
  resolved.set("detector.eta_det", format_number(det.eta_det));
  resolved.set("detector.split_ratio", format_number(det.split_ratio));
  resolved.set("detector.jitter_sigma_ps", format_number(det.jitter_sigma_ps));
  resolved.set("detector.dead_time_ns", format_number(det.dead_time_ns));
  resolved.set("detector.background_rate_cps", format_number(det.background_rate_cps));
  resolved.set("run.duration_ns", format_number(duration));
  resolved.set("run.seed", std::to_string(seed));
  const std::string config_digest = io::sha256_hex(resolved.serialize());

  const sim::StreamPair streams = sim::simulate_hbt(m, power, duration, det, seed);

  const fs::path dir = output_dir(inv);
  fs::create_directories(dir);
  const fs::path fa = dir / "channel_a.phdn";
  const fs::path fb = dir / "channel_b.phdn";
  io::write_timestamp_file(fa, streams.a);
  io::write_timestamp_file(fb, streams.b);

  io::Config manifest = resolved;
  manifest.set("manifest.tool_version", tool_version());
  manifest.set("manifest.config_sha256", config_digest);
  manifest.set("manifest.file_a", fa.filename().string());
  manifest.set("manifest.file_b", fb.filename().string());
  manifest.set("manifest.events_a", std::to_string(streams.a.size()));
  manifest.set("manifest.events_b", std::to_string(streams.b.size()));
  manifest.set("manifest.sha256_a", io::sha256_file(fa));
  manifest.set("manifest.sha256_b", io::sha256_file(fb));
  io::write_file_bytes(dir / "manifest.ini",
                       "# " + tool_version() + " simulation manifest; re-run with --config\n" + manifest.serialize());

  if (inv.format == OutputFormat::kCsv) {
    io::Table t;
    t.set_meta("tool", tool_version());
    t.set_meta("kind", "simulation");
    t.set_meta("config_sha256", config_digest);
    t.columns = {"power_uw", "duration_ns", "seed", "events_a", "events_b"};
    t.rows.push_back({power, duration, static_cast<double>(seed), static_cast<double>(streams.a.size()),
                      static_cast<double>(streams.b.size())});
    out << io::render_table(t);
  } else {
    out << "simulated " << fmt(duration) << " ns at " << fmt(power) << " uW (seed " << seed << ")\n"
        << "  channel A: " << streams.a.size() << " events, " << fmt(streams.a.rate_cps()) << " cps\n"
        << "  channel B: " << streams.b.size() << " events, " << fmt(streams.b.rate_cps()) << " cps\n"
        << "  written to " << dir.string() << "\n";
  }
}

void run_correlate(const Invocation& inv, std::ostream& out) {
  const io::Config& c = inv.config;
  std::optional<fs::path> pa;
  std::optional<fs::path> pb;
  if (auto it = inv.inputs.find("a"); it != inv.inputs.end()) pa = it->second;
  if (auto it = inv.inputs.find("b"); it != inv.inputs.end()) pb = it->second;
  double duration = 0.0;
  if (auto it = inv.inputs.find("manifest"); it != inv.inputs.end()) {
    const io::Config man = io::Config::load(it->second);
    man.check_keys(known_keys());
    duration = man.get_double("run.duration_ns", 0.0);
    const fs::path base = it->second.parent_path();
    if (!pa) pa = base / man.get_string("manifest.file_a", "channel_a.phdn");
    if (!pb) pb = base / man.get_string("manifest.file_b", "channel_b.phdn");
  }
  if (!pa || !pb) throw ConfigError("correlate needs both channel files (--a and --b, or --manifest)");
  if (c.has("correlate.duration_ns")) duration = positive(c, "correlate.duration_ns");

  const io::TimestampData da = io::read_timestamp_file(*pa, sim::Channel::A);
  const io::TimestampData db = io::read_timestamp_file(*pb, sim::Channel::B);
  if (da.timestamps_ps.empty() || db.timestamps_ps.empty()) throw DataError("insufficient events");
  if (duration <= 0.0) {
    duration = 1e-3 * static_cast<double>(std::max(da.timestamps_ps.back(), db.timestamps_ps.back()));
  }
  const sim::PhotonStream a = io::to_stream(da, duration);
  const sim::PhotonStream b = io::to_stream(db, duration);

  const double bin = c.has("correlate.bin_width_ns") ? positive(c, "correlate.bin_width_ns") : 0.1;
  const double tau_max = c.has("correlate.tau_max_ns") ? positive(c, "correlate.tau_max_ns") : 500.0;
  const bool two_scale = c.has("correlate.fine_extent_ns") || c.has("correlate.coarse_width_ns");
  const corr::BinLayout layout =
      two_scale ? as_config_error("correlate",
                                  [&] {
                                    return corr::BinLayout::two_scale(bin, positive(c, "correlate.fine_extent_ns"),
                                                                      positive(c, "correlate.coarse_width_ns"),
                                                                      tau_max);
                                  })
                : as_config_error("correlate", [&] { return corr::BinLayout::uniform(bin, tau_max); });
  corr::CorrelateOptions opts;
  const std::string norm = c.get_string("correlate.normalization", "rates");
  if (norm == "rates") {
    opts.normalization = corr::Normalization::kChannelRates;
  } else if (norm == "plateau") {
    opts.normalization = corr::Normalization::kPlateau;
  } else {
    throw ConfigError("key 'correlate.normalization' must be 'rates' or 'plateau'");
  }
  const long long workers = c.get_int("correlate.workers", 1);
  if (workers < 1 || workers > 256) throw ConfigError("key 'correlate.workers' must lie in [1, 256]");
  opts.workers = static_cast<unsigned>(workers);

  const corr::CorrelationHistogram h = corr::correlate(a, b, layout, opts);
  io::Table t = io::histogram_table(h);
  t.metadata.insert(t.metadata.begin(), {"tool", tool_version()});
  t.set_meta("input_a_sha256", io::sha256_file(*pa));
  t.set_meta("input_b_sha256", io::sha256_file(*pb));
  t.set_meta("bin_width_ns", format_number(bin));
  t.set_meta("tau_max_ns", format_number(layout.tau_max_ns()));
  if (two_scale) {
    t.set_meta("fine_extent_ns", c.get_string("correlate.fine_extent_ns", ""));
    t.set_meta("coarse_width_ns", c.get_string("correlate.coarse_width_ns", ""));
  }
  t.set_meta("normalization", norm);

  if (auto f = output_file(inv, "histogram.csv")) {
    ensure_parent(*f);
    io::write_table(*f, t);
  }
  if (inv.format == OutputFormat::kCsv) {
    out << io::render_table(t);
  } else {
    out << "correlated " << a.size() << " x " << b.size() << " events over " << fmt(duration) << " ns\n"
        << "  " << h.size() << " bins, " << h.total_pairs << " pairs within +/-" << fmt(layout.tau_max_ns())
        << " ns\n";
  }
}

namespace {

struct ReportRow {
  std::string name;
  double value = 0.0;
  double error = 0.0;
  bool identifiable = true;
  bool fixed = false;
  bool derived = false;
};

struct Report {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<ReportRow> rows;
  bool converged = true;
};

void add_fit(Report& r, const fit::FitResult& f) {
  for (std::size_t i = 0; i < f.names.size(); ++i) {
    const double var = f.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    r.rows.push_back({f.names[i], f.values[i], std::sqrt(std::max(0.0, var)), f.identifiable[i], f.fixed[i], false});
  }
  r.meta.emplace_back("chi2", format_number(f.chi2));
  r.meta.emplace_back("reduced_chi2", format_number(f.reduced_chi2));
  r.meta.emplace_back("dof", std::to_string(f.dof));
  r.meta.emplace_back("iterations", std::to_string(f.iterations));
  r.meta.emplace_back("converged", f.converged ? "true" : "false");
  if (!f.message.empty()) r.meta.emplace_back("message", f.message);
  r.converged = r.converged && f.converged;
}

void add_derived(Report& r, const std::string& name, double value, double error = 0.0) {
  r.rows.push_back({name, value, error, true, false, true});
}

std::string render_report_csv(const Report& r) {
  std::ostringstream o;
  for (const auto& [k, v] : r.meta) o << "# " << k << ": " << v << "\n";
  o << "parameter,value,error,identifiable,fixed,derived\n";
  for (const auto& row : r.rows) {
    o << row.name << "," << format_number(row.value) << "," << format_number(row.error) << ","
      << (row.identifiable ? 1 : 0) << "," << (row.fixed ? 1 : 0) << "," << (row.derived ? 1 : 0) << "\n";
  }
  return o.str();
}

std::string render_report_text(const Report& r) {
  std::ostringstream o;
  for (const auto& [k, v] : r.meta) {
    if (k == "tool" || k == "kind") continue;
    o << std::left << std::setw(16) << (k + ":") << v << "\n";
  }
  o << "\n";
  for (const auto& row : r.rows) {
    o << "  " << std::left << std::setw(20) << row.name << std::right << std::setw(14) << fmt(row.value);
    if (row.fixed) {
      o << "   (fixed)";
    } else if (!row.identifiable) {
      o << "   (not identifiable)";
    } else if (row.error > 0.0) {
      o << " +/- " << fmt(row.error);
    }
    if (row.derived) o << "   [derived]";
    o << "\n";
  }
  return o.str();
}

fit::CurveFitOptions curve_options(const io::Config& c, bool scale) {
  fit::CurveFitOptions o;
  o.scale_covariance = scale;
  const long long it = c.get_int("fit.max_iterations", o.lm.max_iterations);
  if (it < 1) throw ConfigError("key 'fit.max_iterations' must be at least 1");
  o.lm.max_iterations = static_cast<int>(it);
  return o;
}

std::vector<double> optional_column(const io::Table& t, const std::string& name) {
  return t.has_column(name) ? t.column_values(name) : std::vector<double>(t.rows.size(), 0.0);
}

void fit_g2_kind(const io::Config& c, const io::Table& t, Report& r) {
  const corr::CorrelationHistogram h = io::histogram_from_table(t);
  model::G2Params init = fit::estimate_g2_init(h);
  init.a = c.get_double("fit.init_a", init.a);
  if (c.has("fit.init_tau1_ns")) init.tau1_ns = positive(c, "fit.init_tau1_ns");
  if (c.has("fit.init_tau2_ns")) init.tau2_ns = positive(c, "fit.init_tau2_ns");
  const fit::Irf irf{non_negative(c, "fit.irf_sigma_ps", 354.0)};
  fit::G2FitOptions o;
  o.curve = curve_options(c, false);
  o.fit_amplitude = c.get_bool("fit.fit_amplitude", false);
  o.fit_background = c.get_bool("fit.fit_background", false);
  o.bin_average = c.get_bool("fit.bin_average", true);
  r.meta.emplace_back("irf_sigma_ps", format_number(irf.sigma_ps));
  add_fit(r, fit::fit_g2(h, irf, init, o));
}

void fit_saturation_kind(const io::Config& c, const io::Table& t, Report& r) {
  const auto p = t.column_values("power_uw");
  const auto i = t.column_values("rate_kcps");
  const auto s = optional_column(t, "sigma_kcps");
  std::vector<fit::SaturationPoint> pts;
  for (std::size_t k = 0; k < p.size(); ++k) pts.push_back({p[k], i[k], s[k]});
  const fit::FitResult f = fit::fit_saturation(pts, curve_options(c, false));
  add_fit(r, f);
  const model::BeamConfig beam = resolve_beam(c);
  add_derived(r, "i_sat_kw_cm2", model::intensity_from_power(beam, f.value("p_sat_uw")),
              model::intensity_from_power(beam, f.error("p_sat_uw")));
}

void fit_spectrum_kind(const io::Config& c, const io::Table& t, Report& r) {
  const spectral::Spectrum s = io::spectrum_from_table(t);
  const long long n = c.get_int("fit.n_peaks", 1);
  if (n < 1 || n > 32) throw ConfigError("key 'fit.n_peaks' must lie in [1, 32]");
  const std::string shape_name = c.get_string("fit.shape", "lorentzian");
  const auto shape = fit::parse_line_shape(shape_name);
  if (!shape) throw ConfigError("key 'fit.shape': unknown line shape '" + shape_name + "'");
  fit::LineFitOptions o;
  o.curve = curve_options(c, true);
  o.linear_baseline = c.get_bool("fit.baseline", true);
  o.initial_centers_nm = c.get_doubles("fit.centers_nm");
  if (!o.initial_centers_nm.empty() && static_cast<long long>(o.initial_centers_nm.size()) != n) {
    throw ConfigError("key 'fit.centers_nm' must list exactly fit.n_peaks values");
  }
  const fit::LineFit lf = fit::fit_lines(s, static_cast<int>(n), *shape, o);
  r.meta.emplace_back("shape", std::string(fit::line_shape_name(*shape)));
  add_fit(r, lf.result);
  const std::size_t dom = lf.dominant();
  const fit::LinePeak& zpl = lf.peaks[dom];
  add_derived(r, "zpl_center_nm", zpl.center_nm, lf.errors[dom].d_center);
  add_derived(r, "zpl_fwhm_nm", zpl.fwhm_nm, lf.errors[dom].d_fwhm);
  if (c.get_bool("spectral.debye_waller", true)) {
    spectral::WavelengthWindow w = spectral::default_zpl_window(zpl);
    const auto win = c.get_doubles("spectral.zpl_window_nm");
    if (!win.empty()) {
      if (win.size() != 2 || !(win[1] > win[0])) throw ConfigError("key 'spectral.zpl_window_nm' must be 'lo, hi'");
      w = {win[0], win[1]};
    }
    const auto full = spectral::full_window(s);
    w.lo_nm = std::max(w.lo_nm, full.lo_nm);
    w.hi_nm = std::min(w.hi_nm, full.hi_nm);
    spectral::DebyeWallerOptions dw_opts;
    dw_opts.subtract_baseline = c.get_bool("spectral.subtract_baseline", true);
    const double dw = spectral::debye_waller(s, w, full, dw_opts);
    add_derived(r, "debye_waller", dw);
    if (dw > 0.0) add_derived(r, "huang_rhys", spectral::huang_rhys(dw));
  }
}

void fit_polarization_kind(const io::Config& c, const io::Table& t, Report& r) {
  const auto ang = t.column_values("angle_deg");
  const auto in = t.column_values("intensity");
  const auto s = optional_column(t, "sigma");
  std::vector<fit::PolarizationPoint> pts;
  for (std::size_t k = 0; k < ang.size(); ++k) pts.push_back({ang[k], in[k], s[k]});
  const fit::PolarizationFit pf = fit::fit_polarization(pts, curve_options(c, false));
  add_fit(r, pf.result);
  add_derived(r, "visibility", pf.visibility, pf.visibility_error);
}

void fit_deshelving_kind(const io::Config& c, const io::Table& t, Report& r) {
  model::ExtendedRates rates;
  const bool explicit_rates = c.has("fit.k21_mhz") || c.has("fit.k23_mhz") || c.has("fit.k31_0_mhz") || c.has("fit.d_mhz");
  if (explicit_rates) {
    rates.k21 = Rate::mhz(positive(c, "fit.k21_mhz"));
    rates.k23 = Rate::mhz(non_negative(c, "fit.k23_mhz", 0.0));
    rates.k31_0 = Rate::mhz(non_negative(c, "fit.k31_0_mhz", 0.0));
    rates.d = Rate::mhz(non_negative(c, "fit.d_mhz", 0.0));
  } else {
    model::ExtendedLimits lim;
    lim.a_inf = positive(c, "fit.a_inf");
    lim.tau1_zero_ns = positive(c, "fit.tau1_zero_ns");
    lim.tau2_zero_ns = positive(c, "fit.tau2_zero_ns");
    lim.tau2_inf_ns = positive(c, "fit.tau2_inf_ns");
    rates = as_config_error("fit limits", [&] { return model::rates_from_limits_extended(lim); });
  }
  const auto p = t.column_values("power_uw");
  const auto a = t.column_values("a");
  const auto s = optional_column(t, "sigma");
  std::vector<fit::DeshelvingPoint> pts;
  for (std::size_t k = 0; k < p.size(); ++k) pts.push_back({p[k], a[k], s[k]});
  fit::DeshelvingFitOptions o;
  o.curve = curve_options(c, false);
  if (c.has("fit.init_c_uw")) o.init_c_uw = positive(c, "fit.init_c_uw");
  if (c.has("fit.init_sigma_mhz_per_uw")) o.init_sigma_mhz_per_uw = positive(c, "fit.init_sigma_mhz_per_uw");
  const fit::FitResult f = fit::fit_deshelving(pts, rates, o);
  add_fit(r, f);
  add_derived(r, "k21_mhz", rates.k21.mhz());
  add_derived(r, "k23_mhz", rates.k23.mhz());
  add_derived(r, "k31_0_mhz", rates.k31_0.mhz());
  add_derived(r, "d_mhz", rates.d.mhz());
  const model::EmitterModel m = fit::extended_model(rates, f.value("c_uw"), f.value("sigma_mhz_per_uw"));
  add_derived(r, "p_sat_uw", model::saturation_power(m));
}

}  // namespace

bool run_fit(const Invocation& inv, std::ostream& out) {
  const io::Config& c = inv.config;
  const std::string kind = c.get_string("fit.kind", "");
  if (kind.empty()) throw ConfigError("missing key 'fit.kind' (--kind)");
  auto it = inv.inputs.find("in");
  if (it == inv.inputs.end()) throw ConfigError("fit needs an input file");
  const io::Table t = io::read_table(it->second);

  Report r;
  r.meta.emplace_back("tool", tool_version());
  r.meta.emplace_back("kind", "fit-report");
  r.meta.emplace_back("fit_kind", kind);
  r.meta.emplace_back("input_sha256", io::sha256_file(it->second));
  if (kind == "g2") {
    fit_g2_kind(c, t, r);
  } else if (kind == "saturation") {
    fit_saturation_kind(c, t, r);
  } else if (kind == "spectrum") {
    fit_spectrum_kind(c, t, r);
  } else if (kind == "polarization") {
    fit_polarization_kind(c, t, r);
  } else if (kind == "deshelving") {
    fit_deshelving_kind(c, t, r);
  } else {
    throw ConfigError("key 'fit.kind': unknown kind '" + kind + "'");
  }

  if (auto f = output_file(inv, "fit_" + kind + ".csv")) {
    ensure_parent(*f);
    io::write_file_bytes(*f, render_report_csv(r));
  }
  out << (inv.format == OutputFormat::kCsv ? render_report_csv(r) : render_report_text(r));
  return r.converged;
}

void run_predict(const Invocation& inv, std::ostream& out) {
  const io::Config& c = inv.config;
  const model::EmitterModel m = resolve_model(c);
  const model::BeamConfig beam = resolve_beam(c);
  std::vector<double> powers;
  if (c.has("predict.powers_uw")) {
    powers = c.get_doubles("predict.powers_uw");
    for (double p : powers) {
      if (!(p >= 0.0)) throw ConfigError("key 'predict.powers_uw' must hold non-negative powers");
    }
  } else {
    const double lo = c.has("predict.p_min_uw") ? positive(c, "predict.p_min_uw") : 0.1;
    const double hi = c.has("predict.p_max_uw") ? positive(c, "predict.p_max_uw") : 1000.0;
    const long long ppd = c.get_int("predict.points_per_decade", 10);
    if (ppd < 1) throw ConfigError("key 'predict.points_per_decade' must be at least 1");
    if (hi < lo) throw ConfigError("key 'predict.p_max_uw' must not be below predict.p_min_uw");
    powers = model::log_power_grid(lo, hi, static_cast<int>(ppd));
    if (c.get_bool("predict.include_zero", false)) powers.insert(powers.begin(), 0.0);
  }
  const auto params = model::predict_power_dependence(m, powers);

  io::Config resolved;
  store_model(resolved, m);
  std::string grid;
  for (double p : powers) grid += (grid.empty() ? "" : ",") + format_number(p);
  resolved.set("predict.powers_uw", grid);

  io::Table t;
  t.set_meta("tool", tool_version());
  t.set_meta("kind", "prediction");
  t.set_meta("input_sha256", io::sha256_hex(resolved.serialize()));
  t.set_meta("p_sat_uw", format_number(model::saturation_power(m)));
  t.columns = {"power_uw", "intensity_kw_cm2", "a", "tau1_ns", "tau2_ns", "k31_mhz", "count_rate_kcps"};
  for (std::size_t i = 0; i < powers.size(); ++i) {
    t.rows.push_back({powers[i], model::intensity_from_power(beam, powers[i]), params[i].a, params[i].tau1_ns,
                      params[i].tau2_ns, model::effective_k31(m.deshelving, powers[i]).mhz(),
                      model::count_rate(m, beam, powers[i])});
  }
  if (auto f = output_file(inv, "predict.csv")) {
    ensure_parent(*f);
    io::write_table(*f, t);
  }
  if (inv.format == OutputFormat::kCsv) {
    out << io::render_table(t);
    return;
  }
  out << "P_sat = " << fmt(model::saturation_power(m)) << " uW\n";
  out << std::right << std::setw(12) << "P [uW]" << std::setw(12) << "I [kW/cm2]" << std::setw(10) << "a"
      << std::setw(12) << "tau1 [ns]" << std::setw(12) << "tau2 [ns]" << std::setw(14) << "rate [kcps]" << "\n";
  for (const auto& row : t.rows) {
    out << std::setw(12) << fmt(row[0]) << std::setw(12) << fmt(row[1]) << std::setw(10) << fmt(row[2])
        << std::setw(12) << fmt(row[3]) << std::setw(12) << fmt(row[4]) << std::setw(14) << fmt(row[6]) << "\n";
  }
}

int execute(const Invocation& inv, std::ostream& out, std::ostream& err) {
  try {
    inv.config.check_keys(known_keys());
    if (inv.command == "simulate") {
      run_simulate(inv, out);
    } else if (inv.command == "correlate") {
      run_correlate(inv, out);
    } else if (inv.command == "fit") {
      if (!run_fit(inv, out)) {
        err << "error: fit did not converge\n";
        return kExitFit;
      }
    } else if (inv.command == "predict") {
      run_predict(inv, out);
    } else {
      err << "error: unknown command '" << inv.command << "'\n";
      return kExitConfig;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ModelError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const FitError& e) {
    err << "fit error: " << e.what() << "\n";
    return kExitFit;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace photodyn::cli
