#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "photodyn/cli/commands.hpp"
#include "photodyn/error.hpp"

namespace {

using photodyn::cli::Invocation;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "text";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.overrides, "override a config key, section.key=value")->take_all();
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--out", c.out, "output file (output directory for simulate)");
  cmd->add_option("--format", c.format, "stdout format")->check(CLI::IsMember({"text", "csv"}));
}

// Flag-to-key shortcuts; the value is stored verbatim and validated later.
struct Shortcut {
  std::string flag;
  std::string key;
  std::string help;
  std::string value;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-level emitter photon statistics: simulate, correlate, fit, predict"};
  app.set_version_flag("--version", photodyn::cli::tool_version());
  app.require_subcommand(1);

  Common common;
  std::vector<Shortcut> shortcuts;
  std::string in_a, in_b, manifest, fit_in;

  auto* sim = app.add_subcommand("simulate", "simulate an HBT measurement into timestamp files");
  auto* cor = app.add_subcommand("correlate", "histogram coincidences of two timestamp files");
  auto* fit = app.add_subcommand("fit", "fit a model to a table");
  auto* pre = app.add_subcommand("predict", "tabulate g2 parameters and count rate against power");
  for (auto* cmd : {sim, cor, fit, pre}) add_common(cmd, common);

  shortcuts.reserve(16);
  auto shortcut = [&](CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    shortcuts.push_back({flag, key, help, ""});
    cmd->add_option(flag, shortcuts.back().value, help + " (" + key + ")");
  };
  shortcut(sim, "--preset", "model.preset", "model preset");
  shortcut(sim, "--power", "excitation.power_uw", "excitation power in uW");
  shortcut(sim, "--duration", "run.duration_ns", "acquisition time in ns");
  shortcut(cor, "--bin-width", "correlate.bin_width_ns", "bin width in ns");
  shortcut(cor, "--tau-max", "correlate.tau_max_ns", "largest delay in ns");
  shortcut(cor, "--workers", "correlate.workers", "worker threads");
  shortcut(fit, "--kind", "fit.kind", "g2, saturation, spectrum, polarization or deshelving");
  shortcut(pre, "--preset", "model.preset", "model preset");
  cor->add_option("--a", in_a, "channel A timestamps");
  cor->add_option("--b", in_b, "channel B timestamps");
  cor->add_option("--manifest", manifest, "simulation manifest (duration and channel files)");
  fit->add_option("input", fit_in, "input table")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : photodyn::cli::kExitConfig;
  }

  Invocation inv;
  inv.command = app.get_subcommands().front()->get_name();
  try {
    if (!common.config.empty()) inv.config = photodyn::io::Config::load(common.config);
    for (const auto& s : shortcuts) {
      if (!s.value.empty()) inv.config.set(s.key, s.value);
    }
    for (const auto& o : common.overrides) inv.config.apply_override(o);
  } catch (const photodyn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return photodyn::cli::kExitConfig;
  }
  inv.seed = common.seed;
  if (!common.out.empty()) inv.out = common.out;
  inv.format = common.format == "csv" ? photodyn::cli::OutputFormat::kCsv : photodyn::cli::OutputFormat::kText;
  if (!in_a.empty()) inv.inputs["a"] = in_a;
  if (!in_b.empty()) inv.inputs["b"] = in_b;
  if (!manifest.empty()) inv.inputs["manifest"] = manifest;
  if (!fit_in.empty()) inv.inputs["in"] = fit_in;
  if (const char* dir = std::getenv("PHOTODYN_OUT_DIR"); dir != nullptr && *dir != '\0') inv.default_out_dir = dir;

  return photodyn::cli::execute(inv, std::cout, std::cerr);
}
