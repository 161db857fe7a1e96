#ifndef PHOTODYN_CLI_COMMANDS_HPP
#define PHOTODYN_CLI_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "photodyn/io/config.hpp"
#include "photodyn/model/types.hpp"
#include "photodyn/sim/detector.hpp"

namespace photodyn::cli {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitData = 3, kExitFit = 4 };

enum class OutputFormat { kText, kCsv };

struct Invocation {
  std::string command;  // simulate | correlate | fit | predict
  io::Config config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  OutputFormat format = OutputFormat::kText;
  // Named inputs: "a", "b", "manifest" for correlate, "in" for fit.
  std::map<std::string, std::filesystem::path> inputs;
  // Default output directory (normally from PHOTODYN_OUT_DIR).
  std::optional<std::filesystem::path> default_out_dir;
};

// Every key accepted in any config file.
const std::set<std::string>& known_keys();

// Model from [model]: either a preset with optional per-key overrides, or
// explicit sigma_mhz_per_uw, k21_mhz, k23_mhz and k31_mhz (constant) or
// k31_0_mhz, d_mhz, c_uw (saturating). Throws ConfigError naming the key.
model::EmitterModel resolve_model(const io::Config& config);
sim::DetectorConfig resolve_detector(const io::Config& config);
model::BeamConfig resolve_beam(const io::Config& config);

// Runs one command with errors mapped to exit codes; messages go to `err`.
int execute(const Invocation& inv, std::ostream& out, std::ostream& err);

// Same, but exceptions propagate.
void run_simulate(const Invocation& inv, std::ostream& out);
void run_correlate(const Invocation& inv, std::ostream& out);
// Returns false when the optimiser did not converge.
bool run_fit(const Invocation& inv, std::ostream& out);
void run_predict(const Invocation& inv, std::ostream& out);

std::string tool_version();

}  // namespace photodyn::cli

#endif  // PHOTODYN_CLI_COMMANDS_HPP
