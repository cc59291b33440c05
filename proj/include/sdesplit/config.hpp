#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdesplit {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Fully resolved run configuration. Everything a run needs is in here, so
// a serialized config doubles as the reproduction recipe in the manifest.
struct RunConfig {
  std::string model_id = "cir";
  std::map<std::string, double> params = {{"theta", 2.0}, {"mu", 6.0}, {"b", 0.2}};
  std::vector<std::string> schemes = {"lt", "strang", "eum", "milstein", "sd", "lamperti_eum"};
  std::vector<std::string> estimators = {"lt", "strang"};
  std::vector<std::string> fixed_params;  // names held at their configured value
  double x0 = 1.0;
  double h_fine = 0.000244140625;  // 2^-12
  double h_obs = 0.01;
  double T = 1.0;
  std::size_t M = 500;   // paths / replicates
  std::size_t N = 1000;  // observations per replicate
  std::uint64_t seed = 1;
  std::string out_dir = "runs";
  bool paper_scale = false;

  bool operator==(const RunConfig&) const = default;
};

// key=value configuration text: tokens separated by whitespace and/or
// newlines, '#' starts a comment. Unknown keys are rejected by name.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

// Applies one key=value assignment (flag overrides reuse this).
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);
// Validates model/parameter consistency; throws ConfigError.
void validate_config(const RunConfig& cfg);

// 17-significant-digit decimal formatting (round-trips doubles).
std::string format_double(double v);

// Writes via temp file + rename so interrupted runs leave nothing partial.
void write_text_atomic(const std::string& path, const std::string& content);

// Creates <base>/run-<timestamp>-s<seed>[-k] and returns its path.
std::string make_run_dir(const std::string& base, std::uint64_t seed);

// Runs one subcommand end to end, writing CSVs + manifest into a fresh run
// directory under cfg.out_dir. Returns the process exit code (0 success,
// 1 validation error, 2 runtime failure) and reports the run directory.
int run_subcommand(const std::string& command, RunConfig cfg, std::string* run_dir_out = nullptr);

}  // namespace sdesplit
