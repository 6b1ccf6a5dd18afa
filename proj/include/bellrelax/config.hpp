#pragma once

// Declarative key-value files for runs and sweeps.
//
// Run config (one `key = value` per line, `#` starts a comment):
//   N, L, mL, bc (dirichlet|periodic), Nk, epsilon_factor, seed,
//   n_steps, spectrum_stride, n_modes, fit_include_zero, spectral_floor,
//   stop_at_floor, c_stop, burn_in, transport_tolerance,
//   zero_probability_threshold, seed_average,
//   initial (superposition|eigenstate|gaussian), mode_k ("k1,k2"),
//   gaussian_width, checkpoint (write final checkpoint: true|false)
//
// Defaults for spectrum_stride and burn_in may be overridden through the
// environment variables BELLRELAX_SPECTRUM_STRIDE and BELLRELAX_BURN_IN;
// values in the file take precedence.
//
// Sweep spec: `base = <run config path, relative to the spec>`, exactly one
// `sweep.<key> = v1, v2, ...` line, and any other run keys as overrides of
// the base config.

#include "bellrelax/analysis.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bellrelax {

struct KeyValueFile {
  std::vector<std::pair<std::string, std::string>> entries;  // file order
  std::string source;
};

/// Throws ValidationError on lines without '=' or repeated keys.
KeyValueFile parse_key_values(std::string_view text, std::string source = "<memory>");
KeyValueFile read_key_value_file(const std::filesystem::path& path);

struct RunSettings {
  ExperimentConfig experiment;
  bool write_checkpoint = false;
};

/// Sets one key; throws ValidationError naming the key on bad values or
/// unknown keys.
void apply_setting(RunSettings& settings, const std::string& key, const std::string& value);

/// Environment defaults, then file entries, then validation.
RunSettings settings_from_key_values(const KeyValueFile& file);
RunSettings load_run_settings(const std::filesystem::path& path);

/// Resolved settings as ordered key-value pairs (round-trips through
/// apply_setting).
std::vector<std::pair<std::string, std::string>> to_key_values(const RunSettings& settings);

struct SweepSpec {
  RunSettings base;  // overrides already applied
  std::string axis;
  std::vector<std::string> values;

  /// Settings for the i-th point of the sweep.
  RunSettings point(std::size_t i) const;
};

SweepSpec load_sweep_spec(const std::filesystem::path& path);
SweepSpec sweep_from_key_values(const KeyValueFile& file, const std::filesystem::path& base_dir);

}  // namespace bellrelax
