#include "bellrelax/config.hpp"

#include "bellrelax/error.hpp"
#include "bellrelax/format.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bellrelax {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& value) {
  Int out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    throw ValidationError("config key '" + key + "': expected an integer, got '" + value + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    throw ValidationError("config key '" + key + "': expected a number, got '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ValidationError("config key '" + key + "': expected true|false, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

KeyValueFile parse_key_values(std::string_view text, std::string source) {
  KeyValueFile file;
  file.source = std::move(source);
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ValidationError(file.source + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(std::string_view(stripped).substr(0, eq));
    std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty())
      throw ValidationError(file.source + ":" + std::to_string(line_no) + ": empty key");
    for (const auto& [k, v] : file.entries)
      if (k == key)
        throw ValidationError(file.source + ":" + std::to_string(line_no) + ": duplicate key '" +
                              key + "'");
    file.entries.emplace_back(std::move(key), std::move(value));
  }
  return file;
}

KeyValueFile read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path.string(), "io");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str(), path.string());
}

void apply_setting(RunSettings& settings, const std::string& key, const std::string& value) {
  ExperimentConfig& e = settings.experiment;
  LatticeConfig& l = e.lattice;
  if (key == "N") l.N = parse_integer<int>(key, value);
  else if (key == "L") l.L = parse_real(key, value);
  else if (key == "mL") l.mL = parse_real(key, value);
  else if (key == "bc") l.bc = parse_boundary_condition(value);
  else if (key == "Nk") l.Nk = parse_integer<int>(key, value);
  else if (key == "epsilon_factor") l.epsilon_factor = parse_real(key, value);
  else if (key == "seed") l.seed = parse_integer<std::uint64_t>(key, value);
  else if (key == "n_steps") e.n_steps = parse_integer<std::int64_t>(key, value);
  else if (key == "spectrum_stride") e.spectrum_stride = parse_integer<std::int64_t>(key, value);
  else if (key == "n_modes") e.n_modes = parse_integer<int>(key, value);
  else if (key == "fit_include_zero") e.fit_include_zero = parse_bool(key, value);
  else if (key == "spectral_floor") e.spectral_floor = parse_real(key, value);
  else if (key == "stop_at_floor") e.stop_at_floor = parse_bool(key, value);
  else if (key == "c_stop") e.c_stop = parse_real(key, value);
  else if (key == "burn_in") e.burn_in = parse_real(key, value);
  else if (key == "transport_tolerance") e.transport_tolerance = parse_real(key, value);
  else if (key == "zero_probability_threshold") e.zero_probability_threshold = parse_real(key, value);
  else if (key == "seed_average") e.seed_average = parse_integer<int>(key, value);
  else if (key == "initial") e.initial = parse_initial_kind(value);
  else if (key == "gaussian_width") e.gaussian_width = parse_real(key, value);
  else if (key == "checkpoint") settings.write_checkpoint = parse_bool(key, value);
  else if (key == "mode_k") {
    const auto parts = split_list(value);
    if (parts.size() != 2) throw ValidationError("config key 'mode_k': expected 'k1,k2'");
    e.mode_k = {parse_integer<int>(key, parts[0]), parse_integer<int>(key, parts[1])};
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

RunSettings settings_from_key_values(const KeyValueFile& file) {
  RunSettings settings;
  if (const char* stride = std::getenv("BELLRELAX_SPECTRUM_STRIDE"))
    apply_setting(settings, "spectrum_stride", stride);
  if (const char* burn = std::getenv("BELLRELAX_BURN_IN")) apply_setting(settings, "burn_in", burn);
  for (const auto& [key, value] : file.entries) apply_setting(settings, key, value);
  settings.experiment.validate();
  return settings;
}

RunSettings load_run_settings(const std::filesystem::path& path) {
  return settings_from_key_values(read_key_value_file(path));
}

std::vector<std::pair<std::string, std::string>> to_key_values(const RunSettings& settings) {
  const ExperimentConfig& e = settings.experiment;
  const LatticeConfig& l = e.lattice;
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return {
      {"N", std::to_string(l.N)},
      {"L", fmt_double(l.L)},
      {"mL", fmt_double(l.mL)},
      {"bc", to_string(l.bc)},
      {"Nk", std::to_string(l.Nk)},
      {"epsilon_factor", fmt_double(l.epsilon_factor)},
      {"seed", std::to_string(l.seed)},
      {"n_steps", std::to_string(e.n_steps)},
      {"spectrum_stride", std::to_string(e.spectrum_stride)},
      {"n_modes", std::to_string(e.n_modes)},
      {"fit_include_zero", b(e.fit_include_zero)},
      {"spectral_floor", fmt_double(e.spectral_floor)},
      {"stop_at_floor", b(e.stop_at_floor)},
      {"c_stop", fmt_double(e.c_stop)},
      {"burn_in", fmt_double(e.burn_in)},
      {"transport_tolerance", fmt_double(e.transport_tolerance)},
      {"zero_probability_threshold", fmt_double(e.zero_probability_threshold)},
      {"seed_average", std::to_string(e.seed_average)},
      {"initial", to_string(e.initial)},
      {"mode_k", std::to_string(e.mode_k[0]) + "," + std::to_string(e.mode_k[1])},
      {"gaussian_width", fmt_double(e.gaussian_width)},
      {"checkpoint", b(settings.write_checkpoint)},
  };
}

RunSettings SweepSpec::point(std::size_t i) const {
  RunSettings s = base;
  apply_setting(s, axis, values.at(i));
  s.experiment.validate();
  return s;
}

SweepSpec sweep_from_key_values(const KeyValueFile& file, const std::filesystem::path& base_dir) {
  SweepSpec spec;
  std::string base_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& [key, value] : file.entries) {
    if (key == "base") {
      base_path = value;
    } else if (key.starts_with("sweep.")) {
      if (!spec.axis.empty())
        throw ValidationError("sweep spec lists more than one axis ('" + spec.axis + "' and '" +
                              key.substr(6) + "'); sweeps vary a single parameter");
      spec.axis = key.substr(6);
      spec.values = split_list(value);
    } else {
      overrides.emplace_back(key, value);
    }
  }
  if (spec.axis.empty()) throw ValidationError("sweep spec has no 'sweep.<key>' line");
  if (spec.values.empty()) throw ValidationError("sweep axis '" + spec.axis + "' has no values");

  KeyValueFile merged;
  if (!base_path.empty()) {
    std::filesystem::path p(base_path);
    if (p.is_relative()) p = base_dir / p;
    merged = read_key_value_file(p);
  }
  for (auto& [key, value] : overrides) {
    bool replaced = false;
    for (auto& entry : merged.entries) {
      if (entry.first == key) {
        entry.second = value;
        replaced = true;
      }
    }
    if (!replaced) merged.entries.emplace_back(key, value);
  }
  spec.base = settings_from_key_values(merged);
  // Validate every point up front so a bad value fails before any work.
  for (std::size_t i = 0; i < spec.values.size(); ++i) (void)spec.point(i);
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  return sweep_from_key_values(read_key_value_file(path), path.parent_path());
}

}  // namespace bellrelax
