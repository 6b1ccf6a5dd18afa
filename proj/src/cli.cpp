#include "bellrelax/cli.hpp"

#include "bellrelax/config.hpp"
#include "bellrelax/error.hpp"
#include "bellrelax/format.hpp"
#include "bellrelax/record_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace bellrelax {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int report(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
  return code;
}

// Runs `body`, mapping exceptions onto exit codes and error JSON.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return report(err, e.kind(), e.what(), e.exit_code());
  } catch (const fs::filesystem_error& e) {
    return report(err, "io", e.what(), kExitValidation);
  } catch (const std::exception& e) {
    return report(err, "internal", e.what(), kExitIntegrity);
  }
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw ValidationError("cannot write " + path.string(), "io");
}

template <typename Writer>
void write_with(const fs::path& path, Writer&& writer) {
  std::ostringstream s;
  writer(s);
  write_text(path, s.str());
}

json config_json(const RunSettings& settings) {
  json cfg = json::object();
  for (const auto& [k, v] : to_key_values(settings)) cfg[k] = v;
  return cfg;
}

// The manifest goes through a temporary name so that its presence always
// means every listed file is complete.
void write_manifest(const fs::path& out_dir, json manifest, const std::vector<std::string>& files) {
  json outputs = json::array();
  for (const std::string& name : files) {
    const fs::path p = out_dir / name;
    outputs.push_back({{"path", name},
                       {"bytes", static_cast<std::uint64_t>(fs::file_size(p))},
                       {"sha256", sha256_file(p)}});
  }
  manifest["outputs"] = outputs;
  manifest["finished_at"] = utc_now();
  const fs::path tmp = out_dir / "manifest.json.tmp";
  write_text(tmp, manifest.dump(2) + "\n");
  fs::rename(tmp, out_dir / "manifest.json");
}

std::optional<std::int64_t> fault_step() {
  const char* v = std::getenv("BELLRELAX_FAULT_CORRUPT_STEP");
  if (!v || !*v) return std::nullopt;
  return std::strtoll(v, nullptr, 10);
}

}  // namespace

int cmd_run(const fs::path& config_path, const fs::path& out_dir, std::ostream& out,
            std::ostream& err) {
  return guarded(err, [&] {
    const std::string started = utc_now();
    const RunSettings settings = load_run_settings(config_path);
    fs::create_directories(out_dir);
    fs::remove(out_dir / "manifest.json");

    RunHooks hooks;
    if (const auto k = fault_step()) {
      // Shift mass into row 0 of every column: Ttilde P0 moves by 1e-3.
      hooks.tamper = [k = *k, step = std::int64_t{0}](CumulativeTransition& cum) mutable {
        if (++step == k) cum.mutable_matrix().row(0).array() += 1e-3;
      };
    }
    RunOutput run = run_experiment(settings.experiment, hooks, settings.write_checkpoint);
    RelaxationRecord record = settings.experiment.seed_average > 1
                                  ? run_averaged(settings.experiment, run.record)
                                  : run.record;

    std::vector<std::string> files{"spectrum.csv", "fit.csv", "record.json"};
    write_with(out_dir / "spectrum.csv", [&](std::ostream& s) { write_spectrum_csv(s, run.snapshots); });
    write_with(out_dir / "fit.csv", [&](std::ostream& s) { write_fit_csv(s, record); });
    write_text(out_dir / "record.json", record_to_json(record).dump(2) + "\n");
    if (settings.write_checkpoint && run.final_state) {
      save_checkpoint(out_dir / "checkpoint.bin", *run.final_state);
      files.push_back("checkpoint.bin");
    }
    write_manifest(out_dir,
                   {{"command", "run"},
                    {"version", BELLRELAX_VERSION},
                    {"config_path", fs::absolute(config_path).string()},
                    {"config", config_json(settings)},
                    {"seed", settings.experiment.lattice.seed},
                    {"started_at", started},
                    {"steps_run", record.steps_run},
                    {"stop_reason", record.stop_reason}},
                   files);

    out << "N=" << record.N << " mL=" << fmt_double(record.mL) << " LdP="
        << fmt_double(record.momentum_spread) << " steps=" << record.steps_run << " ("
        << record.stop_reason << ") fit=" << to_string(record.fit.status);
    if (record.fit.status == FitStatus::Ok)
      out << " t_eq/L=" << fmt_double(record.fit.t_eq_over_L) << " +- "
          << fmt_double(record.fit.t_eq_stderr) << " c0=" << fmt_double(record.fit.c0)
          << " r2=" << fmt_double(record.fit.r2);
    out << '\n';
    return kExitOk;
  });
}

namespace {

std::optional<ScalingModel> model_for_axis(const std::string& axis) {
  if (axis == "N") return ScalingModel::VsSpacing;
  if (axis == "mL") return ScalingModel::VsMass;
  if (axis == "Nk") return ScalingModel::VsMomentumSquared;
  return std::nullopt;
}

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-') c = '_';
  return out;
}

struct PointOutcome {
  std::optional<RelaxationRecord> record;
  std::string error_kind;
  std::string error_message;
  int exit_code = kExitOk;
};

}  // namespace

int cmd_sweep(const fs::path& spec_path, const fs::path& out_dir, int jobs, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const std::string started = utc_now();
    const SweepSpec spec = load_sweep_spec(spec_path);
    fs::create_directories(out_dir / "points");
    fs::remove(out_dir / "manifest.json");

    const std::size_t n = spec.values.size();
    std::vector<PointOutcome> outcomes(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < n; i = next++) {
        PointOutcome& o = outcomes[i];
        try {
          o.record = run_averaged(spec.point(i).experiment);
        } catch (const Error& e) {
          o.error_kind = e.kind();
          o.error_message = e.what();
          o.exit_code = e.exit_code();
        } catch (const std::exception& e) {
          o.error_kind = "internal";
          o.error_message = e.what();
          o.exit_code = kExitIntegrity;
        }
      }
    };
    const int threads = std::clamp(jobs, 1, static_cast<int>(n));
    {
      std::vector<std::jthread> pool;
      for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
      worker();
    }

    // Merge in spec order, independent of completion order.
    std::vector<std::string> ok_values;
    std::vector<RelaxationRecord> records;
    std::vector<std::string> files;
    json failures = json::array();
    int status = kExitOk;
    for (std::size_t i = 0; i < n; ++i) {
      const PointOutcome& o = outcomes[i];
      if (!o.record) {
        failures.push_back({{spec.axis, spec.values[i]}, {"kind", o.error_kind}, {"message", o.error_message}});
        report(err, o.error_kind, spec.axis + "=" + spec.values[i] + ": " + o.error_message, o.exit_code);
        if (status == kExitOk) status = o.exit_code;
        continue;
      }
      const std::string name = "points/" + sanitize(spec.axis + "_" + spec.values[i]) + ".json";
      write_text(out_dir / name, record_to_json(*o.record).dump(2) + "\n");
      files.push_back(name);
      ok_values.push_back(spec.values[i]);
      records.push_back(*o.record);
    }
    write_with(out_dir / "sweep.csv",
               [&](std::ostream& s) { write_sweep_csv(s, spec.axis, ok_values, records); });
    files.push_back("sweep.csv");

    std::ostringstream summary;
    summary << std::left << std::setw(10) << spec.axis << std::setw(14) << "LdP" << std::setw(16)
            << "t_eq/L" << std::setw(16) << "stderr" << std::setw(14) << "c0" << std::setw(14)
            << "r2" << "status\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
      const RelaxationRecord& r = records[i];
      summary << std::setw(10) << ok_values[i] << std::setw(14) << fmt_double(r.momentum_spread)
              << std::setw(16) << fmt_double(r.fit.t_eq_over_L) << std::setw(16)
              << fmt_double(r.fit.t_eq_stderr) << std::setw(14) << fmt_double(r.fit.c0)
              << std::setw(14) << fmt_double(r.fit.r2) << to_string(r.fit.status) << '\n';
    }
    for (const json& f : failures)
      summary << std::setw(10) << f[spec.axis].get<std::string>() << "failed ("
              << f["kind"].get<std::string>() << ")\n";

    json fits = json::object();
    if (const auto model = model_for_axis(spec.axis)) {
      try {
        const ScalingFit sf = scaling_fit(records, *model);
        write_with(out_dir / "scaling.csv", [&](std::ostream& s) { write_scaling_csv(s, sf); });
        files.push_back("scaling.csv");
        summary << to_string(sf.model) << ": slope = " << fmt_double(sf.fit.slope) << " +- "
                << fmt_double(sf.fit.slope_stderr) << ", intercept = "
                << fmt_double(sf.fit.intercept) << " +- " << fmt_double(sf.fit.intercept_stderr)
                << ", r2 = " << fmt_double(sf.fit.r2) << '\n';
        fits[to_string(sf.model)] = {{"slope", sf.fit.slope},
                                     {"slope_stderr", sf.fit.slope_stderr},
                                     {"intercept", sf.fit.intercept},
                                     {"intercept_stderr", sf.fit.intercept_stderr},
                                     {"r2", sf.fit.r2}};
        if (*model == ScalingModel::VsMomentumSquared) {
          const LinearFit pl = power_law_probe(records);
          summary << "power law: exponent = " << fmt_double(pl.slope) << " +- "
                  << fmt_double(pl.slope_stderr) << '\n';
          fits["power_law"] = {{"exponent", pl.slope}, {"exponent_stderr", pl.slope_stderr}};
        }
      } catch (const ValidationError& e) {
        summary << "scaling fit skipped: " << e.what() << '\n';
      }
    }
    write_text(out_dir / "summary.txt", summary.str());
    files.push_back("summary.txt");
    out << summary.str();

    write_manifest(out_dir,
                   {{"command", "sweep"},
                    {"version", BELLRELAX_VERSION},
                    {"spec_path", fs::absolute(spec_path).string()},
                    {"axis", spec.axis},
                    {"values", spec.values},
                    {"config", config_json(spec.base)},
                    {"seed", spec.base.experiment.lattice.seed},
                    {"jobs", threads},
                    {"started_at", started},
                    {"failures", failures},
                    {"fits", fits}},
                   files);
    return status;
  });
}

int cmd_spectrum(const fs::path& checkpoint_path, const fs::path& csv_path, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const Checkpoint ck = load_checkpoint(checkpoint_path);
    const SpectrumSnapshot snap = eigen_spectrum(ck.cumulative, ck.step, ck.t_over_L());
    const ExperimentConfig defaults;
    const SlopeFit sf = slope_fit(
        snap, SlopeFitOptions{defaults.n_modes, defaults.fit_include_zero, defaults.spectral_floor});
    if (csv_path.empty()) {
      write_spectrum_csv(out, {snap});
    } else {
      write_with(csv_path, [&](std::ostream& s) { write_spectrum_csv(s, {snap}); });
    }
    err << "# step=" << ck.step << " t_over_L=" << fmt_double(ck.t_over_L())
        << " c=" << fmt_double(sf.c) << " c_stderr=" << fmt_double(sf.c_stderr)
        << " r2=" << fmt_double(sf.r2) << " modes=" << sf.modes_used << '\n';
    return kExitOk;
  });
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Relaxation to quantum equilibrium in a discrete stochastic pilot-wave model"};
  app.set_version_flag("--version", BELLRELAX_VERSION);
  app.require_subcommand(1);

  std::string config, out_dir, spec, checkpoint, csv;
  int jobs = 1;

  CLI::App* run = app.add_subcommand("run", "Run one relaxation experiment");
  run->add_option("--config", config, "Run config file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "Run a single-axis parameter sweep");
  sweep->add_option("--spec", spec, "Sweep spec file")->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--jobs", jobs, "Parallel workers")->check(CLI::PositiveNumber);

  CLI::App* spectrum = app.add_subcommand("spectrum", "Re-analyse a checkpoint");
  spectrum->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  spectrum->add_option("--out", csv, "CSV output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  if (run->parsed()) return cmd_run(config, out_dir, std::cout, std::cerr);
  if (sweep->parsed()) return cmd_sweep(spec, out_dir, jobs, std::cout, std::cerr);
  return cmd_spectrum(checkpoint, csv, std::cout, std::cerr);
}

}  // namespace bellrelax
