#pragma once

// Command-line front end. Each command returns a process exit status:
// 0 success, 2 input or validation error, 3 numerical integrity violation.
// Errors are reported on `err` as {"error":{"kind":...,"message":...}}.

#include <filesystem>
#include <iosfwd>

namespace bellrelax {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIntegrity = 3;

/// Runs one experiment and writes spectrum.csv, fit.csv, record.json,
/// optionally checkpoint.bin, and finally manifest.json into out_dir.
///
/// BELLRELAX_FAULT_CORRUPT_STEP=<k> perturbs the cumulative product after
/// step k, which the transport check must catch (exit 3).
int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
            std::ostream& out, std::ostream& err);

/// Runs every point of a single-axis sweep on up to `jobs` threads, then the
/// scaling fit for the axis (N, mL or Nk). Writes sweep.csv, points/*.json,
/// scaling.csv when a fit was possible, and manifest.json; prints a summary
/// table on `out`. Failed points are reported and skipped; the exit status
/// is that of the first failure.
int cmd_sweep(const std::filesystem::path& spec_path, const std::filesystem::path& out_dir,
              int jobs, std::ostream& out, std::ostream& err);

/// Re-analyses a checkpoint: spectrum CSV rows (same format as the run's
/// spectrum.csv) to `csv_path`, or to `out` when empty, plus the slope fit
/// as a comment line on `err`.
int cmd_spectrum(const std::filesystem::path& checkpoint_path,
                 const std::filesystem::path& csv_path, std::ostream& out, std::ostream& err);

/// Argument parsing and dispatch for the bellrelax executable.
int run_cli(int argc, char** argv);

}  // namespace bellrelax
