#pragma once

// End-to-end relaxation experiments and the fits that turn c(t) series into
// equilibrium times and scaling laws.

#include "bellrelax/bell.hpp"
#include "bellrelax/checkpoint.hpp"
#include "bellrelax/lattice.hpp"
#include "bellrelax/linear_fit.hpp"
#include "bellrelax/spectral.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bellrelax {

enum class InitialKind { Superposition, Eigenstate, Gaussian };

std::string to_string(InitialKind kind);
InitialKind parse_initial_kind(const std::string& text);

struct ExperimentConfig {
  LatticeConfig lattice;

  InitialKind initial = InitialKind::Superposition;
  WaveNumber mode_k{1, 1};      // for InitialKind::Eigenstate
  double gaussian_width = 1.0;  // lattice spacings, for InitialKind::Gaussian

  std::int64_t n_steps = 4000;
  std::int64_t spectrum_stride = 0;  // 0: n_steps / 20
  int n_modes = 25;
  bool fit_include_zero = true;
  /// Snapshots whose n_modes-th eigenvalue lies below this are
  /// roundoff-limited: excluded from the c(t) fit and, with stop_at_floor,
  /// they end the run.
  double spectral_floor = 1e-13;
  bool stop_at_floor = true;
  /// Stop once c(t) reaches this value.
  double c_stop = 3.0;
  /// Snapshots with t/L below this are left out of the c(t) fit.
  double burn_in = 1.0;
  /// Abort threshold for sum_n | |psi_n|^2 - (Ttilde P0)_n |. Each column
  /// repair leaks up to ~1e-6 of probability, so the default sits well above
  /// that and well below any real corruption of the product.
  double transport_tolerance = 1e-4;
  double zero_probability_threshold = 1e-14;
  /// Number of consecutive seeds averaged into one record.
  int seed_average = 1;

  std::int64_t stride() const;
  void validate() const;
};

/// One (t, c) sample of the suppression coefficient with diagnostics.
struct SeriesPoint {
  std::int64_t step = 0;
  double t_over_L = 0.0;
  double c = 0.0;
  double c_stderr = 0.0;
  double r2 = 0.0;
  int modes_used = 0;
  bool fit_available = false;
  double lambda1 = 0.0;  // |lambda^1|
  int unit_eigenvalues = 0;
  double dispersion = 0.0;
  std::optional<double> v0_distance;
  double transport_error = 0.0;
};

struct TimePoint {
  double t_over_L = 0.0;
  double c = 0.0;
};

enum class FitStatus { Ok, NoRelaxation, InsufficientPoints };
std::string to_string(FitStatus status);
FitStatus parse_fit_status(const std::string& text);

/// c(t) = c0 + t / t_eq.
struct RelaxationFit {
  FitStatus status = FitStatus::InsufficientPoints;
  double c0 = 0.0;
  double c0_stderr = 0.0;
  double inverse_t_eq = 0.0;  // L / t_eq, the fitted slope
  double inverse_t_eq_stderr = 0.0;
  double t_eq_over_L = 0.0;
  double t_eq_stderr = 0.0;
  double r2 = 0.0;
  int points = 0;
};

/// Fitted c values spanning less than this are roundoff, not relaxation.
inline constexpr double kRoundoffCSpan = 1e-8;

/// OLS of c against t/L over points with t/L >= burn_in. Needs five points;
/// a non-positive slope, or c confined to a roundoff-sized band, is reported
/// as NoRelaxation.
RelaxationFit relaxation_fit(std::span<const TimePoint> series, double burn_in);

struct RelaxationRecord {
  int N = 0;
  double mL = 0.0;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  int Nk = 0;
  std::uint64_t seed = 0;
  double epsilon_factor = 0.0;
  InitialKind initial = InitialKind::Superposition;

  double momentum_spread = 0.0;  // L dP
  std::vector<SeriesPoint> series;
  RelaxationFit fit;
  std::vector<double> seed_t_eq;  // per-seed values when averaged

  std::int64_t steps_run = 0;
  std::string stop_reason;
  std::int64_t repaired_columns = 0;
  std::int64_t frozen_columns = 0;
  double repaired_fraction = 0.0;
  int renormalizations = 0;
  double max_transport_error = 0.0;
  double max_T_column_defect = 0.0;
  double min_T_entry = 0.0;
  double max_cumulative_defect = 0.0;
};

/// Read-only view handed to observers after each step.
struct StepView {
  const TransitionMatrix& transition;
  const CumulativeTransition& cumulative;
  const WaveFunction& psi;  // psi at the new time
};

struct SnapshotView {
  const SpectrumSnapshot& spectrum;
  const SeriesPoint& point;
  const CumulativeTransition& cumulative;
  const WaveFunction& psi;
  const Eigen::VectorXd& initial_born;
};

/// Optional observation and fault-injection points of run_experiment.
struct RunHooks {
  std::function<void(const StepView&)> on_step;
  std::function<void(const SnapshotView&)> on_snapshot;
  /// Called after each accumulation; may modify the product (tests only).
  std::function<void(CumulativeTransition&)> tamper;
};

struct RunOutput {
  RelaxationRecord record;
  std::vector<SpectrumSnapshot> snapshots;
  std::optional<Checkpoint> final_state;  // matches the last snapshot
};

/// Initial state selected by `config.initial`.
InitialState make_initial_state(const ExperimentConfig& config);

/// Builds the state, steps Schrodinger evolution and the cumulative product,
/// captures spectra every stride, checks sum_n | |psi_n|^2 - (Ttilde P0)_n |
/// against transport_tolerance at each capture (IntegrityError on
/// violation), and fits c(t). Ignores seed_average.
RunOutput run_experiment(const ExperimentConfig& config, const RunHooks& hooks = {},
                         bool keep_final_state = false);

/// run_experiment over `seed_average` consecutive seeds; the returned
/// record is the first seed's with t_eq replaced by the seed mean. A first
/// seed that was already run may be passed in to avoid repeating it.
RelaxationRecord run_averaged(const ExperimentConfig& config,
                              std::optional<RelaxationRecord> first_seed = std::nullopt);

enum class ScalingModel { VsSpacing, VsMass, VsMomentumSquared };
std::string to_string(ScalingModel model);

struct ScalingPoint {
  double x = 0.0;
  double y = 0.0;
  double y_err = 0.0;
  bool origin = false;
};

struct ScalingFit {
  ScalingModel model = ScalingModel::VsSpacing;
  std::vector<ScalingPoint> points;
  LinearFit fit;
};

/// Weighted fit across records that differ only in the swept parameter:
///   VsSpacing:         L/t_eq against a/L        (sweeps N)
///   VsMass:            t_eq/L against mL         (sweeps mL)
///   VsMomentumSquared: L/t_eq against (L dP)^2   (sweeps Nk)
/// The origin is appended as a data point with the median sigma of the
/// others. Records without a successful fit are skipped; fewer than three
/// usable records, or records differing in another parameter, are rejected.
ScalingFit scaling_fit(std::span<const RelaxationRecord> records, ScalingModel model);

/// OLS slope of log(L/t_eq) against log(L dP) over an Nk sweep.
LinearFit power_law_probe(std::span<const RelaxationRecord> records);

}  // namespace bellrelax
