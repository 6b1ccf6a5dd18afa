#include "bellrelax/analysis.hpp"

#include "bellrelax/error.hpp"
#include "bellrelax/format.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bellrelax {

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::Superposition: return "superposition";
    case InitialKind::Eigenstate: return "eigenstate";
    case InitialKind::Gaussian: return "gaussian";
  }
  return "unknown";
}

InitialKind parse_initial_kind(const std::string& text) {
  if (text == "superposition") return InitialKind::Superposition;
  if (text == "eigenstate") return InitialKind::Eigenstate;
  if (text == "gaussian") return InitialKind::Gaussian;
  throw ValidationError("unknown initial state '" + text +
                        "' (expected superposition|eigenstate|gaussian)");
}

std::string to_string(FitStatus status) {
  switch (status) {
    case FitStatus::Ok: return "ok";
    case FitStatus::NoRelaxation: return "no_relaxation";
    case FitStatus::InsufficientPoints: return "insufficient_points";
  }
  return "unknown";
}

FitStatus parse_fit_status(const std::string& text) {
  if (text == "ok") return FitStatus::Ok;
  if (text == "no_relaxation") return FitStatus::NoRelaxation;
  if (text == "insufficient_points") return FitStatus::InsufficientPoints;
  throw ValidationError("unknown fit status '" + text + "'");
}

std::string to_string(ScalingModel model) {
  switch (model) {
    case ScalingModel::VsSpacing: return "vs_a";
    case ScalingModel::VsMass: return "vs_mass";
    case ScalingModel::VsMomentumSquared: return "vs_dp2";
  }
  return "unknown";
}

std::int64_t ExperimentConfig::stride() const {
  if (spectrum_stride > 0) return spectrum_stride;
  return std::max<std::int64_t>(1, n_steps / 20);
}

void ExperimentConfig::validate() const {
  lattice.validate();
  if (n_steps < 1) throw ValidationError("n_steps must be >= 1");
  if (spectrum_stride < 0) throw ValidationError("spectrum_stride must be >= 0");
  if (n_modes < 3) throw ValidationError("n_modes must be >= 3");
  if (n_modes > lattice.sites())
    throw ValidationError("n_modes exceeds the number of lattice sites");
  if (!(spectral_floor >= 0.0)) throw ValidationError("spectral_floor must be >= 0");
  if (!(burn_in >= 0.0)) throw ValidationError("burn_in must be >= 0");
  if (!(transport_tolerance > 0.0)) throw ValidationError("transport_tolerance must be positive");
  if (!(zero_probability_threshold >= 0.0))
    throw ValidationError("zero_probability_threshold must be >= 0");
  if (seed_average < 1) throw ValidationError("seed_average must be >= 1");
  if (initial == InitialKind::Gaussian && !(gaussian_width > 0.0))
    throw ValidationError("gaussian_width must be positive");
}

RelaxationFit relaxation_fit(std::span<const TimePoint> series, double burn_in) {
  std::vector<double> t, c;
  for (const TimePoint& p : series) {
    if (p.t_over_L >= burn_in) {
      t.push_back(p.t_over_L);
      c.push_back(p.c);
    }
  }
  RelaxationFit result;
  result.points = static_cast<int>(t.size());
  if (t.size() < 5) return result;

  const LinearFit fit = ordinary_least_squares(t, c);
  result.c0 = fit.intercept;
  result.c0_stderr = fit.intercept_stderr;
  result.inverse_t_eq = fit.slope;
  result.inverse_t_eq_stderr = fit.slope_stderr;
  result.r2 = fit.r2;
  // c stuck at roundoff (a static state, T~I) can still give a tiny positive
  // slope; that is not relaxation.
  const double c_span = *std::max_element(c.begin(), c.end()) - *std::min_element(c.begin(), c.end());
  if (!(fit.slope > 0.0) || c_span < kRoundoffCSpan) {
    result.status = FitStatus::NoRelaxation;
    return result;
  }
  result.status = FitStatus::Ok;
  result.t_eq_over_L = 1.0 / fit.slope;
  result.t_eq_stderr = fit.slope_stderr / (fit.slope * fit.slope);
  return result;
}

InitialState make_initial_state(const ExperimentConfig& config) {
  switch (config.initial) {
    case InitialKind::Superposition: return build_initial_state(config.lattice);
    case InitialKind::Eigenstate: return eigenstate(config.lattice, config.mode_k);
    case InitialKind::Gaussian: return gaussian_packet(config.lattice, config.gaussian_width);
  }
  throw ValidationError("unknown initial state");
}

RunOutput run_experiment(const ExperimentConfig& config, const RunHooks& hooks,
                         bool keep_final_state) {
  config.validate();
  const LatticeConfig& lat = config.lattice;
  const Eigen::Index n = lat.sites();
  const double eps = lat.epsilon();

  const Hamiltonian hamiltonian = build_hamiltonian(lat);
  const EvolutionOperator op = evolution_operator(hamiltonian, eps);
  const InitialState initial = make_initial_state(config);
  const Eigen::VectorXd initial_born = initial.psi.amplitudes.cwiseAbs2();

  RunOutput output;
  RelaxationRecord& rec = output.record;
  rec.N = lat.N;
  rec.mL = lat.mL;
  rec.bc = lat.bc;
  rec.Nk = lat.Nk;
  rec.seed = lat.seed;
  rec.epsilon_factor = lat.epsilon_factor;
  rec.initial = config.initial;
  rec.momentum_spread = initial.modes.empty()
                            ? momentum_spread(initial.psi.amplitudes, hamiltonian, lat)
                            : momentum_spread(initial, lat);
  rec.stop_reason = "n_steps";
  rec.min_T_entry = 1.0;

  const TransitionPolicy policy{config.zero_probability_threshold};
  const SlopeFitOptions fit_options{config.n_modes, config.fit_include_zero, config.spectral_floor};
  const std::int64_t stride = config.stride();

  CumulativeTransition cumulative(n);
  WaveFunction psi = initial.psi;

  for (std::int64_t step = 1; step <= config.n_steps; ++step) {
    WaveFunction next = evolve_step(op, psi);
    const CurrentMatrix current = current_matrix(psi, next, op);
    const TransitionMatrix T = transition_matrix(current, born_probability(psi), policy);

    rec.repaired_columns += static_cast<std::int64_t>(T.repaired_columns.size());
    rec.frozen_columns += static_cast<std::int64_t>(T.frozen_columns.size());
    rec.max_T_column_defect = std::max(
        rec.max_T_column_defect, (T.T.colwise().sum().array() - 1.0).abs().maxCoeff());
    rec.min_T_entry = std::min(rec.min_T_entry, T.T.minCoeff());

    cumulative.accumulate(T);
    if (hooks.tamper) hooks.tamper(cumulative);
    psi = std::move(next);
    rec.steps_run = step;
    if (hooks.on_step) hooks.on_step(StepView{T, cumulative, psi});

    if (step % stride != 0 && step != config.n_steps) continue;

    const Eigen::VectorXd born = psi.amplitudes.cwiseAbs2();
    SeriesPoint point;
    point.step = step;
    point.t_over_L = psi.time(eps) / lat.L;
    point.transport_error = (born - cumulative.matrix() * initial_born).cwiseAbs().sum();
    rec.max_transport_error = std::max(rec.max_transport_error, point.transport_error);
    rec.max_cumulative_defect =
        std::max(rec.max_cumulative_defect, cumulative.stochasticity_defect());
    if (!(point.transport_error < config.transport_tolerance)) {
      throw IntegrityError("cumulative-product integrity violated at step " +
                               std::to_string(step) + ": sum |P_quantum - Ttilde P0| = " +
                               fmt_double(point.transport_error) + " exceeds " +
                               fmt_double(config.transport_tolerance),
                           "cumulative_product_integrity");
    }

    SpectrumSnapshot snap = eigen_spectrum(cumulative.matrix(), step, point.t_over_L);
    const SlopeFit sf = slope_fit(snap, fit_options);
    point.c = sf.c;
    point.c_stderr = sf.c_stderr;
    point.r2 = sf.r2;
    point.modes_used = sf.modes_used;
    point.fit_available = sf.available;
    point.lambda1 = snap.eigenvalues.size() > 1 ? snap.modulus(1) : 0.0;
    point.unit_eigenvalues = snap.unit_eigenvalues;
    point.dispersion = column_dispersion(cumulative.matrix());
    point.v0_distance = dominant_eigenvector_distance(snap, born);
    rec.series.push_back(point);

    if (hooks.on_snapshot)
      hooks.on_snapshot(SnapshotView{snap, rec.series.back(), cumulative, psi, initial_born});
    if (keep_final_state) {
      output.final_state = Checkpoint{lat.N, step, lat.L, eps, psi.amplitudes, cumulative.matrix()};
    }
    output.snapshots.push_back(std::move(snap));

    if (config.stop_at_floor && point.modes_used < config.n_modes) {
      rec.stop_reason = "spectral_floor";
      break;
    }
    if (point.fit_available && point.c >= config.c_stop) {
      rec.stop_reason = "c_span";
      break;
    }
  }

  const std::int64_t transitions = rec.steps_run * static_cast<std::int64_t>(n);
  rec.repaired_fraction =
      transitions > 0 ? static_cast<double>(rec.repaired_columns) / transitions : 0.0;
  rec.renormalizations = cumulative.renormalizations();

  std::vector<TimePoint> usable;
  for (const SeriesPoint& p : rec.series) {
    if (p.fit_available && p.modes_used >= config.n_modes) usable.push_back({p.t_over_L, p.c});
  }
  rec.fit = relaxation_fit(usable, config.burn_in);
  return output;
}

RelaxationRecord run_averaged(const ExperimentConfig& config,
                              std::optional<RelaxationRecord> first_seed) {
  config.validate();
  ExperimentConfig single = config;
  single.seed_average = 1;
  RelaxationRecord first = first_seed ? std::move(*first_seed) : run_experiment(single).record;
  if (config.seed_average == 1) return first;

  std::vector<double> t_eq, err;
  auto collect = [&](const RelaxationRecord& r) {
    if (r.fit.status == FitStatus::Ok) {
      t_eq.push_back(r.fit.t_eq_over_L);
      err.push_back(r.fit.t_eq_stderr);
    }
  };
  collect(first);
  for (int i = 1; i < config.seed_average; ++i) {
    single.lattice.seed = config.lattice.seed + static_cast<std::uint64_t>(i);
    collect(run_experiment(single).record);
  }
  first.seed_t_eq = t_eq;
  if (t_eq.empty()) return first;

  const double k = static_cast<double>(t_eq.size());
  const double mean = std::accumulate(t_eq.begin(), t_eq.end(), 0.0) / k;
  double spread = 0.0, fit_var = 0.0;
  for (std::size_t i = 0; i < t_eq.size(); ++i) {
    spread += (t_eq[i] - mean) * (t_eq[i] - mean);
    fit_var += err[i] * err[i];
  }
  // The larger of the seed-to-seed scatter and the propagated fit errors.
  const double scatter = t_eq.size() > 1 ? std::sqrt(spread / (k - 1.0) / k) : 0.0;
  const double propagated = std::sqrt(fit_var) / k;
  first.fit.status = FitStatus::Ok;
  first.fit.t_eq_over_L = mean;
  first.fit.t_eq_stderr = std::max(scatter, propagated);
  first.fit.inverse_t_eq = 1.0 / mean;
  first.fit.inverse_t_eq_stderr = first.fit.t_eq_stderr / (mean * mean);
  return first;
}

namespace {

bool same_except(const RelaxationRecord& a, const RelaxationRecord& b, ScalingModel model) {
  const bool n_ok = model == ScalingModel::VsSpacing || a.N == b.N;
  const bool m_ok = model == ScalingModel::VsMass || a.mL == b.mL;
  const bool k_ok = model == ScalingModel::VsMomentumSquared || a.Nk == b.Nk;
  return n_ok && m_ok && k_ok && a.bc == b.bc && a.epsilon_factor == b.epsilon_factor &&
         a.initial == b.initial;
}

std::vector<const RelaxationRecord*> checked_records(std::span<const RelaxationRecord> records,
                                                     ScalingModel model) {
  if (records.empty()) throw ValidationError("no records to fit");
  for (const RelaxationRecord& r : records) {
    if (!same_except(records.front(), r, model))
      throw ValidationError("records differ in a parameter other than the one swept by " +
                            to_string(model));
  }
  std::vector<const RelaxationRecord*> usable;
  for (const RelaxationRecord& r : records)
    if (r.fit.status == FitStatus::Ok) usable.push_back(&r);
  if (usable.size() < 3)
    throw ValidationError("scaling fit needs at least three records with a relaxation fit (have " +
                          std::to_string(usable.size()) + ")");
  return usable;
}

}  // namespace

ScalingFit scaling_fit(std::span<const RelaxationRecord> records, ScalingModel model) {
  const auto usable = checked_records(records, model);
  ScalingFit result;
  result.model = model;
  for (const RelaxationRecord* r : usable) {
    ScalingPoint p;
    switch (model) {
      case ScalingModel::VsSpacing:
        p.x = 1.0 / r->N;
        p.y = r->fit.inverse_t_eq;
        p.y_err = r->fit.inverse_t_eq_stderr;
        break;
      case ScalingModel::VsMass:
        p.x = r->mL;
        p.y = r->fit.t_eq_over_L;
        p.y_err = r->fit.t_eq_stderr;
        break;
      case ScalingModel::VsMomentumSquared:
        p.x = r->momentum_spread * r->momentum_spread;
        p.y = r->fit.inverse_t_eq;
        p.y_err = r->fit.inverse_t_eq_stderr;
        break;
    }
    result.points.push_back(p);
  }
  std::vector<double> sigmas;
  for (const auto& p : result.points) sigmas.push_back(p.y_err);
  std::nth_element(sigmas.begin(), sigmas.begin() + sigmas.size() / 2, sigmas.end());
  double origin_sigma = sigmas[sigmas.size() / 2];
  if (!(origin_sigma > 0.0)) origin_sigma = 1.0;
  result.points.push_back({0.0, 0.0, origin_sigma, true});

  std::vector<double> x, y, s;
  for (auto& p : result.points) {
    // A point fitted without scatter has zero stderr; give it the origin's.
    if (!(p.y_err > 0.0)) p.y_err = origin_sigma;
    x.push_back(p.x);
    y.push_back(p.y);
    s.push_back(p.y_err);
  }
  result.fit = weighted_least_squares(x, y, s);
  return result;
}

LinearFit power_law_probe(std::span<const RelaxationRecord> records) {
  const auto usable = checked_records(records, ScalingModel::VsMomentumSquared);
  std::vector<double> x, y;
  for (const RelaxationRecord* r : usable) {
    if (!(r->momentum_spread > 0.0)) throw ValidationError("power-law probe needs L dP > 0");
    x.push_back(std::log(r->momentum_spread));
    y.push_back(std::log(r->fit.inverse_t_eq));
  }
  return ordinary_least_squares(x, y);
}

}  // namespace bellrelax
