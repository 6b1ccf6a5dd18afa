#include "bellrelax/analysis.hpp"
#include "bellrelax/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace bellrelax;

namespace {

ExperimentConfig small_run() {
  ExperimentConfig c;
  c.lattice.N = 8;
  c.lattice.Nk = 3;
  c.n_steps = 1600;
  c.spectrum_stride = 100;
  c.n_modes = 10;
  return c;
}

RelaxationRecord synthetic(int N, double mL, int Nk, double ldp, double inv_t_eq, double err) {
  RelaxationRecord r;
  r.N = N;
  r.mL = mL;
  r.Nk = Nk;
  r.epsilon_factor = 0.02;
  r.momentum_spread = ldp;
  r.fit.status = FitStatus::Ok;
  r.fit.inverse_t_eq = inv_t_eq;
  r.fit.inverse_t_eq_stderr = err;
  r.fit.t_eq_over_L = 1.0 / inv_t_eq;
  r.fit.t_eq_stderr = err / (inv_t_eq * inv_t_eq);
  return r;
}

}  // namespace

TEST_CASE("relaxation fit of an exact line") {
  std::vector<TimePoint> pts;
  for (int i = 0; i <= 10; ++i) pts.push_back({0.5 * i, 0.04 + 0.25 * 0.5 * i});
  const RelaxationFit f = relaxation_fit(pts, 1.0);
  CHECK(f.status == FitStatus::Ok);
  CHECK(f.points == 9);  // t/L = 1.0 ... 5.0
  CHECK(f.c0 == doctest::Approx(0.04));
  CHECK(f.inverse_t_eq == doctest::Approx(0.25));
  CHECK(f.t_eq_over_L == doctest::Approx(4.0));
  CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("relaxation fit error propagation and failure modes") {
  std::vector<TimePoint> pts{{1, 0.3}, {2, 0.45}, {3, 0.75}, {4, 0.85}, {5, 1.2}, {6, 1.3}};
  const RelaxationFit f = relaxation_fit(pts, 0.0);
  CHECK(f.status == FitStatus::Ok);
  CHECK(f.t_eq_stderr == doctest::Approx(f.inverse_t_eq_stderr / (f.inverse_t_eq * f.inverse_t_eq)));

  CHECK(relaxation_fit(std::span(pts).first(4), 0.0).status == FitStatus::InsufficientPoints);
  std::vector<TimePoint> flat{{1, 0.1}, {2, 0.1}, {3, 0.1}, {4, 0.1}, {5, 0.1}};
  CHECK(relaxation_fit(flat, 0.0).status == FitStatus::NoRelaxation);
  std::vector<TimePoint> creeping;
  for (int i = 1; i <= 6; ++i) creeping.push_back({double(i), 1e-13 * i});
  CHECK(relaxation_fit(creeping, 0.0).status == FitStatus::NoRelaxation);
}

TEST_CASE("experiment config validation") {
  ExperimentConfig c = small_run();
  CHECK_NOTHROW(c.validate());
  c.n_modes = 65;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_run();
  c.n_steps = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_run();
  c.spectrum_stride = 0;
  CHECK(c.stride() == 80);
  CHECK(parse_initial_kind("gaussian") == InitialKind::Gaussian);
  CHECK(parse_fit_status(to_string(FitStatus::NoRelaxation)) == FitStatus::NoRelaxation);
}

TEST_CASE("small superposition run relaxes") {
  ExperimentConfig c = small_run();
  int steps_seen = 0, snapshots_seen = 0;
  double worst_T = 0.0, worst_cum = 0.0, min_entry = 1.0;
  RunHooks hooks;
  hooks.on_step = [&](const StepView& v) {
    ++steps_seen;
    worst_T = std::max(worst_T, (v.transition.T.colwise().sum().array() - 1.0).abs().maxCoeff());
    worst_cum = std::max(worst_cum, v.cumulative.stochasticity_defect());
    min_entry = std::min({min_entry, v.transition.T.minCoeff(), v.cumulative.matrix().minCoeff()});
  };
  hooks.on_snapshot = [&](const SnapshotView& v) {
    ++snapshots_seen;
    CHECK(v.spectrum.step == v.point.step);
    CHECK(v.initial_born.sum() == doctest::Approx(1.0));
  };
  const RunOutput out = run_experiment(c, hooks, true);
  const RelaxationRecord& r = out.record;

  CHECK(steps_seen == r.steps_run);
  CHECK(snapshots_seen == static_cast<int>(r.series.size()));
  CHECK(out.snapshots.size() == r.series.size());
  CHECK(worst_T < 1e-12);
  CHECK(worst_cum < 1e-10);
  CHECK(min_entry >= 0.0);
  CHECK(r.max_transport_error < c.transport_tolerance);
  CHECK(r.momentum_spread > 0.0);

  // c grows with time and is fitted.
  REQUIRE(r.series.size() >= 6);
  CHECK(r.series.back().c > r.series.front().c);
  for (const SeriesPoint& p : r.series) CHECK(p.unit_eigenvalues == 1);
  CHECK(r.fit.status == FitStatus::Ok);
  CHECK(r.fit.r2 > 0.9);

  REQUIRE(out.final_state.has_value());
  CHECK(out.final_state->step == out.snapshots.back().step);
  CHECK(out.final_state->cumulative.rows() == 64);
}

TEST_CASE("a run is reproducible") {
  ExperimentConfig c = small_run();
  c.n_steps = 400;
  const RunOutput a = run_experiment(c), b = run_experiment(c);
  REQUIRE(a.record.series.size() == b.record.series.size());
  for (std::size_t i = 0; i < a.record.series.size(); ++i)
    CHECK(a.record.series[i].c == b.record.series[i].c);
}

TEST_CASE("a real eigenstate does not relax") {
  ExperimentConfig c = small_run();
  c.initial = InitialKind::Eigenstate;
  c.mode_k = {2, 1};
  c.n_steps = 600;
  RunHooks hooks;
  double off = 0.0;
  hooks.on_step = [&](const StepView& v) {
    off = std::max(off, (v.transition.T - Eigen::MatrixXd::Identity(64, 64)).cwiseAbs().maxCoeff());
  };
  const RunOutput out = run_experiment(c, hooks);
  CHECK(off < 1e-12);
  CHECK(out.record.series.back().unit_eigenvalues == 64);
  CHECK(out.record.fit.status != FitStatus::Ok);
}

TEST_CASE("corrupting the product raises an integrity error") {
  ExperimentConfig c = small_run();
  c.n_steps = 200;
  RunHooks hooks;
  hooks.tamper = [](CumulativeTransition& cum) {
    if (cum.steps() == 50) cum.mutable_matrix()(0, 0) += 0.5;
  };
  try {
    run_experiment(c, hooks);
    FAIL("expected IntegrityError");
  } catch (const IntegrityError& e) {
    CHECK(e.kind() == "cumulative_product_integrity");
  }
}

TEST_CASE("seed averaging") {
  ExperimentConfig c = small_run();
  c.seed_average = 2;
  const RelaxationRecord r = run_averaged(c);
  REQUIRE(r.seed_t_eq.size() == 2);
  CHECK(r.fit.t_eq_over_L == doctest::Approx(0.5 * (r.seed_t_eq[0] + r.seed_t_eq[1])));
  CHECK(r.seed == c.lattice.seed);
}

TEST_CASE("scaling fit against a/L recovers the slope") {
  std::vector<RelaxationRecord> rs;
  for (int N : {15, 17, 20, 25}) rs.push_back(synthetic(N, 5, 4, 8.5, 6.6 / N, 0.01));
  const ScalingFit f = scaling_fit(rs, ScalingModel::VsSpacing);
  CHECK(f.points.size() == 5);
  CHECK(f.points.back().origin);
  CHECK(f.points.back().y_err == doctest::Approx(0.01));
  CHECK(f.fit.slope == doctest::Approx(6.6));
  CHECK(f.fit.intercept == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("scaling fit against mass and momentum") {
  std::vector<RelaxationRecord> mass;
  for (double mL : {5.0, 10.0, 20.0}) mass.push_back(synthetic(21, mL, 4, 8.0, 1.0 / (0.89 * mL), 0.001));
  const ScalingFit fm = scaling_fit(mass, ScalingModel::VsMass);
  CHECK(fm.fit.slope == doctest::Approx(0.89).epsilon(1e-6));

  std::vector<RelaxationRecord> mom;
  for (int Nk : {4, 5, 6}) {
    const double ldp = 2.0 * Nk;
    mom.push_back(synthetic(21, 20, Nk, ldp, 7.6e-4 * ldp * ldp, 1e-4));
  }
  CHECK(scaling_fit(mom, ScalingModel::VsMomentumSquared).fit.slope == doctest::Approx(7.6e-4));
  const LinearFit pl = power_law_probe(mom);
  CHECK(pl.slope == doctest::Approx(2.0));
}

TEST_CASE("scaling fit rejects bad record sets") {
  std::vector<RelaxationRecord> rs;
  for (int N : {15, 17, 20}) rs.push_back(synthetic(N, 5, 4, 8.5, 6.6 / N, 0.01));
  CHECK_NOTHROW(scaling_fit(rs, ScalingModel::VsSpacing));
  CHECK_THROWS_AS(scaling_fit(rs, ScalingModel::VsMass), ValidationError);  // N differs
  rs[1].fit.status = FitStatus::NoRelaxation;
  CHECK_THROWS_AS(scaling_fit(rs, ScalingModel::VsSpacing), ValidationError);
  rs[1].fit.status = FitStatus::Ok;
  rs[2].bc = BoundaryCondition::Periodic;
  CHECK_THROWS_AS(scaling_fit(rs, ScalingModel::VsSpacing), ValidationError);
}
