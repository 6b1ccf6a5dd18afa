#pragma once

// Bell's stochastic jump process on the lattice: per-step transition
// matrices built from the current, master-equation transport, the backward
// cumulative product, a walker sampler and a primitivity test.

#include "bellrelax/evolve.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace bellrelax {

struct TransitionPolicy {
  /// Columns whose Born probability falls below this are set to the
  /// identity column: an unoccupied site keeps its (absent) walker.
  double zero_probability_threshold = 1e-14;
};

/// Column-stochastic T(t): T_nm is the probability to jump m -> n.
struct TransitionMatrix {
  Eigen::MatrixXd T;
  std::int64_t step = 0;
  std::vector<int> repaired_columns;  // off-diagonal mass exceeded one
  std::vector<int> frozen_columns;    // zero-probability guard fired
};

/// T_nm = max(J_nm, 0) / P_m for n != m, T_mm = 1 - sum of the rest. The
/// zero-probability guard is applied first; then any column whose
/// off-diagonal sum exceeds one gets a zero diagonal and off-diagonals
/// rescaled to sum to one.
TransitionMatrix transition_matrix(const CurrentMatrix& current, const ProbabilityVector& born,
                                   const TransitionPolicy& policy = {});

/// P(t + eps) = T(t) P(t).
ProbabilityVector master_step(const TransitionMatrix& T, const ProbabilityVector& pi);

/// Backward product T(t - eps) ... T(0), starting from the identity.
class CumulativeTransition {
 public:
  static constexpr std::int64_t kRenormalizeEvery = 1000;

  explicit CumulativeTransition(Eigen::Index sites);
  CumulativeTransition(Eigen::MatrixXd matrix, std::int64_t steps);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  Eigen::MatrixXd& mutable_matrix() { return matrix_; }
  std::int64_t steps() const { return steps_; }
  int renormalizations() const { return renormalizations_; }

  /// Left-multiplies by T. Every kRenormalizeEvery steps the columns are
  /// rescaled to unit sum to cancel accumulated roundoff.
  void accumulate(const TransitionMatrix& T);

  /// Largest |column sum - 1|.
  double stochasticity_defect() const;

 private:
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd scratch_;
  std::int64_t steps_ = 0;
  int renormalizations_ = 0;
};

inline void accumulate(const TransitionMatrix& T, CumulativeTransition& cumulative) {
  cumulative.accumulate(T);
}

/// Walkers on lattice sites, each moved independently by inverse-CDF draws
/// down the column of its current site.
struct TrajectoryEnsemble {
  std::vector<int> sites;
  std::mt19937_64 rng;

  std::size_t size() const { return sites.size(); }
  /// Occupation frequencies over `n_sites` sites.
  Eigen::VectorXd histogram(int n_sites) const;
};

/// M walkers drawn i.i.d. from `distribution`.
TrajectoryEnsemble make_ensemble(const Eigen::VectorXd& distribution, std::size_t walkers,
                                 std::uint64_t seed);

void sample_trajectories(TrajectoryEnsemble& ensemble, const TransitionMatrix& T);

/// True iff some power k <= max_power of the nonzero pattern of T (entries
/// above `threshold`) is entrywise positive. max_power <= 0 means the
/// Wielandt bound (n-1)^2 + 1, which is exact for n x n patterns.
bool is_primitive(const Eigen::MatrixXd& T, int max_power = 0, double threshold = 0.0);

}  // namespace bellrelax
