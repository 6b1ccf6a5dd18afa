#include "bellrelax/bell.hpp"

#include "bellrelax/error.hpp"
#include "bellrelax/random.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace bellrelax {

TransitionMatrix transition_matrix(const CurrentMatrix& current, const ProbabilityVector& born,
                                   const TransitionPolicy& policy) {
  const Eigen::Index n = current.J.rows();
  if (born.p.size() != n) throw ValidationError("current and probability sizes differ");

  TransitionMatrix result;
  result.step = current.step;
  result.T.resize(n, n);
  auto& T = result.T;

  for (Eigen::Index m = 0; m < n; ++m) {
    const double pm = born.p[m];
    if (!(pm >= policy.zero_probability_threshold)) {
      T.col(m).setZero();
      T(m, m) = 1.0;
      result.frozen_columns.push_back(static_cast<int>(m));
      continue;
    }
    double off = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double j = current.J(k, m);
      const double t = (k != m && j > 0.0) ? j / pm : 0.0;
      T(k, m) = t;
      off += t;
    }
    if (off > 1.0) {
      T.col(m) /= off;
      T(m, m) = 0.0;
      result.repaired_columns.push_back(static_cast<int>(m));
    } else {
      T(m, m) = 1.0 - off;
    }
  }
  return result;
}

ProbabilityVector master_step(const TransitionMatrix& T, const ProbabilityVector& pi) {
  ProbabilityVector next;
  next.p.noalias() = T.T * pi.p;
  next.step = pi.step + 1;
  return next;
}

CumulativeTransition::CumulativeTransition(Eigen::Index sites)
    : matrix_(Eigen::MatrixXd::Identity(sites, sites)), scratch_(sites, sites) {}

CumulativeTransition::CumulativeTransition(Eigen::MatrixXd matrix, std::int64_t steps)
    : matrix_(std::move(matrix)), scratch_(matrix_.rows(), matrix_.cols()), steps_(steps) {}

void CumulativeTransition::accumulate(const TransitionMatrix& T) {
  scratch_.noalias() = T.T * matrix_;
  matrix_.swap(scratch_);
  ++steps_;
  if (steps_ % kRenormalizeEvery == 0) {
    const Eigen::RowVectorXd sums = matrix_.colwise().sum();
    matrix_.array().rowwise() /= sums.array();
    ++renormalizations_;
  }
}

double CumulativeTransition::stochasticity_defect() const {
  return (matrix_.colwise().sum().array() - 1.0).abs().maxCoeff();
}

Eigen::VectorXd TrajectoryEnsemble::histogram(int n_sites) const {
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(n_sites);
  for (int s : sites) freq[s] += 1.0;
  if (!sites.empty()) freq /= static_cast<double>(sites.size());
  return freq;
}

namespace {

// Index of the first cumulative weight exceeding u; the last index absorbs
// any roundoff shortfall in the total.
int inverse_cdf(const double* weights, Eigen::Index n, double u) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    acc += weights[k];
    if (u < acc) return static_cast<int>(k);
  }
  for (Eigen::Index k = n - 1; k > 0; --k)
    if (weights[k] > 0.0) return static_cast<int>(k);
  return 0;
}

}  // namespace

TrajectoryEnsemble make_ensemble(const Eigen::VectorXd& distribution, std::size_t walkers,
                                 std::uint64_t seed) {
  TrajectoryEnsemble ensemble;
  ensemble.rng.seed(seed);
  ensemble.sites.resize(walkers);
  const double total = distribution.sum();
  for (auto& s : ensemble.sites)
    s = inverse_cdf(distribution.data(), distribution.size(), unit_draw(ensemble.rng) * total);
  return ensemble;
}

void sample_trajectories(TrajectoryEnsemble& ensemble, const TransitionMatrix& T) {
  const Eigen::Index n = T.T.rows();
  for (auto& s : ensemble.sites) {
    if (s < 0 || s >= n) throw ValidationError("walker outside the lattice");
    s = inverse_cdf(T.T.col(s).data(), n, unit_draw(ensemble.rng));
  }
}

bool is_primitive(const Eigen::MatrixXd& T, int max_power, double threshold) {
  const Eigen::Index n = T.rows();
  if (n == 0 || T.cols() != n) return false;
  // Wielandt: a primitive n x n pattern is positive by power (n-1)^2 + 1.
  if (max_power <= 0) max_power = static_cast<int>((n - 1) * (n - 1) + 1);

  // Rows of the pattern as bitsets; reach[i] holds the pattern of row i of
  // the current power.
  const std::size_t words = (static_cast<std::size_t>(n) + 63) / 64;
  using Bits = std::vector<std::uint64_t>;
  std::vector<Bits> pattern(n, Bits(words, 0));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (T(i, j) > threshold) pattern[i][j / 64] |= std::uint64_t{1} << (j % 64);

  Bits full(words, ~std::uint64_t{0});
  if (n % 64) full.back() = (std::uint64_t{1} << (n % 64)) - 1;
  auto all_positive = [&](const std::vector<Bits>& m) {
    return std::all_of(m.begin(), m.end(), [&](const Bits& row) { return row == full; });
  };

  std::vector<Bits> reach = pattern;
  std::vector<Bits> next(n, Bits(words, 0));
  for (int power = 1;; ++power) {
    if (all_positive(reach)) return true;
    if (power >= max_power) return false;
    // (R A)_{ij} = OR_l R_il A_lj: OR together rows of A selected by row i of R.
    for (Eigen::Index i = 0; i < n; ++i) {
      std::fill(next[i].begin(), next[i].end(), 0);
      for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t bits = reach[i][w];
        while (bits) {
          const int b = std::countr_zero(bits);
          bits &= bits - 1;
          const Bits& row = pattern[w * 64 + b];
          for (std::size_t v = 0; v < words; ++v) next[i][v] |= row[v];
        }
      }
    }
    if (next == reach) return false;  // fixed point reached without filling
    reach.swap(next);
  }
}

}  // namespace bellrelax
