#pragma once

// Eigen-analysis of the cumulative transition matrix: modulus-sorted
// spectrum, dominant right eigenvector, the log-linear suppression slope
// c(t), and the column-dispersion measure of weak ergodicity.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace bellrelax {

struct SpectrumOptions {
  /// Eigenvalues within this distance of 1 count as unit eigenvalues.
  double unit_tolerance = 1e-8;
  /// If set, the offending matrix is written here (CSV) when the
  /// eigensolver fails or the leading eigenvalue is not 1.
  std::filesystem::path failure_dump;
};

struct SpectrumSnapshot {
  std::int64_t step = 0;
  double t_over_L = 0.0;
  /// Sorted by descending modulus.
  std::vector<std::complex<double>> eigenvalues;
  /// Probability-normalized eigenvector for eigenvalue 1; empty when the
  /// unit eigenvalue is degenerate.
  Eigen::VectorXd dominant;
  /// Smallest entry of the dominant vector before clamping at zero.
  double dominant_min_entry = 0.0;
  int unit_eigenvalues = 0;

  bool degenerate() const { return unit_eigenvalues > 1; }
  double modulus(std::size_t s) const { return std::abs(eigenvalues.at(s)); }
};

/// Full dense non-symmetric eigendecomposition (Hessenberg reduction and
/// shifted QR). The dominant vector solves (Ttilde - I) v = 0, sum(v) = 1.
/// Throws IntegrityError when the QR iteration fails or |lambda0 - 1| > 1e-8.
SpectrumSnapshot eigen_spectrum(const Eigen::MatrixXd& cumulative, std::int64_t step = 0,
                                double t_over_L = 0.0, const SpectrumOptions& options = {});

struct SlopeFitOptions {
  int n_modes = 25;
  bool include_zero = true;  // fit s = 0 (log 1 = 0) as the first point
  /// Modes below this modulus end the fit range early.
  double floor = 1e-280;
};

/// Least squares of log|lambda_s| against s; c = -slope.
struct SlopeFit {
  bool available = false;  // false when fewer than three usable modes
  double c = 0.0;
  double c_stderr = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int modes_used = 0;
};

SlopeFit slope_fit(const SpectrumSnapshot& snapshot, const SlopeFitOptions& options = {});

/// Total-variation distance between the dominant eigenvector and `born`;
/// nullopt when the snapshot has no unique dominant vector.
std::optional<double> dominant_eigenvector_distance(const SpectrumSnapshot& snapshot,
                                                    const Eigen::VectorXd& born);

struct DispersionOptions {
  /// Up to this many columns every pair is compared; above it, `samples`
  /// random pairs drawn with `seed`.
  Eigen::Index exact_limit = 1024;
  int samples = 20000;
  std::uint64_t seed = 0x5eed;
};

/// max over column pairs (j, j') of 1/2 sum_n |Ttilde_nj - Ttilde_nj'|.
double column_dispersion(const Eigen::MatrixXd& cumulative, const DispersionOptions& options = {});

}  // namespace bellrelax
