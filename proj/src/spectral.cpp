#include "bellrelax/spectral.hpp"

#include "bellrelax/error.hpp"
#include "bellrelax/format.hpp"
#include "bellrelax/linear_fit.hpp"
#include "bellrelax/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

namespace bellrelax {

namespace {

void dump_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  if (path.empty()) return;
  std::ofstream out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << fmt_double(m(i, j));
    out << '\n';
  }
}

}  // namespace

SpectrumSnapshot eigen_spectrum(const Eigen::MatrixXd& cumulative, std::int64_t step,
                                double t_over_L, const SpectrumOptions& options) {
  const Eigen::Index n = cumulative.rows();
  if (n == 0 || cumulative.cols() != n) throw ValidationError("eigen_spectrum needs a square matrix");

  Eigen::EigenSolver<Eigen::MatrixXd> solver(cumulative, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    dump_matrix(options.failure_dump, cumulative);
    throw IntegrityError("QR iteration did not converge on the " + std::to_string(n) + "x" +
                             std::to_string(n) + " cumulative matrix",
                         "eigensolver");
  }

  SpectrumSnapshot snap;
  snap.step = step;
  snap.t_over_L = t_over_L;
  const auto& ev = solver.eigenvalues();
  snap.eigenvalues.assign(ev.data(), ev.data() + n);
  std::stable_sort(snap.eigenvalues.begin(), snap.eigenvalues.end(),
                   [](const std::complex<double>& a, const std::complex<double>& b) {
                     const double ma = std::abs(a), mb = std::abs(b);
                     if (ma != mb) return ma > mb;
                     if (a.real() != b.real()) return a.real() > b.real();
                     return a.imag() > b.imag();
                   });

  const double lead_gap = std::abs(snap.eigenvalues.front() - 1.0);
  if (lead_gap > options.unit_tolerance) {
    dump_matrix(options.failure_dump, cumulative);
    throw IntegrityError("leading eigenvalue deviates from 1 by " + fmt_double(lead_gap) +
                             "; the cumulative product is no longer stochastic",
                         "stochasticity");
  }
  snap.unit_eigenvalues = static_cast<int>(
      std::count_if(snap.eigenvalues.begin(), snap.eigenvalues.end(),
                    [&](const auto& l) { return std::abs(l - 1.0) <= options.unit_tolerance; }));

  if (!snap.degenerate()) {
    // Replace one equation of the singular system by the normalization.
    Eigen::MatrixXd system = cumulative - Eigen::MatrixXd::Identity(n, n);
    system.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs[n - 1] = 1.0;
    Eigen::VectorXd v = system.fullPivLu().solve(rhs);
    if (v.sum() < 0.0) v = -v;
    snap.dominant_min_entry = v.minCoeff();
    v = v.cwiseMax(0.0);
    v /= v.sum();
    snap.dominant = std::move(v);
  }
  return snap;
}

SlopeFit slope_fit(const SpectrumSnapshot& snapshot, const SlopeFitOptions& options) {
  SlopeFit result;
  const int first = options.include_zero ? 0 : 1;
  const int last = std::min<int>(options.n_modes, static_cast<int>(snapshot.eigenvalues.size()));
  std::vector<double> s, logs;
  for (int k = first; k < last; ++k) {
    const double m = snapshot.modulus(k);
    if (!(m >= options.floor)) break;
    s.push_back(k);
    logs.push_back(std::log(m));
  }
  // s = 0 sits at log 1 = 0 whether or not it is fitted.
  result.modes_used = static_cast<int>(s.size()) + first;
  if (s.size() < 3) return result;

  const LinearFit fit = ordinary_least_squares(s, logs);
  result.available = true;
  result.c = -fit.slope;
  result.c_stderr = fit.slope_stderr;
  result.intercept = fit.intercept;
  result.r2 = fit.r2;
  return result;
}

std::optional<double> dominant_eigenvector_distance(const SpectrumSnapshot& snapshot,
                                                    const Eigen::VectorXd& born) {
  if (snapshot.degenerate() || snapshot.dominant.size() == 0) return std::nullopt;
  if (born.size() != snapshot.dominant.size())
    throw ValidationError("distribution size differs from the spectrum size");
  return 0.5 * (snapshot.dominant - born).cwiseAbs().sum();
}

double column_dispersion(const Eigen::MatrixXd& cumulative, const DispersionOptions& options) {
  const Eigen::Index n = cumulative.cols();
  auto tv = [&](Eigen::Index j, Eigen::Index k) {
    return 0.5 * (cumulative.col(j) - cumulative.col(k)).cwiseAbs().sum();
  };
  double worst = 0.0;
  if (n <= options.exact_limit) {
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = j + 1; k < n; ++k) worst = std::max(worst, tv(j, k));
    return worst;
  }
  std::mt19937_64 rng(options.seed);
  for (int i = 0; i < options.samples; ++i) {
    const auto j = static_cast<Eigen::Index>(unit_draw(rng) * n);
    const auto k = static_cast<Eigen::Index>(unit_draw(rng) * n);
    if (j != k) worst = std::max(worst, tv(j, k));
  }
  return worst;
}

}  // namespace bellrelax
