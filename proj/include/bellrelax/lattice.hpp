#pragma once

// Discretized 2D box: site indexing, the free-particle lattice Hamiltonian,
// its closed-form eigenbases, and randomized superposition states.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bellrelax {

enum class BoundaryCondition { Dirichlet, Periodic };

std::string to_string(BoundaryCondition bc);
BoundaryCondition parse_boundary_condition(const std::string& text);

/// Physical lattice parameters. The mass is given through the dimensionless
/// product mL; the time step through epsilon_factor, with eps = factor * L / N.
struct LatticeConfig {
  int N = 15;
  double L = 1.0;
  double mL = 5.0;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  double epsilon_factor = 0.02;
  std::uint64_t seed = 1;
  int Nk = 4;

  double spacing() const { return L / N; }
  double mass() const { return mL / L; }
  double epsilon() const { return epsilon_factor * L / N; }
  int sites() const { return N * N; }
  /// Prefactor 1/(2 m a^2) of the lattice Laplacian.
  double hopping() const;

  /// Throws ValidationError on N < 2, mL <= 0, L <= 0, Nk outside [1, N],
  /// or a non-positive time step.
  void validate() const;
};

/// Position of a site as integer lattice coordinates; x_mu = i_mu * a.
struct SiteCoords {
  int i1 = 0;
  int i2 = 0;
  friend bool operator==(const SiteCoords&, const SiteCoords&) = default;
};

/// Row-major flattening: n = i1 * N + i2.
inline int flat_index(SiteCoords c, int N) { return c.i1 * N + c.i2; }
inline SiteCoords site_coords(int n, int N) { return {n / N, n % N}; }

struct Hamiltonian {
  Eigen::MatrixXd matrix;  // real symmetric, N^2 x N^2
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
};

/// Lattice Laplacian for a free particle. Dirichlet drops hoppings that leave
/// the box and keeps the full diagonal 4/(2 m a^2), which makes the sine
/// products exact eigenvectors. Periodic identifies neighbors modulo N.
Hamiltonian build_hamiltonian(const LatticeConfig& config);

using WaveNumber = std::array<int, 2>;

struct WaveFunction {
  Eigen::VectorXcd amplitudes;
  std::int64_t step = 0;  // t = step * eps, kept integral to avoid drift

  double time(double epsilon) const { return static_cast<double>(step) * epsilon; }
  double norm_squared() const { return amplitudes.squaredNorm(); }
};

struct EigenMode {
  WaveNumber k{};
  Eigen::VectorXcd vector;  // unit norm
  double energy = 0.0;
};

/// Normalized sine-product eigenvector with 1 <= k_mu <= N.
EigenMode dirichlet_eigenpair(WaveNumber k, const LatticeConfig& config);

/// Plane wave exp(2 pi i k.x / L) / N with 0 <= k_mu < N.
EigenMode periodic_eigenpair(WaveNumber k, const LatticeConfig& config);

/// Dispatches on the boundary condition of `config`.
EigenMode eigenpair(WaveNumber k, const LatticeConfig& config);

struct ModeComponent {
  WaveNumber k{};
  double energy = 0.0;
  double phase = 0.0;
  std::complex<double> coefficient;  // amplitude in the normalized state
};

/// A wave function together with its expansion in energy eigenmodes, when it
/// was built from one.
struct InitialState {
  WaveFunction psi;
  std::vector<ModeComponent> modes;
};

/// Wave numbers entering the Nk x Nk band superposition: k_mu in [1, Nk] for
/// Dirichlet, k_mu in [0, Nk) for periodic. Row-major order (k1 outer).
std::vector<WaveNumber> band_wave_numbers(const LatticeConfig& config);

/// Equal-amplitude superposition over band_wave_numbers() with i.i.d.
/// phases uniform on [0, 2 pi) drawn from a mt19937_64 seeded with
/// config.seed, one draw per mode in row-major order.
InitialState build_initial_state(const LatticeConfig& config);

/// A single eigenmode with zero phase (real for Dirichlet).
InitialState eigenstate(const LatticeConfig& config, WaveNumber k);

/// Real Gaussian packet exp(-|x - center|^2 / (4 width^2)) centred on the
/// box; `width_sites` is measured in lattice spacings. No mode expansion.
InitialState gaussian_packet(const LatticeConfig& config, double width_sites);

/// L * dP with dP = sqrt(2 m dE), dE the energy standard deviation, from
/// exact sums over the retained mode coefficients.
double momentum_spread(const InitialState& state, const LatticeConfig& config);

/// Same quantity from <H^2> - <H>^2 evaluated with the assembled matrix;
/// works for any normalized state.
double momentum_spread(const Eigen::VectorXcd& psi, const Hamiltonian& hamiltonian,
                       const LatticeConfig& config);

/// Rows of (site, x1, x2, re, im) with a header line.
void write_eigenbasis_csv(std::ostream& out, const EigenMode& mode, const LatticeConfig& config);

}  // namespace bellrelax
