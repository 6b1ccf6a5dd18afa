#include "bellrelax/lattice.hpp"

#include "bellrelax/error.hpp"
#include "bellrelax/format.hpp"
#include "bellrelax/random.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

namespace bellrelax {

namespace {

constexpr double kPi = std::numbers::pi;

double lattice_energy(double hopping, double theta1, double theta2) {
  return hopping * ((2.0 - 2.0 * std::cos(theta1)) + (2.0 - 2.0 * std::cos(theta2)));
}

}  // namespace

std::string to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "periodic";
}

BoundaryCondition parse_boundary_condition(const std::string& text) {
  if (text == "dirichlet" || text == "Dirichlet" || text == "D") return BoundaryCondition::Dirichlet;
  if (text == "periodic" || text == "Periodic" || text == "P") return BoundaryCondition::Periodic;
  throw ValidationError("unknown boundary condition '" + text + "' (expected dirichlet|periodic)");
}

double LatticeConfig::hopping() const {
  const double a = spacing();
  return 1.0 / (2.0 * mass() * a * a);
}

void LatticeConfig::validate() const {
  if (N < 2) throw ValidationError("N must be >= 2 (got " + std::to_string(N) + ")");
  if (!(L > 0.0)) throw ValidationError("L must be positive");
  if (!(mL > 0.0)) throw ValidationError("mL must be positive");
  if (Nk < 1 || Nk > N)
    throw ValidationError("Nk must lie in [1, N] (got " + std::to_string(Nk) + ")");
  if (!(epsilon_factor > 0.0)) throw ValidationError("epsilon_factor must be positive");
}

Hamiltonian build_hamiltonian(const LatticeConfig& config) {
  config.validate();
  const int N = config.N;
  const int n = config.sites();
  const double h = config.hopping();

  Hamiltonian result;
  result.bc = config.bc;
  result.matrix = Eigen::MatrixXd::Zero(n, n);
  auto& H = result.matrix;

  for (int i1 = 0; i1 < N; ++i1) {
    for (int i2 = 0; i2 < N; ++i2) {
      const int row = flat_index({i1, i2}, N);
      H(row, row) = 4.0 * h;
      const std::array<SiteCoords, 4> neighbors{
          SiteCoords{i1 + 1, i2}, SiteCoords{i1 - 1, i2}, SiteCoords{i1, i2 + 1},
          SiteCoords{i1, i2 - 1}};
      for (SiteCoords nb : neighbors) {
        if (config.bc == BoundaryCondition::Periodic) {
          nb.i1 = (nb.i1 + N) % N;
          nb.i2 = (nb.i2 + N) % N;
        } else if (nb.i1 < 0 || nb.i1 >= N || nb.i2 < 0 || nb.i2 >= N) {
          continue;
        }
        // For N == 2 periodic, both neighbours along an axis coincide and
        // the hopping accumulates, as the Kronecker deltas do.
        H(row, flat_index(nb, N)) -= h;
      }
    }
  }
  return result;
}

EigenMode dirichlet_eigenpair(WaveNumber k, const LatticeConfig& config) {
  config.validate();
  const int N = config.N;
  for (int km : k) {
    if (km < 1 || km > N)
      throw ValidationError("Dirichlet wave number out of range [1, N]: " + std::to_string(km));
  }
  const double a = config.spacing();
  const double L = config.L;

  Eigen::VectorXd s1(N), s2(N);
  for (int i = 0; i < N; ++i) {
    const double x = i * a;
    s1[i] = std::sin((x + a) * k[0] * kPi / (L + a));
    s2[i] = std::sin((x + a) * k[1] * kPi / (L + a));
  }
  EigenMode mode;
  mode.k = k;
  mode.vector.resize(config.sites());
  for (int i1 = 0; i1 < N; ++i1)
    for (int i2 = 0; i2 < N; ++i2) mode.vector[flat_index({i1, i2}, N)] = s1[i1] * s2[i2];
  mode.vector.normalize();
  mode.energy =
      lattice_energy(config.hopping(), k[0] * kPi / (N + 1), k[1] * kPi / (N + 1));
  return mode;
}

EigenMode periodic_eigenpair(WaveNumber k, const LatticeConfig& config) {
  config.validate();
  const int N = config.N;
  for (int km : k) {
    if (km < 0 || km >= N)
      throw ValidationError("periodic wave number out of range [0, N): " + std::to_string(km));
  }
  EigenMode mode;
  mode.k = k;
  mode.vector.resize(config.sites());
  // x_mu / L = i_mu / N, so the phase only depends on integer coordinates.
  for (int i1 = 0; i1 < N; ++i1) {
    for (int i2 = 0; i2 < N; ++i2) {
      const double phase = 2.0 * kPi * static_cast<double>(k[0] * i1 + k[1] * i2) / N;
      mode.vector[flat_index({i1, i2}, N)] = std::polar(1.0 / N, phase);
    }
  }
  mode.energy = lattice_energy(config.hopping(), 2.0 * kPi * k[0] / N, 2.0 * kPi * k[1] / N);
  return mode;
}

EigenMode eigenpair(WaveNumber k, const LatticeConfig& config) {
  return config.bc == BoundaryCondition::Dirichlet ? dirichlet_eigenpair(k, config)
                                                   : periodic_eigenpair(k, config);
}

std::vector<WaveNumber> band_wave_numbers(const LatticeConfig& config) {
  const int first = config.bc == BoundaryCondition::Dirichlet ? 1 : 0;
  std::vector<WaveNumber> ks;
  ks.reserve(static_cast<std::size_t>(config.Nk) * config.Nk);
  for (int k1 = first; k1 < first + config.Nk; ++k1)
    for (int k2 = first; k2 < first + config.Nk; ++k2) ks.push_back({k1, k2});
  return ks;
}

InitialState build_initial_state(const LatticeConfig& config) {
  config.validate();
  const auto ks = band_wave_numbers(config);
  std::mt19937_64 rng(config.seed);

  InitialState state;
  state.psi.amplitudes = Eigen::VectorXcd::Zero(config.sites());
  const double weight = 1.0 / std::sqrt(static_cast<double>(ks.size()));
  for (const WaveNumber& k : ks) {
    const EigenMode mode = eigenpair(k, config);
    ModeComponent c;
    c.k = k;
    c.energy = mode.energy;
    c.phase = 2.0 * kPi * unit_draw(rng);
    c.coefficient = std::polar(weight, c.phase);
    state.psi.amplitudes += c.coefficient * mode.vector;
    state.modes.push_back(c);
  }
  // The modes are orthonormal, so this only removes roundoff.
  state.psi.amplitudes.normalize();
  return state;
}

InitialState eigenstate(const LatticeConfig& config, WaveNumber k) {
  const EigenMode mode = eigenpair(k, config);
  InitialState state;
  state.psi.amplitudes = mode.vector;
  state.modes.push_back({k, mode.energy, 0.0, {1.0, 0.0}});
  return state;
}

InitialState gaussian_packet(const LatticeConfig& config, double width_sites) {
  config.validate();
  if (!(width_sites > 0.0)) throw ValidationError("gaussian width must be positive");
  const int N = config.N;
  const double centre = 0.5 * (N - 1);
  InitialState state;
  state.psi.amplitudes.resize(config.sites());
  for (int i1 = 0; i1 < N; ++i1) {
    for (int i2 = 0; i2 < N; ++i2) {
      const double d2 = (i1 - centre) * (i1 - centre) + (i2 - centre) * (i2 - centre);
      state.psi.amplitudes[flat_index({i1, i2}, N)] =
          std::exp(-d2 / (4.0 * width_sites * width_sites));
    }
  }
  state.psi.amplitudes.normalize();
  return state;
}

double momentum_spread(const InitialState& state, const LatticeConfig& config) {
  double weight = 0.0, mean = 0.0;
  for (const ModeComponent& c : state.modes) {
    const double w = std::norm(c.coefficient);
    weight += w;
    mean += w * c.energy;
  }
  if (weight <= 0.0) throw ValidationError("momentum_spread needs a mode expansion");
  mean /= weight;
  // Centered sum: a single mode gives exactly zero.
  double variance = 0.0;
  for (const ModeComponent& c : state.modes)
    variance += std::norm(c.coefficient) * (c.energy - mean) * (c.energy - mean);
  variance /= weight;
  return config.L * std::sqrt(2.0 * config.mass() * std::sqrt(variance));
}

double momentum_spread(const Eigen::VectorXcd& psi, const Hamiltonian& hamiltonian,
                       const LatticeConfig& config) {
  const Eigen::VectorXcd hpsi = hamiltonian.matrix * psi;
  const double mean = psi.dot(hpsi).real() / psi.squaredNorm();
  const double variance = (hpsi - mean * psi).squaredNorm() / psi.squaredNorm();
  return config.L * std::sqrt(2.0 * config.mass() * std::sqrt(variance));
}

void write_eigenbasis_csv(std::ostream& out, const EigenMode& mode, const LatticeConfig& config) {
  out << "site,x1,x2,re_psi,im_psi\n";
  const double a = config.spacing();
  for (int n = 0; n < mode.vector.size(); ++n) {
    const SiteCoords c = site_coords(n, config.N);
    out << n << ',' << fmt_double(c.i1 * a) << ',' << fmt_double(c.i2 * a) << ','
        << fmt_double(mode.vector[n].real()) << ',' << fmt_double(mode.vector[n].imag()) << '\n';
  }
}

}  // namespace bellrelax
