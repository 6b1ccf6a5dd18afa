#include "bellrelax/error.hpp"
#include "bellrelax/lattice.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace bellrelax;

namespace {

LatticeConfig small(int N, BoundaryCondition bc = BoundaryCondition::Dirichlet) {
  LatticeConfig c;
  c.N = N;
  c.bc = bc;
  c.Nk = std::min(2, N);
  return c;
}

// Analytic lattice energies, independent of the eigenvector code.
std::vector<double> analytic_energies(const LatticeConfig& c) {
  const double h = c.hopping();
  std::vector<double> e1;
  for (int k = 0; k < c.N; ++k) {
    const double q = c.bc == BoundaryCondition::Dirichlet
                         ? (k + 1) * std::numbers::pi / (c.N + 1)
                         : 2.0 * std::numbers::pi * k / c.N;
    e1.push_back(h * (2.0 - 2.0 * std::cos(q)));
  }
  std::vector<double> out;
  for (double a : e1)
    for (double b : e1) out.push_back(a + b);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("flat index and site coordinates are inverse") {
  for (int n = 0; n < 49; ++n) CHECK(flat_index(site_coords(n, 7), 7) == n);
  CHECK(flat_index({2, 3}, 5) == 13);
}

TEST_CASE("hamiltonian structure") {
  for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Periodic}) {
    const LatticeConfig c = small(5, bc);
    const Eigen::MatrixXd H = build_hamiltonian(c).matrix;
    CHECK((H - H.transpose()).norm() == 0.0);
    const double h = c.hopping();
    CHECK(h == doctest::Approx(1.0 / (2.0 * c.mass() * c.spacing() * c.spacing())));
    for (int n = 0; n < c.sites(); ++n) {
      CHECK(H(n, n) == doctest::Approx(4.0 * h));
      const auto a = site_coords(n, c.N);
      for (int m = 0; m < c.sites(); ++m) {
        if (m == n) continue;
        const auto b = site_coords(m, c.N);
        int d1 = std::abs(a.i1 - b.i1), d2 = std::abs(a.i2 - b.i2);
        if (bc == BoundaryCondition::Periodic) {
          d1 = std::min(d1, c.N - d1);
          d2 = std::min(d2, c.N - d2);
        }
        const bool neighbor = d1 + d2 == 1;
        CHECK(H(n, m) == doctest::Approx(neighbor ? -h : 0.0));
      }
    }
  }
}

TEST_CASE("dense spectrum matches analytic energies") {
  for (auto [N, bc] : {std::pair{3, BoundaryCondition::Dirichlet}, std::pair{4, BoundaryCondition::Periodic}}) {
    const LatticeConfig c = small(N, bc);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_hamiltonian(c).matrix);
    const auto expected = analytic_energies(c);
    for (int i = 0; i < c.sites(); ++i)
      CHECK(es.eigenvalues()[i] == doctest::Approx(expected[i]).epsilon(1e-12).scale(c.hopping()));
  }
}

TEST_CASE("closed-form eigenpairs solve H v = E v") {
  for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Periodic}) {
    const LatticeConfig c = small(6, bc);
    const Eigen::MatrixXcd H = build_hamiltonian(c).matrix.cast<std::complex<double>>();
    const int lo = bc == BoundaryCondition::Dirichlet ? 1 : 0;
    for (int k1 = lo; k1 < lo + c.N; ++k1) {
      for (int k2 = lo; k2 < lo + c.N; ++k2) {
        const EigenMode mode = eigenpair({k1, k2}, c);
        CHECK(mode.vector.norm() == doctest::Approx(1.0));
        CHECK((H * mode.vector - mode.energy * mode.vector).norm() < 1e-10 * c.hopping());
      }
    }
  }
}

TEST_CASE("band wave numbers") {
  LatticeConfig c = small(6);
  c.Nk = 2;
  CHECK(band_wave_numbers(c) == std::vector<WaveNumber>{{1, 1}, {1, 2}, {2, 1}, {2, 2}});
  c.bc = BoundaryCondition::Periodic;
  CHECK(band_wave_numbers(c) == std::vector<WaveNumber>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
}

TEST_CASE("superposition state reproduces the seeded phases") {
  LatticeConfig c = small(7);
  c.Nk = 3;
  c.seed = 42;
  const InitialState s = build_initial_state(c);
  CHECK(s.psi.norm_squared() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.psi.step == 0);

  std::mt19937_64 rng(42);
  Eigen::VectorXcd expect = Eigen::VectorXcd::Zero(c.sites());
  for (const WaveNumber& k : band_wave_numbers(c)) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    expect += std::polar(1.0, 2.0 * std::numbers::pi * u) * dirichlet_eigenpair(k, c).vector;
  }
  expect.normalize();
  CHECK((s.psi.amplitudes - expect).norm() < 1e-13);

  CHECK((build_initial_state(c).psi.amplitudes - s.psi.amplitudes).norm() == 0.0);
  c.seed = 43;
  CHECK((build_initial_state(c).psi.amplitudes - s.psi.amplitudes).norm() > 0.1);
}

TEST_CASE("momentum spread from modes agrees with the matrix estimate") {
  LatticeConfig c = small(9);
  c.Nk = 3;
  const InitialState s = build_initial_state(c);
  const double from_modes = momentum_spread(s, c);
  const double from_matrix = momentum_spread(s.psi.amplitudes, build_hamiltonian(c), c);
  CHECK(from_modes == doctest::Approx(from_matrix).epsilon(1e-10));
}

TEST_CASE("momentum spread of the Nk band at N=30") {
  // Equal weights over Nk^2 sine modes: dE is the spread of the band energies.
  LatticeConfig c;
  c.N = 30;
  const std::vector<double> expected{8.552, 10.515, 12.438, 14.326, 16.177};
  for (int Nk = 4; Nk <= 8; ++Nk) {
    c.Nk = Nk;
    const double h = c.hopping();
    double s1 = 0.0, s2 = 0.0;
    for (int a = 1; a <= Nk; ++a)
      for (int b = 1; b <= Nk; ++b) {
        const double e = h * (4.0 - 2.0 * std::cos(a * std::numbers::pi / 31.0) -
                              2.0 * std::cos(b * std::numbers::pi / 31.0));
        s1 += e;
        s2 += e * e;
      }
    const double n = Nk * Nk;
    const double oracle = c.L * std::sqrt(2.0 * c.mass() * std::sqrt(s2 / n - s1 * s1 / n / n));
    const double got = momentum_spread(build_initial_state(c), c);
    CHECK(got == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(got == doctest::Approx(expected[Nk - 4]).epsilon(1e-3));
  }
}

TEST_CASE("eigenstate and gaussian packet") {
  const LatticeConfig c = small(8);
  const InitialState e = eigenstate(c, {2, 3});
  CHECK(e.modes.size() == 1);
  CHECK(e.psi.amplitudes.imag().norm() == 0.0);
  CHECK(momentum_spread(e, c) == doctest::Approx(0.0));

  const InitialState g = gaussian_packet(c, 1.0);
  CHECK(g.psi.norm_squared() == doctest::Approx(1.0));
  CHECK(g.psi.amplitudes.imag().norm() == 0.0);
  Eigen::Index peak;
  g.psi.amplitudes.cwiseAbs().maxCoeff(&peak);
  const auto pc = site_coords(static_cast<int>(peak), c.N);
  CHECK(std::abs(pc.i1 - 3.5) <= 0.5);
  CHECK(std::abs(pc.i2 - 3.5) <= 0.5);
}

TEST_CASE("config validation and boundary parsing") {
  LatticeConfig c;
  CHECK_NOTHROW(c.validate());
  c.N = 1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.mL = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.Nk = 16;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.epsilon_factor = -1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);

  CHECK(parse_boundary_condition("periodic") == BoundaryCondition::Periodic);
  CHECK(parse_boundary_condition("D") == BoundaryCondition::Dirichlet);
  CHECK(parse_boundary_condition(to_string(BoundaryCondition::Periodic)) == BoundaryCondition::Periodic);
  CHECK_THROWS_AS(parse_boundary_condition("open"), ValidationError);
}

TEST_CASE("eigenbasis csv") {
  const LatticeConfig c = small(3);
  std::ostringstream out;
  write_eigenbasis_csv(out, dirichlet_eigenpair({1, 1}, c), c);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "site,x1,x2,re_psi,im_psi");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 9);
}
