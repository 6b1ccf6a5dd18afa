#include "bellrelax/evolve.hpp"

#include <doctest.h>

#include <complex>

using namespace bellrelax;
using cd = std::complex<double>;

namespace {

LatticeConfig config(int N, int Nk = 2) {
  LatticeConfig c;
  c.N = N;
  c.Nk = Nk;
  return c;
}

}  // namespace

TEST_CASE("evolution operator matches the Taylor series of exp(-i eps H)") {
  const LatticeConfig c = config(3);
  const Hamiltonian H = build_hamiltonian(c);
  const double eps = c.epsilon();
  const EvolutionOperator op = evolution_operator(H, eps);

  const Eigen::MatrixXcd A = cd(0.0, -eps) * H.matrix.cast<cd>();
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(9, 9);
  Eigen::MatrixXcd sum = term;
  for (int k = 1; k < 40; ++k) {
    term = term * A / static_cast<double>(k);
    sum += term;
  }
  CHECK((op.U - sum).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((op.U.adjoint() * op.U - Eigen::MatrixXcd::Identity(9, 9)).norm() < 1e-13);
  CHECK(op.epsilon == eps);
}

TEST_CASE("stepping follows the mode phases") {
  const LatticeConfig c = config(6, 3);
  const InitialState s = build_initial_state(c);
  const EvolutionOperator op = evolution_operator(build_hamiltonian(c), c.epsilon());
  WaveFunction psi = s.psi;
  for (int i = 0; i < 300; ++i) psi = evolve_step(op, psi);
  CHECK(psi.step == 300);

  const double t = psi.time(c.epsilon());
  Eigen::VectorXcd expect = Eigen::VectorXcd::Zero(c.sites());
  for (const ModeComponent& m : s.modes)
    expect += m.coefficient * std::exp(cd(0.0, -m.energy * t)) * eigenpair(m.k, c).vector;
  CHECK((psi.amplitudes - expect).norm() < 1e-11);
  CHECK(psi.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("repeated steps equal a direct matrix power") {
  const LatticeConfig c = config(4);
  const EvolutionOperator op = evolution_operator(build_hamiltonian(c), c.epsilon());
  WaveFunction psi = build_initial_state(c).psi;
  const Eigen::VectorXcd start = psi.amplitudes;
  for (int i = 0; i < 10; ++i) psi = evolve_step(op, psi);
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(16, 16);
  for (int i = 0; i < 10; ++i) P = P * op.U;
  CHECK((psi.amplitudes - P * start).norm() < 1e-13);
}

TEST_CASE("current is antisymmetric and conserves probability") {
  const LatticeConfig c = config(5, 3);
  const EvolutionOperator op = evolution_operator(build_hamiltonian(c), c.epsilon());
  WaveFunction psi = build_initial_state(c).psi;
  for (int i = 0; i < 5; ++i) {
    const WaveFunction next = evolve_step(op, psi);
    const CurrentMatrix J = current_matrix(psi, next, op);
    CHECK(J.step == psi.step);
    CHECK((J.J + J.J.transpose()).norm() == 0.0);
    // By hand: J_nm = Re(conj(psi'_n) U_nm psi_m) - Re(conj(psi'_m) U_mn psi_n).
    for (int n : {0, 7, 12})
      for (int m : {1, 6, 24}) {
        const double j = (std::conj(next.amplitudes[n]) * op.U(n, m) * psi.amplitudes[m]).real() -
                         (std::conj(next.amplitudes[m]) * op.U(m, n) * psi.amplitudes[n]).real();
        CHECK(J.J(n, m) == doctest::Approx(j).epsilon(1e-12).scale(1e-15));
      }
    const Eigen::VectorXd dP = born_probability(next).p - born_probability(psi).p;
    CHECK((J.J.rowwise().sum() - dP).cwiseAbs().maxCoeff() < 1e-15);
    psi = next;
  }
}

TEST_CASE("a real eigenstate carries no current") {
  const LatticeConfig c = config(5);
  const EvolutionOperator op = evolution_operator(build_hamiltonian(c), c.epsilon());
  WaveFunction psi = eigenstate(c, {2, 1}).psi;
  for (int i = 0; i < 3; ++i) {
    const WaveFunction next = evolve_step(op, psi);
    CHECK(current_matrix(psi, next, op).J.cwiseAbs().maxCoeff() < 1e-15);
    psi = next;
  }
}

TEST_CASE("born probability") {
  WaveFunction psi;
  psi.amplitudes = Eigen::VectorXcd(2);
  psi.amplitudes << cd(0.6, 0.0), cd(0.0, 0.8);
  psi.step = 7;
  const ProbabilityVector p = born_probability(psi);
  CHECK(p.step == 7);
  CHECK(p.p[0] == doctest::Approx(0.36));
  CHECK(p.p[1] == doctest::Approx(0.64));
}
