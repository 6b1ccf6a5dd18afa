#include "bellrelax/evolve.hpp"

#include "bellrelax/error.hpp"

#include <Eigen/Eigenvalues>

namespace bellrelax {

EvolutionOperator evolution_operator(const Hamiltonian& hamiltonian, double epsilon) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian.matrix);
  if (solver.info() != Eigen::Success)
    throw IntegrityError("symmetric eigensolver failed on the Hamiltonian", "eigensolver");

  const Eigen::MatrixXd& V = solver.eigenvectors();
  const Eigen::VectorXd& energies = solver.eigenvalues();
  Eigen::VectorXcd phases(energies.size());
  for (Eigen::Index i = 0; i < energies.size(); ++i)
    phases[i] = std::polar(1.0, -epsilon * energies[i]);

  EvolutionOperator op;
  op.epsilon = epsilon;
  const Eigen::MatrixXcd Vc = V.cast<std::complex<double>>();
  op.U = Vc * phases.asDiagonal() * Vc.transpose();
  return op;
}

WaveFunction evolve_step(const EvolutionOperator& op, const WaveFunction& psi) {
  WaveFunction next;
  next.amplitudes.noalias() = op.U * psi.amplitudes;
  next.step = psi.step + 1;
  return next;
}

ProbabilityVector born_probability(const WaveFunction& psi) {
  return {psi.amplitudes.cwiseAbs2(), psi.step};
}

CurrentMatrix current_matrix(const WaveFunction& psi, const WaveFunction& psi_next,
                             const EvolutionOperator& op) {
  const Eigen::Index n = psi.amplitudes.size();
  const Eigen::VectorXcd left = psi_next.amplitudes.conjugate();
  const Eigen::VectorXcd& right = psi.amplitudes;

  CurrentMatrix current;
  current.step = psi.step;
  current.J.resize(n, n);
  // Column-major sweep over the upper triangle; the lower one is its mirror
  // with opposite sign, so antisymmetry holds bit for bit.
  for (Eigen::Index m = 0; m < n; ++m) {
    current.J(m, m) = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      const double forward = (left[k] * op.U(k, m) * right[m]).real();
      const double backward = (left[m] * op.U(m, k) * right[k]).real();
      const double j = forward - backward;
      current.J(k, m) = j;
      current.J(m, k) = -j;
    }
  }
  return current;
}

}  // namespace bellrelax
