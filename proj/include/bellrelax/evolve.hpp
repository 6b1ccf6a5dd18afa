#pragma once

// Unitary Schrodinger stepping, Born probabilities and the two-time
// probability current between consecutive steps.

#include "bellrelax/lattice.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace bellrelax {

struct EvolutionOperator {
  Eigen::MatrixXcd U;
  double epsilon = 0.0;
};

/// U = exp(-i eps H) from the eigendecomposition of the symmetric H.
/// Throws IntegrityError if the symmetric eigensolver does not converge.
EvolutionOperator evolution_operator(const Hamiltonian& hamiltonian, double epsilon);

/// psi(t + eps) = U psi(t); advances the step counter.
WaveFunction evolve_step(const EvolutionOperator& op, const WaveFunction& psi);

struct ProbabilityVector {
  Eigen::VectorXd p;
  std::int64_t step = 0;
};

ProbabilityVector born_probability(const WaveFunction& psi);

/// Antisymmetric current J_nm = Re(conj(psi'_n) U_nm psi_m) - (n <-> m), with
/// psi' = U psi supplied by the caller. Stamped with the earlier step.
struct CurrentMatrix {
  Eigen::MatrixXd J;
  std::int64_t step = 0;
};

CurrentMatrix current_matrix(const WaveFunction& psi, const WaveFunction& psi_next,
                             const EvolutionOperator& op);

}  // namespace bellrelax
