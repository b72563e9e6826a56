// Deterministic Lindblad (GKSL) master-equation evolution.
#pragma once

#include <vector>

#include "qjh/density.hpp"

namespace qjh::lindblad {

// Hamiltonian plus jump operators L_k defining an open-system model.
struct LindbladModel {
  ComplexMatrix hamiltonian;
  std::vector<ComplexMatrix> jumps;

  Index dim() const { return hamiltonian.rows(); }
  void validate() const;
};

// -i[H, rho] + sum_k (L_k rho L_k^dagger - {L_k^dagger L_k, rho} / 2).
// Hermitian and traceless by construction.
ComplexMatrix rhs(const LindbladModel& model, const ComplexMatrix& rho);

struct DensityTrajectory {
  RealVector times;
  std::vector<DensityMatrix> states;

  const DensityMatrix& back() const { return states.back(); }
};

// Fixed-step classical RK4; every stored state is re-projected onto the
// density-matrix set. Throws std::runtime_error when the per-step trace
// drift exceeds 1e-6 (step size too large).
DensityTrajectory evolve(const LindbladModel& model, const DensityMatrix& rho0,
                         double t_final, double dt);

// 1/2 sum |eigenvalues of (a - b)|; the standard distinguishability metric.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qjh::lindblad
