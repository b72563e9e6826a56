#include "qjh/lindblad.hpp"

#include <cmath>
#include <stdexcept>

namespace qjh::lindblad {

void LindbladModel::validate() const {
  if (hamiltonian.rows() != hamiltonian.cols())
    throw std::invalid_argument("LindbladModel: Hamiltonian must be square");
  if (!is_hermitian(hamiltonian, 1e-12))
    throw std::invalid_argument("LindbladModel: Hamiltonian must be Hermitian");
  for (const auto& l : jumps)
    if (l.rows() != dim() || l.cols() != dim())
      throw std::invalid_argument("LindbladModel: jump operator shape mismatch");
}

ComplexMatrix rhs(const LindbladModel& model, const ComplexMatrix& rho) {
  if (rho.rows() != model.dim() || rho.cols() != model.dim())
    throw std::invalid_argument("lindblad::rhs: state shape mismatch");
  ComplexMatrix out = Complex(0.0, -1.0) * commutator(model.hamiltonian, rho);
  for (const auto& l : model.jumps) {
    const ComplexMatrix ldl = l.adjoint() * l;
    out += l * rho * l.adjoint() - 0.5 * anticommutator(ldl, rho);
  }
  return hermitize(out);
}

DensityTrajectory evolve(const LindbladModel& model, const DensityMatrix& rho0,
                         double t_final, double dt) {
  model.validate();
  if (dt <= 0.0) throw std::invalid_argument("lindblad::evolve: dt must be positive");
  if (t_final < 0.0) throw std::invalid_argument("lindblad::evolve: t_final must be >= 0");

  const auto steps = static_cast<Index>(std::llround(t_final / dt));
  DensityTrajectory traj;
  traj.times.resize(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times[0] = 0.0;
  traj.states.push_back(rho0);

  ComplexMatrix state = rho0.matrix();
  for (Index n = 0; n < steps; ++n) {
    const ComplexMatrix k1 = rhs(model, state);
    const ComplexMatrix k2 = rhs(model, state + 0.5 * dt * k1);
    const ComplexMatrix k3 = rhs(model, state + 0.5 * dt * k2);
    const ComplexMatrix k4 = rhs(model, state + dt * k3);
    state += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double drift = std::abs(state.trace().real() - 1.0);
    if (!std::isfinite(drift) || drift > 1e-6)
      throw std::runtime_error(
          "lindblad::evolve: trace drift exceeds 1e-6, reduce dt");
    traj.times[n + 1] = dt * static_cast<double>(n + 1);
    traj.states.push_back(density::project_to_density(state));
  }
  return traj;
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitize(a - b),
                                                      Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace qjh::lindblad
