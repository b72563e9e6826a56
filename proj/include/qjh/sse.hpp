// Stochastic Schrodinger equations (linear and nonlinear), the stochastic
// master equation, Ornstein-Uhlenbeck colored noise, and the approximated
// non-Markovian master equation driven by it.
//
// Noise paths are reified values rather than hidden RNG state, so every
// integrator here is a deterministic function of (model, initial state,
// path); ensembles parallelize over paths with per-path RNG streams.
#pragma once

#include <functional>
#include <vector>

#include "qjh/density.hpp"
#include "qjh/lindblad.hpp"
#include "qjh/rng.hpp"

namespace qjh::sse {

// H(t) plus noise operators R_j(t); operators may be time dependent.
struct SSEModel {
  std::function<ComplexMatrix(double)> hamiltonian;
  std::vector<std::function<ComplexMatrix(double)>> noise_ops;
  Index dim = 0;

  static SSEModel constant(ComplexMatrix h, std::vector<ComplexMatrix> rs);
};

// Uniform grid of Wiener increments, dW_j ~ N(0, dt) independent across
// channels and steps.
struct WienerPath {
  RealVector times;       // steps + 1 points
  RealMatrix increments;  // steps x channels

  Index steps() const { return increments.rows(); }
  Index channels() const { return increments.cols(); }
  double dt() const { return times[1] - times[0]; }
};

WienerPath sample_wiener_path(Index channels, double t_final, double dt, Rng& rng);

// Stationary Ornstein-Uhlenbeck path: dX = -gamma X dt + dW with
// X(0) ~ N(0, 1/(2 gamma)); sampled by the exact discrete recursion.
struct OUPath {
  double gamma = 0.0;
  RealVector times;
  RealVector values;
};

OUPath sample_ou_path(double gamma, double t_final, double dt, Rng& rng);

// One Wiener process drives both the OU coordinate and the state equation.
// This sampler draws the pair jointly: the exact OU innovation together with
// the raw Wiener increment over each step, with their exact covariance
// (1 - exp(-gamma dt)) / gamma.
struct OUDriving {
  OUPath ou;
  WienerPath wiener;
};

OUDriving sample_ou_driving(double gamma, double t_final, double dt, Rng& rng);

struct StateTrajectory {
  RealVector times;
  std::vector<ComplexVector> states;
  RealVector norms;
  std::vector<Index> degenerate_steps;  // steps where the norm collapsed

  const ComplexVector& back() const { return states.back(); }
};

// K(t) = -i H(t) - sum_j R_j(t)^dagger R_j(t) / 2.
ComplexMatrix drift_operator(const SSEModel& model, double t);

// Euler-Maruyama for d psi = K psi dt + sum_j R_j psi dW_j. Linear in psi0;
// throws std::runtime_error (with the step index) on overflow or NaN.
StateTrajectory integrate_lsse(const SSEModel& model, const ComplexVector& psi0,
                               const WienerPath& path);

// Norm-preserving unraveling: the nonlinear equation in the state
// psi_hat with eta_j = <psi_hat | R_j psi_hat>, renormalized after every
// step. Ensemble averages of |psi_hat><psi_hat| track the Lindblad solution.
StateTrajectory integrate_nonlinear_sse(const SSEModel& model, const ComplexVector& psi0,
                                        const WienerPath& path);

struct StochasticMasterTrajectory {
  RealVector times;
  std::vector<DensityMatrix> states;
  std::vector<Index> flagged_steps;  // positivity loss beyond -1e-6
};

// Nonlinear stochastic master equation
//   d rho = L(t)[rho] dt + sum_j (R_j rho + rho R_j^dagger - v_j rho) dW_j
// with v_j = tr((R_j + R_j^dagger) rho); trace renormalized each step.
StochasticMasterTrajectory integrate_stochastic_master(const SSEModel& model,
                                                       const DensityMatrix& rho0,
                                                       const WienerPath& path);

// LSSE with H(t) = h0 - gamma X(t) L and R = -i L for Hermitian L, driven
// by the given OU path; Wiener path must share the OU grid.
StateTrajectory integrate_ou_sse(const ComplexMatrix& h0, const ComplexMatrix& coupling,
                                 double gamma, const ComplexVector& psi0,
                                 const OUPath& ou, const WienerPath& path);

// Approximated non-Markovian master equation for the OU-driven model:
//   d eta/dt = -i[H0, eta] - [L, [L, eta]]/2
//            + (gamma/2) int_0^t [L, exp((L_M - gamma)(t-s)) [L, eta(s)]] ds
// where L_M is the averaged Liouvillian -i[H0, .] - [L, [L, .]]/2. The
// memory integral is a trapezoidal rule over the stored history; the kernel
// exponential acts on the stored operands via sub-stepped RK4.
lindblad::DensityTrajectory nonmarkovian_evolve(const ComplexMatrix& h0,
                                                const ComplexMatrix& coupling,
                                                double gamma, const DensityMatrix& eta0,
                                                double t_final, double dt);

}  // namespace qjh::sse
