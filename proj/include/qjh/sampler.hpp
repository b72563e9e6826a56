// Hamiltonian Monte Carlo with a pluggable mass kernel, including the
// density-matrix preconditioner that tracks the normalized posterior
// precision while a unitary random walk stirs its eigenbasis during warmup.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qjh/density.hpp"
#include "qjh/rmt.hpp"
#include "qjh/rng.hpp"

namespace qjh::sampler {

// The sampler's sole view of an inference problem.
struct TargetDensity {
  Index dim = 0;
  std::function<double(const RealVector&)> log_density;
  std::function<RealVector(const RealVector&)> grad_log_density;
};

// Relative defect between grad_log_density and central differences at a
// probe point; used by tests and config validation.
double gradient_defect(const TargetDensity& target, const RealVector& probe,
                       double h = 1e-5);

struct HMCConfig {
  double step_size = 0.1;
  int leapfrog_steps = 10;
  RealMatrix mass;        // empty means identity
  int warmup = 1000;
  int iterations = 2000;  // total, including warmup
  std::uint64_t seed = 0;
  RealVector init;        // empty means zeros
};

// H(theta, p) = -log p(theta) + log((2 pi)^D |M|) / 2 + p^T M^{-1} p / 2.
double hamiltonian(const RealVector& theta, const RealVector& momentum,
                   const TargetDensity& target, const RealMatrix& mass);

struct LeapfrogResult {
  RealVector position;
  RealVector momentum;
  bool diverged = false;  // non-finite gradient or state encountered
};

// Half-kick / drift / half-kick composition, `steps` times.
LeapfrogResult leapfrog(const RealVector& theta, const RealVector& momentum,
                        const TargetDensity& target, const RealMatrix& mass,
                        double step_size, int steps);

// min(1, exp(h_current - h_proposed)); divergent proposals get 0.
double acceptance_probability(double h_current, double h_proposed);

struct ChainState {
  RealVector position;
  double log_density = 0.0;
  RealVector gradient;
  long iteration = 0;
  long accepted = 0;
  long divergences = 0;
};

ChainState make_chain_state(const TargetDensity& target, const RealVector& init);

// One Metropolis-corrected HMC transition with a full momentum refresh.
// Returns whether the proposal was accepted.
bool hmc_step(ChainState& state, const TargetDensity& target, const HMCConfig& cfg,
              Rng& rng);

// M = scale (Re rho + floor I); symmetric positive definite for every valid
// density matrix (the real part of a PSD Hermitian matrix is PSD).
RealMatrix mass_from_density(const DensityMatrix& rho, double scale, double floor);

struct DMPreconditionerOptions {
  double alpha = 0.1;        // mixing rate toward the precision target
  double walk_step = 0.01;   // dtau of the unitary walk
  int adapt_every = 10;      // iterations per adaptation epoch
  double floor = 1e-8;       // relative eigenvalue floor in the mass matrix
  bool anneal_walk = true;   // shrink the walk step as 1/epoch
};

// Density-matrix mass kernel. rho starts maximally mixed; each adaptation
// epoch applies one unitary-walk conjugation and mixes toward the normalized
// inverse of the regularized running scatter. Frozen after warmup.
class DMPreconditioner {
 public:
  DMPreconditioner(Index dim, DMPreconditionerOptions opts, std::uint64_t walk_seed);

  // Running-moment update with the new position; every adapt_every calls
  // performs one adaptation epoch. No-op once frozen.
  void update(const RealVector& position);

  // Force one adaptation epoch now (exposed for tests).
  void adapt();

  // M = s (Re rho + floor I) with s = tr(scatter^{-1}), falling back to
  // s = dim while the scatter is rank deficient.
  RealMatrix mass() const;

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  const DensityMatrix& rho() const { return rho_; }
  long observations() const { return count_; }

  // Replace the running moments (test seam).
  void set_moments(long count, const RealVector& mean, const RealMatrix& scatter_sum);

 private:
  std::optional<RealMatrix> regularized_scatter() const;

  Index dim_;
  DMPreconditionerOptions opts_;
  DensityMatrix rho_;
  rmt::UnitaryWalkState walk_;
  Rng walk_rng_;
  long count_ = 0;
  long epoch_ = 0;
  RealVector mean_;
  RealMatrix scatter_sum_;
  bool frozen_ = false;
};

struct EssResult {
  double ess = 0.0;
  bool degenerate = false;  // constant series
};

// Geyer initial-positive-sequence estimator of the effective sample size.
EssResult effective_sample_size(const RealVector& series);

struct ChainResult {
  RealMatrix draws;  // post-warmup, one row per draw
  double acceptance_rate = 0.0;
  long divergences = 0;
  RealMatrix mass;   // mass matrix in effect after warmup
};

// Run a single chain: adaptation (if a preconditioner is given) only during
// warmup, frozen afterwards. Throws std::runtime_error if every warmup
// iteration diverged.
ChainResult run_chain(const TargetDensity& target, const HMCConfig& cfg,
                      DMPreconditioner* pre = nullptr);

}  // namespace qjh::sampler
