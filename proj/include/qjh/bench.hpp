// Benchmark harness: ill-conditioned Gaussian sampling with KL diagnostics,
// and Airy-operator eigenvalue estimation with Bayesian inference over the
// slope and noise scale.
#pragma once

#include <vector>

#include "qjh/sampler.hpp"

namespace qjh::bench {

// Multivariate Gaussian with cached precision and normalizer.
struct GaussianTarget {
  RealVector mean;
  RealMatrix covariance;
  RealMatrix precision;
  double log_norm = 0.0;

  sampler::TargetDensity target() const;
};

GaussianTarget make_gaussian_target(RealVector mean, RealMatrix covariance);
GaussianTarget standard_normal_target(Index dim);

// Zero-mean Gaussian whose covariance eigenvalues are log-spaced from 1e-1
// to 10^kappa in a random orthogonal eigenbasis. kappa > 8 is refused
// (double-precision conditioning guard).
GaussianTarget make_illconditioned_gaussian(Index dim, double kappa, Rng& rng);

// KL divergence between Gaussians, exact formula via Cholesky; throws
// std::domain_error when either covariance fails to be positive definite.
double kl_gaussian(const RealVector& mu, const RealMatrix& sigma,
                   const RealVector& mu_hat, const RealMatrix& sigma_hat);

struct GaussianBenchSettings {
  double kappa = 3.0;
  double step_size = 0.3;
  int leapfrog_steps = 15;
  int warmup = 3000;
  int draws = 10000;  // post-warmup draws per chain
  int chains = 8;
  bool preconditioned = true;
  sampler::DMPreconditionerOptions precond{};
  std::vector<int> checkpoints;  // pooled per-chain draw counts; default geometric
  int threads = 0;               // 0 means hardware concurrency
};

struct KlTraceRow {
  int dim = 0;
  int checkpoint = 0;
  long iteration = 0;  // pooled post-warmup draws per chain at this checkpoint
  double kl = 0.0;
  bool flagged = false;  // covariance estimate was not yet positive definite
};

std::vector<KlTraceRow> run_gaussian_benchmark(const std::vector<int>& dims,
                                               const GaussianBenchSettings& settings,
                                               std::uint64_t seed);

// -d^2/dx^2 + slope * x on (0, length), homogeneous Dirichlet at both ends.
struct AiryProblem {
  double slope = 1.0;
  double length = 0.0;
  int grid = 1000;  // interior points
};

// Domain length chosen so the requested number of eigenfunctions decay to
// negligible size before the artificial right boundary.
AiryProblem make_airy_problem(double slope, int modes, int grid);

struct Tridiagonal {
  RealVector diag;
  RealVector off;
};

Tridiagonal airy_discretize(const AiryProblem& p);

// Smallest `count` eigenvalues by Sturm-sequence bisection. Optional hints
// seed tight brackets (verified, with fallback to the full Gershgorin range).
RealVector tridiagonal_smallest_eigenvalues(const Tridiagonal& t, int count,
                                            const RealVector* hints = nullptr,
                                            double hint_margin = 0.02);

// Richardson extrapolation of the finite-difference eigenvalues over the
// problem grid and its exact refinement (2n + 1 interior points).
RealVector airy_eigenvalues(const AiryProblem& p, int count);

struct AiryPosteriorConfig {
  int modes = 20;
  int grid = 250;
  double prior_loga_mean = 0.0;
  double prior_loga_sd = 2.0;
  double prior_logsigma_mean = -4.0;
  double prior_logsigma_sd = 3.0;
  double fd_step = 1e-4;  // central-difference step for the gradient
};

// Log posterior over theta = (log slope, log sigma) given observed
// eigenvalues. Instances cache the last eigenvalue solve and are not safe
// for concurrent use; create one per chain.
sampler::TargetDensity airy_posterior(const RealVector& observed,
                                      const AiryPosteriorConfig& cfg);

struct EigenErrorRow {
  int index = 0;
  double exact = 0.0;
  double estimate = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
};

std::vector<EigenErrorRow> eigen_error_report(const RealVector& estimated,
                                              const RealVector& exact);

}  // namespace qjh::bench
