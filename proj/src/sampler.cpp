#include "qjh/sampler.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qjh::sampler {

namespace {
constexpr double kDivergenceThreshold = 1000.0;  // |dH| beyond this is a divergence

Eigen::LLT<RealMatrix> mass_cholesky(const RealMatrix& mass) {
  Eigen::LLT<RealMatrix> llt(mass);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("mass matrix must be symmetric positive definite");
  return llt;
}

RealMatrix effective_mass(const HMCConfig& cfg, Index dim) {
  if (cfg.mass.size() == 0) return RealMatrix::Identity(dim, dim);
  if (cfg.mass.rows() != dim || cfg.mass.cols() != dim)
    throw std::invalid_argument("mass matrix dimension mismatch");
  return cfg.mass;
}

RealVector sample_momentum(const Eigen::LLT<RealMatrix>& llt, Index dim, Rng& rng) {
  RealVector z(dim);
  for (Index i = 0; i < dim; ++i) z[i] = rng.normal();
  return llt.matrixL() * z;  // covariance M
}
}  // namespace

double gradient_defect(const TargetDensity& target, const RealVector& probe, double h) {
  const RealVector grad = target.grad_log_density(probe);
  double worst = 0.0;
  for (Index i = 0; i < target.dim; ++i) {
    RealVector ei = RealVector::Zero(target.dim);
    ei[i] = h;
    const double fd =
        (target.log_density(probe + ei) - target.log_density(probe - ei)) / (2.0 * h);
    const double scale = std::max(1.0, std::abs(grad[i]));
    worst = std::max(worst, std::abs(fd - grad[i]) / scale);
  }
  return worst;
}

double hamiltonian(const RealVector& theta, const RealVector& momentum,
                   const TargetDensity& target, const RealMatrix& mass) {
  const auto llt = mass_cholesky(mass);
  const Index d = theta.size();
  double log_det = 0.0;
  for (Index i = 0; i < d; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
  const double quad = momentum.dot(llt.solve(momentum));
  return -target.log_density(theta) +
         0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det) +
         0.5 * quad;
}

LeapfrogResult leapfrog(const RealVector& theta, const RealVector& momentum,
                        const TargetDensity& target, const RealMatrix& mass,
                        double step_size, int steps) {
  if (step_size <= 0.0) throw std::invalid_argument("leapfrog: step size must be positive");
  if (steps < 1) throw std::invalid_argument("leapfrog: need at least one step");
  HMCConfig mass_only;
  mass_only.mass = mass;
  const auto llt = mass_cholesky(effective_mass(mass_only, theta.size()));

  LeapfrogResult out{theta, momentum, false};
  RealVector grad = target.grad_log_density(out.position);
  if (!grad.allFinite()) {
    out.diverged = true;
    return out;
  }
  for (int s = 0; s < steps; ++s) {
    out.momentum += 0.5 * step_size * grad;
    out.position += step_size * llt.solve(out.momentum);
    if (!out.position.allFinite()) {
      out.diverged = true;
      return out;
    }
    grad = target.grad_log_density(out.position);
    if (!grad.allFinite()) {
      out.diverged = true;
      return out;
    }
    out.momentum += 0.5 * step_size * grad;
  }
  return out;
}

double acceptance_probability(double h_current, double h_proposed) {
  if (!std::isfinite(h_proposed)) return 0.0;
  const double log_ratio = h_current - h_proposed;
  if (log_ratio >= 0.0) return 1.0;
  return std::exp(log_ratio);
}

ChainState make_chain_state(const TargetDensity& target, const RealVector& init) {
  ChainState st;
  st.position = init.size() ? init : RealVector::Zero(target.dim);
  st.log_density = target.log_density(st.position);
  st.gradient = target.grad_log_density(st.position);
  return st;
}

bool hmc_step(ChainState& state, const TargetDensity& target, const HMCConfig& cfg,
              Rng& rng) {
  const RealMatrix mass = effective_mass(cfg, target.dim);
  const auto llt = mass_cholesky(mass);
  const RealVector momentum = sample_momentum(llt, target.dim, rng);

  const double h_current = hamiltonian(state.position, momentum, target, mass);
  const LeapfrogResult prop = leapfrog(state.position, momentum, target, mass,
                                       cfg.step_size, cfg.leapfrog_steps);
  double h_proposed = std::numeric_limits<double>::infinity();
  bool diverged = prop.diverged;
  if (!diverged) {
    h_proposed = hamiltonian(prop.position, prop.momentum, target, mass);
    diverged = !std::isfinite(h_proposed) ||
               std::abs(h_proposed - h_current) > kDivergenceThreshold;
  }

  ++state.iteration;
  if (diverged) {
    ++state.divergences;
    return false;
  }
  const double accept = acceptance_probability(h_current, h_proposed);
  if (rng.uniform() < accept) {
    state.position = prop.position;
    state.log_density = target.log_density(state.position);
    state.gradient = target.grad_log_density(state.position);
    ++state.accepted;
    return true;
  }
  return false;
}

DMPreconditioner::DMPreconditioner(Index dim, DMPreconditionerOptions opts,
                                   std::uint64_t walk_seed)
    : dim_(dim),
      opts_(opts),
      rho_(DensityMatrix::maximally_mixed(dim)),
      walk_(rmt::UnitaryWalkState::identity(dim, opts.walk_step)),
      walk_rng_(walk_seed),
      mean_(RealVector::Zero(dim)),
      scatter_sum_(RealMatrix::Zero(dim, dim)) {
  if (!(opts.alpha > 0.0 && opts.alpha <= 1.0))
    throw std::invalid_argument("DMPreconditioner: alpha must lie in (0, 1]");
  if (opts.walk_step < 0.0)
    throw std::invalid_argument("DMPreconditioner: walk step must be >= 0");
}

void DMPreconditioner::update(const RealVector& position) {
  if (frozen_) return;
  if (position.size() != dim_)
    throw std::invalid_argument("DMPreconditioner: position dimension mismatch");
  ++count_;
  const RealVector delta = position - mean_;
  mean_ += delta / static_cast<double>(count_);
  scatter_sum_ += delta * (position - mean_).transpose();
  if (count_ % opts_.adapt_every == 0) adapt();
}

std::optional<RealMatrix> DMPreconditioner::regularized_scatter() const {
  if (count_ < dim_ + 1) return std::nullopt;
  RealMatrix cov = scatter_sum_ / static_cast<double>(count_ - 1);
  cov += 1e-6 * (cov.trace() / static_cast<double>(dim_)) *
         RealMatrix::Identity(dim_, dim_);
  Eigen::LLT<RealMatrix> llt(cov);
  if (llt.info() != Eigen::Success) return std::nullopt;
  return cov;
}

void DMPreconditioner::adapt() {
  if (frozen_) return;
  ++epoch_;
  // ballistic early, scattering-dominated late: the walk step shrinks as
  // 1/epoch so the stirred eigenbasis settles onto the precision target
  const double dtau =
      opts_.anneal_walk ? opts_.walk_step / static_cast<double>(epoch_) : opts_.walk_step;
  const ComplexMatrix v = rmt::cue_increment(dim_, dtau, walk_rng_);

  ComplexMatrix target;
  const auto cov = regularized_scatter();
  if (cov) {
    const RealMatrix precision =
        Eigen::LLT<RealMatrix>(*cov).solve(RealMatrix::Identity(dim_, dim_));
    target = (precision / precision.trace()).cast<Complex>();
  } else {
    target = ComplexMatrix::Identity(dim_, dim_) / static_cast<double>(dim_);
  }
  const ComplexMatrix mixed = (1.0 - opts_.alpha) * v * rho_.matrix() * v.adjoint() +
                              opts_.alpha * target;
  rho_ = density::project_to_density(mixed);
}

RealMatrix mass_from_density(const DensityMatrix& rho, double scale, double floor) {
  const Index d = rho.dim();
  RealMatrix m = rho.matrix().real();
  m = 0.5 * (m + m.transpose().eval());
  m += floor * RealMatrix::Identity(d, d);
  return scale * m;
}

RealMatrix DMPreconditioner::mass() const {
  double scale = static_cast<double>(dim_);
  if (const auto cov = regularized_scatter()) {
    const RealMatrix precision =
        Eigen::LLT<RealMatrix>(*cov).solve(RealMatrix::Identity(dim_, dim_));
    scale = precision.trace();
  }
  return mass_from_density(rho_, scale, opts_.floor);
}

void DMPreconditioner::set_moments(long count, const RealVector& mean,
                                   const RealMatrix& scatter_sum) {
  count_ = count;
  mean_ = mean;
  scatter_sum_ = scatter_sum;
}

EssResult effective_sample_size(const RealVector& series) {
  const Index n = series.size();
  if (n < 10) throw std::invalid_argument("effective_sample_size: need at least 10 samples");
  const double mean = series.mean();
  const RealVector centered = series.array() - mean;
  const double var = centered.squaredNorm() / static_cast<double>(n);
  if (var <= 0.0 || !std::isfinite(var)) return {1.0, true};

  const auto gamma = [&](Index lag) {
    double acc = 0.0;
    for (Index i = 0; i + lag < n; ++i) acc += centered[i] * centered[i + lag];
    return acc / static_cast<double>(n);
  };

  // Geyer initial positive sequence: sum paired autocovariances while positive.
  double tau = -1.0;  // running 2 * sum(Gamma_m) - 1 in units of var
  for (Index m = 0; 2 * m + 1 < n; ++m) {
    const double pair = gamma(2 * m) + gamma(2 * m + 1);
    if (pair <= 0.0) break;
    tau += 2.0 * pair / var;
  }
  // antithetic chains give tau < 1; cap the reported gain at n log10(n)
  tau = std::max(tau, 1.0 / std::log10(static_cast<double>(n)));
  return {static_cast<double>(n) / tau, false};
}

ChainResult run_chain(const TargetDensity& target, const HMCConfig& cfg,
                      DMPreconditioner* pre) {
  if (cfg.warmup < 0 || cfg.iterations <= cfg.warmup)
    throw std::invalid_argument("run_chain: warmup must be shorter than iterations");
  Rng rng(cfg.seed);
  HMCConfig local = cfg;
  local.mass = effective_mass(cfg, target.dim);
  if (pre) local.mass = pre->mass();

  ChainState state = make_chain_state(target, cfg.init);
  const int draws = cfg.iterations - cfg.warmup;
  ChainResult out;
  out.draws.resize(draws, target.dim);

  long warmup_accepts = 0;
  for (int it = 0; it < cfg.warmup; ++it) {
    if (hmc_step(state, target, local, rng)) ++warmup_accepts;
    if (pre) {
      pre->update(state.position);
      local.mass = pre->mass();
    }
  }
  if (cfg.warmup > 0 && warmup_accepts == 0 && state.divergences == cfg.warmup)
    throw std::runtime_error("run_chain: every warmup iteration diverged");
  if (pre) {
    pre->freeze();
    local.mass = pre->mass();
  }

  const long post_start_accepts = state.accepted;
  for (int it = 0; it < draws; ++it) {
    hmc_step(state, target, local, rng);
    out.draws.row(it) = state.position;
  }
  out.acceptance_rate =
      static_cast<double>(state.accepted - post_start_accepts) / std::max(1, draws);
  out.divergences = state.divergences;
  out.mass = local.mass;
  return out;
}

}  // namespace qjh::sampler
