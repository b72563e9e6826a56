#include "qjh/bench.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "qjh/parallel.hpp"

namespace qjh::bench {

namespace {
// Asymptotic estimate of the k-th eigenvalue of -d^2/dx^2 + x on the half
// line, used only to size domains and seed brackets.
double airy_level_estimate(int k) {
  return std::pow(3.0 * std::numbers::pi * (4.0 * k - 1.0) / 8.0, 2.0 / 3.0);
}
}  // namespace

sampler::TargetDensity GaussianTarget::target() const {
  const RealVector mu = mean;
  const RealMatrix p = precision;
  const double c = log_norm;
  sampler::TargetDensity t;
  t.dim = mean.size();
  t.log_density = [mu, p, c](const RealVector& x) {
    const RealVector d = x - mu;
    return c - 0.5 * d.dot(p * d);
  };
  t.grad_log_density = [mu, p](const RealVector& x) -> RealVector {
    return -(p * (x - mu));
  };
  return t;
}

GaussianTarget make_gaussian_target(RealVector mean, RealMatrix covariance) {
  const Index d = mean.size();
  if (covariance.rows() != d || covariance.cols() != d)
    throw std::invalid_argument("make_gaussian_target: shape mismatch");
  Eigen::LLT<RealMatrix> llt(covariance);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("make_gaussian_target: covariance not positive definite");
  double log_det = 0.0;
  for (Index i = 0; i < d; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
  GaussianTarget g;
  g.mean = std::move(mean);
  g.covariance = std::move(covariance);
  g.precision = llt.solve(RealMatrix::Identity(d, d));
  g.log_norm = -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det);
  return g;
}

GaussianTarget standard_normal_target(Index dim) {
  return make_gaussian_target(RealVector::Zero(dim), RealMatrix::Identity(dim, dim));
}

GaussianTarget make_illconditioned_gaussian(Index dim, double kappa, Rng& rng) {
  if (dim < 2) throw std::invalid_argument("make_illconditioned_gaussian: dim must be >= 2");
  if (kappa > 8.0)
    throw std::invalid_argument(
        "make_illconditioned_gaussian: kappa above 8 is refused (conditioning guard)");
  RealVector eigenvalues(dim);
  for (Index i = 0; i < dim; ++i) {
    const double f = dim == 1 ? 0.0
                              : static_cast<double>(i) / static_cast<double>(dim - 1);
    eigenvalues[i] = std::pow(10.0, -1.0 + f * (kappa + 1.0));
  }
  // random orthogonal eigenbasis: QR of a Gaussian matrix, sign-corrected
  RealMatrix z(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) z(i, j) = rng.normal();
  Eigen::HouseholderQR<RealMatrix> qr(z);
  RealMatrix q = qr.householderQ();
  const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < dim; ++i)
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  RealMatrix cov = q * eigenvalues.asDiagonal() * q.transpose();
  cov = 0.5 * (cov + cov.transpose().eval());
  return make_gaussian_target(RealVector::Zero(dim), std::move(cov));
}

double kl_gaussian(const RealVector& mu, const RealMatrix& sigma,
                   const RealVector& mu_hat, const RealMatrix& sigma_hat) {
  const Index k = mu.size();
  Eigen::LLT<RealMatrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("kl_gaussian: reference covariance not positive definite");
  Eigen::LLT<RealMatrix> llt_hat(sigma_hat);
  if (llt_hat.info() != Eigen::Success)
    throw std::domain_error("kl_gaussian: estimated covariance not positive definite");
  double log_det = 0.0, log_det_hat = 0.0;
  for (Index i = 0; i < k; ++i) {
    log_det += 2.0 * std::log(llt.matrixL()(i, i));
    log_det_hat += 2.0 * std::log(llt_hat.matrixL()(i, i));
  }
  const double trace_term = llt.solve(sigma_hat).trace();
  const RealVector d = mu - mu_hat;
  const double quad = d.dot(llt.solve(d));
  return 0.5 * (trace_term + quad - static_cast<double>(k) + log_det - log_det_hat);
}

std::vector<KlTraceRow> run_gaussian_benchmark(const std::vector<int>& dims,
                                               const GaussianBenchSettings& settings,
                                               std::uint64_t seed) {
  std::vector<KlTraceRow> rows;
  Rng root(seed);
  for (std::size_t di = 0; di < dims.size(); ++di) {
    const int dim = dims[di];
    Rng dim_rng = root.child(di);
    const GaussianTarget truth = make_illconditioned_gaussian(dim, settings.kappa, dim_rng);
    const sampler::TargetDensity target = truth.target();

    std::vector<sampler::ChainResult> results(settings.chains);
    parallel_for(settings.chains, settings.threads, [&](int c) {
      sampler::HMCConfig cfg;
      cfg.step_size = settings.step_size;
      cfg.leapfrog_steps = settings.leapfrog_steps;
      cfg.warmup = settings.warmup;
      cfg.iterations = settings.warmup + settings.draws;
      cfg.seed = dim_rng.child(100 + c).seed();
      if (settings.preconditioned) {
        sampler::DMPreconditioner pre(dim, settings.precond,
                                      dim_rng.child(1000 + c).seed());
        results[c] = sampler::run_chain(target, cfg, &pre);
      } else {
        results[c] = sampler::run_chain(target, cfg);
      }
    });

    std::vector<int> checkpoints = settings.checkpoints;
    if (checkpoints.empty()) {
      for (int c = std::max(1, settings.draws / 8); c <= settings.draws; c *= 2)
        checkpoints.push_back(c);
      if (checkpoints.empty() || checkpoints.back() != settings.draws)
        checkpoints.push_back(settings.draws);
    }

    int checkpoint_idx = 0;
    for (int c : checkpoints) {
      c = std::min(c, settings.draws);
      const long pooled = static_cast<long>(c) * settings.chains;
      RealVector mu_hat = RealVector::Zero(dim);
      for (const auto& res : results)
        for (int i = 0; i < c; ++i) mu_hat += res.draws.row(i).transpose();
      mu_hat /= static_cast<double>(pooled);
      RealMatrix cov_hat = RealMatrix::Zero(dim, dim);
      for (const auto& res : results)
        for (int i = 0; i < c; ++i) {
          const RealVector d = res.draws.row(i).transpose() - mu_hat;
          cov_hat += d * d.transpose();
        }
      cov_hat /= static_cast<double>(pooled - 1);

      KlTraceRow row;
      row.dim = dim;
      row.checkpoint = ++checkpoint_idx;
      row.iteration = c;
      try {
        row.kl = kl_gaussian(truth.mean, truth.covariance, mu_hat, cov_hat);
      } catch (const std::domain_error&) {
        row.kl = std::numeric_limits<double>::quiet_NaN();
        row.flagged = true;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

AiryProblem make_airy_problem(double slope, int modes, int grid) {
  if (slope <= 0.0) throw std::invalid_argument("make_airy_problem: slope must be positive");
  if (modes < 1) throw std::invalid_argument("make_airy_problem: modes must be >= 1");
  AiryProblem p;
  p.slope = slope;
  p.grid = grid;
  // turning point of the top requested mode plus ten Airy decay lengths
  p.length = (airy_level_estimate(modes) + 10.0) * std::pow(slope, -1.0 / 3.0);
  return p;
}

Tridiagonal airy_discretize(const AiryProblem& p) {
  if (p.grid < 100) throw std::invalid_argument("airy_discretize: need at least 100 points");
  if (p.length <= 0.0) throw std::invalid_argument("airy_discretize: invalid domain");
  const int n = p.grid;
  const double h = p.length / (n + 1);
  Tridiagonal t;
  t.diag.resize(n);
  t.off = RealVector::Constant(n - 1, -1.0 / (h * h));
  for (int i = 0; i < n; ++i) {
    const double x = h * (i + 1);
    t.diag[i] = 2.0 / (h * h) + p.slope * x;
  }
  return t;
}

namespace {
// Number of eigenvalues of the tridiagonal matrix strictly below x.
int sturm_count(const Tridiagonal& t, double x) {
  const Index n = t.diag.size();
  int count = 0;
  double q = t.diag[0] - x;
  if (q < 0.0) ++count;
  for (Index i = 1; i < n; ++i) {
    if (q == 0.0) q = -1e-300;
    q = (t.diag[i] - x) - t.off[i - 1] * t.off[i - 1] / q;
    if (q < 0.0) ++count;
  }
  return count;
}

double bisect_eigenvalue(const Tridiagonal& t, int k, double lo, double hi) {
  while (hi - lo > 1e-13 * std::max({std::abs(lo), std::abs(hi), 1.0})) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (sturm_count(t, mid) >= k + 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

RealVector tridiagonal_smallest_eigenvalues(const Tridiagonal& t, int count,
                                            const RealVector* hints,
                                            double hint_margin) {
  const Index n = t.diag.size();
  if (count < 1 || count > n)
    throw std::invalid_argument("tridiagonal_smallest_eigenvalues: bad count");
  double glo = t.diag[0], ghi = t.diag[0];
  for (Index i = 0; i < n; ++i) {
    const double left = i > 0 ? std::abs(t.off[i - 1]) : 0.0;
    const double right = i + 1 < n ? std::abs(t.off[i]) : 0.0;
    glo = std::min(glo, t.diag[i] - left - right);
    ghi = std::max(ghi, t.diag[i] + left + right);
  }

  RealVector out(count);
  for (int k = 0; k < count; ++k) {
    double lo = glo, hi = ghi;
    if (hints && hints->size() > k) {
      const double guess = (*hints)[k];
      const double pad = hint_margin * std::max(std::abs(guess), 1.0);
      double a = guess - pad, b = guess + pad;
      if (a > glo && b < ghi && sturm_count(t, a) <= k && sturm_count(t, b) >= k + 1) {
        lo = a;
        hi = b;
      }
    }
    out[k] = bisect_eigenvalue(t, k, lo, hi);
  }
  return out;
}

RealVector airy_eigenvalues(const AiryProblem& p, int count) {
  if (count < 1) throw std::invalid_argument("airy_eigenvalues: count must be >= 1");
  if (count > p.grid / 10)
    throw std::invalid_argument("airy_eigenvalues: count exceeds grid/10 resolution guard");
  const RealVector coarse =
      tridiagonal_smallest_eigenvalues(airy_discretize(p), count);
  AiryProblem fine = p;
  fine.grid = 2 * p.grid + 1;  // halves the mesh width exactly
  const RealVector refined =
      tridiagonal_smallest_eigenvalues(airy_discretize(fine), count, &coarse, 0.05);
  return (4.0 * refined - coarse) / 3.0;
}

namespace {
struct AiryPosteriorState {
  AiryPosteriorConfig cfg;
  RealVector observed;
  // cache of the last eigenvalue solve, reused across sigma-only moves and
  // scaled into bisection hints for nearby slopes
  double last_slope = -1.0;
  RealVector last_coarse, last_refined, last_lambda;

  RealVector model(double slope) {
    if (slope == last_slope) return last_lambda;
    const AiryProblem p = make_airy_problem(slope, cfg.modes, cfg.grid);
    AiryProblem fine = p;
    fine.grid = 2 * p.grid + 1;
    RealVector coarse, refined;
    if (last_slope > 0.0) {
      const double ratio = std::pow(slope / last_slope, 2.0 / 3.0);
      const RealVector hint_c = ratio * last_coarse;
      const RealVector hint_f = ratio * last_refined;
      coarse = tridiagonal_smallest_eigenvalues(airy_discretize(p), cfg.modes, &hint_c);
      refined =
          tridiagonal_smallest_eigenvalues(airy_discretize(fine), cfg.modes, &hint_f);
    } else {
      coarse = tridiagonal_smallest_eigenvalues(airy_discretize(p), cfg.modes);
      refined = tridiagonal_smallest_eigenvalues(airy_discretize(fine), cfg.modes);
    }
    last_slope = slope;
    last_coarse = coarse;
    last_refined = refined;
    last_lambda = (4.0 * refined - coarse) / 3.0;
    return last_lambda;
  }

  double log_posterior(const RealVector& theta) {
    const double log_a = theta[0], log_sigma = theta[1];
    const double a = std::exp(log_a), sigma = std::exp(log_sigma);
    if (!std::isfinite(a) || !std::isfinite(sigma) || sigma <= 0.0)
      return -std::numeric_limits<double>::infinity();
    const RealVector lambda = model(a);
    const Index m = observed.size();
    double ll = 0.0;
    for (Index i = 0; i < m; ++i) {
      const double r = (observed[i] - lambda[i]) / sigma;
      ll += -0.5 * r * r - log_sigma - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    const double za = (log_a - cfg.prior_loga_mean) / cfg.prior_loga_sd;
    const double zs = (log_sigma - cfg.prior_logsigma_mean) / cfg.prior_logsigma_sd;
    return ll - 0.5 * za * za - 0.5 * zs * zs;
  }
};
}  // namespace

sampler::TargetDensity airy_posterior(const RealVector& observed,
                                      const AiryPosteriorConfig& cfg) {
  if (observed.size() != cfg.modes)
    throw std::invalid_argument("airy_posterior: observation length must equal modes");
  if (cfg.modes > cfg.grid / 10)
    throw std::invalid_argument("airy_posterior: modes exceed grid/10 resolution guard");
  auto state = std::make_shared<AiryPosteriorState>();
  state->cfg = cfg;
  state->observed = observed;

  sampler::TargetDensity t;
  t.dim = 2;
  t.log_density = [state](const RealVector& theta) {
    const double v = state->log_posterior(theta);
    if (!std::isfinite(v)) throw std::runtime_error("airy_posterior: non-finite log density");
    return v;
  };
  const double h = cfg.fd_step;
  t.grad_log_density = [state, h](const RealVector& theta) -> RealVector {
    RealVector grad(2);
    for (Index i = 0; i < 2; ++i) {
      RealVector tp = theta, tm = theta;
      tp[i] += h;
      tm[i] -= h;
      grad[i] = (state->log_posterior(tp) - state->log_posterior(tm)) / (2.0 * h);
    }
    return grad;
  };
  return t;
}

std::vector<EigenErrorRow> eigen_error_report(const RealVector& estimated,
                                              const RealVector& exact) {
  if (estimated.size() != exact.size())
    throw std::invalid_argument("eigen_error_report: length mismatch");
  std::vector<EigenErrorRow> rows(estimated.size());
  for (Index i = 0; i < estimated.size(); ++i) {
    EigenErrorRow& r = rows[i];
    r.index = static_cast<int>(i + 1);
    r.exact = exact[i];
    r.estimate = estimated[i];
    r.abs_err = std::abs(estimated[i] - exact[i]);
    r.rel_err = r.abs_err / std::max(std::abs(exact[i]), 1e-300);
  }
  return rows;
}

}  // namespace qjh::bench
