// Acceptance suite: one criterion per entry, pinned tolerances, one
// PASS/FAIL line each. Run with no arguments for all criteria or with a
// list of criterion numbers.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qjh/bench.hpp"
#include "qjh/cli.hpp"
#include "qjh/io.hpp"
#include "qjh/lindblad.hpp"
#include "qjh/parallel.hpp"
#include "qjh/rmt.hpp"
#include "qjh/sse.hpp"

using namespace qjh;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [FAILED: " << what << "]";
    }
  }
};

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

ComplexMatrix lowering() {
  ComplexMatrix l = ComplexMatrix::Zero(2, 2);
  l(0, 1) = 1.0;
  return l;
}

ComplexVector excited() {
  ComplexVector e(2);
  e << 0.0, 1.0;
  return e;
}

ComplexVector plus_state() {
  ComplexVector p(2);
  p << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
  return p;
}

ComplexMatrix random_hermitian(Index n, Rng& rng) {
  ComplexMatrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
  return hermitize(a);
}

// ---- criterion 1: QFIM identities --------------------------------------

void criterion_qfim(Check& c) {
  Rng rng(1001);
  double worst_mixed = 0.0, worst_pure = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 2 + trial % 7;  // dimensions 2..8
    const ComplexMatrix h = random_hermitian(d, rng);
    const double h2 = h.squaredNorm();

    const double mixed = density::qfim(DensityMatrix::maximally_mixed(d), h);
    worst_mixed = std::max(worst_mixed, std::abs(mixed) / h2);

    ComplexVector psi(d);
    for (Index i = 0; i < d; ++i) psi[i] = Complex(rng.normal(), rng.normal());
    psi /= psi.norm();
    const double mean = psi.dot(h * psi).real();
    const double second = psi.dot(h * (h * psi)).real();
    const double variance_value = 4.0 * (second - mean * mean);
    const double pure = density::qfim(DensityMatrix::pure(psi), h);
    worst_pure = std::max(worst_pure, std::abs(pure - variance_value) / h2);
  }
  c.detail << "max |qfim(I/d)|/|H|^2 = " << worst_mixed
           << ", max pure-state defect/|H|^2 = " << worst_pure;
  c.require(worst_mixed < 1e-10, "qfim at the maximally mixed state exceeds 1e-10");
  c.require(worst_pure < 1e-9, "pure-state variance identity exceeds 1e-9");
}

// ---- criterion 2: Lindblad analytic oracle ------------------------------

void criterion_lindblad(Check& c) {
  const lindblad::LindbladModel model{ComplexMatrix::Zero(2, 2), {lowering()}};
  const DensityMatrix rho0 = DensityMatrix::pure(excited());

  const auto traj = lindblad::evolve(model, rho0, 1.0, 1e-3);
  const double err = std::abs(traj.back().matrix()(1, 1).real() - std::exp(-1.0));
  c.detail << "|rho_ee(1) - e^-1| = " << err;
  c.require(err < 1e-6, "amplitude damping misses the analytic solution");

  const auto error_at = [&](double dt) {
    const auto t = lindblad::evolve(model, rho0, 1.0, dt);
    return std::abs(t.back().matrix()(1, 1).real() - std::exp(-1.0));
  };
  const double order = std::log2(error_at(0.2) / error_at(0.1));
  c.detail << ", observed order = " << order;
  c.require(order > 3.7 && order < 4.3, "RK4 order outside 4 +- 0.3");
}

// ---- criterion 3: unraveling consistency --------------------------------

void criterion_unraveling(Check& c) {
  const sse::SSEModel model = sse::SSEModel::constant(ComplexMatrix::Zero(2, 2), {lowering()});
  const DensityMatrix rho0 = DensityMatrix::pure(excited());
  const int paths = 2000;
  Rng rng(1003);
  std::vector<ComplexMatrix> finals(paths);
  parallel_for(paths, 0, [&](int i) {
    Rng r = rng.child(i);
    const sse::WienerPath w = sse::sample_wiener_path(1, 1.0, 1e-3, r);
    finals[i] = sse::integrate_stochastic_master(model, rho0, w).states.back().matrix();
  });
  ComplexMatrix mean = ComplexMatrix::Zero(2, 2);
  for (const auto& m : finals) mean += m;
  mean /= static_cast<double>(paths);

  const lindblad::LindbladModel lmodel{ComplexMatrix::Zero(2, 2), {lowering()}};
  const auto lind = lindblad::evolve(lmodel, rho0, 1.0, 1e-3);
  const double dist = lindblad::trace_distance(mean, lind.back().matrix());
  c.detail << "trace distance (2000 SME paths vs deterministic) = " << dist;
  c.require(dist < 0.05, "ensemble mean misses the Lindblad solution");
}

// ---- criterion 4: martingale property -----------------------------------

void criterion_martingale(Check& c) {
  const sse::SSEModel model = sse::SSEModel::constant(ComplexMatrix::Zero(2, 2), {lowering()});
  const int paths = 2000;
  Rng rng(1004);
  RealVector half(paths), full(paths);
  parallel_for(paths, 0, [&](int i) {
    Rng r = rng.child(i);
    const sse::WienerPath w = sse::sample_wiener_path(1, 1.0, 1e-3, r);
    const sse::StateTrajectory traj = sse::integrate_lsse(model, excited(), w);
    const Index n = traj.norms.size() - 1;
    half[i] = traj.norms[n / 2] * traj.norms[n / 2];
    full[i] = traj.norms[n] * traj.norms[n];
  });
  for (const auto& [name, v] : {std::pair{"t=0.5", &half}, std::pair{"t=1", &full}}) {
    const double mean = v->mean();
    const double se =
        std::sqrt((v->array() - mean).square().sum() / (paths - 1.0) / paths);
    const double dev = std::abs(mean - 1.0) / se;
    c.detail << " E|psi|^2(" << name << ") = " << mean << " (" << dev << " se)";
    c.require(dev < 3.0, std::string("norm mean drifts at ") + name);
  }
}

// ---- criterion 5: non-Markovian limits ----------------------------------

void criterion_nonmarkovian(Check& c) {
  const ComplexMatrix coupling = pauli_z() / std::numbers::sqrt2;
  const DensityMatrix eta0 = DensityMatrix::pure(plus_state());

  // large gamma: memory cancels the double commutator, evolution turns unitary
  {
    const ComplexMatrix h0 = 0.7 * pauli_z();
    const auto traj = sse::nonmarkovian_evolve(h0, coupling, 50.0, eta0, 1.0, 2.5e-4);
    const ComplexMatrix u = expm_skew_hermitian(h0, 1.0);
    const double dist =
        lindblad::trace_distance(traj.back().matrix(), u * eta0.matrix() * u.adjoint());
    c.detail << "gamma=50 distance to unitary = " << dist;
    c.require(dist < 0.05, "large-gamma limit misses the closed-system evolution");
  }

  // moderate gamma: agreement with the OU-driven trajectory ensemble
  {
    const ComplexMatrix h0 = ComplexMatrix::Zero(2, 2);
    const double gamma = 5.0, dt = 5e-4;
    const int paths = 4000;
    Rng rng(1005);
    std::vector<ComplexMatrix> finals(paths);
    parallel_for(paths, 0, [&](int i) {
      Rng r = rng.child(i);
      const sse::OUDriving drive = sse::sample_ou_driving(gamma, 1.0, dt, r);
      const sse::StateTrajectory traj = sse::integrate_ou_sse(
          h0, coupling, gamma, plus_state(), drive.ou, drive.wiener);
      finals[i] = traj.back() * traj.back().adjoint();
    });
    ComplexMatrix mean = ComplexMatrix::Zero(2, 2);
    for (const auto& m : finals) mean += m;
    mean /= static_cast<double>(paths);
    const auto memory = sse::nonmarkovian_evolve(h0, coupling, gamma, eta0, 1.0, dt);
    const double dist = lindblad::trace_distance(mean, memory.back().matrix());
    c.detail << ", gamma=5 distance to OU ensemble = " << dist;
    c.require(dist < 0.1, "memory-kernel equation misses the trajectory ensemble");
  }
}

// ---- criterion 6: CUE spacing law ---------------------------------------

void criterion_cue_spacing(Check& c) {
  // N = 2 against the quadrature-normalized joint density
  {
    const int sets = 100000;
    Rng rng(1006);
    std::vector<RealVector> phases(sets);
    parallel_for(sets, 0, [&](int i) {
      Rng r = rng.child(i);
      phases[i] = rmt::eigenphases(rmt::sample_cue_direct(2, r));
    });
    const rmt::SpacingHistogram hist = rmt::spacing_statistics(phases, 16, 4.0);

    const auto raw = [](double g) { return std::sin(0.5 * g) * std::sin(0.5 * g); };
    double z = 0.0;
    const int quad = 40000;
    for (int k = 0; k < quad; ++k)
      z += raw((k + 0.5) * 2.0 * std::numbers::pi / quad) * 2.0 * std::numbers::pi / quad;
    double sup = 0.0;
    const double width = 0.25;
    for (Index b = 0; b < hist.centers.size(); ++b) {
      double avg = 0.0;
      const int pts = 400;
      for (int k = 0; k < pts; ++k) {
        const double s = hist.centers[b] - width / 2 + (k + 0.5) * width / pts;
        if (s < 2.0) avg += std::numbers::pi * raw(std::numbers::pi * s) / z;
      }
      avg /= pts;
      sup = std::max(sup, std::abs(hist.density[b] - avg));
    }
    c.detail << "N=2 sup distance = " << sup;
    c.require(sup < 0.03, "N=2 spacing histogram misses sin^2(s/2)/pi");
  }

  // walk-generated and directly sampled ensembles agree at N = 4
  {
    const int sets = 10000;
    Rng rng(1007);
    std::vector<RealVector> direct(sets);
    parallel_for(sets, 0, [&](int i) {
      Rng r = rng.child(i);
      direct[i] = rmt::eigenphases(rmt::sample_cue_direct(4, r));
    });
    std::vector<RealVector> walked(sets);
    Rng wr(1008);
    rmt::UnitaryWalkState walk = rmt::UnitaryWalkState::identity(4, 0.05);
    for (int i = 0; i < 400; ++i) rmt::cue_step(walk, wr);
    for (int i = 0; i < sets; ++i) {
      for (int s = 0; s < 25; ++s) rmt::cue_step(walk, wr);
      walked[i] = rmt::eigenphases(walk.unitary);
    }
    const rmt::SpacingHistogram hd = rmt::spacing_statistics(direct, 16, 4.0);
    const rmt::SpacingHistogram hw = rmt::spacing_statistics(walked, 16, 4.0);
    double sup = 0.0;
    for (Index b = 0; b < hd.centers.size(); ++b)
      sup = std::max(sup, std::abs(hd.density[b] - hw.density[b]));
    c.detail << ", walk-vs-direct sup distance = " << sup;
    c.require(sup < 0.05, "walk and direct spacing histograms disagree");
  }
}

// ---- criterion 7: HMC mechanics ------------------------------------------

void criterion_hmc_mechanics(Check& c) {
  Rng rng(1009);
  const auto gauss = bench::make_illconditioned_gaussian(2, 1.0, rng);
  const sampler::TargetDensity target = gauss.target();
  const RealMatrix mass = RealMatrix::Identity(2, 2);

  RealVector theta(2), p(2);
  theta << 0.4, -1.2;
  p << 0.9, 0.3;
  const auto fwd = sampler::leapfrog(theta, p, target, mass, 0.05, 30);
  const auto back =
      sampler::leapfrog(fwd.position, (-fwd.momentum).eval(), target, mass, 0.05, 30);
  const double rev = (back.position - theta).norm() + (back.momentum + p).norm();
  c.detail << "reversibility defect = " << rev;
  c.require(rev < 1e-10, "leapfrog is not reversible to 1e-10");

  const auto flow = [&](const RealVector& z) {
    const auto r = sampler::leapfrog(z.head(2), z.tail(2), target, mass, 0.13, 7);
    RealVector out(4);
    out << r.position, r.momentum;
    return out;
  };
  RealVector z0(4);
  z0 << 0.3, -0.7, 1.1, 0.4;
  RealMatrix jac(4, 4);
  const double h = 1e-5;
  for (Index j = 0; j < 4; ++j) {
    RealVector zp = z0, zm = z0;
    zp[j] += h;
    zm[j] -= h;
    jac.col(j) = (flow(zp) - flow(zm)) / (2.0 * h);
  }
  const double det = jac.determinant();
  c.detail << ", |det J - 1| = " << std::abs(det - 1.0);
  c.require(std::abs(det - 1.0) < 1e-6, "leapfrog does not preserve volume");

  c.require(sampler::acceptance_probability(2.0, 2.0) == 1.0,
            "dH = 0 must accept with probability one");
  const double half = sampler::acceptance_probability(2.0, 2.0 + std::log(2.0));
  c.detail << ", a(dH=log 2) = " << half;
  c.require(std::abs(half - 0.5) < 1e-15, "dH = log 2 must accept with probability 1/2");
}

// ---- criterion 8: Gaussian benchmark -------------------------------------

void criterion_gaussian_benchmark(Check& c) {
  bench::GaussianBenchSettings s;
  s.kappa = 3.0;
  s.step_size = 0.4;
  s.leapfrog_steps = 12;
  s.warmup = 4000;
  s.draws = 10000;
  s.chains = 8;
  s.preconditioned = true;
  s.checkpoints = {1250, 2500, 3750, 5000, 6250, 7500, 8750, 10000};
  s.threads = 0;
  const auto rows = bench::run_gaussian_benchmark({10}, s, 1010);

  int decreasing = 0, pairs = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ++pairs;
    if (rows[i].kl < rows[i - 1].kl) ++decreasing;
  }
  const double final_kl = rows.back().kl;
  const double frac = static_cast<double>(decreasing) / pairs;
  c.detail << "final KL = " << final_kl << ", decreasing pairs = " << decreasing << "/"
           << pairs;
  c.require(!rows.back().flagged && final_kl < 0.02, "pooled KL at D=10 not below 0.02");
  c.require(frac >= 0.8, "KL not decreasing across 80% of checkpoint pairs");
}

// ---- criterion 9: preconditioner value ------------------------------------

void criterion_preconditioner(Check& c) {
  RealMatrix cov = RealMatrix::Zero(2, 2);
  cov(0, 0) = 1.0;
  cov(1, 1) = 100.0;
  const bench::GaussianTarget truth = bench::make_gaussian_target(RealVector::Zero(2), cov);
  const sampler::TargetDensity target = truth.target();

  const int chains = 2, warmup = 1500, draws = 6000, checkpoint_step = 250;
  const auto iterations_to_threshold = [&](std::uint64_t seed, bool precond,
                                           RealMatrix* mass_out) {
    std::vector<sampler::ChainResult> results(chains);
    Rng root(seed);
    parallel_for(chains, 0, [&](int ch) {
      sampler::HMCConfig cfg;
      cfg.step_size = 0.5;
      cfg.leapfrog_steps = 8;
      cfg.warmup = warmup;
      cfg.iterations = warmup + draws;
      cfg.seed = root.child(ch).seed();
      if (precond) {
        sampler::DMPreconditioner pre(2, {}, root.child(100 + ch).seed());
        results[ch] = sampler::run_chain(target, cfg, &pre);
      } else {
        results[ch] = sampler::run_chain(target, cfg);
      }
    });
    if (mass_out) *mass_out = results[0].mass;
    for (int n = checkpoint_step; n <= draws; n += checkpoint_step) {
      RealVector mu = RealVector::Zero(2);
      for (const auto& res : results)
        for (int i = 0; i < n; ++i) mu += res.draws.row(i).transpose();
      mu /= static_cast<double>(n * chains);
      RealMatrix sig = RealMatrix::Zero(2, 2);
      for (const auto& res : results)
        for (int i = 0; i < n; ++i) {
          const RealVector d = res.draws.row(i).transpose() - mu;
          sig += d * d.transpose();
        }
      sig /= static_cast<double>(n * chains - 1);
      try {
        if (bench::kl_gaussian(truth.mean, truth.covariance, mu, sig) < 0.02) return n;
      } catch (const std::domain_error&) {
      }
    }
    return draws + checkpoint_step;  // censored: never reached the threshold
  };

  std::vector<int> with_pre, without_pre;
  bool mass_ok = true;
  double worst_ratio = 0.0;
  for (std::uint64_t seed : {11, 22, 33, 44, 55}) {
    RealMatrix mass;
    with_pre.push_back(iterations_to_threshold(seed, true, &mass));
    without_pre.push_back(iterations_to_threshold(seed, false, nullptr));
    const RealMatrix inv = mass.inverse();
    const double r0 = inv(0, 0) / 1.0;
    const double r1 = inv(1, 1) / 100.0;
    for (double r : {r0, r1}) {
      worst_ratio = std::max(worst_ratio, std::max(r, 1.0 / r));
      if (r < 0.5 || r > 2.0) mass_ok = false;
    }
  }
  std::sort(with_pre.begin(), with_pre.end());
  std::sort(without_pre.begin(), without_pre.end());
  const int med_pre = with_pre[2], med_id = without_pre[2];
  c.detail << "adapted 1/M diag worst ratio = " << worst_ratio
           << ", median iterations to KL<0.02: preconditioned = " << med_pre
           << ", identity mass = " << med_id;
  c.require(mass_ok, "adapted inverse mass not within factor 2 of (1, 100)");
  c.require(med_pre < med_id, "preconditioner not faster than identity-mass HMC");
}

// ---- criterion 10: Airy experiment ----------------------------------------

void criterion_airy(Check& c) {
  const int modes = 150;
  const bench::AiryProblem prod = bench::make_airy_problem(1.0, modes, 3000);
  const RealVector estimate = bench::airy_eigenvalues(prod, modes);

  // fine-grid oracle, Richardson over 1e5 and 2e5+1 interior points
  bench::AiryProblem oracle_coarse = prod, oracle_fine = prod;
  oracle_coarse.grid = 100000;
  oracle_fine.grid = 200001;
  const RealVector oc = bench::tridiagonal_smallest_eigenvalues(
      bench::airy_discretize(oracle_coarse), modes, &estimate);
  const RealVector of = bench::tridiagonal_smallest_eigenvalues(
      bench::airy_discretize(oracle_fine), modes, &estimate);
  const RealVector oracle = (4.0 * of - oc) / 3.0;

  double rel5 = 0.0, rel150 = 0.0;
  for (int i = 0; i < modes; ++i) {
    const double rel = std::abs(estimate[i] - oracle[i]) / oracle[i];
    if (i < 5) rel5 = std::max(rel5, rel);
    rel150 = std::max(rel150, rel);
  }
  c.detail << "lambda_1 = " << estimate[0] << ", max rel err (first 5) = " << rel5
           << ", (first 150) = " << rel150;
  c.require(std::abs(estimate[0] - 2.33811) < 1e-4, "first eigenvalue far from 2.33811");
  c.require(rel5 < 1e-6, "first five eigenvalues beyond 1e-6 of the oracle");
  c.require(rel150 < 1e-3, "first 150 eigenvalues beyond 1e-3 of the oracle");

  // slope scaling law
  const int m_scale = 5;
  const RealVector base =
      bench::airy_eigenvalues(bench::make_airy_problem(1.0, m_scale, 3000), m_scale);
  double worst_scaling = 0.0;
  for (double a : {0.125, 8.0}) {
    const RealVector scaled =
        bench::airy_eigenvalues(bench::make_airy_problem(a, m_scale, 3000), m_scale);
    for (int i = 0; i < m_scale; ++i)
      worst_scaling = std::max(
          worst_scaling,
          std::abs(scaled[i] / base[i] / std::pow(a, 2.0 / 3.0) - 1.0));
  }
  c.detail << ", scaling-law defect = " << worst_scaling;
  c.require(worst_scaling < 1e-5, "a^(2/3) scaling law beyond 1e-5");

  // posterior calibration: recover the true slope in at least 9 of 10 runs
  bench::AiryPosteriorConfig pcfg;
  pcfg.modes = 20;
  pcfg.grid = 250;
  const double sigma = 0.01;
  const RealVector model =
      bench::airy_eigenvalues(bench::make_airy_problem(1.0, pcfg.modes, pcfg.grid),
                              pcfg.modes);
  std::vector<int> success(10, 0);
  Rng root(1011);
  parallel_for(10, 0, [&](int rep) {
    Rng r = root.child(rep);
    RealVector y = model;
    for (Index i = 0; i < y.size(); ++i) y[i] += sigma * r.normal();
    const sampler::TargetDensity post = bench::airy_posterior(y, pcfg);

    // moment-matched start, diagonal curvature mass
    double ratio = 0.0;
    for (Index i = 0; i < y.size(); ++i) ratio += y[i] / model[i];
    ratio /= static_cast<double>(y.size());
    const double a0 = std::pow(std::max(ratio, 1e-6), 1.5);
    RealVector init(2);
    init << std::log(a0), std::log(sigma);
    RealMatrix mass = RealMatrix::Identity(2, 2);
    const double h = 1e-3;
    for (Index i = 0; i < 2; ++i) {
      RealVector tp = init, tm = init;
      tp[i] += h;
      tm[i] -= h;
      const double curv =
          -(post.log_density(tp) - 2.0 * post.log_density(init) + post.log_density(tm)) /
          (h * h);
      mass(i, i) = std::max(curv, 1e-6);
    }
    sampler::HMCConfig cfg;
    cfg.step_size = 0.5;
    cfg.leapfrog_steps = 10;
    cfg.warmup = 250;
    cfg.iterations = 250 + 400;
    cfg.mass = mass;
    cfg.init = init;
    cfg.seed = root.child(100 + rep).seed();
    const sampler::ChainResult res = sampler::run_chain(post, cfg);

    double mean_a = 0.0, mean_a2 = 0.0;
    for (Index i = 0; i < res.draws.rows(); ++i) {
      const double a = std::exp(res.draws(i, 0));
      mean_a += a;
      mean_a2 += a * a;
    }
    mean_a /= static_cast<double>(res.draws.rows());
    mean_a2 /= static_cast<double>(res.draws.rows());
    const double sd_a = std::sqrt(std::max(mean_a2 - mean_a * mean_a, 1e-30));
    if (std::abs(mean_a - 1.0) <= 2.0 * sd_a) success[rep] = 1;
  });
  int successes = 0;
  for (int s : success) successes += s;
  c.detail << ", calibration successes = " << successes << "/10";
  c.require(successes >= 9, "true slope recovered in fewer than 9 of 10 repetitions");
}

// ---- criterion 11: reproducibility ----------------------------------------

void criterion_reproducibility(Check& c) {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "qjhmc_acceptance_repro";
  fs::remove_all(base);

  const auto run_to = [&](const std::string& tag) {
    const fs::path dir = base / tag;
    const std::string out = dir.string();
    const std::vector<const char*> argv{
        "qjhmc", "sample", "--target", "gaussian-illcond", "--dim", "4",
        "--kappa", "2",    "--iters",  "500", "--warmup", "200", "--chains", "2",
        "--precond", "--seed", "99", "--threads", "2", "--out", out.c_str()};
    return std::pair{cli::run(static_cast<int>(argv.size()), argv.data()), dir};
  };
  const auto [code_a, dir_a] = run_to("a");
  const auto [code_b, dir_b] = run_to("b");
  c.require(code_a == 0 && code_b == 0, "CLI runs failed");
  if (code_a == 0 && code_b == 0) {
    const bool same_samples =
        io::read_file(dir_a / "samples.csv") == io::read_file(dir_b / "samples.csv");
    const bool same_diag = io::read_file(dir_a / "diagnostics.json") ==
                           io::read_file(dir_b / "diagnostics.json");
    c.detail << "samples byte-identical = " << (same_samples ? "yes" : "no")
             << ", diagnostics byte-identical = " << (same_diag ? "yes" : "no");
    c.require(same_samples, "samples.csv differs between identical runs");
    c.require(same_diag, "diagnostics.json differs between identical runs");
  }
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<void(Check&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "QFIM identities", 5, criterion_qfim},
      {2, "Lindblad analytic oracle", 5, criterion_lindblad},
      {3, "unraveling consistency", 60, criterion_unraveling},
      {4, "martingale property", 60, criterion_martingale},
      {5, "non-Markovian limits", 120, criterion_nonmarkovian},
      {6, "CUE spacing law", 60, criterion_cue_spacing},
      {7, "HMC mechanics", 10, criterion_hmc_mechanics},
      {8, "Gaussian benchmark", 600, criterion_gaussian_benchmark},
      {9, "preconditioner value", 300, criterion_preconditioner},
      {10, "Airy experiment", 600, criterion_airy},
      {11, "reproducibility", 60, criterion_reproducibility},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& criterion : criteria()) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), criterion.id) == wanted.end())
      continue;
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(check);
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail << " [EXCEPTION: " << e.what() << "]";
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > criterion.budget_seconds) {
      check.ok = false;
      check.detail << " [over budget " << criterion.budget_seconds << " s]";
    }
    std::printf("%s criterion %d: %s (%s; %.1f s)\n", check.ok ? "PASS" : "FAIL",
                criterion.id, criterion.name, check.detail.str().c_str(), elapsed);
    std::fflush(stdout);
    if (!check.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
