#include "qjh/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <map>
#include <numbers>

#include "CLI11.hpp"

#include "qjh/bench.hpp"
#include "qjh/io.hpp"
#include "qjh/lindblad.hpp"
#include "qjh/parallel.hpp"
#include "qjh/rmt.hpp"
#include "qjh/sse.hpp"

namespace qjh::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

Json load_config_impl(const std::filesystem::path& path,
                      const std::vector<std::string>& allowed) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  Json parsed;
  try {
    parsed = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!parsed.is_object()) throw ConfigError("config root must be an object");
  for (auto it = parsed.begin(); it != parsed.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError("unknown config key: " + it.key());
  }
  return parsed;
}

// Binds option keys to typed variables so that defaults, config-file values
// and command-line flags merge with a fixed precedence (flags win).
class Binder {
 public:
  explicit Binder(CLI::App* cmd) : cmd_(cmd) {}

  template <typename T>
  void add(const std::string& key, T& var, const std::string& help) {
    auto* opt = cmd_->add_option("--" + key, var, help);
    if constexpr (std::is_same_v<T, std::vector<int>>) opt->delimiter(',');
    register_key(key, var);
  }

  void add_flag(const std::string& key, bool& var, const std::string& help) {
    cmd_->add_flag("--" + key, var, help);
    register_key(key, var);
  }

  bool flag_given(const std::string& key) const {
    const auto* opt = cmd_->get_option_no_throw("--" + key);
    return opt != nullptr && opt->count() > 0;
  }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : setters_) out.push_back(k);
    return out;
  }

  void apply_file(const Json& file) {
    for (auto it = file.begin(); it != file.end(); ++it) {
      if (!flag_given(it.key())) {
        try {
          setters_.at(it.key())(it.value());
        } catch (const Json::exception& e) {
          throw ConfigError("config key '" + it.key() + "': " + e.what());
        }
      }
    }
  }

  Json effective() const {
    Json out = Json::object();
    for (const auto& [k, get] : getters_) out[k] = get();
    return out;
  }

 private:
  template <typename T>
  void register_key(const std::string& key, T& var) {
    setters_[key] = [&var](const Json& v) { var = v.get<T>(); };
    getters_[key] = [&var]() { return Json(var); };
  }

  CLI::App* cmd_;
  std::map<std::string, std::function<void(const Json&)>> setters_;
  std::map<std::string, std::function<Json()>> getters_;
};

struct CommonOpts {
  std::string out;
  std::string config;
  std::uint64_t seed = 0;
  int threads = 0;
  bool svg = false;
};

void add_common(Binder& b, CLI::App* cmd, CommonOpts& c, const std::string& default_out) {
  c.out = default_out;
  b.add("out", c.out, "output directory");
  b.add("seed", c.seed, "RNG seed (falls back to env QJH_SEED)");
  b.add("threads", c.threads, "worker threads, 0 = logical cores");
  b.add_flag("svg", c.svg, "also emit SVG quick-plots");
  cmd->add_option("--config", c.config, "JSON config file; flags override file values");
}

// Precedence: flag > config file > QJH_SEED > default 0.
void resolve_seed(const Binder& b, const Json& file, CommonOpts& c) {
  if (b.flag_given("seed") || file.contains("seed")) return;
  if (const char* env = std::getenv("QJH_SEED")) {
    try {
      c.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("QJH_SEED is not a valid unsigned integer");
    }
  }
}

class OutputWriter {
 public:
  explicit OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    io::atomic_write(dir_ / name, content);
    manifest_[name] = Json{{"bytes", content.size()},
                           {"fnv1a64", io::fnv1a64_hex(content)}};
  }

  // manifest.json records the effective config, seed, version and checksums
  void finish(const std::string& command, const Json& config) {
    Json manifest{{"command", command},
                  {"version", kVersion},
                  {"config", config},
                  {"outputs", manifest_}};
    io::atomic_write(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

  Json output_names() const {
    Json names = Json::array();
    for (auto it = manifest_.begin(); it != manifest_.end(); ++it) names.push_back(it.key());
    return names;
  }

 private:
  std::filesystem::path dir_;
  Json manifest_ = Json::object();
};

void print_summary(const std::string& command, const Json& config, const Json& metrics,
                   const OutputWriter& out) {
  Json summary{{"command", command},
               {"config", config},
               {"outputs", out.output_names()},
               {"metrics", metrics}};
  std::cout << summary.dump(2) << "\n";
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

Json matrix_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------- sample --

struct SampleOpts {
  std::string target = "std-normal";
  int dim = 2;
  double kappa = 3.0;
  double eps = 0.25;
  int steps = 16;
  int warmup = 1000;
  int iters = 1000;  // post-warmup draws
  int chains = 1;
  bool precond = false;
  double alpha = 0.1;
  double walk_step = 0.01;
};

int run_sample(const CommonOpts& common, const SampleOpts& o, const Json& config) {
  require(o.dim >= 1, "dim must be >= 1 (key dim)");
  require(o.eps > 0.0, "step size must be positive (key eps)");
  require(o.steps >= 1, "leapfrog steps must be >= 1 (key steps)");
  require(o.warmup >= 0, "warmup must be >= 0 (key warmup)");
  require(o.iters >= 1, "iters must be >= 1 (key iters)");
  require(o.chains >= 1, "chains must be >= 1 (key chains)");
  require(o.kappa <= 8.0, "kappa above 8 is refused (key kappa)");
  require(o.target == "std-normal" || o.target == "gaussian-illcond",
          "unknown target '" + o.target + "' (key target)");
  require(o.alpha > 0.0 && o.alpha <= 1.0, "alpha must lie in (0, 1] (key alpha)");

  Rng root(common.seed);
  bench::GaussianTarget gauss =
      o.target == "std-normal"
          ? bench::standard_normal_target(o.dim)
          : [&] {
              Rng r = root.child(1);
              return bench::make_illconditioned_gaussian(o.dim, o.kappa, r);
            }();
  const sampler::TargetDensity target = gauss.target();

  std::vector<sampler::ChainResult> results(o.chains);
  parallel_for(o.chains, common.threads, [&](int c) {
    sampler::HMCConfig cfg;
    cfg.step_size = o.eps;
    cfg.leapfrog_steps = o.steps;
    cfg.warmup = o.warmup;
    cfg.iterations = o.warmup + o.iters;
    cfg.seed = root.child(100 + c).seed();
    if (o.precond) {
      sampler::DMPreconditionerOptions popts;
      popts.alpha = o.alpha;
      popts.walk_step = o.walk_step;
      sampler::DMPreconditioner pre(o.dim, popts, root.child(1000 + c).seed());
      results[c] = sampler::run_chain(target, cfg, &pre);
    } else {
      results[c] = sampler::run_chain(target, cfg);
    }
  });

  io::CsvTable samples;
  for (int d = 0; d < o.dim; ++d) samples.header.push_back("theta_" + std::to_string(d + 1));
  for (const auto& res : results)
    for (Index i = 0; i < res.draws.rows(); ++i) {
      std::vector<double> row(o.dim);
      for (int d = 0; d < o.dim; ++d) row[d] = res.draws(i, d);
      samples.add_row(row);
    }

  double acceptance = 0.0;
  long divergences = 0;
  Json mass_list = Json::array();
  Json ess = Json::array();
  for (int d = 0; d < o.dim; ++d) {
    double total = 0.0;
    for (const auto& res : results)
      total += sampler::effective_sample_size(res.draws.col(d)).ess;
    ess.push_back(total);
  }
  for (const auto& res : results) {
    acceptance += res.acceptance_rate / o.chains;
    divergences += res.divergences;
    mass_list.push_back(matrix_json(res.mass));
  }

  OutputWriter out(common.out);
  out.write("samples.csv", samples.serialize());
  Json diagnostics{{"acceptance_rate", acceptance},
                   {"divergences", divergences},
                   {"ess", ess},
                   {"final_mass", mass_list}};
  out.write("diagnostics.json", diagnostics.dump(2) + "\n");
  out.finish("sample", config);
  print_summary("sample", config, diagnostics, out);
  return 0;
}

// -------------------------------------------------------- bench-gaussian --

struct BenchGaussianOpts {
  std::vector<int> dims = {10};
  double kappa = 3.0;
  double eps = 0.3;
  int steps = 15;
  int warmup = 3000;
  int draws = 10000;
  int chains = 8;
  bool identity_mass = false;  // disable the preconditioner
  std::vector<int> checkpoints;
};

int run_bench_gaussian(const CommonOpts& common, const BenchGaussianOpts& o,
                       const Json& config) {
  require(!o.dims.empty(), "need at least one dimension (key dims)");
  for (int d : o.dims) require(d >= 2, "dimensions must be >= 2 (key dims)");
  require(o.eps > 0.0, "step size must be positive (key eps)");
  require(o.kappa <= 8.0, "kappa above 8 is refused (key kappa)");
  require(o.draws >= 1 && o.warmup >= 0 && o.chains >= 1,
          "invalid sampling budget (keys draws/warmup/chains)");

  bench::GaussianBenchSettings settings;
  settings.kappa = o.kappa;
  settings.step_size = o.eps;
  settings.leapfrog_steps = o.steps;
  settings.warmup = o.warmup;
  settings.draws = o.draws;
  settings.chains = o.chains;
  settings.preconditioned = !o.identity_mass;
  settings.checkpoints = o.checkpoints;
  settings.threads = common.threads;

  const auto rows = bench::run_gaussian_benchmark(o.dims, settings, common.seed);

  io::CsvTable table;
  table.header = {"dimension", "checkpoint", "iteration", "kl"};
  for (const auto& r : rows)
    table.add_row({static_cast<double>(r.dim), static_cast<double>(r.checkpoint),
                   static_cast<double>(r.iteration), r.kl});

  OutputWriter out(common.out);
  out.write("kl_trace.csv", table.serialize());

  Json metrics = Json::object();
  for (int d : o.dims) {
    double final_kl = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : rows)
      if (r.dim == d && !r.flagged) final_kl = r.kl;
    metrics["final_kl_dim" + std::to_string(d)] = final_kl;
  }
  if (common.svg) {
    for (int d : o.dims) {
      std::vector<double> xs, ys;
      for (const auto& r : rows)
        if (r.dim == d && !r.flagged) {
          xs.push_back(static_cast<double>(r.iteration));
          ys.push_back(r.kl);
        }
      RealVector x = Eigen::Map<RealVector>(xs.data(), xs.size());
      RealVector y = Eigen::Map<RealVector>(ys.data(), ys.size());
      out.write("kl_trace_dim" + std::to_string(d) + ".svg",
                io::line_chart_svg(x, {y}, "KL vs pooled draws, dim " + std::to_string(d)));
    }
  }
  out.finish("bench-gaussian", config);
  print_summary("bench-gaussian", config, metrics, out);
  return 0;
}

// ------------------------------------------------------------ bench-airy --

struct BenchAiryOpts {
  int modes = 20;
  double slope = 1.0;
  int grid = 1000;
  bool infer = false;
  double sigma = 0.01;
  int draws = 400;
  int warmup = 300;
};

int run_bench_airy(const CommonOpts& common, const BenchAiryOpts& o, const Json& config) {
  require(o.modes >= 1, "modes must be >= 1 (key modes)");
  require(o.grid >= 100, "grid must be >= 100 (key grid)");
  require(o.modes <= o.grid / 10, "modes must be <= grid/10 (keys modes/grid)");
  require(o.slope > 0.0, "slope must be positive (key slope)");
  require(o.sigma > 0.0, "sigma must be positive (key sigma)");

  const bench::AiryProblem prob = bench::make_airy_problem(o.slope, o.modes, o.grid);
  const RealVector estimate = bench::airy_eigenvalues(prob, o.modes);

  // reference solve on a three-times-refined nested mesh
  bench::AiryProblem ref = prob;
  ref.grid = 8 * o.grid + 7;
  const RealVector reference = bench::airy_eigenvalues(ref, o.modes);

  const auto report = bench::eigen_error_report(estimate, reference);
  io::CsvTable table;
  table.header = {"index", "exact", "estimate", "abs_err", "rel_err"};
  for (const auto& r : report)
    table.add_row({static_cast<double>(r.index), r.exact, r.estimate, r.abs_err, r.rel_err});

  // observed order of the raw finite-difference eigenvalue before extrapolation
  bench::AiryProblem fine = prob, finer = prob;
  fine.grid = 2 * o.grid + 1;
  finer.grid = 4 * o.grid + 3;
  const double l0 =
      bench::tridiagonal_smallest_eigenvalues(bench::airy_discretize(prob), 1)[0];
  const double l1 =
      bench::tridiagonal_smallest_eigenvalues(bench::airy_discretize(fine), 1)[0];
  const double l2 =
      bench::tridiagonal_smallest_eigenvalues(bench::airy_discretize(finer), 1)[0];
  const double order = std::log2(std::abs((l0 - l1) / (l1 - l2)));

  double max_rel = 0.0;
  for (const auto& r : report) max_rel = std::max(max_rel, r.rel_err);

  OutputWriter out(common.out);
  out.write("airy_eigs.csv", table.serialize());
  Json metrics{{"max_rel_error", max_rel},
               {"fd_convergence_order", order},
               {"accuracy_note",
                "estimates carry finite-difference + extrapolation error at the "
                "order shown; they are not exact to machine roundoff"}};

  if (o.infer) {
    Rng root(common.seed);
    Rng noise = root.child(7);
    RealVector observed = estimate.head(o.modes);
    for (Index i = 0; i < observed.size(); ++i) observed[i] += o.sigma * noise.normal();

    bench::AiryPosteriorConfig pcfg;
    pcfg.modes = o.modes;
    pcfg.grid = o.grid;
    const sampler::TargetDensity post = bench::airy_posterior(observed, pcfg);

    // moment-matched start and a diagonal Hessian mass estimate
    double ratio = 0.0;
    for (Index i = 0; i < observed.size(); ++i) ratio += observed[i] / estimate[i];
    ratio /= static_cast<double>(observed.size());
    const double a0 = o.slope * std::pow(std::max(ratio, 1e-6), 1.5);
    double resid = 0.0;
    for (Index i = 0; i < observed.size(); ++i) {
      const double d = observed[i] - estimate[i] * std::pow(a0 / o.slope, 2.0 / 3.0);
      resid += d * d;
    }
    const double s0 = std::max(std::sqrt(resid / o.modes), 1e-6);
    RealVector init(2);
    init << std::log(a0), std::log(s0);
    RealMatrix mass = RealMatrix::Identity(2, 2);
    const double h = 1e-3;
    for (Index i = 0; i < 2; ++i) {
      RealVector tp = init, tm = init;
      tp[i] += h;
      tm[i] -= h;
      const double curv = -(post.log_density(tp) - 2.0 * post.log_density(init) +
                            post.log_density(tm)) /
                          (h * h);
      mass(i, i) = std::max(curv, 1e-6);
    }

    sampler::HMCConfig cfg;
    cfg.step_size = 0.5;
    cfg.leapfrog_steps = 12;
    cfg.warmup = o.warmup;
    cfg.iterations = o.warmup + o.draws;
    cfg.mass = mass;
    cfg.init = init;
    cfg.seed = root.child(11).seed();
    const sampler::ChainResult res = sampler::run_chain(post, cfg);

    io::CsvTable postcsv;
    postcsv.header = {"log_a", "log_sigma"};
    double mean_a = 0.0, mean_a2 = 0.0;
    for (Index i = 0; i < res.draws.rows(); ++i) {
      postcsv.add_row({res.draws(i, 0), res.draws(i, 1)});
      const double a = std::exp(res.draws(i, 0));
      mean_a += a;
      mean_a2 += a * a;
    }
    mean_a /= static_cast<double>(res.draws.rows());
    mean_a2 /= static_cast<double>(res.draws.rows());
    const double sd_a = std::sqrt(std::max(mean_a2 - mean_a * mean_a, 0.0));
    out.write("posterior_samples.csv", postcsv.serialize());
    metrics["posterior_mean_a"] = mean_a;
    metrics["posterior_sd_a"] = sd_a;
    metrics["true_slope"] = o.slope;
    metrics["acceptance_rate"] = res.acceptance_rate;
  }

  if (common.svg) {
    RealVector idx(report.size()), rel(report.size());
    for (std::size_t i = 0; i < report.size(); ++i) {
      idx[i] = report[i].index;
      rel[i] = std::log10(std::max(report[i].rel_err, 1e-18));
    }
    out.write("airy_rel_err.svg",
              io::line_chart_svg(idx, {rel}, "log10 relative eigenvalue error"));
  }
  out.finish("bench-airy", config);
  print_summary("bench-airy", config, metrics, out);
  return 0;
}

// ----------------------------------------------------------- rmt-spacing --

struct RmtSpacingOpts {
  int dim = 2;
  int samples = 20000;
  std::string method = "direct";
  int bins = 32;
  double walk_step = 0.05;
  int stride = 50;
  int burnin = 200;
  double smax = 4.0;
};

int run_rmt_spacing(const CommonOpts& common, const RmtSpacingOpts& o, const Json& config) {
  require(o.dim >= 2, "dim must be >= 2 (key dim)");
  require(o.samples >= 1000, "need at least 1000 samples (key samples)");
  require(o.method == "direct" || o.method == "walk",
          "method must be 'direct' or 'walk' (key method)");
  require(o.bins >= 4, "bins must be >= 4 (key bins)");

  Rng root(common.seed);
  std::vector<RealVector> sets(o.samples);
  if (o.method == "direct") {
    parallel_for(o.samples, common.threads, [&](int i) {
      Rng r = root.child(i);
      sets[i] = rmt::eigenphases(rmt::sample_cue_direct(o.dim, r));
    });
  } else {
    Rng r = root.child(0);
    rmt::UnitaryWalkState walk = rmt::UnitaryWalkState::identity(o.dim, o.walk_step);
    for (int i = 0; i < o.burnin; ++i) rmt::cue_step(walk, r);
    for (int i = 0; i < o.samples; ++i) {
      for (int s = 0; s < o.stride; ++s) rmt::cue_step(walk, r);
      sets[i] = rmt::eigenphases(walk.unitary);
    }
  }
  const rmt::SpacingHistogram hist = rmt::spacing_statistics(sets, o.bins, o.smax);

  io::CsvTable table;
  table.header = {"bin_center", "density"};
  for (Index b = 0; b < hist.centers.size(); ++b)
    table.add_row({hist.centers[b], hist.density[b]});

  OutputWriter out(common.out);
  out.write("spacing_hist.csv", table.serialize());
  if (common.svg)
    out.write("spacing_hist.svg",
              io::histogram_svg(hist.centers, hist.density, "unfolded spacing density"));
  Json metrics{{"mean_spacing", hist.mean_spacing},
               {"spacings", hist.samples},
               {"method", o.method}};
  out.finish("rmt-spacing", config);
  print_summary("rmt-spacing", config, metrics, out);
  return 0;
}

// ----------------------------------------------------------- sse-validate --

struct SseValidateOpts {
  int paths = 2000;
  double dt = 1e-3;
  double tfinal = 1.0;
  double gamma = 5.0;
};

int run_sse_validate(const CommonOpts& common, const SseValidateOpts& o, const Json& config) {
  require(o.paths >= 100, "need at least 100 paths (key paths)");
  require(o.dt > 0.0, "dt must be positive (key dt)");
  require(o.tfinal > 0.0, "tfinal must be positive (key tfinal)");
  require(o.gamma > 0.0, "gamma must be positive (key gamma)");

  Rng root(common.seed);
  ComplexMatrix lower = ComplexMatrix::Zero(2, 2);
  lower(0, 1) = 1.0;  // |g><e|
  const ComplexMatrix h0 = ComplexMatrix::Zero(2, 2);
  const sse::SSEModel damping = sse::SSEModel::constant(h0, {lower});
  ComplexVector excited(2);
  excited << 0.0, 1.0;

  const auto steps = static_cast<Index>(std::llround(o.tfinal / o.dt));
  const Index half = steps / 2;

  // martingale of the LSSE norm at t/2 and t
  RealVector norm_half(o.paths), norm_final(o.paths);
  std::vector<DensityMatrix> sme_final(o.paths, DensityMatrix::maximally_mixed(2));
  parallel_for(o.paths, common.threads, [&](int i) {
    Rng r = root.child(i);
    const sse::WienerPath w = sse::sample_wiener_path(1, o.tfinal, o.dt, r);
    const sse::StateTrajectory traj = sse::integrate_lsse(damping, excited, w);
    norm_half[i] = traj.norms[half] * traj.norms[half];
    norm_final[i] = traj.norms[steps] * traj.norms[steps];
    Rng r2 = root.child(100000 + i);
    const sse::WienerPath w2 = sse::sample_wiener_path(1, o.tfinal, o.dt, r2);
    sme_final[i] =
        sse::integrate_stochastic_master(damping, DensityMatrix::pure(excited), w2)
            .states.back();
  });
  const auto moments = [&](const RealVector& v) {
    const double mean = v.mean();
    const double var = (v.array() - mean).square().sum() / (v.size() - 1);
    return std::pair{mean, std::sqrt(var / v.size())};
  };
  const auto [mean_half, se_half] = moments(norm_half);
  const auto [mean_final, se_final] = moments(norm_final);

  ComplexMatrix sme_mean = ComplexMatrix::Zero(2, 2);
  for (const auto& s : sme_final) sme_mean += s.matrix();
  sme_mean /= static_cast<double>(o.paths);
  lindblad::LindbladModel model{h0, {lower}};
  const auto lind = lindblad::evolve(model, DensityMatrix::pure(excited), o.tfinal, o.dt);
  const double sme_distance = lindblad::trace_distance(sme_mean, lind.back().matrix());

  // OU-driven dephasing ensemble against the memory-kernel master equation
  ComplexMatrix sz(2, 2);
  sz << 1.0, 0.0, 0.0, -1.0;
  sz /= std::numbers::sqrt2;
  ComplexVector plus(2);
  plus << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
  std::vector<ComplexMatrix> ou_final(o.paths);
  parallel_for(o.paths, common.threads, [&](int i) {
    Rng r = root.child(200000 + i);
    const sse::OUDriving drive = sse::sample_ou_driving(o.gamma, o.tfinal, o.dt, r);
    const sse::StateTrajectory traj =
        sse::integrate_ou_sse(h0, sz, o.gamma, plus, drive.ou, drive.wiener);
    const ComplexVector& psi = traj.back();
    ou_final[i] = psi * psi.adjoint();
  });
  ComplexMatrix ou_mean = ComplexMatrix::Zero(2, 2);
  for (const auto& s : ou_final) ou_mean += s;
  ou_mean /= static_cast<double>(o.paths);
  const auto memory =
      sse::nonmarkovian_evolve(h0, sz, o.gamma, DensityMatrix::pure(plus), o.tfinal, o.dt);
  const double ou_distance = lindblad::trace_distance(ou_mean, memory.back().matrix());

  io::CsvTable table;
  table.header = {"check", "value", "threshold", "pass"};
  const auto add_check = [&](const char* name, double value, double threshold) {
    table.rows.push_back({name, io::format_float(value), io::format_float(threshold),
                          value < threshold ? "1" : "0"});
  };
  add_check("martingale_dev_half_se", std::abs(mean_half - 1.0) / se_half, 3.0);
  add_check("martingale_dev_final_se", std::abs(mean_final - 1.0) / se_final, 3.0);
  add_check("sme_vs_lindblad_trace_distance", sme_distance, 0.05);
  add_check("ou_sse_vs_memory_kernel_trace_distance", ou_distance, 0.1);

  // one sample trajectory for inspection
  Rng r0 = root.child(0);
  const sse::WienerPath w0 = sse::sample_wiener_path(1, o.tfinal, o.dt, r0);
  const sse::StateTrajectory traj0 = sse::integrate_lsse(damping, excited, w0);
  io::CsvTable trajcsv;
  trajcsv.header = {"time"};
  for (Index k = 0; k < 2; ++k) {
    trajcsv.header.push_back("re_" + std::to_string(k));
    trajcsv.header.push_back("im_" + std::to_string(k));
  }
  trajcsv.header.push_back("norm");
  for (Index n = 0; n < traj0.times.size(); ++n) {
    std::vector<double> row{traj0.times[n]};
    for (Index k = 0; k < 2; ++k) {
      row.push_back(traj0.states[n][k].real());
      row.push_back(traj0.states[n][k].imag());
    }
    row.push_back(traj0.norms[n]);
    trajcsv.add_row(row);
  }

  OutputWriter out(common.out);
  out.write("sse_validation.csv", table.serialize());
  out.write("trajectory.csv", trajcsv.serialize());
  Json metrics{{"martingale_mean_half", mean_half},
               {"martingale_mean_final", mean_final},
               {"sme_vs_lindblad_trace_distance", sme_distance},
               {"ou_sse_vs_memory_kernel_trace_distance", ou_distance}};
  out.finish("sse-validate", config);
  print_summary("sse-validate", config, metrics, out);
  return 0;
}

// -------------------------------------------------------- lindblad-evolve --

struct LindbladEvolveOpts {
  std::string model = "amplitude-damping";
  double tfinal = 1.0;
  double dt = 1e-3;
  double rate = 1.0;
};

int run_lindblad_evolve(const CommonOpts& common, const LindbladEvolveOpts& o,
                        const Json& config) {
  require(o.dt > 0.0, "dt must be positive (key dt)");
  require(o.tfinal >= 0.0, "tfinal must be >= 0 (key tfinal)");
  require(o.rate > 0.0, "rate must be positive (key rate)");
  require(o.model == "amplitude-damping" || o.model == "dephasing",
          "model must be 'amplitude-damping' or 'dephasing' (key model)");

  lindblad::LindbladModel model;
  DensityMatrix rho0 = DensityMatrix::maximally_mixed(2);
  const double g = std::sqrt(o.rate);
  if (o.model == "amplitude-damping") {
    ComplexMatrix lower = ComplexMatrix::Zero(2, 2);
    lower(0, 1) = g;
    model.hamiltonian = ComplexMatrix::Zero(2, 2);
    model.jumps = {lower};
    ComplexVector excited(2);
    excited << 0.0, 1.0;
    rho0 = DensityMatrix::pure(excited);
  } else {
    ComplexMatrix sz(2, 2);
    sz << g, 0.0, 0.0, -g;
    model.hamiltonian = ComplexMatrix::Zero(2, 2);
    model.jumps = {sz};
    ComplexVector plus(2);
    plus << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
    rho0 = DensityMatrix::pure(plus);
  }

  const auto traj = lindblad::evolve(model, rho0, o.tfinal, o.dt);
  io::CsvTable table;
  table.header = {"time"};
  for (Index j = 0; j < 2; ++j)
    for (Index k = 0; k < 2; ++k) {
      table.header.push_back("re_" + std::to_string(j) + std::to_string(k));
      table.header.push_back("im_" + std::to_string(j) + std::to_string(k));
    }
  for (Index n = 0; n < traj.times.size(); ++n) {
    std::vector<double> row{traj.times[n]};
    const ComplexMatrix& m = traj.states[n].matrix();
    for (Index j = 0; j < 2; ++j)
      for (Index k = 0; k < 2; ++k) {
        row.push_back(m(j, k).real());
        row.push_back(m(j, k).imag());
      }
    table.add_row(row);
  }

  OutputWriter out(common.out);
  out.write("trajectory.csv", table.serialize());
  if (common.svg) {
    RealVector pop(traj.times.size()), coh(traj.times.size());
    for (Index n = 0; n < traj.times.size(); ++n) {
      pop[n] = traj.states[n].matrix()(1, 1).real();
      coh[n] = std::abs(traj.states[n].matrix()(0, 1));
    }
    out.write("trajectory.svg",
              io::line_chart_svg(traj.times, {pop, coh},
                                 "population (blue) and coherence (red)"));
  }
  Json metrics{{"final_trace", traj.back().matrix().trace().real()},
               {"final_excited_population", traj.back().matrix()(1, 1).real()}};
  out.finish("lindblad-evolve", config);
  print_summary("lindblad-evolve", config, metrics, out);
  return 0;
}

}  // namespace

Json load_config(const std::filesystem::path& path,
                 const std::vector<std::string>& allowed) {
  return load_config_impl(path, allowed);
}

int run(int argc, const char* const* argv) {
  CLI::App app{"density-matrix preconditioned HMC and open-quantum-system numerics"};
  app.require_subcommand(1);

  CommonOpts common[6];
  SampleOpts sample_opts;
  BenchGaussianOpts gauss_opts;
  BenchAiryOpts airy_opts;
  RmtSpacingOpts rmt_opts;
  SseValidateOpts sse_opts;
  LindbladEvolveOpts lind_opts;

  auto* c_sample = app.add_subcommand("sample", "run HMC chains on a Gaussian target");
  Binder b_sample(c_sample);
  add_common(b_sample, c_sample, common[0], "runs/sample");
  b_sample.add("target", sample_opts.target, "std-normal or gaussian-illcond");
  b_sample.add("dim", sample_opts.dim, "target dimension");
  b_sample.add("kappa", sample_opts.kappa, "condition exponent for gaussian-illcond");
  b_sample.add("eps", sample_opts.eps, "leapfrog step size");
  b_sample.add("steps", sample_opts.steps, "leapfrog steps per proposal");
  b_sample.add("warmup", sample_opts.warmup, "warmup iterations");
  b_sample.add("iters", sample_opts.iters, "post-warmup draws");
  b_sample.add("chains", sample_opts.chains, "independent chains");
  b_sample.add_flag("precond", sample_opts.precond, "density-matrix preconditioner");
  b_sample.add("alpha", sample_opts.alpha, "preconditioner mixing rate");
  b_sample.add("walk-step", sample_opts.walk_step, "unitary walk step");

  auto* c_gauss = app.add_subcommand("bench-gaussian", "ill-conditioned Gaussian benchmark");
  Binder b_gauss(c_gauss);
  add_common(b_gauss, c_gauss, common[1], "runs/bench-gaussian");
  b_gauss.add("dims", gauss_opts.dims, "comma-separated dimensions");
  b_gauss.add("kappa", gauss_opts.kappa, "condition exponent");
  b_gauss.add("eps", gauss_opts.eps, "leapfrog step size");
  b_gauss.add("steps", gauss_opts.steps, "leapfrog steps per proposal");
  b_gauss.add("warmup", gauss_opts.warmup, "warmup iterations per chain");
  b_gauss.add("draws", gauss_opts.draws, "post-warmup draws per chain");
  b_gauss.add("chains", gauss_opts.chains, "parallel chains");
  b_gauss.add_flag("identity-mass", gauss_opts.identity_mass,
                   "disable the density-matrix preconditioner");
  b_gauss.add("checkpoints", gauss_opts.checkpoints, "per-chain draw checkpoints");

  auto* c_airy = app.add_subcommand("bench-airy", "Airy-operator eigenvalue benchmark");
  Binder b_airy(c_airy);
  add_common(b_airy, c_airy, common[2], "runs/bench-airy");
  b_airy.add("modes", airy_opts.modes, "number of eigenvalues");
  b_airy.add("slope", airy_opts.slope, "potential slope");
  b_airy.add("grid", airy_opts.grid, "interior grid points");
  b_airy.add_flag("infer", airy_opts.infer, "run Bayesian slope/noise inference");
  b_airy.add("sigma", airy_opts.sigma, "observation noise for synthetic data");
  b_airy.add("draws", airy_opts.draws, "posterior draws");
  b_airy.add("warmup", airy_opts.warmup, "posterior warmup");

  auto* c_rmt = app.add_subcommand("rmt-spacing", "CUE eigenphase spacing histogram");
  Binder b_rmt(c_rmt);
  add_common(b_rmt, c_rmt, common[3], "runs/rmt-spacing");
  b_rmt.add("dim", rmt_opts.dim, "matrix dimension");
  b_rmt.add("samples", rmt_opts.samples, "number of phase sets");
  b_rmt.add("method", rmt_opts.method, "direct or walk");
  b_rmt.add("bins", rmt_opts.bins, "histogram bins");
  b_rmt.add("walk-step", rmt_opts.walk_step, "walk step dtau");
  b_rmt.add("stride", rmt_opts.stride, "walk steps between snapshots");
  b_rmt.add("burnin", rmt_opts.burnin, "walk burn-in steps");
  b_rmt.add("smax", rmt_opts.smax, "histogram upper edge");

  auto* c_sse = app.add_subcommand("sse-validate", "stochastic unraveling consistency checks");
  Binder b_sse(c_sse);
  add_common(b_sse, c_sse, common[4], "runs/sse-validate");
  b_sse.add("paths", sse_opts.paths, "Monte Carlo paths");
  b_sse.add("dt", sse_opts.dt, "integrator step");
  b_sse.add("tfinal", sse_opts.tfinal, "final time");
  b_sse.add("gamma", sse_opts.gamma, "OU relaxation rate");

  auto* c_lind = app.add_subcommand("lindblad-evolve", "deterministic Lindblad trajectory");
  Binder b_lind(c_lind);
  add_common(b_lind, c_lind, common[5], "runs/lindblad-evolve");
  b_lind.add("model", lind_opts.model, "amplitude-damping or dephasing");
  b_lind.add("tfinal", lind_opts.tfinal, "final time");
  b_lind.add("dt", lind_opts.dt, "RK4 step");
  b_lind.add("rate", lind_opts.rate, "dissipation rate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  const struct {
    CLI::App* cmd;
    Binder* binder;
    CommonOpts* common;
    std::function<int(const CommonOpts&, const Json&)> handler;
  } table[] = {
      {c_sample, &b_sample, &common[0],
       [&](const CommonOpts& c, const Json& cfg) { return run_sample(c, sample_opts, cfg); }},
      {c_gauss, &b_gauss, &common[1],
       [&](const CommonOpts& c, const Json& cfg) { return run_bench_gaussian(c, gauss_opts, cfg); }},
      {c_airy, &b_airy, &common[2],
       [&](const CommonOpts& c, const Json& cfg) { return run_bench_airy(c, airy_opts, cfg); }},
      {c_rmt, &b_rmt, &common[3],
       [&](const CommonOpts& c, const Json& cfg) { return run_rmt_spacing(c, rmt_opts, cfg); }},
      {c_sse, &b_sse, &common[4],
       [&](const CommonOpts& c, const Json& cfg) { return run_sse_validate(c, sse_opts, cfg); }},
      {c_lind, &b_lind, &common[5],
       [&](const CommonOpts& c, const Json& cfg) { return run_lindblad_evolve(c, lind_opts, cfg); }},
  };

  for (const auto& entry : table) {
    if (!entry.cmd->parsed()) continue;
    try {
      Json file = Json::object();
      if (!entry.common->config.empty()) {
        file = load_config_impl(entry.common->config, entry.binder->keys());
        entry.binder->apply_file(file);
      }
      resolve_seed(*entry.binder, file, *entry.common);
      const Json effective = entry.binder->effective();
      return entry.handler(*entry.common, effective);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const std::invalid_argument& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "runtime error: " << e.what() << "\n";
      return 3;
    }
  }
  std::cerr << "error: no subcommand selected\n";
  return 2;
}

}  // namespace qjh::cli
