// Python bindings for the core operations.
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qjh/bench.hpp"
#include "qjh/lindblad.hpp"
#include "qjh/rmt.hpp"
#include "qjh/sse.hpp"

namespace py = pybind11;
using namespace qjh;

namespace {

std::vector<ComplexMatrix> states_of(const lindblad::DensityTrajectory& traj) {
  std::vector<ComplexMatrix> out;
  out.reserve(traj.states.size());
  for (const auto& s : traj.states) out.push_back(s.matrix());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "density-matrix preconditioned HMC and open-quantum-system numerics";

  // ---- numkernel ----
  m.def("hermitian_eig", [](const ComplexMatrix& a) {
    const Spectrum s = hermitian_eig(a);
    return py::make_tuple(s.eigenvalues, s.eigenvectors);
  });
  m.def("expm_skew_hermitian", &expm_skew_hermitian, py::arg("h"), py::arg("t"));
  m.def("logm_positive_definite", &logm_positive_definite, py::arg("a"),
        py::arg("floor") = -1.0);
  m.def("commutator", &commutator);
  m.def("anticommutator", &anticommutator);

  // ---- density ----
  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init<ComplexMatrix>())
      .def_static("maximally_mixed", &DensityMatrix::maximally_mixed)
      .def_static("pure", &DensityMatrix::pure)
      .def_property_readonly("matrix", &DensityMatrix::matrix)
      .def_property_readonly("dim", &DensityMatrix::dim);

  m.def("project_to_density", &density::project_to_density);
  m.def("eigen_ensemble", [](const DensityMatrix& rho) {
    const EigenEnsemble e = density::eigen_ensemble(rho);
    return py::make_tuple(e.probabilities, e.states);
  });
  m.def("qfim", &density::qfim, py::arg("rho"), py::arg("h"));
  m.def("quantum_relative_entropy", &density::quantum_relative_entropy);
  m.def("generalized_covariance", &density::generalized_covariance);
  m.def("classical_fim", &density::classical_fim, py::arg("s"), py::arg("sigma"));
  m.def("unitary_family_derivative",
        [](const ComplexMatrix& generator, const DensityMatrix& base, double theta) {
          return density::unitary_family_derivative({generator, base}, theta);
        });
  m.def("generator_from_family", &density::generator_from_family, py::arg("u"),
        py::arg("theta0"), py::arg("h"));
  m.def("bkm_metric",
        [](const std::function<ComplexMatrix(const RealVector&)>& family,
           const RealVector& theta0, double h) {
          const auto wrapped = [&](const RealVector& t) {
            return DensityMatrix(family(t));
          };
          const auto r = density::bkm_metric(wrapped, theta0, h);
          return py::make_tuple(r.metric, r.indefinite);
        });

  // ---- lindblad ----
  m.def("lindblad_rhs",
        [](const ComplexMatrix& h, const std::vector<ComplexMatrix>& jumps,
           const ComplexMatrix& rho) {
          return lindblad::rhs({h, jumps}, rho);
        });
  m.def("lindblad_evolve",
        [](const ComplexMatrix& h, const std::vector<ComplexMatrix>& jumps,
           const ComplexMatrix& rho0, double t_final, double dt) {
          const auto traj =
              lindblad::evolve({h, jumps}, DensityMatrix(rho0), t_final, dt);
          return py::make_tuple(traj.times, states_of(traj));
        });
  m.def("trace_distance", &lindblad::trace_distance);

  // ---- sse ----
  py::class_<sse::WienerPath>(m, "WienerPath")
      .def_readonly("times", &sse::WienerPath::times)
      .def_readonly("increments", &sse::WienerPath::increments);
  py::class_<sse::OUPath>(m, "OUPath")
      .def_readonly("gamma", &sse::OUPath::gamma)
      .def_readonly("times", &sse::OUPath::times)
      .def_readonly("values", &sse::OUPath::values);

  m.def("sample_wiener_path",
        [](Index channels, double t_final, double dt, std::uint64_t seed) {
          Rng rng(seed);
          return sse::sample_wiener_path(channels, t_final, dt, rng);
        });
  m.def("sample_ou_path", [](double gamma, double t_final, double dt, std::uint64_t seed) {
    Rng rng(seed);
    return sse::sample_ou_path(gamma, t_final, dt, rng);
  });
  m.def("drift_operator",
        [](const ComplexMatrix& h, const std::vector<ComplexMatrix>& rs, double t) {
          return sse::drift_operator(sse::SSEModel::constant(h, rs), t);
        });
  m.def("integrate_lsse",
        [](const ComplexMatrix& h, const std::vector<ComplexMatrix>& rs,
           const ComplexVector& psi0, const sse::WienerPath& path) {
          const auto traj = sse::integrate_lsse(sse::SSEModel::constant(h, rs), psi0, path);
          return py::make_tuple(traj.times, traj.states, traj.norms);
        });
  m.def("integrate_nonlinear_sse",
        [](const ComplexMatrix& h, const std::vector<ComplexMatrix>& rs,
           const ComplexVector& psi0, const sse::WienerPath& path) {
          const auto traj =
              sse::integrate_nonlinear_sse(sse::SSEModel::constant(h, rs), psi0, path);
          return py::make_tuple(traj.times, traj.states, traj.norms);
        });
  m.def("integrate_stochastic_master",
        [](const ComplexMatrix& h, const std::vector<ComplexMatrix>& rs,
           const ComplexMatrix& rho0, const sse::WienerPath& path) {
          const auto traj = sse::integrate_stochastic_master(
              sse::SSEModel::constant(h, rs), DensityMatrix(rho0), path);
          std::vector<ComplexMatrix> states;
          states.reserve(traj.states.size());
          for (const auto& s : traj.states) states.push_back(s.matrix());
          return py::make_tuple(traj.times, states, traj.flagged_steps);
        });
  m.def("integrate_ou_sse",
        [](const ComplexMatrix& h0, const ComplexMatrix& coupling, double gamma,
           const ComplexVector& psi0, const sse::OUPath& ou, const sse::WienerPath& w) {
          const auto traj = sse::integrate_ou_sse(h0, coupling, gamma, psi0, ou, w);
          return py::make_tuple(traj.times, traj.states, traj.norms);
        });
  m.def("nonmarkovian_evolve",
        [](const ComplexMatrix& h0, const ComplexMatrix& coupling, double gamma,
           const ComplexMatrix& eta0, double t_final, double dt) {
          const auto traj = sse::nonmarkovian_evolve(h0, coupling, gamma,
                                                     DensityMatrix(eta0), t_final, dt);
          return py::make_tuple(traj.times, states_of(traj));
        });

  // ---- rmt ----
  py::class_<rmt::UnitaryWalkState>(m, "UnitaryWalkState")
      .def_static("identity", &rmt::UnitaryWalkState::identity, py::arg("n"),
                  py::arg("step"))
      .def_readonly("unitary", &rmt::UnitaryWalkState::unitary)
      .def_readonly("tau", &rmt::UnitaryWalkState::tau)
      .def_readwrite("step", &rmt::UnitaryWalkState::step);

  m.def("sample_gue", [](Index n, std::uint64_t seed) {
    Rng rng(seed);
    return rmt::sample_gue(n, rng);
  });
  m.def("sample_cue_direct", [](Index n, std::uint64_t seed) {
    Rng rng(seed);
    return rmt::sample_cue_direct(n, rng);
  });
  m.def("cue_walk", [](Index n, double step, int steps, std::uint64_t seed) {
    Rng rng(seed);
    auto st = rmt::UnitaryWalkState::identity(n, step);
    for (int i = 0; i < steps; ++i) rmt::cue_step(st, rng);
    return st;
  });
  m.def("eigenphases", &rmt::eigenphases);
  m.def("circular_spacings", &rmt::circular_spacings);
  m.def("spacing_statistics",
        [](const std::vector<RealVector>& sets, int bins, double smax) {
          const auto h = rmt::spacing_statistics(sets, bins, smax);
          return py::make_tuple(h.centers, h.density, h.mean_spacing);
        },
        py::arg("phase_sets"), py::arg("bins") = 64, py::arg("smax") = 4.0);

  // ---- sampler ----
  py::class_<sampler::ChainResult>(m, "ChainResult")
      .def_readonly("draws", &sampler::ChainResult::draws)
      .def_readonly("acceptance_rate", &sampler::ChainResult::acceptance_rate)
      .def_readonly("divergences", &sampler::ChainResult::divergences)
      .def_readonly("mass", &sampler::ChainResult::mass);

  m.def("run_chain",
        [](Index dim, const std::function<double(const RealVector&)>& log_density,
           const std::function<RealVector(const RealVector&)>& grad, double step_size,
           int leapfrog_steps, int warmup, int draws, std::uint64_t seed,
           bool preconditioned, const RealMatrix& mass, const RealVector& init) {
          sampler::TargetDensity t{dim, log_density, grad};
          sampler::HMCConfig cfg;
          cfg.step_size = step_size;
          cfg.leapfrog_steps = leapfrog_steps;
          cfg.warmup = warmup;
          cfg.iterations = warmup + draws;
          cfg.seed = seed;
          cfg.mass = mass;
          cfg.init = init;
          if (preconditioned) {
            sampler::DMPreconditioner pre(dim, {}, splitmix64(seed));
            return sampler::run_chain(t, cfg, &pre);
          }
          return sampler::run_chain(t, cfg);
        },
        py::arg("dim"), py::arg("log_density"), py::arg("grad_log_density"),
        py::arg("step_size") = 0.25, py::arg("leapfrog_steps") = 16,
        py::arg("warmup") = 500, py::arg("draws") = 1000, py::arg("seed") = 0,
        py::arg("preconditioned") = false, py::arg("mass") = RealMatrix(),
        py::arg("init") = RealVector());
  m.def("effective_sample_size", [](const RealVector& series) {
    const auto r = sampler::effective_sample_size(series);
    return py::make_tuple(r.ess, r.degenerate);
  });
  m.def("leapfrog",
        [](const RealVector& theta, const RealVector& p,
           const std::function<double(const RealVector&)>& log_density,
           const std::function<RealVector(const RealVector&)>& grad,
           const RealMatrix& mass, double eps, int steps) {
          sampler::TargetDensity t{theta.size(), log_density, grad};
          const auto r = sampler::leapfrog(theta, p, t, mass, eps, steps);
          return py::make_tuple(r.position, r.momentum, r.diverged);
        });

  // ---- bench ----
  m.def("make_illconditioned_gaussian", [](Index dim, double kappa, std::uint64_t seed) {
    Rng rng(seed);
    const auto g = bench::make_illconditioned_gaussian(dim, kappa, rng);
    return py::make_tuple(g.mean, g.covariance);
  });
  m.def("kl_gaussian", &bench::kl_gaussian, py::arg("mu"), py::arg("sigma"),
        py::arg("mu_hat"), py::arg("sigma_hat"));
  m.def("airy_eigenvalues", [](double slope, int modes, int grid) {
    return bench::airy_eigenvalues(bench::make_airy_problem(slope, modes, grid), modes);
  });
  m.def("eigen_error_report",
        [](const RealVector& estimated, const RealVector& exact) {
          py::list rows;
          for (const auto& r : bench::eigen_error_report(estimated, exact))
            rows.append(py::make_tuple(r.index, r.exact, r.estimate, r.abs_err, r.rel_err));
          return rows;
        });
}
