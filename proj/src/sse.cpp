#include "qjh/sse.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qjh::sse {

namespace {
constexpr double kDegenerateNorm = 1e-14;
constexpr Index kMaxMemorySteps = 200000;  // guard for the history buffer

void check_finite(const ComplexVector& psi, Index step, const char* who) {
  if (!psi.allFinite())
    throw std::runtime_error(std::string(who) + ": non-finite state at step " +
                             std::to_string(step));
}
}  // namespace

SSEModel SSEModel::constant(ComplexMatrix h, std::vector<ComplexMatrix> rs) {
  SSEModel m;
  m.dim = h.rows();
  m.hamiltonian = [h = std::move(h)](double) { return h; };
  for (auto& r : rs)
    m.noise_ops.emplace_back([r = std::move(r)](double) { return r; });
  return m;
}

WienerPath sample_wiener_path(Index channels, double t_final, double dt, Rng& rng) {
  if (dt <= 0.0 || t_final < 0.0 || channels < 0)
    throw std::invalid_argument("sample_wiener_path: invalid grid");
  const auto steps = static_cast<Index>(std::llround(t_final / dt));
  WienerPath path;
  path.times = RealVector::LinSpaced(steps + 1, 0.0, dt * static_cast<double>(steps));
  path.increments.resize(steps, channels);
  const double sq = std::sqrt(dt);
  for (Index n = 0; n < steps; ++n)
    for (Index j = 0; j < channels; ++j) path.increments(n, j) = sq * rng.normal();
  return path;
}

OUPath sample_ou_path(double gamma, double t_final, double dt, Rng& rng) {
  if (gamma <= 0.0) throw std::invalid_argument("sample_ou_path: gamma must be positive");
  if (dt <= 0.0 || t_final < 0.0)
    throw std::invalid_argument("sample_ou_path: invalid grid");
  const auto steps = static_cast<Index>(std::llround(t_final / dt));
  OUPath path;
  path.gamma = gamma;
  path.times = RealVector::LinSpaced(steps + 1, 0.0, dt * static_cast<double>(steps));
  path.values.resize(steps + 1);
  path.values[0] = rng.normal() / std::sqrt(2.0 * gamma);
  const double decay = std::exp(-gamma * dt);
  const double innovation = std::sqrt((1.0 - decay * decay) / (2.0 * gamma));
  for (Index n = 0; n < steps; ++n)
    path.values[n + 1] = decay * path.values[n] + innovation * rng.normal();
  return path;
}

OUDriving sample_ou_driving(double gamma, double t_final, double dt, Rng& rng) {
  if (gamma <= 0.0) throw std::invalid_argument("sample_ou_driving: gamma must be positive");
  if (dt <= 0.0 || t_final < 0.0)
    throw std::invalid_argument("sample_ou_driving: invalid grid");
  const auto steps = static_cast<Index>(std::llround(t_final / dt));
  const RealVector times =
      RealVector::LinSpaced(steps + 1, 0.0, dt * static_cast<double>(steps));

  OUDriving out;
  out.ou.gamma = gamma;
  out.ou.times = times;
  out.ou.values.resize(steps + 1);
  out.wiener.times = times;
  out.wiener.increments.resize(steps, 1);

  const double decay = std::exp(-gamma * dt);
  const double innovation_var = (1.0 - decay * decay) / (2.0 * gamma);
  const double cross = (1.0 - decay) / gamma;  // Cov(dW, innovation)
  const double slope = cross / innovation_var;
  const double resid_sd = std::sqrt(std::max(0.0, dt - cross * cross / innovation_var));
  const double innovation_sd = std::sqrt(innovation_var);

  out.ou.values[0] = rng.normal() / std::sqrt(2.0 * gamma);
  for (Index n = 0; n < steps; ++n) {
    const double innovation = innovation_sd * rng.normal();
    out.ou.values[n + 1] = decay * out.ou.values[n] + innovation;
    out.wiener.increments(n, 0) = slope * innovation + resid_sd * rng.normal();
  }
  return out;
}

ComplexMatrix drift_operator(const SSEModel& model, double t) {
  ComplexMatrix h = model.hamiltonian(t);
  if (!is_hermitian(h, 1e-10))
    throw std::invalid_argument("drift_operator: H(t) must be Hermitian");
  ComplexMatrix k = Complex(0.0, -1.0) * h;
  for (const auto& rop : model.noise_ops) {
    const ComplexMatrix r = rop(t);
    k -= 0.5 * r.adjoint() * r;
  }
  return k;
}

StateTrajectory integrate_lsse(const SSEModel& model, const ComplexVector& psi0,
                               const WienerPath& path) {
  if (psi0.norm() <= 0.0)
    throw std::invalid_argument("integrate_lsse: initial state must be nonzero");
  if (path.channels() != static_cast<Index>(model.noise_ops.size()))
    throw std::invalid_argument("integrate_lsse: path channels do not match noise operators");

  const Index steps = path.steps();
  const double dt = steps > 0 ? path.dt() : 0.0;
  StateTrajectory traj;
  traj.times = path.times;
  traj.states.reserve(steps + 1);
  traj.norms.resize(steps + 1);
  traj.states.push_back(psi0);
  traj.norms[0] = psi0.norm();

  ComplexVector psi = psi0;
  for (Index n = 0; n < steps; ++n) {
    const double t = path.times[n];
    ComplexVector next = psi + dt * (drift_operator(model, t) * psi);
    for (Index j = 0; j < path.channels(); ++j)
      next += path.increments(n, j) * (model.noise_ops[j](t) * psi);
    check_finite(next, n, "integrate_lsse");
    psi = std::move(next);
    traj.states.push_back(psi);
    const double norm = psi.norm();
    traj.norms[n + 1] = norm;
    if (norm < kDegenerateNorm) traj.degenerate_steps.push_back(n + 1);
  }
  return traj;
}

StateTrajectory integrate_nonlinear_sse(const SSEModel& model, const ComplexVector& psi0,
                                        const WienerPath& path) {
  if (std::abs(psi0.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("integrate_nonlinear_sse: initial state must be unit norm");
  if (path.channels() != static_cast<Index>(model.noise_ops.size()))
    throw std::invalid_argument(
        "integrate_nonlinear_sse: path channels do not match noise operators");

  const Index steps = path.steps();
  const double dt = steps > 0 ? path.dt() : 0.0;
  StateTrajectory traj;
  traj.times = path.times;
  traj.states.reserve(steps + 1);
  traj.norms = RealVector::Ones(steps + 1);
  traj.states.push_back(psi0);

  ComplexVector psi = psi0;
  for (Index n = 0; n < steps; ++n) {
    const double t = path.times[n];
    ComplexVector next = psi + dt * (drift_operator(model, t) * psi);
    for (Index j = 0; j < path.channels(); ++j) {
      const ComplexMatrix r = model.noise_ops[j](t);
      const ComplexVector rpsi = r * psi;
      const double eta = psi.dot(rpsi).real();  // Re <psi|R psi>
      next += dt * (eta * rpsi - 0.5 * eta * eta * psi);
      next += path.increments(n, j) * (rpsi - eta * psi);
    }
    check_finite(next, n, "integrate_nonlinear_sse");
    const double norm = next.norm();
    if (norm < kDegenerateNorm) {
      // degenerate-norm convention: restart from the first basis vector
      psi = ComplexVector::Zero(psi.size());
      psi[0] = 1.0;
      traj.degenerate_steps.push_back(n + 1);
    } else {
      psi = next / norm;
    }
    traj.states.push_back(psi);
  }
  return traj;
}

StochasticMasterTrajectory integrate_stochastic_master(const SSEModel& model,
                                                       const DensityMatrix& rho0,
                                                       const WienerPath& path) {
  if (path.channels() != static_cast<Index>(model.noise_ops.size()))
    throw std::invalid_argument(
        "integrate_stochastic_master: path channels do not match noise operators");

  const Index steps = path.steps();
  const double dt = steps > 0 ? path.dt() : 0.0;
  StochasticMasterTrajectory traj;
  traj.times = path.times;
  traj.states.reserve(steps + 1);
  traj.states.push_back(rho0);

  ComplexMatrix rho = rho0.matrix();
  for (Index n = 0; n < steps; ++n) {
    const double t = path.times[n];
    const ComplexMatrix h = model.hamiltonian(t);
    ComplexMatrix drift = Complex(0.0, -1.0) * commutator(h, rho);
    ComplexMatrix noise = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (Index j = 0; j < path.channels(); ++j) {
      const ComplexMatrix r = model.noise_ops[j](t);
      drift += r * rho * r.adjoint() - 0.5 * anticommutator(r.adjoint() * r, rho);
      const ComplexMatrix sandwich = r * rho + rho * r.adjoint();
      const double v = sandwich.trace().real();
      noise += path.increments(n, j) * (sandwich - v * rho);
    }
    rho = hermitize(rho + dt * drift + noise);
    if (!rho.allFinite())
      throw std::runtime_error("integrate_stochastic_master: non-finite state at step " +
                               std::to_string(n));
    rho /= rho.trace().real();

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-6) {
      traj.flagged_steps.push_back(n + 1);
      rho = density::project_to_density(rho).matrix();
    }
    traj.states.push_back(density::project_to_density(rho));
  }
  return traj;
}

StateTrajectory integrate_ou_sse(const ComplexMatrix& h0, const ComplexMatrix& coupling,
                                 double gamma, const ComplexVector& psi0,
                                 const OUPath& ou, const WienerPath& path) {
  if (!is_hermitian(coupling, 1e-12))
    throw std::invalid_argument("integrate_ou_sse: coupling operator must be Hermitian");
  if (path.channels() != 1)
    throw std::invalid_argument("integrate_ou_sse: expects a single noise channel");
  if (ou.times.size() != path.times.size())
    throw std::invalid_argument("integrate_ou_sse: OU and Wiener grids differ");

  const Index steps = path.steps();
  const double dt = steps > 0 ? path.dt() : 0.0;
  const ComplexMatrix lsq = coupling * coupling;
  StateTrajectory traj;
  traj.times = path.times;
  traj.states.reserve(steps + 1);
  traj.norms.resize(steps + 1);
  traj.states.push_back(psi0);
  traj.norms[0] = psi0.norm();

  ComplexVector psi = psi0;
  for (Index n = 0; n < steps; ++n) {
    const ComplexMatrix h = h0 - gamma * ou.values[n] * coupling;
    ComplexVector next =
        psi + dt * (Complex(0.0, -1.0) * (h * psi) - 0.5 * (lsq * psi));
    next += path.increments(n, 0) * (Complex(0.0, -1.0) * (coupling * psi));
    check_finite(next, n, "integrate_ou_sse");
    psi = std::move(next);
    traj.states.push_back(psi);
    const double norm = psi.norm();
    traj.norms[n + 1] = norm;
    if (norm < kDegenerateNorm) traj.degenerate_steps.push_back(n + 1);
  }
  return traj;
}

lindblad::DensityTrajectory nonmarkovian_evolve(const ComplexMatrix& h0,
                                                const ComplexMatrix& coupling,
                                                double gamma, const DensityMatrix& eta0,
                                                double t_final, double dt) {
  if (!is_hermitian(coupling, 1e-12))
    throw std::invalid_argument("nonmarkovian_evolve: coupling operator must be Hermitian");
  if (!is_hermitian(h0, 1e-12))
    throw std::invalid_argument("nonmarkovian_evolve: H0 must be Hermitian");
  if (dt <= 0.0 || t_final < 0.0)
    throw std::invalid_argument("nonmarkovian_evolve: invalid grid");
  const auto steps = static_cast<Index>(std::llround(t_final / dt));
  if (steps > kMaxMemorySteps)
    throw std::invalid_argument(
        "nonmarkovian_evolve: grid too fine for the history buffer, enlarge dt");

  const auto averaged_liouvillian = [&](const ComplexMatrix& x) -> ComplexMatrix {
    return Complex(0.0, -1.0) * commutator(h0, x) -
           0.5 * commutator(coupling, commutator(coupling, x));
  };
  // One kernel advance exp((L_M - gamma) dt) applied by RK4; sub-stepped so
  // the stage arguments stay well inside the stability region at large gamma.
  const int substeps = std::max(1, static_cast<int>(std::ceil(gamma * dt / 0.5)));
  const double h = dt / substeps;
  const auto kernel_advance = [&](ComplexMatrix& x) {
    for (int s = 0; s < substeps; ++s) {
      const ComplexMatrix k1 = averaged_liouvillian(x) - gamma * x;
      const ComplexMatrix x2 = x + 0.5 * h * k1;
      const ComplexMatrix k2 = averaged_liouvillian(x2) - gamma * x2;
      const ComplexMatrix x3 = x + 0.5 * h * k2;
      const ComplexMatrix k3 = averaged_liouvillian(x3) - gamma * x3;
      const ComplexMatrix x4 = x + h * k3;
      const ComplexMatrix k4 = averaged_liouvillian(x4) - gamma * x4;
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  };

  lindblad::DensityTrajectory traj;
  traj.times.resize(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times[0] = 0.0;
  traj.states.push_back(eta0);

  ComplexMatrix eta = eta0.matrix();
  // history[k] = exp((L_M - gamma)(t_n - t_k)) [L, eta(t_k)], kept current at t_n
  std::vector<ComplexMatrix> history;
  history.reserve(steps + 1);
  history.push_back(commutator(coupling, eta));

  for (Index n = 0; n < steps; ++n) {
    // trapezoidal memory integral over the stored, already-propagated operands
    ComplexMatrix integral = ComplexMatrix::Zero(eta.rows(), eta.cols());
    if (n > 0) {
      integral = 0.5 * (history.front() + history.back());
      for (Index k = 1; k < n; ++k) integral += history[k];
      integral *= dt;
    }
    const ComplexMatrix rhs =
        averaged_liouvillian(eta) + 0.5 * gamma * commutator(coupling, integral);
    eta = hermitize(eta + dt * rhs);
    eta /= eta.trace().real();

    for (auto& op : history) kernel_advance(op);
    history.push_back(commutator(coupling, eta));

    traj.times[n + 1] = dt * static_cast<double>(n + 1);
    traj.states.push_back(density::project_to_density(eta));
  }
  return traj;
}

}  // namespace qjh::sse
