#include "qjh/density.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qjh {

namespace {
constexpr double kPsdTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kRhoLogFloor = 1e-15;   // 0 log 0 = 0 convention on rho
constexpr double kSupportTol = 1e-12;    // spectral weight counted as support
constexpr double kQfimPairFloor = 1e-12; // dropped pairs in the QFIM sum
}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols())
    throw std::invalid_argument("DensityMatrix: matrix must be square");
  if (!is_hermitian(m_, 1e-12))
    throw std::invalid_argument("DensityMatrix: matrix is not Hermitian within tolerance");
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol)
    throw std::invalid_argument("DensityMatrix: trace must be 1 within 1e-12");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitize(m_), Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kPsdTol)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double n2 = psi.squaredNorm();
  if (n2 <= 0.0) throw std::invalid_argument("DensityMatrix::pure: zero vector");
  return DensityMatrix(psi * psi.adjoint() / n2);
}

namespace density {

DensityMatrix project_to_density(const ComplexMatrix& a) {
  const Spectrum s = hermitian_eig(a);
  RealVector clamped = s.eigenvalues.cwiseMax(0.0);
  const double total = clamped.sum();
  if (total <= 0.0)
    throw std::domain_error("project_to_density: spectrum has no positive weight");
  clamped /= total;
  ComplexMatrix m = s.eigenvectors * clamped.cast<Complex>().asDiagonal() *
                    s.eigenvectors.adjoint();
  return DensityMatrix(hermitize(m));
}

EigenEnsemble eigen_ensemble(const DensityMatrix& rho) {
  Spectrum s = hermitian_eig(rho.matrix());
  return EigenEnsemble{s.eigenvalues.cwiseMax(0.0), s.eigenvectors};
}

double qfim(const DensityMatrix& rho, const ComplexMatrix& h) {
  if (!is_hermitian(h, 1e-12))
    throw std::invalid_argument("qfim: generator must be Hermitian");
  const EigenEnsemble ens = eigen_ensemble(rho);
  const Index n = rho.dim();
  const ComplexMatrix h_eig = ens.states.adjoint() * h * ens.states;
  const ComplexMatrix h2_eig = h_eig * h_eig;

  double variance_term = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double mean = h_eig(i, i).real();
    const double second = h2_eig(i, i).real();
    variance_term += 4.0 * ens.probabilities[i] * (second - mean * mean);
  }
  double offdiag_term = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double pij = ens.probabilities[i] + ens.probabilities[j];
      if (pij < kQfimPairFloor) continue;
      offdiag_term += 8.0 * ens.probabilities[i] * ens.probabilities[j] / pij *
                      std::norm(h_eig(i, j));
    }
  }
  return variance_term - offdiag_term;
}

ComplexMatrix generator_from_family(const std::function<ComplexMatrix(double)>& u,
                                    double theta0, double h) {
  if (h <= 0.0) throw std::invalid_argument("generator_from_family: step must be positive");
  const ComplexMatrix u0 = u(theta0);
  const ComplexMatrix up = u(theta0 + h);
  const ComplexMatrix um = u(theta0 - h);
  const Index n = u0.rows();
  const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  for (const ComplexMatrix* m : {&u0, &up, &um}) {
    if ((m->adjoint() * (*m) - eye).norm() > 1e-8)
      throw std::invalid_argument("generator_from_family: family sample is not unitary");
  }
  const ComplexMatrix dudag = (up.adjoint() - um.adjoint()) / (2.0 * h);
  return hermitize(Complex(0.0, 1.0) * dudag * u0);
}

double quantum_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim())
    throw std::invalid_argument("quantum_relative_entropy: dimension mismatch");
  const EigenEnsemble er = eigen_ensemble(rho);
  const EigenEnsemble es = eigen_ensemble(sigma);
  const Index n = rho.dim();

  double entropy = 0.0;  // tr(rho log rho)
  for (Index i = 0; i < n; ++i) {
    const double p = er.probabilities[i];
    if (p > kRhoLogFloor) entropy += p * std::log(p);
  }
  // overlap(i, k) = |<psi_i | phi_k>|^2
  const ComplexMatrix inner = er.states.adjoint() * es.states;
  double cross = 0.0;  // tr(rho log sigma)
  for (Index k = 0; k < n; ++k) {
    double weight = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double p = er.probabilities[i];
      if (p > kRhoLogFloor) weight += p * std::norm(inner(i, k));
    }
    const double q = es.probabilities[k];
    if (q < kRhoLogFloor) {
      if (weight > kSupportTol)
        return std::numeric_limits<double>::infinity();  // support violation
      continue;
    }
    cross += weight * std::log(q);
  }
  const double value = entropy - cross;
  return value < 0.0 ? 0.0 : value;  // clip roundoff below zero
}

BkmResult bkm_metric(const std::function<DensityMatrix(const RealVector&)>& family,
                     const RealVector& theta0, double h) {
  if (h <= 0.0) throw std::invalid_argument("bkm_metric: step must be positive");
  const Index d = theta0.size();
  const DensityMatrix base = family(theta0);
  const auto divergence = [&](const RealVector& theta) {
    return quantum_relative_entropy(base, family(theta));
  };

  RealMatrix g(d, d);
  for (Index j = 0; j < d; ++j) {
    RealVector ej = RealVector::Zero(d);
    ej[j] = h;
    const double fp = divergence(theta0 + ej);
    const double fm = divergence(theta0 - ej);
    g(j, j) = (fp + fm) / (h * h);  // f(theta0) = 0
    for (Index k = j + 1; k < d; ++k) {
      RealVector ek = RealVector::Zero(d);
      ek[k] = h;
      const double fpp = divergence(theta0 + ej + ek);
      const double fpm = divergence(theta0 + ej - ek);
      const double fmp = divergence(theta0 - ej + ek);
      const double fmm = divergence(theta0 - ej - ek);
      g(j, k) = g(k, j) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  }
  g = 0.5 * (g + g.transpose().eval());

  BkmResult out{g, false};
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(g, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if (solver.eigenvalues().minCoeff() < -1e-5 * scale) out.indefinite = true;
  return out;
}

double generalized_covariance(const DensityMatrix& rho, const ComplexMatrix& a,
                              const ComplexMatrix& b) {
  if (!is_hermitian(a, 1e-12) || !is_hermitian(b, 1e-12))
    throw std::invalid_argument("generalized_covariance: operands must be Hermitian");
  return 0.5 * (rho.matrix() * anticommutator(a, b)).trace().real();
}

ComplexMatrix unitary_family_derivative(const UnitaryFamily& fam, double theta) {
  const ComplexMatrix u = expm_skew_hermitian(fam.generator, theta);
  const ComplexMatrix comm = commutator(fam.generator, fam.base.matrix());
  return hermitize(Complex(0.0, -1.0) * u * comm * u.adjoint());
}

RealMatrix classical_fim(const RealMatrix& s, const RealMatrix& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() != s.rows())
    throw std::invalid_argument("classical_fim: shape mismatch");
  if ((sigma - sigma.transpose()).norm() > 1e-10 * std::max(1.0, sigma.norm()))
    throw std::invalid_argument("classical_fim: covariance must be symmetric");
  Eigen::LLT<RealMatrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("classical_fim: covariance is not positive definite");
  RealMatrix j = s.transpose() * llt.solve(s);
  return 0.5 * (j + j.transpose().eval());
}

}  // namespace density
}  // namespace qjh
