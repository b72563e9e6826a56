#include "qjh/numkernel.hpp"

#include <cmath>
#include <stdexcept>

namespace qjh {

double hermiticity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).norm() / scale;
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  return hermiticity_defect(a) <= tol;
}

ComplexMatrix hermitize(const ComplexMatrix& a) {
  return 0.5 * (a + a.adjoint().eval());
}

Spectrum hermitian_eig(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("hermitian_eig: matrix must be square");
  if (!is_hermitian(a, tol))
    throw std::invalid_argument("hermitian_eig: input is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitize(a));
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eig: eigensolver failed to converge");
  return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix expm_skew_hermitian(const ComplexMatrix& h, double t) {
  const Spectrum s = hermitian_eig(h);
  const Index n = h.rows();
  ComplexVector phases(n);
  for (Index k = 0; k < n; ++k) {
    const double angle = -t * s.eigenvalues[k];
    phases[k] = Complex(std::cos(angle), std::sin(angle));
  }
  return s.eigenvectors * phases.asDiagonal() * s.eigenvectors.adjoint();
}

ComplexMatrix logm_positive_definite(const ComplexMatrix& a, double floor) {
  const Spectrum s = hermitian_eig(a);
  const Index n = a.rows();
  if (floor < 0.0) floor = 1e-12 * a.trace().real() / static_cast<double>(n);
  RealVector logs(n);
  for (Index k = 0; k < n; ++k) {
    const double lam = std::max(s.eigenvalues[k], floor);
    if (lam <= 1e-300)
      throw std::domain_error("logm_positive_definite: eigenvalue not positive after flooring");
    logs[k] = std::log(lam);
  }
  return hermitize(s.eigenvectors * logs.cast<Complex>().asDiagonal() *
                   s.eigenvectors.adjoint());
}

namespace {
void check_conformable(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument(std::string(what) + ": operands must be square with equal dims");
}
}  // namespace

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  check_conformable(a, b, "commutator");
  return a * b - b * a;
}

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  check_conformable(a, b, "anticommutator");
  return a * b + b * a;
}

}  // namespace qjh
