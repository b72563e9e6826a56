// Density matrices and the information-geometric quantities built on them:
// quantum Fisher information, the BKM (Kubo-Mori) metric obtained from the
// Hessian of quantum relative entropy, generalized covariance, and the
// classical Fisher information matrix.
#pragma once

#include <functional>

#include "qjh/numkernel.hpp"

namespace qjh {

// Hermitian, positive semidefinite, unit-trace complex matrix. Validated on
// construction: Hermiticity defect <= 1e-12, eigenvalues >= -1e-12, and
// |trace - 1| <= 1e-12.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m);

  static DensityMatrix maximally_mixed(Index dim);
  static DensityMatrix pure(const ComplexVector& psi);

  const ComplexMatrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  ComplexMatrix m_;
};

// rho = sum_i lambda_i |psi_i><psi_i| with probabilities ascending.
struct EigenEnsemble {
  RealVector probabilities;
  ComplexMatrix states;  // unitary columns
};

// rho_theta = exp(-i theta A) rho0 exp(+i theta A) for Hermitian generator A.
struct UnitaryFamily {
  ComplexMatrix generator;
  DensityMatrix base;
};

namespace density {

// Clamp eigenvalues to >= 0 and renormalize to unit trace. Idempotent.
// Throws std::domain_error if no positive spectral weight remains.
DensityMatrix project_to_density(const ComplexMatrix& a);

EigenEnsemble eigen_ensemble(const DensityMatrix& rho);

// Scalar quantum Fisher information of the unitary family generated by
// Hermitian h at state rho:
//   J = sum_i 4 rho_i <Delta^2 h>_i
//     - sum_{i != j} 8 rho_i rho_j / (rho_i + rho_j) |<psi_i|h|psi_j>|^2
// Pairs with rho_i + rho_j below 1e-12 are dropped (support convention).
double qfim(const DensityMatrix& rho, const ComplexMatrix& h);

// Hermitian generator i (d/dtheta U^dagger) U of a unitary family, evaluated
// by central differences at theta0 and Hermitized. Samples are checked for
// unitarity. Note the sign: for u(theta) = exp(-i theta A) this yields -A.
ComplexMatrix generator_from_family(const std::function<ComplexMatrix(double)>& u,
                                    double theta0, double h);

// tr(rho (log rho - log sigma)), natural log, 0 log 0 = 0 via an eigenvalue
// floor of 1e-15 on rho. Returns +infinity when rho has support where sigma
// has none.
double quantum_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

struct BkmResult {
  RealMatrix metric;
  bool indefinite = false;  // set when the stencil produced a clearly indefinite result
};

// Hessian of theta -> D(rho_theta0 || rho_theta) at theta0 by second-order
// central differences with step h; symmetrized.
BkmResult bkm_metric(const std::function<DensityMatrix(const RealVector&)>& family,
                     const RealVector& theta0, double h);

// kappa_rho(A, B) = tr(rho {A, B}) / 2 for Hermitian A, B.
double generalized_covariance(const DensityMatrix& rho, const ComplexMatrix& a,
                              const ComplexMatrix& b);

// Closed-form d/dtheta of rho_theta = U rho0 U^dagger with U = exp(-i theta A):
// -i U [A, rho0] U^dagger. Hermitian and traceless.
ComplexMatrix unitary_family_derivative(const UnitaryFamily& fam, double theta);

// J = S^T Sigma^{-1} S for symmetric positive definite Sigma.
RealMatrix classical_fim(const RealMatrix& s, const RealMatrix& sigma);

}  // namespace density
}  // namespace qjh
