// Shared dense linear-algebra aliases used across the library.
#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qjh {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Eigendecomposition of a Hermitian matrix: A = V diag(lambda) V^dagger,
// eigenvalues ascending, eigenvector columns unitary.
struct Spectrum {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
};

}  // namespace qjh
