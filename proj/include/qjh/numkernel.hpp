// Dense complex linear-algebra primitives shared by all other modules.
// Matrix exponentials and logarithms go through the eigendecomposition,
// which keeps unitarity / Hermiticity exact by construction at the sizes
// handled here (a few hundred dimensions at most).
#pragma once

#include "qjh/types.hpp"

namespace qjh {

// Frobenius distance from exact Hermiticity, relative to max(1, max |entry|).
double hermiticity_defect(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, double tol = 1e-12);

// (A + A^dagger) / 2
ComplexMatrix hermitize(const ComplexMatrix& a);

// Eigendecomposition with validation; throws std::invalid_argument on
// non-Hermitian input beyond tolerance.
Spectrum hermitian_eig(const ComplexMatrix& a, double tol = 1e-12);

// exp(-i t H) for Hermitian H; unitary by construction.
ComplexMatrix expm_skew_hermitian(const ComplexMatrix& h, double t);

// Principal logarithm of a positive-definite Hermitian matrix. Eigenvalues
// are raised to at least `floor` before taking the log; the default floor
// is 1e-12 * trace/dim. Throws std::domain_error if any floored eigenvalue
// is still not positive.
ComplexMatrix logm_positive_definite(const ComplexMatrix& a, double floor = -1.0);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qjh
