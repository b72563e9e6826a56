#include "test_support.hpp"

#include "qjh/numkernel.hpp"

using namespace qjh;

TEST_SUITE("numkernel") {

TEST_CASE("hermitian_eig on identity and diagonal matrices") {
  const Spectrum id = hermitian_eig(ComplexMatrix::Identity(3, 3));
  for (Index i = 0; i < 3; ++i) CHECK(id.eigenvalues[i] == doctest::Approx(1.0));

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 1.0;
  const Spectrum s = hermitian_eig(d);
  CHECK(s.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(s.eigenvalues[1] == doctest::Approx(2.0));
  // permuted standard basis
  CHECK(std::abs(s.eigenvectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(s.eigenvectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig on pauli x") {
  const Spectrum s = hermitian_eig(test::pauli_x());
  CHECK(s.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(s.eigenvalues[1] == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig reconstruction for random matrices") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 7;
    const ComplexMatrix a = test::random_hermitian(n, rng);
    const Spectrum s = hermitian_eig(a);
    const ComplexMatrix rebuilt = s.eigenvectors *
                                  s.eigenvalues.cast<Complex>().asDiagonal() *
                                  s.eigenvectors.adjoint();
    CHECK((rebuilt - a).norm() < 1e-10 * std::max(1.0, a.norm()));
    for (Index i = 0; i + 1 < n; ++i) CHECK(s.eigenvalues[i] <= s.eigenvalues[i + 1]);
    CHECK((s.eigenvectors.adjoint() * s.eigenvectors -
           ComplexMatrix::Identity(n, n)).norm() < 1e-10);
  }
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
  ComplexMatrix bad(2, 2);
  bad << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(hermitian_eig(bad), std::invalid_argument);
}

TEST_CASE("expm_skew_hermitian special cases") {
  Rng rng(5);
  const ComplexMatrix h = test::random_hermitian(4, rng);
  CHECK((expm_skew_hermitian(h, 0.0) - ComplexMatrix::Identity(4, 4)).norm() < 1e-12);

  // exp(i pi sigma_x / 2) = i sigma_x
  const ComplexMatrix u = expm_skew_hermitian(test::pauli_x(), -std::numbers::pi / 2);
  CHECK((u - Complex(0, 1) * test::pauli_x()).norm() < 1e-12);

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 0.3;
  d(1, 1) = -1.1;
  const ComplexMatrix ud = expm_skew_hermitian(d, -1.0);
  CHECK(std::abs(ud(0, 0) - std::polar(1.0, 0.3)) < 1e-12);
  CHECK(std::abs(ud(1, 1) - std::polar(1.0, -1.1)) < 1e-12);
}

TEST_CASE("expm_skew_hermitian output is unitary") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 2 + trial % 5;
    const ComplexMatrix u = expm_skew_hermitian(test::random_hermitian(n, rng), 0.7);
    CHECK((u.adjoint() * u - ComplexMatrix::Identity(n, n)).norm() < 1e-10);
  }
}

TEST_CASE("logm_positive_definite") {
  CHECK(logm_positive_definite(ComplexMatrix::Identity(3, 3)).norm() < 1e-12);

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = std::exp(1.0);
  d(1, 1) = std::exp(2.0);
  const ComplexMatrix l = logm_positive_definite(d);
  CHECK(l(0, 0).real() == doctest::Approx(1.0));
  CHECK(l(1, 1).real() == doctest::Approx(2.0));

  // round trip on a random positive definite matrix
  Rng rng(11);
  ComplexMatrix a(4, 4);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
  const ComplexMatrix pd =
      a * a.adjoint() + 0.5 * ComplexMatrix::Identity(4, 4);
  const ComplexMatrix log_pd = logm_positive_definite(pd);
  const Spectrum s = hermitian_eig(log_pd);
  ComplexVector exps(4);
  for (Index i = 0; i < 4; ++i) exps[i] = std::exp(s.eigenvalues[i]);
  const ComplexMatrix rebuilt =
      s.eigenvectors * exps.asDiagonal() * s.eigenvectors.adjoint();
  CHECK((rebuilt - pd).norm() < 1e-9 * pd.norm());

  ComplexMatrix indefinite = ComplexMatrix::Identity(2, 2);
  indefinite(1, 1) = -0.5;
  CHECK_THROWS_AS(logm_positive_definite(indefinite, 0.0), std::domain_error);
}

TEST_CASE("commutator and anticommutator algebra") {
  CHECK((commutator(test::pauli_x(), test::pauli_y()) -
         Complex(0, 2) * test::pauli_z()).norm() < 1e-14);
  CHECK((anticommutator(test::pauli_x(), test::pauli_x()) -
         2.0 * ComplexMatrix::Identity(2, 2)).norm() < 1e-14);

  Rng rng(3);
  const ComplexMatrix a = test::random_hermitian(5, rng);
  CHECK(commutator(a, a).norm() < 1e-14);

  const ComplexMatrix b = test::random_hermitian(5, rng);
  CHECK(std::abs(commutator(a, b).trace()) < 1e-10 * a.norm() * b.norm());

  CHECK_THROWS_AS(commutator(a, ComplexMatrix::Identity(3, 3)), std::invalid_argument);
}

}  // TEST_SUITE
