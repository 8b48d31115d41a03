#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qcl/numcore.hpp"
#include "testutil.hpp"

using namespace qcl;
using testutil::Rng;

namespace {

CMatrix det_minus_four() {
  // [[1,1,1],[1,1,-1],[1,-1,1]]: det = -4 by cofactor expansion, so the
  // (real, symmetric) matrix has a negative eigenvalue.
  CMatrix m(3, 3);
  m << 1, 1, 1, 1, 1, -1, 1, -1, 1;
  return m;
}

}  // namespace

TEST_CASE("hermitian_eig on diagonal and Pauli-X inputs") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  HermitianEig eig = hermitian_eig(d);
  CHECK(eig.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(eig.eigenvalues(1) == doctest::Approx(2.0));
  CHECK(entrywise_close(eig.eigenvectors.cwiseAbs(), CMatrix::Identity(2, 2), 1e-12));

  CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  eig = hermitian_eig(x);
  CHECK(eig.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(eig.eigenvalues(1) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig flags a negative eigenvalue when det < 0") {
  HermitianEig eig = hermitian_eig(det_minus_four());
  double det = eig.eigenvalues.prod();
  CHECK(det == doctest::Approx(-4.0).epsilon(1e-9));
  CHECK(eig.eigenvalues(0) < 0.0);
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
  CMatrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS_WITH_AS(hermitian_eig(m), doctest::Contains("symmetry"), Error);
}

TEST_CASE("is_psd examples") {
  PsdVerdict v = is_psd(CMatrix::Identity(3, 3));
  CHECK(v.verdict);
  CHECK(v.min_eig == doctest::Approx(1.0));

  // all-ones 3x3 is a rank-one Gram matrix with spectrum {3, 0, 0}
  v = is_psd(CMatrix::Ones(3, 3));
  CHECK(v.verdict);
  CHECK(v.min_eig == doctest::Approx(0.0).epsilon(1e-12));

  v = is_psd(det_minus_four());
  CHECK_FALSE(v.verdict);
  CHECK(v.min_eig < 0.0);
}

TEST_CASE("is_unitary examples") {
  CHECK(is_unitary(CMatrix::Identity(4, 4)));
  CMatrix phases = CMatrix::Zero(2, 2);
  phases(0, 0) = 1.0;
  phases(1, 1) = std::polar(1.0, M_PI / 3.0);
  CHECK(is_unitary(phases));
  CMatrix shrunk = CMatrix::Zero(2, 2);
  shrunk(0, 0) = 1.0;
  shrunk(1, 1) = 0.5;
  CHECK_FALSE(is_unitary(shrunk));
}

TEST_CASE("kron examples and index convention") {
  CHECK(entrywise_close(kron(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)),
                        CMatrix::Identity(4, 4), 1e-15));

  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  CMatrix expected = CMatrix::Zero(4, 4);
  expected.diagonal() << 1, 1, 2, 2;
  CHECK(entrywise_close(kron(d, CMatrix::Identity(2, 2)), expected, 1e-15));

  // kron(e_12, e_21): single 1 at row 0*2+1 = 1, col 1*2+0 = 2
  CMatrix k = kron(matrix_unit(2, 0, 1), matrix_unit(2, 1, 0));
  CHECK(k(1, 2) == Complex(1.0, 0.0));
  k(1, 2) = 0.0;
  CHECK(max_abs(k) == 0.0);
}

TEST_CASE("property: reconstruction and spectral invariance") {
  Rng rng(0xC0FFEE);
  for (int trial = 0; trial < 25; ++trial) {
    Index n = 2 + static_cast<Index>(trial % 5);
    CMatrix m = testutil::random_hermitian(rng, n);
    HermitianEig eig = hermitian_eig(m);
    CMatrix rebuilt = eig.eigenvectors *
                      eig.eigenvalues.cast<Complex>().asDiagonal() *
                      eig.eigenvectors.adjoint();
    CHECK(max_abs(rebuilt - m) <= 1e-9 * (1.0 + max_abs(m)));
    CHECK(is_unitary(eig.eigenvectors));

    CMatrix u = testutil::random_unitary(rng, n);
    PsdVerdict a = is_psd(m);
    PsdVerdict b = is_psd(CMatrix(u * m * u.adjoint()));
    CHECK(a.verdict == b.verdict);
  }
}

TEST_CASE("property: kron associativity and mixed product") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix a = testutil::random_matrix(rng, 2, 3);
    CMatrix b = testutil::random_matrix(rng, 3, 2);
    CMatrix c = testutil::random_matrix(rng, 2, 2);
    CHECK(entrywise_close(kron(kron(a, b), c), kron(a, kron(b, c)), 1e-12));

    CMatrix x = testutil::random_matrix(rng, 3, 2);
    CMatrix y = testutil::random_matrix(rng, 2, 3);
    // (a (x) b)(x (x) y) = (a x) (x) (b y)
    CHECK(entrywise_close(CMatrix(kron(a, b) * kron(x, y)), kron(CMatrix(a * x), CMatrix(b * y)),
                          1e-11));
  }
}

TEST_CASE("cluster_eigenvalues groups by gap") {
  RVector v(5);
  v << 0.0, 1e-10, 0.5, 0.5 + 1e-9, 0.9;
  auto clusters = cluster_eigenvalues(v, 1e-8);
  REQUIRE(clusters.size() == 3);
  CHECK(clusters[0].multiplicity == 2);
  CHECK(clusters[1].multiplicity == 2);
  CHECK(clusters[2].multiplicity == 1);
}
