#pragma once

#include "qcl/common.hpp"

namespace qcl {

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const CMatrix& m) { return m.allFinite(); }

//! Entrywise closeness with the relative scale eps*(1+max(|a|,|b|)).
inline bool entrywise_close(const CMatrix& a, const CMatrix& b, double eps) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  double scale = 1.0 + std::max(max_abs(a), max_abs(b));
  return max_abs(a - b) <= eps * scale;
}

inline bool is_hermitian(const CMatrix& m, double eps) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= eps * (1.0 + max_abs(m));
}

struct HermitianEig {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // unitary, columns match eigenvalues
};

//! Eigendecomposition of a Hermitian matrix. The input is symmetrized before
//! factorization; deviations beyond eps_eq*(1+scale) raise NotHermitian.
HermitianEig hermitian_eig(const CMatrix& m, const Tolerance& tol = {});

struct PsdVerdict {
  bool verdict;
  double min_eig;
  double max_abs_eig;
};

//! Relative PSD test: verdict is true iff min_eig >= -eps_psd*(1+max|eig|).
PsdVerdict is_psd(const CMatrix& m, const Tolerance& tol = {});

//! True iff ||m*m - I||_max <= eps_eq.
bool is_unitary(const CMatrix& m, const Tolerance& tol = {});

//! Kronecker product with entry (i1*rows(b)+i2, j1*cols(b)+j2) = a(i1,j1)*b(i2,j2).
template <typename DerivedA, typename DerivedB>
CMatrix kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = Complex(a(i, j)) * b;
  return out;
}

struct EigenvalueCluster {
  double value;      // cluster mean
  int multiplicity;
};

//! Groups an ascending eigenvalue list into clusters: a new cluster starts
//! whenever the gap to the previous eigenvalue exceeds width.
std::vector<EigenvalueCluster> cluster_eigenvalues(const RVector& ascending, double width);

//! e_{ij} matrix unit of size n (1-entry at row i, col j).
inline CMatrix matrix_unit(Index n, Index i, Index j) {
  CMatrix m = CMatrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

}  // namespace qcl
