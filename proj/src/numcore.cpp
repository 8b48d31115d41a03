#include "qcl/numcore.hpp"

namespace qcl {

HermitianEig hermitian_eig(const CMatrix& m, const Tolerance& tol) {
  tol.validate();
  if (m.rows() != m.cols()) fail(Errc::DimensionMismatch, "hermitian_eig needs a square matrix");
  if (!all_finite(m)) fail(Errc::NotHermitian, "matrix has non-finite entries");
  if (!is_hermitian(m, tol.eps_eq)) fail(Errc::NotHermitian, "symmetry check failed");
  CMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) fail(Errc::NoConvergence, "eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

PsdVerdict is_psd(const CMatrix& m, const Tolerance& tol) {
  HermitianEig eig = hermitian_eig(m, tol);
  double lo = eig.eigenvalues.size() ? eig.eigenvalues(0) : 0.0;
  double hi = eig.eigenvalues.size() ? eig.eigenvalues(eig.eigenvalues.size() - 1) : 0.0;
  double spread = std::max(std::abs(lo), std::abs(hi));
  return {lo >= -tol.eps_psd * (1.0 + spread), lo, spread};
}

bool is_unitary(const CMatrix& m, const Tolerance& tol) {
  tol.validate();
  if (m.rows() != m.cols()) return false;
  CMatrix gram = m.adjoint() * m;
  gram.diagonal().array() -= 1.0;
  return max_abs(gram) <= tol.eps_eq;
}

std::vector<EigenvalueCluster> cluster_eigenvalues(const RVector& ascending, double width) {
  std::vector<EigenvalueCluster> clusters;
  for (Index i = 0; i < ascending.size(); ++i) {
    if (clusters.empty() ||
        ascending(i) - ascending(i - 1) > width) {
      clusters.push_back({ascending(i), 1});
    } else {
      EigenvalueCluster& c = clusters.back();
      c.value = (c.value * c.multiplicity + ascending(i)) / (c.multiplicity + 1);
      ++c.multiplicity;
    }
  }
  return clusters;
}

}  // namespace qcl
