#include "qcl/state.hpp"

namespace qcl {

State State::from_density(const CMatrix& omega, const Tolerance& tol) {
  tol.validate();
  if (omega.rows() != omega.cols() || omega.rows() == 0)
    fail(Errc::NotAState, "density matrix must be square and non-empty");
  if (!all_finite(omega)) fail(Errc::NotAState, "density matrix has non-finite entries");
  if (!is_hermitian(omega, tol.eps_eq)) fail(Errc::NotAState, "density matrix is not Hermitian");

  State s;
  s.omega_ = 0.5 * (omega + omega.adjoint());
  HermitianEig eig = hermitian_eig(s.omega_, tol);
  s.eigenvalues_ = eig.eigenvalues;
  s.eigenvectors_ = eig.eigenvectors;

  double lo = s.eigenvalues_(0);
  double hi = s.eigenvalues_(s.eigenvalues_.size() - 1);
  if (lo < -tol.eps_eq * (1.0 + std::abs(hi))) fail(Errc::NotAState, "density matrix is not PSD");
  double trace = s.eigenvalues_.sum();
  if (std::abs(trace - 1.0) > tol.eps_eq * (1.0 + std::abs(trace)))
    fail(Errc::NotAState, "density matrix does not have unit trace");
  if (hi > 1.0 + tol.eps_eq) fail(Errc::NotAState, "eigenvalue above 1");

  for (Index i = 0; i < s.eigenvalues_.size(); ++i)
    if (s.eigenvalues_(i) <= tol.eps_cluster) ++s.kernel_multiplicity_;

  RVector support(s.eigenvalues_.size() - s.kernel_multiplicity_);
  for (Index i = 0; i < support.size(); ++i)
    support(i) = s.eigenvalues_(s.kernel_multiplicity_ + i);
  std::vector<EigenvalueCluster> asc = cluster_eigenvalues(support, tol.eps_cluster);
  for (auto it = asc.rbegin(); it != asc.rend(); ++it)
    s.clusters_.push_back({it->value, it->multiplicity});
  return s;
}

GaugeElement GaugeElement::make(double x, const CMatrix& unitary, const State& state,
                                const Tolerance& tol) {
  tol.validate();
  if (!std::isfinite(x)) fail(Errc::SchemaError, "gauge element x must be finite");
  if (unitary.rows() != state.dim() || unitary.cols() != state.dim())
    fail(Errc::DimensionMismatch, "gauge element unitary has wrong size");
  if (!is_unitary(unitary, tol)) fail(Errc::NotUnitary, "gauge element X is not unitary");
  const CMatrix& omega = state.omega();
  if (max_abs(unitary * omega - omega * unitary) > tol.eps_eq * (1.0 + max_abs(omega)))
    fail(Errc::NotCommuting, "gauge element X does not commute with Omega");
  GaugeElement g;
  g.x_ = x;
  g.X_ = unitary;
  g.omega_ = omega;
  return g;
}

}  // namespace qcl
