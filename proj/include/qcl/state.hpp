#pragma once

#include "qcl/numcore.hpp"

namespace qcl {

struct SpectralCluster {
  double eigenvalue;  // cluster mean, strictly positive
  int multiplicity;
};

//! Density matrix Omega (Hermitian, PSD, unit trace) with its clustered
//! spectrum. Eigenvalues <= eps_cluster form the kernel block; the remaining
//! ones are grouped into multiplicity clusters listed in descending order.
class State {
public:
  static State from_density(const CMatrix& omega, const Tolerance& tol = {});

  const CMatrix& omega() const { return omega_; }
  Index dim() const { return omega_.rows(); }
  const RVector& eigenvalues() const { return eigenvalues_; }  // ascending
  const CMatrix& eigenvectors() const { return eigenvectors_; }
  const std::vector<SpectralCluster>& clusters() const { return clusters_; }
  int kernel_multiplicity() const { return kernel_multiplicity_; }
  int support_rank() const { return static_cast<int>(dim()) - kernel_multiplicity_; }
  bool faithful() const { return kernel_multiplicity_ == 0; }

private:
  CMatrix omega_;
  RVector eigenvalues_;
  CMatrix eigenvectors_;
  std::vector<SpectralCluster> clusters_;  // descending, kernel excluded
  int kernel_multiplicity_ = 0;
};

//! Element {x, X} of G_rho: x real, X unitary commuting with Omega. Equality
//! is modulo a global phase of X.
class GaugeElement {
public:
  static GaugeElement make(double x, const CMatrix& unitary, const State& state,
                           const Tolerance& tol = {});

  double x() const { return x_; }
  const CMatrix& X() const { return X_; }
  const CMatrix& omega() const { return omega_; }

private:
  double x_ = 0.0;
  CMatrix X_;
  CMatrix omega_;
};

}  // namespace qcl
