#pragma once

#include "qcl/cpmaps.hpp"
#include "qcl/state.hpp"

namespace qcl {

//! Certification grid: strictly increasing t values starting at 0.
struct TGrid {
  std::vector<double> ts;

  //! {0} followed by `count` log-spaced points in [t_lo, t_hi].
  static TGrid log_grid(double t_lo, double t_hi, int count);
  //! {0} + 121 log-spaced points in [1e-3, 1e3].
  static TGrid default_grid();
  void validate() const;
  std::size_t size() const { return ts.size(); }
};

enum class CertMode { Auto, ExactSchur, NumericGrid };

//! Evidence record for a grid certification sweep. In numeric-grid mode the
//! per-t numbers are least Choi eigenvalues; in exact-schur mode they are the
//! least eigenvalues of the t-transformed Schur coefficient matrix, which is
//! the complete positivity condition at that t. Certificates are numerical
//! evidence over the grid, not proofs, except where the exact-schur reduction
//! makes the per-t test complete.
struct PsdCertificate {
  std::vector<double> grid;      // t values evaluated
  std::vector<double> min_eigs;  // per grid point
  std::vector<bool> point_ok;    // per grid point, relative floor applied
  bool verdict = false;
  CertMode mode = CertMode::NumericGrid;
  bool spectrum_ok = true;          // no eigenvalue on the open negative real axis
  std::vector<double> skipped;      // t values where I + t phi was singular
};

struct SpectrumReport {
  std::vector<Complex> eigenvalues;       // of phi acting on the matrix space
  bool negative_axis_flag = false;        // some eigenvalue within eps of (-inf, 0)
};

//! Spectrum of phi as an operator on the matrix space (basis e_ij).
SpectrumReport map_spectrum(const MatrixMap& phi, const Tolerance& tol = {});

//! phi (I + t phi)^{-1}, computed by solving (I + t phi) X = phi columnwise.
//! Throws SingularResolvent when -1/t is an eigenvalue of phi.
MatrixMap q_resolvent(const MatrixMap& phi, double t);

//! Grid certification of q-positivity: spectrum flag, then per-t complete
//! positivity of the resolvent. Auto mode switches to the exact Schur path
//! when phi is a Schur map.
PsdCertificate certify_q_positive(const MatrixMap& phi, const TGrid& grid,
                                  const Tolerance& tol = {}, CertMode mode = CertMode::Auto);

//! Per-t Choi PSD check of phi(I+t phi)^{-1} - psi(I+t psi)^{-1}.
PsdCertificate q_dominates(const MatrixMap& phi, const MatrixMap& psi, const TGrid& grid,
                           const Tolerance& tol = {});

//! A rank-one unital map phi(A)=rho(A)I is q-pure iff rho is faithful.
bool is_q_pure_rank_one(const State& omega, const Tolerance& tol = {});

//! Canonical invertible unital q-pure Schur map with coefficients
//! q_jk = 1/(1+i(lambda_j - lambda_k)); requires sum(lambda) = 0.
MatrixMap build_lambda_schur(const RVector& lambda, const Tolerance& tol = {});

//! Inverts the coefficients via lambda_j - lambda_k = -i(1/q_jk - 1), checks
//! global consistency, and fixes the gauge sum(lambda) = 0. The vector comes
//! back in input-basis order, not sorted.
RVector recover_lambda(const MatrixMap& phi, const Tolerance& tol = {});

}  // namespace qcl
