#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcl {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

//! Failure categories surfaced by the library.
enum class Errc {
  NotHermitian,
  NoConvergence,
  DimensionMismatch,
  NotUnitary,
  NotSchur,
  BadDecomposition,
  NotGeneralizedSchur,
  HypothesisFails,
  NotContractive,
  SingularResolvent,
  NotAState,
  MixedStates,
  LambdaSumNonzero,
  NotCanonical,
  NotCommuting,
  QuadratureDivergent,
  Inconclusive,
  SchemaError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

//! Tolerance policy shared by every certification routine.
//!
//! eps_psd is a *relative* eigenvalue floor: a Hermitian matrix passes the PSD
//! test when its least eigenvalue is >= -eps_psd*(1+max|eig|), so verdicts are
//! stable across dimensions and scalings. eps_eq guards entrywise equality
//! checks, eps_cluster is the absolute gap used when grouping eigenvalues into
//! multiplicity clusters.
struct Tolerance {
  double eps_psd = 1e-9;
  double eps_eq = 1e-9;
  double eps_cluster = 1e-8;

  void validate() const {
    auto ok = [](double e) { return e > 0.0 && e < 1e-2; };
    if (!ok(eps_psd) || !ok(eps_eq) || !ok(eps_cluster))
      fail(Errc::SchemaError, "tolerances must be strictly positive and < 1e-2");
  }
};

//! Worker count for grid sweeps: QCL_THREADS env var, else hardware concurrency.
std::size_t worker_count();

//! Runs fn(i) for i in [0,n) on up to worker_count() threads. Callers write
//! results into preallocated slots indexed by i, so reductions stay in grid
//! order no matter how the work is scheduled.
void parallel_for_index(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace qcl
