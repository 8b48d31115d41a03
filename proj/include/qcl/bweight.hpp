#pragma once

#include "qcl/cpmaps.hpp"
#include "qcl/qpos.hpp"

namespace qcl {

//! Adaptive composite Gauss-Legendre integration of a smooth integrand on a
//! finite interval; deterministic pairwise recursion.
double adaptive_quad(const std::function<double(double)>& f, double a, double b, double abs_tol);

struct WeightMoments {
  double t;
  double nu_I;       // nu_t(I)  = integral_t^inf |h|^2
  double nu_Lambda;  // nu_t(Lambda) = integral_t^inf e^{-x} |h|^2
};

enum class WeightType { TypeI, TypeII };

struct WeightClassification {
  WeightType type;
  std::vector<WeightMoments> diagnostics;  // moment sequence used for the call
};

enum class WeightFamily { Indicator, Exponential, PowerLaw, Grid };

//! Rank-one boundary weight nu(A) = scale * (h, A h), where h is the density
//! profile on (0, inf). The unit-normalized families satisfy nu(I - Lambda) =
//! integral (1 - e^{-x}) |h|^2 = 1; `scaled` produces the sub-normalized
//! positive boundary weights c*nu (c <= 1) used in subordination checks.
//!
//! Families:
//!   indicator(a, b):  h = [(b-a)(1-e^{-x})]^{-1/2} on (a, b)     (f = chi/(b-a)^{1/2})
//!   exponential:      h = e^{-x/2}(1-e^{-x})^{-1/2}              (f = e^{-x/2})
//!   power_law:        h = c x^{-1/2} on (0, 1), c fixed by normalization
//!   grid(xs, fs):     f piecewise linear through the samples, h = f(1-e^{-x})^{-1/2}
class PowersWeight {
public:
  static PowersWeight indicator(double a, double b);
  static PowersWeight exponential();
  static PowersWeight power_law();
  static PowersWeight grid(const RVector& xs, const RVector& fs);
  static PowersWeight scaled(const PowersWeight& base, double scale);

  WeightFamily family() const { return family_; }
  double scale() const { return scale_; }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }  // +inf for the exponential family
  double eps_quad() const { return eps_quad_; }
  double indicator_a() const { return a_; }
  double indicator_b() const { return b_; }
  const RVector& grid_xs() const { return xs_; }
  const RVector& grid_fs() const { return fs_; }  // stored normalized

  //! Profile value h(x) including the sqrt of the scale factor.
  double h(double x) const;

  double nu_I(double t) const;
  double nu_Lambda(double t) const;
  //! Truncated moments; QuadratureDivergent when t <= 0 on a type II weight.
  WeightMoments moments(double t) const;

  WeightClassification classify() const;

  //! (g_t, u) = integral_t^inf h(x) u(x) dx for a grid test function u.
  Complex g_inner(const struct TestFunction& u, double t) const;
  //! integral_t^inf h_a h_b dx over the common support.
  static double cross_inner(const PowersWeight& a, const PowersWeight& b, double t);

private:
  PowersWeight() = default;
  WeightFamily family_ = WeightFamily::Indicator;
  double a_ = 0.0, b_ = 1.0;  // indicator bounds
  double c2_ = 1.0;           // power-law normalization |h|^2 = c2/x
  RVector xs_, fs_;           // grid family samples
  double lo_ = 0.0, hi_ = 1.0;
  double scale_ = 1.0;
  double eps_quad_ = 1e-10;
};

//! Piecewise-linear complex test function on a sample grid, zero outside.
struct TestFunction {
  RVector xs;
  CVector vals;
  Complex eval(double x) const;
};

//! Finite-rank test operator: c_I * I + c_L * Lambda + sum coeff |u><v|.
struct TestOperator {
  Complex c_identity{0.0, 0.0};
  Complex c_lambda{0.0, 0.0};
  struct Kernel {
    Complex coeff;
    TestFunction u, v;
  };
  std::vector<Kernel> kernels;

  static TestOperator identity();
  static TestOperator zero();
  void accumulate(const TestOperator& other, Complex c);
};

using TestOperatorMatrix = std::vector<std::vector<TestOperator>>;

TestOperatorMatrix identity_test_matrix(Index n);

//! nu_t applied to a single test operator.
Complex nu_t_of(const PowersWeight& nu, double t, const TestOperator& op);

//! Omega_{nu_t}(B): the n x n matrix (nu_t(B_ij)).
CMatrix omega_nu_t(const PowersWeight& nu, double t, const TestOperatorMatrix& b);

//! Generalized boundary representation of the double (phi, nu):
//! pi_t(B) = phi(I + nu_t(Lambda) phi)^{-1}(Omega_{nu_t}(B)).
CMatrix boundary_rep_double(const MatrixMap& phi, const PowersWeight& nu, double t,
                            const TestOperatorMatrix& b, const Tolerance& tol = {});

//! kappa for scalar contractions u over the rank-one weight: the supremum of
//! Re(1-u) nu_t(Lambda) over the grid, infinite exactly when Re(1-u) > 0 on a
//! type II weight.
struct Kappa {
  bool infinite;
  double value;  // meaningful when finite
};

Kappa kappa_scalar(const PowersWeight& nu, Complex u, const TGrid& grid,
                   const Tolerance& tol = {});

//! q-corner test for gamma = nu/(1+x): per-t PSD of the 2x2 scalar matrix
//! [[1/(1+s), 1/(1+x+s)], [conj, 1/(1+s)]] with s = nu_t(Lambda); the
//! hyper-maximal flag is Re(x) = 0. The matrix fails PSD exactly when
//! 2(1+s)Re(x) + |x|^2 < 0, so on a type II weight (s unbounded as t -> 0+)
//! any Re(x) < 0 eventually fails even when every grid point passes; that
//! analytic tail is part of the verdict and reported separately.
struct WeightQcornerCertificate {
  PsdCertificate cert;          // over the positive grid points
  bool hyper_maximal = false;
  bool tail_violation = false;  // fails for some t below the grid range
};

WeightQcornerCertificate weight_qcorner_check(const PowersWeight& nu, Complex x, const TGrid& grid,
                                              const Tolerance& tol = {});

//! nu_t/(1+nu_t(Lambda)) - eta_t/(1+eta_t(Lambda)) positive for every grid t.
//! For rank-one weights this reduces to direction proportionality of the
//! truncated profiles plus the scalar inequality on nu_t(I)/(1+nu_t(Lambda)).
struct SubordinationReport {
  bool verdict;
  double max_direction_residual;  // 1 - cos^2 of the worst profile angle
  double min_margin;              // worst scalar slack
};

SubordinationReport weight_q_subordinate(const PowersWeight& nu, const PowersWeight& eta,
                                         const TGrid& grid, const Tolerance& tol = {});

//! Conjugation covariance of the boundary representation:
//! || pi_t^{(phi_U, nu)}(B) - U* pi_t^{(phi, nu)}((U x 1) B (U* x 1)) U ||_max.
double conjugation_covariance_check(const MatrixMap& phi, const CMatrix& u, const PowersWeight& nu,
                                    double t, const TestOperatorMatrix& b,
                                    const Tolerance& tol = {});

//! The 2x2 generalized boundary representation of the double corner: per grid
//! t, the blockwise map (phi_s, gamma_s; gamma*_s, phi_s) with s = nu_t(Lambda)
//! must be completely positive. Equivalent to Choi PSD-ness of
//! Theta(I + s Theta)^{-1} for the assembled Theta.
PsdCertificate double_boundary_rep_certificate(const MatrixMap& phi, const MatrixMap& gamma,
                                               const PowersWeight& nu, const TGrid& grid,
                                               const Tolerance& tol = {});

}  // namespace qcl
