#pragma once

#include "qcl/qpos.hpp"

namespace qcl {

//! Data for the 2x2 assembly Theta((A_ij)) = (phi(A11), gamma(A12);
//! gamma*(A21), psi(A22)). phi acts on M_n, psi on M_{n'}, gamma on the
//! (n, n') rectangle slots.
struct CornerSpec {
  MatrixMap phi;
  MatrixMap psi;
  MatrixMap gamma;
};

MatrixMap assemble_2x2(const CornerSpec& spec);

//! gamma is a corner iff the assembled Theta is completely positive.
CpVerdict is_corner(const CornerSpec& spec, const Tolerance& tol = {});

//! gamma is a q-corner iff Theta >=_q 0 (grid certificate).
PsdCertificate is_q_corner(const CornerSpec& spec, const TGrid& grid, const Tolerance& tol = {});

//! Parameters of the rank-one corner normal form
//! gamma(A) = lambda tr(X* A Omega) X, lambda = 1/(1+ix) on the hyper-maximal
//! circle |lambda|^2 = Re(lambda). X must commute with Omega; in Omega's
//! eigenbasis it splits into a support block V (unitary for a q-corner) and a
//! kernel block E (a contraction, unitary exactly in the hyper-maximal case).
struct RankOneCornerParams {
  Complex lambda;
  CMatrix X;
  State omega;
  bool x_form = false;  // constructed from real x, X asserted unitary

  static RankOneCornerParams from_x(double x, const CMatrix& X, const State& omega);
  static RankOneCornerParams from_lambda(Complex lambda, const CMatrix& X, const State& omega);
};

MatrixMap build_rank_one_qcorner(const RankOneCornerParams& p, const Tolerance& tol = {});

struct HypermaxVerdict {
  bool verdict;
  std::vector<std::string> reasons;  // failed conditions, empty when verdict is true
};

//! Hyper-maximality of the rank-one corner: square sides, 0 < |lambda|^2 =
//! Re(lambda), and the kernel block E unitary (the support block V must be
//! unitary for the map to be a q-corner at all; a failure there is reported
//! too).
HypermaxVerdict is_hypermax_rank_one(const RankOneCornerParams& p, const Tolerance& tol = {});

struct App216Result {
  bool is_positive;
  bool equivalence_holds;  // is_positive == (||Z - XY||_max <= eps_eq)
  double min_eig;
  double z_residual;    // ||Z - XY||_max
};

//! The 3x3 block matrix T = (I, Y, X*; Y*, I, Z*; X, Z, I) with X, Y unitary
//! is positive iff Z = XY.
App216Result check_app216(const CMatrix& X, const CMatrix& Y, const CMatrix& Z,
                          const Tolerance& tol = {});

//! The zero-sum Schur map with lambda = ((x-y)/3, (x+2y)/3, (-2x-y)/3) and
//! N_t = [sigma(I+t sigma)^{-1}](all-ones). Closed form of N_t:
//! diagonal 1/(1+t), (1,2) = 1/(1+t-iy), (1,3) = 1/(1+t+ix),
//! (2,3) = 1/(1+t+i(x+y)), conjugate-transpose below the diagonal.
std::pair<MatrixMap, CMatrix> sigma_map_and_Nt(double x, double y, double t);

//! Closed form of N_t, used as the fast path and as a test oracle.
CMatrix nt_closed_form(double x, double y, double t);

//! The 3x3 block map on M_{3n} from the gauge composition argument:
//! diagonal blocks phi(A) = tr(A Omega) I, corners gamma_{y,Y}, gamma*_{x,X},
//! gamma*_{x+y,Z}, and their mirror images. z23 is the unitary of the
//! (3,2)/(2,3) corner pair; the group law takes z23 = XY.
MatrixMap assemble_gauge_theta(const State& omega, const GaugeElement& g, const GaugeElement& h,
                               const CMatrix& z23, const Tolerance& tol = {});

struct GaugeCompositionCertificate {
  PsdCertificate full;              // 9n^2-dimensional Choi path
  std::vector<double> nt_min_eigs;  // fast path, least eigenvalue of N_t per grid point
  bool fast_verdict = false;
  bool paths_agree = false;         // per-point verdicts coincide
};

//! Certifies the 3x3 assembly with the (x+y, XY) corner over the grid, and
//! cross-checks the N_t fast path.
GaugeCompositionCertificate verify_gauge_composition(const State& omega, const GaugeElement& g,
                                                     const GaugeElement& h, const TGrid& grid,
                                                     const Tolerance& tol = {});

}  // namespace qcl
