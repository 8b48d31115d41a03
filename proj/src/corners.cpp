#include "qcl/corners.hpp"

namespace qcl {

MatrixMap assemble_2x2(const CornerSpec& spec) {
  const MatrixMap& phi = spec.phi;
  const MatrixMap& psi = spec.psi;
  const MatrixMap& gamma = spec.gamma;
  if (!phi.square() || !psi.square())
    fail(Errc::DimensionMismatch, "diagonal blocks must act on square algebras");
  Index n = phi.n_in(), np = psi.n_in();
  if (phi.n_out() != n || psi.n_out() != np)
    fail(Errc::DimensionMismatch, "diagonal blocks must be endomorphisms");
  if (gamma.in_rows() != n || gamma.in_cols() != np || gamma.out_rows() != n ||
      gamma.out_cols() != np)
    fail(Errc::DimensionMismatch, "corner block must act on the (n, n') rectangle slots");
  Decomposition d({n, np});
  return assemble_generalized_schur(d, d, {{phi, gamma}, {adjoint_map(gamma), psi}});
}

CpVerdict is_corner(const CornerSpec& spec, const Tolerance& tol) {
  return is_completely_positive(assemble_2x2(spec), tol);
}

PsdCertificate is_q_corner(const CornerSpec& spec, const TGrid& grid, const Tolerance& tol) {
  return certify_q_positive(assemble_2x2(spec), grid, tol, CertMode::NumericGrid);
}

RankOneCornerParams RankOneCornerParams::from_x(double x, const CMatrix& X, const State& omega) {
  RankOneCornerParams p{Complex(1.0, 0.0) / Complex(1.0, x), X, omega, true};
  return p;
}

RankOneCornerParams RankOneCornerParams::from_lambda(Complex lambda, const CMatrix& X,
                                                     const State& omega) {
  return RankOneCornerParams{lambda, X, omega, false};
}

namespace {

void check_commutes(const CMatrix& X, const State& omega, const Tolerance& tol) {
  if (X.rows() != omega.dim() || X.cols() != omega.dim())
    fail(Errc::DimensionMismatch, "X has wrong size for Omega");
  const CMatrix& w = omega.omega();
  if (max_abs(X * w - w * X) > tol.eps_eq * (1.0 + max_abs(X)) * (1.0 + max_abs(w)))
    fail(Errc::NotCommuting, "X does not commute with Omega");
}

}  // namespace

MatrixMap build_rank_one_qcorner(const RankOneCornerParams& p, const Tolerance& tol) {
  tol.validate();
  check_commutes(p.X, p.omega, tol);
  if (p.x_form && !is_unitary(p.X, tol))
    fail(Errc::NotUnitary, "the {x, X} form needs a unitary X");
  Index n = p.omega.dim();
  // gamma(e_rs) = lambda tr(X* e_rs Omega) X = lambda (Omega X*)_{sr} X
  CMatrix ox = p.omega.omega() * p.X.adjoint();
  CMatrix choi(n * n, n * n);
  for (Index r = 0; r < n; ++r)
    for (Index s = 0; s < n; ++s)
      choi.block(r * n, s * n, n, n) = p.lambda * ox(s, r) * p.X;
  return MatrixMap(n, n, n, n, std::move(choi));
}

HypermaxVerdict is_hypermax_rank_one(const RankOneCornerParams& p, const Tolerance& tol) {
  tol.validate();
  check_commutes(p.X, p.omega, tol);
  HypermaxVerdict result{true, {}};

  double circle = std::norm(p.lambda) - p.lambda.real();
  double margin = tol.eps_eq * (1.0 + std::norm(p.lambda));
  if (std::abs(p.lambda) <= tol.eps_eq) {
    result.verdict = false;
    result.reasons.push_back("lambda = 0");
  } else if (circle > margin) {
    result.verdict = false;
    result.reasons.push_back("|lambda|^2 > Re(lambda): not a q-corner");
  } else if (circle < -margin) {
    result.verdict = false;
    result.reasons.push_back("|lambda|^2 < Re(lambda) strictly");
  }

  // V/E split of X in Omega's eigenbasis; eigenvalues ascend, the kernel
  // cluster (eigenvalues <= eps_cluster) comes first.
  const CMatrix& basis = p.omega.eigenvectors();
  CMatrix xt = basis.adjoint() * p.X * basis;
  Index k0 = p.omega.kernel_multiplicity();
  Index n = p.omega.dim();
  if (k0 > 0) {
    CMatrix e_block = xt.topLeftCorner(k0, k0);
    if (!is_unitary(e_block, tol)) {
      result.verdict = false;
      result.reasons.push_back("E not unitary");
    }
  }
  CMatrix v_block = xt.bottomRightCorner(n - k0, n - k0);
  if (!is_unitary(v_block, tol)) {
    result.verdict = false;
    result.reasons.push_back("V not unitary: not of the q-corner normal form");
  }
  return result;
}

App216Result check_app216(const CMatrix& X, const CMatrix& Y, const CMatrix& Z,
                          const Tolerance& tol) {
  tol.validate();
  Index n = X.rows();
  if (X.cols() != n || Y.rows() != n || Y.cols() != n || Z.rows() != n || Z.cols() != n)
    fail(Errc::DimensionMismatch, "X, Y, Z must be square of equal size");
  if (!is_unitary(X, tol)) fail(Errc::NotUnitary, "X is not unitary");
  if (!is_unitary(Y, tol)) fail(Errc::NotUnitary, "Y is not unitary");

  CMatrix t = CMatrix::Identity(3 * n, 3 * n);
  t.block(0, n, n, n) = Y;
  t.block(0, 2 * n, n, n) = X.adjoint();
  t.block(n, 0, n, n) = Y.adjoint();
  t.block(n, 2 * n, n, n) = Z.adjoint();
  t.block(2 * n, 0, n, n) = X;
  t.block(2 * n, n, n, n) = Z;

  PsdVerdict v = is_psd(t, tol);
  double z_res = max_abs(Z - X * Y);
  bool z_matches = z_res <= tol.eps_eq;
  return {v.verdict, v.verdict == z_matches, v.min_eig, z_res};
}

CMatrix nt_closed_form(double x, double y, double t) {
  CMatrix n(3, 3);
  auto inv = [](double re, double im) { return Complex(1.0, 0.0) / Complex(re, im); };
  n(0, 0) = n(1, 1) = n(2, 2) = inv(1.0 + t, 0.0);
  n(0, 1) = inv(1.0 + t, -y);
  n(0, 2) = inv(1.0 + t, x);
  n(1, 2) = inv(1.0 + t, x + y);
  n(1, 0) = std::conj(n(0, 1));
  n(2, 0) = std::conj(n(0, 2));
  n(2, 1) = std::conj(n(1, 2));
  return n;
}

std::pair<MatrixMap, CMatrix> sigma_map_and_Nt(double x, double y, double t) {
  if (!(t >= 0.0)) fail(Errc::SchemaError, "sigma_map_and_Nt needs t >= 0");
  RVector lambda(3);
  lambda << (x - y) / 3.0, (x + 2.0 * y) / 3.0, (-2.0 * x - y) / 3.0;
  lambda(2) = -(lambda(0) + lambda(1));  // zero sum exactly, despite rounding
  MatrixMap sigma = build_lambda_schur(lambda);
  CMatrix nt = q_resolvent(sigma, t).apply(CMatrix::Ones(3, 3));
  return {std::move(sigma), std::move(nt)};
}

MatrixMap assemble_gauge_theta(const State& omega, const GaugeElement& g, const GaugeElement& h,
                               const CMatrix& z23, const Tolerance& tol) {
  tol.validate();
  if (max_abs(g.omega() - omega.omega()) > tol.eps_eq * (1.0 + max_abs(omega.omega())) ||
      max_abs(h.omega() - omega.omega()) > tol.eps_eq * (1.0 + max_abs(omega.omega())))
    fail(Errc::MixedStates, "gauge elements are defined over a different Omega");
  Index n = omega.dim();
  MatrixMap phi = MatrixMap::rank_one_state_map(omega.omega());
  MatrixMap g_x = build_rank_one_qcorner(RankOneCornerParams::from_x(g.x(), g.X(), omega), tol);
  MatrixMap g_y = build_rank_one_qcorner(RankOneCornerParams::from_x(h.x(), h.X(), omega), tol);
  MatrixMap g_xy =
      build_rank_one_qcorner(RankOneCornerParams::from_x(g.x() + h.x(), z23, omega), tol);
  Decomposition d({n, n, n});
  return assemble_generalized_schur(
      d, d,
      {{phi, g_y, adjoint_map(g_x)},
       {adjoint_map(g_y), phi, adjoint_map(g_xy)},
       {g_x, g_xy, phi}});
}

GaugeCompositionCertificate verify_gauge_composition(const State& omega, const GaugeElement& g,
                                                     const GaugeElement& h, const TGrid& grid,
                                                     const Tolerance& tol) {
  MatrixMap theta = assemble_gauge_theta(omega, g, h, CMatrix(g.X() * h.X()), tol);
  GaugeCompositionCertificate cert;
  cert.full = certify_q_positive(theta, grid, tol, CertMode::NumericGrid);

  cert.nt_min_eigs.resize(cert.full.grid.size());
  std::vector<char> fast_ok(cert.full.grid.size(), 0);
  parallel_for_index(cert.full.grid.size(), [&](std::size_t k) {
    CMatrix nt = nt_closed_form(g.x(), h.x(), cert.full.grid[k]);
    PsdVerdict v = is_psd(nt, tol);
    cert.nt_min_eigs[k] = v.min_eig;
    fast_ok[k] = v.verdict ? 1 : 0;
  });
  cert.fast_verdict = true;
  cert.paths_agree = true;
  for (std::size_t k = 0; k < fast_ok.size(); ++k) {
    cert.fast_verdict = cert.fast_verdict && fast_ok[k];
    if ((fast_ok[k] != 0) != cert.full.point_ok[k]) cert.paths_agree = false;
  }
  cert.paths_agree = cert.paths_agree && (cert.fast_verdict == cert.full.verdict);
  return cert;
}

}  // namespace qcl
