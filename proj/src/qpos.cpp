#include "qcl/qpos.hpp"

#include <cmath>
#include <sstream>

namespace qcl {

TGrid TGrid::log_grid(double t_lo, double t_hi, int count) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo) || count < 2)
    fail(Errc::SchemaError, "log grid needs 0 < t_lo < t_hi and count >= 2");
  TGrid g;
  g.ts.reserve(static_cast<std::size_t>(count) + 1);
  g.ts.push_back(0.0);
  double llo = std::log10(t_lo), lhi = std::log10(t_hi);
  for (int k = 0; k < count; ++k)
    g.ts.push_back(std::pow(10.0, llo + (lhi - llo) * k / (count - 1)));
  g.validate();
  return g;
}

TGrid TGrid::default_grid() { return log_grid(1e-3, 1e3, 121); }

void TGrid::validate() const {
  if (ts.empty() || ts.front() != 0.0) fail(Errc::SchemaError, "grid must start at t = 0");
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (!(ts[i] > ts[i - 1]) || !std::isfinite(ts[i]))
      fail(Errc::SchemaError, "grid must be strictly increasing and finite");
}

SpectrumReport map_spectrum(const MatrixMap& phi, const Tolerance& tol) {
  tol.validate();
  if (!phi.endomorphism())
    fail(Errc::DimensionMismatch, "map_spectrum needs an endomorphism");
  Eigen::ComplexEigenSolver<CMatrix> solver(phi.transfer(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) fail(Errc::NoConvergence, "eigensolver did not converge");
  SpectrumReport report;
  report.eigenvalues.assign(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + solver.eigenvalues().size());
  double scale = 1.0;
  for (const Complex& ev : report.eigenvalues) scale = std::max(scale, std::abs(ev));
  double eps = tol.eps_eq * scale;
  for (const Complex& ev : report.eigenvalues)
    if (ev.real() < -eps && std::abs(ev.imag()) <= eps) report.negative_axis_flag = true;
  return report;
}

MatrixMap q_resolvent(const MatrixMap& phi, double t) {
  if (!phi.endomorphism()) fail(Errc::DimensionMismatch, "q_resolvent needs an endomorphism");
  if (!(t >= 0.0)) fail(Errc::SchemaError, "q_resolvent needs t >= 0");
  if (t == 0.0) return phi;
  CMatrix transfer = phi.transfer();
  CMatrix lhs = CMatrix::Identity(transfer.rows(), transfer.cols()) + t * transfer;
  Eigen::FullPivLU<CMatrix> lu(lhs);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    std::ostringstream msg;
    msg << "I + t*phi is singular at t = " << t;
    fail(Errc::SingularResolvent, msg.str());
  }
  CMatrix resolvent = lu.solve(transfer);
  return MatrixMap::from_transfer(phi.in_rows(), phi.in_cols(), phi.out_rows(), phi.out_cols(),
                                  resolvent);
}

namespace {

struct PointResult {
  double min_eig = 0.0;
  double scale = 0.0;
  bool ok = false;
  bool skipped = false;
};

PsdCertificate sweep_grid(const TGrid& grid, CertMode mode,
                          const std::function<PointResult(double)>& evaluate) {
  grid.validate();
  std::vector<PointResult> results(grid.ts.size());
  parallel_for_index(grid.ts.size(),
                     [&](std::size_t k) { results[k] = evaluate(grid.ts[k]); });
  PsdCertificate cert;
  cert.mode = mode;
  bool all_ok = true;
  for (std::size_t k = 0; k < results.size(); ++k) {
    if (results[k].skipped) {
      cert.skipped.push_back(grid.ts[k]);
      all_ok = false;
      continue;
    }
    cert.grid.push_back(grid.ts[k]);
    cert.min_eigs.push_back(results[k].min_eig);
    cert.point_ok.push_back(results[k].ok);
    all_ok = all_ok && results[k].ok;
  }
  cert.verdict = all_ok;
  return cert;
}

}  // namespace

PsdCertificate certify_q_positive(const MatrixMap& phi, const TGrid& grid, const Tolerance& tol,
                                  CertMode mode) {
  tol.validate();
  if (!phi.endomorphism() || !phi.square())
    fail(Errc::DimensionMismatch, "q-positivity is defined for endomorphisms of M_n");

  if (mode == CertMode::Auto)
    mode = is_schur(phi, tol) ? CertMode::ExactSchur : CertMode::NumericGrid;

  SpectrumReport spectrum = map_spectrum(phi, tol);

  PsdCertificate cert;
  if (mode == CertMode::ExactSchur) {
    // Per t the resolvent is again Schur with coefficients q/(1+tq), and its
    // complete positivity is exactly PSD-ness of that k x k matrix. For the
    // zero-sum lambda family the transformed coefficients 1/(1+t+i(l_j-l_k))
    // are a Gram matrix of damped exponentials, PSD at every t.
    CMatrix q = schur_coefficients(phi, tol);
    cert = sweep_grid(grid, CertMode::ExactSchur, [&](double t) -> PointResult {
      Index n = q.rows();
      CMatrix qt(n, n);
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
          Complex denom = 1.0 + t * q(i, j);
          if (std::abs(denom) < 1e-12) return {0.0, 0.0, false, true};
          qt(i, j) = q(i, j) / denom;
        }
      }
      if (!is_hermitian(qt, tol.eps_eq)) {
        PsdVerdict hv = is_psd(CMatrix(0.5 * (qt + qt.adjoint())), tol);
        return {hv.min_eig, hv.max_abs_eig, false, false};
      }
      PsdVerdict v = is_psd(qt, tol);
      return {v.min_eig, v.max_abs_eig, v.verdict, false};
    });
  } else {
    cert = sweep_grid(grid, CertMode::NumericGrid, [&](double t) -> PointResult {
      MatrixMap res = phi;
      try {
        res = q_resolvent(phi, t);
      } catch (const Error& e) {
        if (e.code() == Errc::SingularResolvent) return {0.0, 0.0, false, true};
        throw;
      }
      CpVerdict v = is_completely_positive(res, tol);
      return {v.min_eig, 0.0, v.verdict, false};
    });
  }
  cert.spectrum_ok = !spectrum.negative_axis_flag;
  cert.verdict = cert.verdict && cert.spectrum_ok;
  return cert;
}

PsdCertificate q_dominates(const MatrixMap& phi, const MatrixMap& psi, const TGrid& grid,
                           const Tolerance& tol) {
  tol.validate();
  if (phi.in_rows() != psi.in_rows() || phi.in_cols() != psi.in_cols() ||
      phi.out_rows() != psi.out_rows() || phi.out_cols() != psi.out_cols())
    fail(Errc::DimensionMismatch, "q_dominates needs maps with identical dimensions");
  if (!phi.endomorphism() || !phi.square())
    fail(Errc::DimensionMismatch, "q_dominates is defined for endomorphisms of M_n");
  return sweep_grid(grid, CertMode::NumericGrid, [&](double t) -> PointResult {
    MatrixMap a = phi, b = psi;
    try {
      a = q_resolvent(phi, t);
      b = q_resolvent(psi, t);
    } catch (const Error& e) {
      if (e.code() == Errc::SingularResolvent) return {0.0, 0.0, false, true};
      throw;
    }
    CpVerdict v = is_completely_positive(a - b, tol);
    return {v.min_eig, 0.0, v.verdict, false};
  });
}

bool is_q_pure_rank_one(const State& omega, const Tolerance& tol) {
  tol.validate();
  return omega.eigenvalues()(0) > tol.eps_cluster;
}

MatrixMap build_lambda_schur(const RVector& lambda, const Tolerance& tol) {
  tol.validate();
  if (lambda.size() < 1) fail(Errc::DimensionMismatch, "lambda vector must be non-empty");
  double sum = lambda.sum();
  if (std::abs(sum) > tol.eps_eq * (1.0 + lambda.cwiseAbs().sum()))
    fail(Errc::LambdaSumNonzero, "lambda entries must sum to zero");
  Index n = lambda.size();
  CMatrix q(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k) q(j, k) = 1.0 / Complex(1.0, lambda(j) - lambda(k));
  return make_schur(q);
}

RVector recover_lambda(const MatrixMap& phi, const Tolerance& tol) {
  tol.validate();
  CMatrix q = schur_coefficients(phi, tol);  // NotSchur propagates (precondition)
  Index n = q.rows();
  double margin = 100.0 * tol.eps_eq;
  for (Index j = 0; j < n; ++j)
    if (std::abs(q(j, j) - Complex(1.0, 0.0)) > margin)
      fail(Errc::NotCanonical, "diagonal coefficients must equal 1");

  // Differences from the first row, then the zero-sum gauge.
  RVector delta(n);  // delta_k = lambda_1 - lambda_k
  delta(0) = 0.0;
  for (Index k = 1; k < n; ++k) {
    if (std::abs(q(0, k)) < 1e-14) fail(Errc::NotCanonical, "vanishing coefficient");
    Complex w = Complex(0.0, -1.0) * (1.0 / q(0, k) - 1.0);
    if (std::abs(w.imag()) > margin * (1.0 + std::abs(w)))
      fail(Errc::NotCanonical, "coefficient differences are not real");
    delta(k) = w.real();
  }
  double lambda1 = delta.sum() / static_cast<double>(n);
  RVector lambda(n);
  for (Index k = 0; k < n; ++k) lambda(k) = lambda1 - delta(k);

  CMatrix rebuilt = schur_coefficients(build_lambda_schur(lambda, tol), tol);
  if (max_abs(rebuilt - q) > margin)
    fail(Errc::NotCanonical, "coefficients are inconsistent with any lambda vector");
  return lambda;
}

}  // namespace qcl
