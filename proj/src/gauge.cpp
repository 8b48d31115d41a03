#include "qcl/gauge.hpp"

#include <algorithm>

namespace qcl {

GaugeDescriptor describe_gauge_group(const State& omega, const Tolerance& tol) {
  tol.validate();
  GaugeDescriptor d;
  d.kernel_multiplicity = omega.kernel_multiplicity();
  for (const SpectralCluster& c : omega.clusters()) d.multiplicities.push_back(c.multiplicity);
  d.dim_u_rho = d.kernel_multiplicity * d.kernel_multiplicity;
  for (int m : d.multiplicities) d.dim_u_rho += m * m;
  d.dim_gauge = 2 + d.dim_u_rho - 1;
  d.dim_u_rho_oracle = commutant_dimension_oracle(omega.omega());
  d.oracle_agrees = d.dim_u_rho_oracle == d.dim_u_rho;
  return d;
}

int commutant_dimension_oracle(const CMatrix& omega, double sv_tol) {
  Index n = omega.rows();
  if (n != omega.cols()) fail(Errc::DimensionMismatch, "oracle needs a square matrix");
  // Anti-Hermitian X has n^2 real parameters: Im X_ii on the diagonal, and
  // (Re, Im) of X_ij for i < j with X_ji = -conj(X_ij). Stack the real and
  // imaginary parts of X Omega - Omega X as rows of a real matrix and count
  // the nullity.
  Index params = n * n;
  std::vector<std::pair<Index, Index>> upper;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) upper.emplace_back(i, j);

  auto basis_matrix = [&](Index p) -> CMatrix {
    CMatrix x = CMatrix::Zero(n, n);
    if (p < n) {
      x(p, p) = Complex(0.0, 1.0);
    } else {
      Index q = p - n;
      bool imag_part = q >= static_cast<Index>(upper.size());
      if (imag_part) q -= static_cast<Index>(upper.size());
      auto [i, j] = upper[static_cast<std::size_t>(q)];
      if (!imag_part) {
        x(i, j) = 1.0;
        x(j, i) = -1.0;
      } else {
        x(i, j) = Complex(0.0, 1.0);
        x(j, i) = Complex(0.0, 1.0);
      }
    }
    return x;
  };

  Eigen::MatrixXd constraints(2 * n * n, params);
  for (Index p = 0; p < params; ++p) {
    CMatrix comm = basis_matrix(p) * omega - omega * basis_matrix(p);
    for (Index r = 0; r < n; ++r) {
      for (Index c = 0; c < n; ++c) {
        constraints(2 * (r * n + c), p) = comm(r, c).real();
        constraints(2 * (r * n + c) + 1, p) = comm(r, c).imag();
      }
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraints);
  const Eigen::VectorXd& sv = svd.singularValues();
  double cutoff = sv_tol * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return static_cast<int>(params) - rank;
}

namespace {

void check_same_state(const GaugeElement& g, const GaugeElement& h, const Tolerance& tol) {
  if (g.omega().rows() != h.omega().rows() ||
      max_abs(g.omega() - h.omega()) > tol.eps_eq * (1.0 + max_abs(g.omega())))
    fail(Errc::MixedStates, "gauge elements live over different densities");
}

//! First row-major position of the (tolerance-tied) largest-modulus entry.
std::pair<Index, Index> anchor_entry(const CMatrix& x) {
  double best = x.cwiseAbs().maxCoeff();
  double tie = best * (1.0 - 1e-12);
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j)
      if (std::abs(x(i, j)) >= tie) return {i, j};
  return {0, 0};
}

GaugeElement raw_element(double x, CMatrix unitary, CMatrix omega) {
  State s = State::from_density(omega);
  return GaugeElement::make(x, unitary, s);
}

}  // namespace

GaugeElement gauge_mul(const GaugeElement& g, const GaugeElement& h, const Tolerance& tol) {
  tol.validate();
  check_same_state(g, h, tol);
  return raw_element(g.x() + h.x(), g.X() * h.X(), g.omega());
}

GaugeElement gauge_inverse(const GaugeElement& g) {
  return raw_element(-g.x(), g.X().adjoint(), g.omega());
}

bool gauge_eq(const GaugeElement& g, const GaugeElement& h, const Tolerance& tol) {
  tol.validate();
  check_same_state(g, h, tol);
  if (std::abs(g.x() - h.x()) > tol.eps_eq * (1.0 + std::abs(g.x()))) return false;
  auto [i, j] = anchor_entry(h.X());
  Complex hv = h.X()(i, j);
  if (std::abs(hv) <= tol.eps_eq) return false;
  Complex c = g.X()(i, j) / hv;
  if (std::abs(std::abs(c) - 1.0) > tol.eps_eq * 10) return false;
  return max_abs(g.X() - c * h.X()) <= tol.eps_eq * 10;
}

GaugeElement gauge_canonical(const GaugeElement& g) {
  auto [i, j] = anchor_entry(g.X());
  Complex v = g.X()(i, j);
  Complex phase = v / std::abs(v);
  return raw_element(g.x(), g.X() / phase, g.omega());
}

EquivalenceDecision decide_rank_one_equivalence(const State& omega1, const State& omega2,
                                                const Tolerance& tol) {
  tol.validate();
  EquivalenceDecision d{false, false, omega1.eigenvalues(), omega2.eigenvalues()};
  if (omega1.dim() == omega2.dim()) {
    double diff = (d.spectrum_1 - d.spectrum_2).cwiseAbs().maxCoeff();
    d.conjugate = diff <= tol.eps_cluster;
  }
  d.cocycle_conjugate = d.conjugate;
  return d;
}

const char* to_string(WeightOnlyDecision d) {
  switch (d) {
    case WeightOnlyDecision::CocycleConjugateToWeightOnly: return "cocycle_conjugate_to_weight_only";
    case WeightOnlyDecision::NotCocycleConjugate: return "not_cocycle_conjugate";
    case WeightOnlyDecision::Undecided: return "undecided";
  }
  return "undecided";
}

WeightOnlyDecision decide_vs_weight_only(const State& omega, const Tolerance& tol) {
  tol.validate();
  if (omega.support_rank() > 1) return WeightOnlyDecision::NotCocycleConjugate;
  if (omega.dim() == 1) return WeightOnlyDecision::CocycleConjugateToWeightOnly;
  return WeightOnlyDecision::Undecided;
}

WeightOnlyDecision decide_vs_weight_only(const MatrixMap& phi, const Tolerance& tol) {
  try {
    recover_lambda(phi, tol);
    return WeightOnlyDecision::CocycleConjugateToWeightOnly;
  } catch (const Error& e) {
    if (e.code() == Errc::NotSchur || e.code() == Errc::NotCanonical)
      return WeightOnlyDecision::Undecided;
    throw;
  }
}

}  // namespace qcl
