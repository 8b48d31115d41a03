#pragma once

#include "qcl/qpos.hpp"
#include "qcl/state.hpp"

namespace qcl {

//! Block description of U_rho and the induced gauge-group dimensions.
//! multiplicities lists the eigenvalue clusters of Omega in descending
//! eigenvalue order; the kernel block is kept separate. U_rho is a product of
//! unitary groups over these blocks, dim U_rho = sum m^2 (kernel included),
//! and the gauge group R x R x (U_rho / T) has dimension 2 + sum m^2 - 1.
struct GaugeDescriptor {
  std::vector<int> multiplicities;
  int kernel_multiplicity = 0;
  int dim_u_rho = 0;
  int dim_gauge = 0;
  int dim_u_rho_oracle = 0;  // commutant-equation route
  bool oracle_agrees = false;
};

GaugeDescriptor describe_gauge_group(const State& omega, const Tolerance& tol = {});

//! Real dimension of {X : X Omega = Omega X, X* = -X}, computed as the
//! nullity of the commutator equation over the anti-Hermitian matrices.
//! Independent of the eigenvalue-clustering route.
int commutant_dimension_oracle(const CMatrix& omega, double sv_tol = 1e-7);

//! {x,X}.{y,Y} = {x+y, XY}; MixedStates when the two elements live over
//! different densities.
GaugeElement gauge_mul(const GaugeElement& g, const GaugeElement& h, const Tolerance& tol = {});

//! Equality modulo a global phase of X.
bool gauge_eq(const GaugeElement& g, const GaugeElement& h, const Tolerance& tol = {});

//! Rotates X so its largest-modulus entry (first in row-major order on ties)
//! is real positive; idempotent.
GaugeElement gauge_canonical(const GaugeElement& g);

GaugeElement gauge_inverse(const GaugeElement& g);

struct EquivalenceDecision {
  bool conjugate;
  bool cocycle_conjugate;  // equals `conjugate` for the rank-one family
  RVector spectrum_1;      // sorted ascending, evidence
  RVector spectrum_2;
};

//! Rank-one doubles are conjugate iff cocycle conjugate iff n = k and the
//! density spectra agree.
EquivalenceDecision decide_rank_one_equivalence(const State& omega1, const State& omega2,
                                                const Tolerance& tol = {});

enum class WeightOnlyDecision {
  CocycleConjugateToWeightOnly,
  NotCocycleConjugate,
  Undecided,
};

const char* to_string(WeightOnlyDecision d);

//! Rank-one family: support rank > 1 is never cocycle conjugate to a
//! weight-only semigroup; the M_1 case trivially is; anything else is
//! undecided here.
WeightOnlyDecision decide_vs_weight_only(const State& omega, const Tolerance& tol = {});

//! Invertible family: a canonical lambda-Schur map always is. Maps not
//! recognized as canonical stay undecided (recognition in a non-Schur basis
//! is out of scope).
WeightOnlyDecision decide_vs_weight_only(const MatrixMap& phi, const Tolerance& tol = {});

}  // namespace qcl
