// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria with stated runtime budgets are timed and fail when the
// budget is exceeded.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "qcl/bweight.hpp"
#include "qcl/corners.hpp"
#include "qcl/gauge.hpp"
#include "testutil.hpp"

using namespace qcl;
using testutil::Rng;
using Clock = std::chrono::steady_clock;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << what;
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

TestFunction sampled_function(Rng& rng) {
  RVector xs(9);
  for (Index i = 0; i < 9; ++i) xs(i) = 0.05 + (3.0 - 0.05) * double(i) / 8.0;
  CVector vals(9);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (Index i = 0; i < 9; ++i) vals(i) = Complex(dist(rng), dist(rng));
  return {xs, vals};
}

// ---- criterion 1 ----------------------------------------------------------
bool criterion_cp_oracle(std::string& detail) {
  Check c;
  auto start = Clock::now();
  for (Index n = 2; n <= 4; ++n) {
    CpVerdict v = is_completely_positive(MatrixMap::identity(n));
    c.require(v.verdict, "identity on M_" + std::to_string(n) + " rejected");
    c.require(std::abs(v.min_eig) <= 1e-10, "identity min Choi eigenvalue off zero");
  }
  MatrixMap transpose = MatrixMap::from_action(
      2, 2, 2, 2, [](const CMatrix& a) { return CMatrix(a.transpose()); });
  CpVerdict v = is_completely_positive(transpose);
  c.require(!v.verdict, "transpose accepted");
  c.require(std::abs(v.min_eig + 1.0) <= 1e-10, "transpose min eigenvalue not -1");
  double elapsed = seconds_since(start);
  c.require(elapsed < 0.1, "runtime " + std::to_string(elapsed) + "s exceeds 0.1s");
  detail = c.detail.str();
  if (detail.empty()) {
    std::ostringstream os;
    os << "identity n=2..4 at eigenvalue 0, transpose at -1, " << elapsed << "s";
    detail = os.str();
  }
  return c.ok;
}

// ---- criterion 2 ----------------------------------------------------------
bool criterion_classified_families(std::string& detail) {
  Check c;
  auto start = Clock::now();
  Rng rng(0xACCE2);
  TGrid grid = TGrid::default_grid();

  for (int trial = 0; trial < 50; ++trial) {
    Index n = 2 + (trial % 3);  // n <= 4
    MatrixMap phi = MatrixMap::rank_one_state_map(testutil::random_density(rng, n));
    PsdCertificate cert = certify_q_positive(phi, grid, {}, CertMode::NumericGrid);
    c.require(cert.verdict, "rank-one certification failed");
    for (double m : cert.min_eigs)
      c.require(m >= -1e-9, "rank-one min eigenvalue below -1e-9");
  }

  for (int trial = 0; trial < 50; ++trial) {
    Index n = 2 + (trial % 3);
    MatrixMap phi = build_lambda_schur(testutil::random_zero_sum(rng, n));
    PsdCertificate exact = certify_q_positive(phi, grid, {}, CertMode::ExactSchur);
    c.require(exact.verdict, "lambda-Schur exact certification failed");
    PsdCertificate numeric = certify_q_positive(phi, grid, {}, CertMode::NumericGrid);
    c.require(exact.point_ok.size() == numeric.point_ok.size(), "grid size mismatch");
    for (std::size_t k = 0; k < exact.point_ok.size(); ++k)
      c.require(exact.point_ok[k] == numeric.point_ok[k],
                "exact/numeric verdicts disagree at a grid point");
  }

  double elapsed = seconds_since(start);
  c.require(elapsed < 30.0, "runtime " + std::to_string(elapsed) + "s exceeds 30s");
  detail = c.detail.str();
  if (detail.empty()) {
    std::ostringstream os;
    os << "50 rank-one + 50 lambda-Schur on the 122-point default grid, " << elapsed << "s";
    detail = os.str();
  }
  return c.ok;
}

// ---- criterion 3 ----------------------------------------------------------
bool criterion_domination_chain(std::string& detail) {
  Check c;
  auto start = Clock::now();
  Rng rng(0xACCE3);
  TGrid grid = TGrid::default_grid();
  for (int trial = 0; trial < 50; ++trial) {
    Index n = 2 + (trial % 3);
    MatrixMap phi = trial % 2 == 0
                        ? MatrixMap::rank_one_state_map(testutil::random_density(rng, n))
                        : build_lambda_schur(testutil::random_zero_sum(rng, n));
    for (double s : {0.1, 1.0, 10.0}) {
      PsdCertificate cert = q_dominates(phi, q_resolvent(phi, s), grid);
      c.require(cert.verdict, "phi >=_q phi(I+s phi)^{-1} failed at s=" + std::to_string(s));
    }
  }
  double elapsed = seconds_since(start);
  c.require(elapsed < 30.0, "runtime " + std::to_string(elapsed) + "s exceeds 30s");
  detail = c.detail.str();
  if (detail.empty()) {
    std::ostringstream os;
    os << "50 maps x s in {0.1, 1, 10} on the full grid, " << elapsed << "s";
    detail = os.str();
  }
  return c.ok;
}

// ---- criterion 4 ----------------------------------------------------------
bool criterion_rank_one_corners(std::string& detail) {
  Check c;
  Rng rng(0xACCE4);
  TGrid grid = TGrid::default_grid();
  const double xs[5] = {0.0, 1.0, -1.0, 5.0, -5.0};

  for (int trial = 0; trial < 20; ++trial) {
    Index n = 2 + (trial % 2);
    std::vector<int> mults =
        trial % 2 == 0 ? std::vector<int>{2} : std::vector<int>{2, 1};
    State s = State::from_density(testutil::random_density_with_multiplicities(rng, mults));
    CMatrix x_mat = testutil::random_commuting_unitary(rng, s);
    double x = xs[trial % 5];
    MatrixMap phi = MatrixMap::rank_one_state_map(s.omega());

    RankOneCornerParams p = RankOneCornerParams::from_x(x, x_mat, s);
    c.require(is_q_corner({phi, phi, build_rank_one_qcorner(p)}, grid).verdict,
              "gamma_{x,X} rejected as q-corner");
    c.require(is_hypermax_rank_one(p).verdict, "gamma_{x,X} rejected as hyper-maximal");

    RankOneCornerParams inside = RankOneCornerParams::from_lambda(0.5 * p.lambda, x_mat, s);
    c.require(is_q_corner({phi, phi, build_rank_one_qcorner(inside)}, grid).verdict,
              "0.5 lambda rejected as q-corner");
    c.require(!is_hypermax_rank_one(inside).verdict, "0.5 lambda still hyper-maximal");
    (void)n;
  }

  // lambda = 2 fails already at t = 0 with a decisive Choi eigenvalue
  State half = State::from_density(0.5 * CMatrix::Identity(2, 2));
  MatrixMap phi = MatrixMap::rank_one_state_map(half.omega());
  MatrixMap outside = build_rank_one_qcorner(
      RankOneCornerParams::from_lambda(Complex(2.0, 0.0), CMatrix::Identity(2, 2), half));
  PsdCertificate cert = is_q_corner({phi, phi, outside}, grid);
  c.require(!cert.verdict, "lambda = 2 accepted");
  c.require(!cert.min_eigs.empty() && cert.grid.front() == 0.0 &&
                cert.min_eigs.front() < -1e-3,
            "lambda = 2 not rejected at t = 0 with margin");

  // mismatched spectra (Theorem-level necessity)
  CMatrix omega1(2, 2), omega2(2, 2);
  omega1 << 2.0 / 3.0, 0, 0, 1.0 / 3.0;
  omega2 << 0.5, 0, 0, 0.5;
  MatrixMap phi1 = MatrixMap::rank_one_state_map(omega1);
  MatrixMap phi2 = MatrixMap::rank_one_state_map(omega2);
  MatrixMap candidate = MatrixMap::from_action(2, 2, 2, 2, [&](const CMatrix& a) {
    return CMatrix((a * omega1).trace() * CMatrix::Identity(2, 2));
  });
  c.require(!is_q_corner({phi1, phi2, candidate}, grid).verdict,
            "mismatched-spectra candidate accepted");

  detail = c.detail.str();
  if (detail.empty())
    detail = "20 random X in U_rho across x in {0,+-1,+-5}; circle scaling; mismatched spectra";
  return c.ok;
}

// ---- criterion 5 ----------------------------------------------------------
bool criterion_app216(std::string& detail) {
  Check c;
  Rng rng(0xACCE5);
  int exact = 0, perturbed = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Index n = 1 + (trial % 4);
    CMatrix x = testutil::random_unitary(rng, n);
    CMatrix y = testutil::random_unitary(rng, n);
    CMatrix z;
    if (trial % 2 == 0) {
      z = x * y;
      ++exact;
    } else {
      z = testutil::random_unitary(rng, n);
      ++perturbed;
    }
    App216Result r = check_app216(x, y, z);
    bool z_matches = max_abs(z - x * y) <= 1e-9;
    c.require(r.is_positive == z_matches, "positivity vs Z=XY equivalence violated");
    if (max_abs(z - x * y) >= 0.1)
      c.require(r.min_eig <= -1e-3, "perturbed Z lacks a decisive negative eigenvalue");
  }
  detail = c.detail.str();
  if (detail.empty()) {
    std::ostringstream os;
    os << exact << " exact + " << perturbed << " perturbed unitary pairs, zero counterexamples";
    detail = os.str();
  }
  return c.ok;
}

// ---- criterion 6 ----------------------------------------------------------
bool criterion_group_law(std::string& detail) {
  Check c;
  auto start = Clock::now();
  Rng rng(0xACCE6);
  TGrid grid = TGrid::default_grid();
  std::uniform_real_distribution<double> xs(-3.0, 3.0);

  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> mults;
    switch (trial % 4) {
      case 0: mults = {2}; break;
      case 1: mults = {3}; break;
      case 2: mults = {2, 1}; break;
      default: mults = {1, 1}; break;
    }
    State s = State::from_density(testutil::random_density_with_multiplicities(rng, mults));
    GaugeElement g = GaugeElement::make(xs(rng), testutil::random_commuting_unitary(rng, s), s);
    GaugeElement h = GaugeElement::make(xs(rng), testutil::random_commuting_unitary(rng, s), s);
    GaugeCompositionCertificate cert = verify_gauge_composition(s, g, h, grid);
    c.require(cert.full.verdict, "full Choi path failed");
    c.require(cert.fast_verdict, "N_t fast path failed");
    c.require(cert.paths_agree, "fast and full paths disagree at a grid point");
  }

  // falsification: YX differing from XY by more than a phase
  State half = State::from_density(0.5 * CMatrix::Identity(2, 2));
  CMatrix phase_diag(2, 2), swap(2, 2);
  phase_diag << Complex(1, 0), 0, 0, Complex(0, 1);
  swap << 0, 1, 1, 0;
  GaugeElement g = GaugeElement::make(0.7, phase_diag, half);
  GaugeElement h = GaugeElement::make(-1.1, swap, half);
  CMatrix xy = g.X() * h.X(), yx = h.X() * g.X();
  CMatrix rel = xy.adjoint() * yx;
  c.require(max_abs(rel - (rel.trace() / 2.0) * CMatrix::Identity(2, 2)) > 0.5,
            "falsification pair is commutative modulo phase");
  MatrixMap corrupted = assemble_gauge_theta(half, g, h, yx);
  c.require(!certify_q_positive(corrupted, grid, {}, CertMode::NumericGrid).verdict,
            "YX-corrupted certificate still passed");

  double elapsed = seconds_since(start);
  c.require(elapsed < 300.0, "runtime " + std::to_string(elapsed) + "s exceeds 5min");
  detail = c.detail.str();
  if (detail.empty()) {
    std::ostringstream os;
    os << "50 random (Omega, g, h) with n <= 3 on the default grid + YX falsification, "
       << elapsed << "s";
    detail = os.str();
  }
  return c.ok;
}

// ---- criterion 7 ----------------------------------------------------------
bool criterion_gauge_descriptor(std::string& detail) {
  Check c;
  Rng rng(0xACCE7);
  std::vector<std::vector<int>> shapes = {{1}, {2}, {3}, {1, 1}, {2, 1}, {2, 2},
                                          {3, 2}, {1, 1, 1}, {2, 1, 1}, {4, 2}, {3, 3}, {6}};
  for (int trial = 0; trial < 100; ++trial) {
    const auto& shape = shapes[static_cast<std::size_t>(trial) % shapes.size()];
    State s = State::from_density(testutil::random_density_with_multiplicities(rng, shape));
    GaugeDescriptor d = describe_gauge_group(s);
    c.require(d.dim_u_rho == d.dim_u_rho_oracle && d.oracle_agrees,
              "formula and oracle disagree");
  }

  auto dim_gauge_of = [](std::initializer_list<double> diag) {
    Index n = static_cast<Index>(diag.size());
    CMatrix m = CMatrix::Zero(n, n);
    Index i = 0;
    for (double v : diag) m(i, i) = v, ++i;
    return describe_gauge_group(State::from_density(m)).dim_gauge;
  };
  c.require(dim_gauge_of({0.5, 0.5}) == 5, "diag(1/2,1/2) dim_gauge != 5");
  c.require(dim_gauge_of({0.7, 0.3}) == 3, "diag(0.7,0.3) dim_gauge != 3");
  c.require(dim_gauge_of({1.0}) == 2, "n=1 dim_gauge != 2");

  detail = c.detail.str();
  if (detail.empty()) detail = "100 random states n <= 6, exact agreement + pinned values";
  return c.ok;
}

// ---- criterion 8 ----------------------------------------------------------
bool criterion_weight_closed_forms(std::string& detail) {
  Check c;
  PowersWeight nu = PowersWeight::indicator(0.0, 1.0);
  WeightMoments m = nu.moments(0.5);
  c.require(std::abs(m.nu_Lambda - 0.474077) <= 1e-6, "nu_t(Lambda) off 0.474077");
  c.require(std::abs(m.nu_I - 0.974077) <= 1e-6, "nu_t(I) off 0.974077");
  c.require(std::abs((m.nu_I - m.nu_Lambda) - 0.5) <= 1e-9, "difference not exactly 1/2");

  CMatrix pi = boundary_rep_double(MatrixMap::identity(1), nu, 0.5, identity_test_matrix(1));
  c.require(std::abs(pi(0, 0) - Complex(0.660805, 0.0)) <= 1e-6, "pi_0.5(I) off 0.660805");

  c.require(PowersWeight::indicator(0.0, 1.0).classify().type == WeightType::TypeII,
            "indicator(0,1) not type II");
  c.require(PowersWeight::indicator(1.0, 2.0).classify().type == WeightType::TypeI,
            "indicator(1,2) not type I");

  detail = c.detail.str();
  if (detail.empty())
    detail = "nu_0.5(Lambda)=0.474077, nu_0.5(I)=0.974077, pi_0.5(I)=0.660805, types II/I";
  return c.ok;
}

// ---- criterion 9 ----------------------------------------------------------
bool criterion_hypnote(std::string& detail) {
  Check c;
  PowersWeight nu = PowersWeight::indicator(0.0, 1.0);
  TGrid grid = TGrid::default_grid();
  const std::vector<Complex> xs = {{0.1, 0}, {-0.1, 0}, {1, 0}, {-1, 0},
                                   {0, 1},   {1, 1},    {-0.1, 1}};
  for (Complex x : xs) {
    WeightQcornerCertificate cert = weight_qcorner_check(nu, x, grid);
    c.require(cert.cert.verdict == (x.real() >= 0.0),
              "q-corner verdict disagrees with Re(x) >= 0");
    c.require(cert.hyper_maximal == (cert.cert.verdict && std::abs(x.real()) <= 1e-9),
              "hyper-maximal flag wrong");
  }
  Kappa k1 = kappa_scalar(nu, Complex(1.0, 0.0), grid);
  c.require(!k1.infinite && k1.value == 0.0, "kappa(1) != 0");
  Kappa km = kappa_scalar(nu, Complex(-1.0, 0.0), grid);
  c.require(km.infinite, "kappa(-1) not symbolically infinite");

  detail = c.detail.str();
  if (detail.empty()) detail = "verdict == [Re x >= 0] on all seven x; kappa(1)=0, kappa(-1)=inf";
  return c.ok;
}

// ---- criterion 10 ---------------------------------------------------------
bool criterion_covariance(std::string& detail) {
  Check c;
  Rng rng(0xACCE10);
  PowersWeight nu = PowersWeight::indicator(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Index n = 2 + (trial % 2);
    MatrixMap phi = trial % 2 == 0
                        ? MatrixMap::rank_one_state_map(testutil::random_density(rng, n))
                        : build_lambda_schur(testutil::random_zero_sum(rng, n));
    CMatrix u = testutil::random_unitary(rng, n);
    TestOperatorMatrix b(static_cast<std::size_t>(n),
                         std::vector<TestOperator>(static_cast<std::size_t>(n)));
    std::normal_distribution<double> dist(0.0, 1.0);
    for (auto& row : b)
      for (auto& op : row)
        op.kernels.push_back(
            {Complex(dist(rng), dist(rng)), sampled_function(rng), sampled_function(rng)});
    for (double t : {0.2, 0.5, 1.0}) {
      double residual = conjugation_covariance_check(phi, u, nu, t, b);
      worst = std::max(worst, residual);
      c.require(residual <= 1e-8, "covariance residual above 1e-8");
    }
  }
  detail = c.detail.str();
  if (detail.empty()) {
    std::ostringstream os;
    os << "20 random (phi, u, B) x t in {0.2, 0.5, 1}; worst residual " << worst;
    detail = os.str();
  }
  return c.ok;
}

// ---- criterion 11 ---------------------------------------------------------
bool criterion_decisions(std::string& detail) {
  Check c;
  Rng rng(0xACCE11);
  std::uniform_int_distribution<int> dims(1, 4);
  for (int trial = 0; trial < 50; ++trial) {
    Index n = dims(rng), k = dims(rng);
    CMatrix omega1 = testutil::random_density(rng, n);
    CMatrix omega2;
    if (trial % 2 == 0 && n == k) {
      // unitarily scrambled duplicate
      CMatrix u = testutil::random_unitary(rng, n);
      omega2 = u * omega1 * u.adjoint();
    } else {
      omega2 = testutil::random_density(rng, k);
    }
    State s1 = State::from_density(omega1), s2 = State::from_density(omega2);
    EquivalenceDecision d = decide_rank_one_equivalence(s1, s2);
    bool spectra_agree =
        n == k &&
        (s1.eigenvalues() - s2.eigenvalues()).cwiseAbs().maxCoeff() <= Tolerance{}.eps_cluster;
    c.require(d.conjugate == spectra_agree, "conjugacy decision disagrees with spectra");
    c.require(d.cocycle_conjugate == d.conjugate, "conjugacy and cocycle conjugacy split");
  }

  for (int trial = 0; trial < 20; ++trial) {
    Index n = 2 + (trial % 3);
    State s = State::from_density(testutil::random_density(rng, n));
    c.require(decide_vs_weight_only(s) == WeightOnlyDecision::NotCocycleConjugate,
              "faithful state with n >= 2 not refused");
    MatrixMap phi = build_lambda_schur(testutil::random_zero_sum(rng, n));
    c.require(decide_vs_weight_only(phi) == WeightOnlyDecision::CocycleConjugateToWeightOnly,
              "lambda-Schur map not accepted");
  }

  detail = c.detail.str();
  if (detail.empty())
    detail = "50 equivalence pairs incl. scrambled duplicates; 20 weight-only decisions each way";
  return c.ok;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "CP oracle", criterion_cp_oracle},
      {2, "q-positivity of the classified families", criterion_classified_families},
      {3, "q-domination chain", criterion_domination_chain},
      {4, "rank-one q-corner theorem", criterion_rank_one_corners},
      {5, "3x3 unitary positivity lemma", criterion_app216},
      {6, "gauge group law", criterion_group_law},
      {7, "gauge descriptor oracle", criterion_gauge_descriptor},
      {8, "weight quadrature closed forms", criterion_weight_closed_forms},
      {9, "weight q-corner characterization", criterion_hypnote},
      {10, "conjugation covariance", criterion_covariance},
      {11, "decision procedures", criterion_decisions},
  };

  int failures = 0;
  for (const Criterion& cr : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = cr.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::printf("[%s] criterion %2d: %s — %s\n", ok ? "PASS" : "FAIL", cr.id, cr.label,
                detail.c_str());
    std::fflush(stdout);
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
