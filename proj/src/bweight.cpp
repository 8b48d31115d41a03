#include "qcl/bweight.hpp"

#include "qcl/corners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qcl {

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGlN = 15;
constexpr double kGlNode[kGlN] = {
    0.0,
    -0.2011940939974345, 0.2011940939974345,
    -0.3941513470775634, 0.3941513470775634,
    -0.5709721726085388, 0.5709721726085388,
    -0.7244177313601701, 0.7244177313601701,
    -0.8482065834104272, 0.8482065834104272,
    -0.9372733924007060, 0.9372733924007060,
    -0.9879925180204854, 0.9879925180204854,
};
constexpr double kGlWeight[kGlN] = {
    0.2025782419255613,
    0.1984314853271116, 0.1984314853271116,
    0.1861610000155622, 0.1861610000155622,
    0.1662692058169939, 0.1662692058169939,
    0.1395706779261543, 0.1395706779261543,
    0.1071592204671719, 0.1071592204671719,
    0.0703660474881081, 0.0703660474881081,
    0.0307532419961173, 0.0307532419961173,
};

double gl15(const std::function<double(double)>& f, double a, double b) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < kGlN; ++i) sum += kGlWeight[i] * f(mid + half * kGlNode[i]);
  return half * sum;
}

double adaptive_impl(const std::function<double(double)>& f, double a, double b, double tol,
                     double whole, int depth) {
  double mid = 0.5 * (a + b);
  double left = gl15(f, a, mid), right = gl15(f, mid, b);
  double err = std::abs(whole - (left + right));
  // Stop on the requested tolerance, on the roundoff floor (further halving
  // of the local tolerance can never be met in double precision), or at the
  // depth cap.
  if (err <= tol || err <= 1e-14 * (std::abs(left) + std::abs(right)) || depth >= 30)
    return left + right;
  return adaptive_impl(f, a, mid, 0.5 * tol, left, depth + 1) +
         adaptive_impl(f, mid, b, 0.5 * tol, right, depth + 1);
}

}  // namespace

double adaptive_quad(const std::function<double(double)>& f, double a, double b, double abs_tol) {
  if (!(b > a)) return 0.0;
  return adaptive_impl(f, a, b, abs_tol, gl15(f, a, b), 0);
}

namespace {

// Upper cutoff for improper tails: beyond it the exponential-family integrand
// contributes less than eps.
double tail_cut(double lo, double eps) { return std::max(lo, 1.0) - std::log(eps) + 5.0; }

double expint_e1(double x) { return -std::expint(-x); }

}  // namespace

PowersWeight PowersWeight::indicator(double a, double b) {
  if (!(a >= 0.0) || !(b > a)) fail(Errc::SchemaError, "indicator weight needs 0 <= a < b");
  PowersWeight w;
  w.family_ = WeightFamily::Indicator;
  w.a_ = a;
  w.b_ = b;
  w.lo_ = a;
  w.hi_ = b;
  return w;
}

PowersWeight PowersWeight::exponential() {
  PowersWeight w;
  w.family_ = WeightFamily::Exponential;
  w.lo_ = 0.0;
  w.hi_ = std::numeric_limits<double>::infinity();
  return w;
}

PowersWeight PowersWeight::power_law() {
  PowersWeight w;
  w.family_ = WeightFamily::PowerLaw;
  w.lo_ = 0.0;
  w.hi_ = 1.0;
  // normalization: c2 * integral_0^1 (1 - e^{-x})/x dx = 1
  double z = adaptive_quad(
      [](double x) { return x < 1e-14 ? 1.0 : (1.0 - std::exp(-x)) / x; }, 0.0, 1.0, 1e-13);
  w.c2_ = 1.0 / z;
  return w;
}

PowersWeight PowersWeight::grid(const RVector& xs, const RVector& fs) {
  if (xs.size() != fs.size() || xs.size() < 2)
    fail(Errc::SchemaError, "grid weight needs matching xs/fs with at least two samples");
  if (!(xs(0) >= 0.0)) fail(Errc::SchemaError, "grid weight needs xs >= 0");
  for (Index i = 1; i < xs.size(); ++i)
    if (!(xs(i) > xs(i - 1))) fail(Errc::SchemaError, "grid weight needs strictly increasing xs");
  PowersWeight w;
  w.family_ = WeightFamily::Grid;
  w.xs_ = xs;
  w.fs_ = fs;
  w.lo_ = xs(0);
  w.hi_ = xs(xs.size() - 1);
  // normalize so nu(I - Lambda) = integral |f|^2 = 1
  double nrm = 0.0;
  auto f2 = [&](double x) {
    double v = w.h(x);  // pre-normalization h with scale 1
    return (1.0 - std::exp(-x)) * v * v;
  };
  for (Index i = 0; i + 1 < xs.size(); ++i)
    nrm += adaptive_quad(f2, xs(i), xs(i + 1), w.eps_quad_ / xs.size());
  if (!(nrm > 0.0)) fail(Errc::SchemaError, "grid weight has vanishing norm");
  // already-normalized samples (e.g. reloaded canonical documents) pass
  // through unchanged, keeping save . load bit-stable
  if (std::abs(nrm - 1.0) > 1e-11) w.fs_ /= std::sqrt(nrm);
  return w;
}

PowersWeight PowersWeight::scaled(const PowersWeight& base, double scale) {
  if (!(scale > 0.0)) fail(Errc::SchemaError, "weight scale must be positive");
  PowersWeight w = base;
  w.scale_ = base.scale_ * scale;
  return w;
}

double PowersWeight::h(double x) const {
  if (x <= lo_ || x >= hi_) {
    if (family_ != WeightFamily::Exponential || x <= 0.0) return 0.0;
  }
  double root_scale = std::sqrt(scale_);
  switch (family_) {
    case WeightFamily::Indicator:
      return root_scale / std::sqrt((b_ - a_) * (1.0 - std::exp(-x)));
    case WeightFamily::Exponential:
      return root_scale * std::exp(-0.5 * x) / std::sqrt(1.0 - std::exp(-x));
    case WeightFamily::PowerLaw:
      return root_scale * std::sqrt(c2_ / x);
    case WeightFamily::Grid: {
      // piecewise-linear f
      if (x < xs_(0) || x > xs_(xs_.size() - 1)) return 0.0;
      Index seg = 0;
      while (seg + 2 < xs_.size() && x > xs_(seg + 1)) ++seg;
      double u = (x - xs_(seg)) / (xs_(seg + 1) - xs_(seg));
      double f = fs_(seg) * (1.0 - u) + fs_(seg + 1) * u;
      return root_scale * f / std::sqrt(1.0 - std::exp(-x));
    }
  }
  return 0.0;
}

double PowersWeight::nu_I(double t) const {
  double lo = std::max(t, lo_);
  switch (family_) {
    case WeightFamily::Indicator: {
      if (lo >= b_) return 0.0;
      // antiderivative of 1/(1-e^{-x}) is ln(e^x - 1)
      auto F = [](double x) { return x + std::log1p(-std::exp(-x)); };
      return scale_ * (F(b_) - F(lo)) / (b_ - a_);
    }
    case WeightFamily::Exponential:
      return -scale_ * std::log1p(-std::exp(-lo));
    case WeightFamily::PowerLaw:
      if (lo >= 1.0) return 0.0;
      return scale_ * c2_ * std::log(1.0 / lo);
    case WeightFamily::Grid: {
      double total = 0.0;
      auto f = [&](double x) {
        double v = h(x);
        return v * v;
      };
      for (Index i = 0; i + 1 < xs_.size(); ++i) {
        double s0 = std::max(lo, xs_(i)), s1 = xs_(i + 1);
        if (s1 > s0) total += adaptive_quad(f, s0, s1, eps_quad_ / xs_.size());
      }
      return total;
    }
  }
  return 0.0;
}

double PowersWeight::nu_Lambda(double t) const {
  double lo = std::max(t, lo_);
  switch (family_) {
    case WeightFamily::Indicator: {
      if (lo >= b_) return 0.0;
      // antiderivative of e^{-x}/(1-e^{-x}) is ln(1-e^{-x})
      auto F = [](double x) { return std::log1p(-std::exp(-x)); };
      return scale_ * (F(b_) - F(lo)) / (b_ - a_);
    }
    case WeightFamily::Exponential:
      return scale_ * (-std::exp(-lo) - std::log1p(-std::exp(-lo)));
    case WeightFamily::PowerLaw:
      if (lo >= 1.0) return 0.0;
      return scale_ * c2_ * (expint_e1(lo) - expint_e1(1.0));
    case WeightFamily::Grid: {
      double total = 0.0;
      auto f = [&](double x) {
        double v = h(x);
        return std::exp(-x) * v * v;
      };
      for (Index i = 0; i + 1 < xs_.size(); ++i) {
        double s0 = std::max(lo, xs_(i)), s1 = xs_(i + 1);
        if (s1 > s0) total += adaptive_quad(f, s0, s1, eps_quad_ / xs_.size());
      }
      return total;
    }
  }
  return 0.0;
}

WeightClassification PowersWeight::classify() const {
  WeightClassification result;
  for (double t : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6})
    result.diagnostics.push_back({t, nu_I(t), nu_Lambda(t)});

  switch (family_) {
    case WeightFamily::Indicator:
      result.type = a_ <= 1e-12 ? WeightType::TypeII : WeightType::TypeI;
      return result;
    case WeightFamily::Exponential:
    case WeightFamily::PowerLaw:
      result.type = WeightType::TypeII;
      return result;
    case WeightFamily::Grid:
      break;
  }

  // Grid family: extrapolate the moment sequence toward t -> 0+.
  const auto& d = result.diagnostics;
  double last = d.back().nu_I;
  double incr = d[d.size() - 1].nu_I - d[d.size() - 2].nu_I;
  if (incr <= 1e-9 * (1.0 + last)) {
    result.type = WeightType::TypeI;
    return result;
  }
  if (incr >= 1e-5 * (1.0 + last)) {
    result.type = WeightType::TypeII;
    return result;
  }
  fail(Errc::Inconclusive, "grid sampling cannot resolve the t -> 0 behavior");
}

WeightMoments PowersWeight::moments(double t) const {
  if (t <= 0.0) {
    if (classify().type == WeightType::TypeII)
      fail(Errc::QuadratureDivergent, "moments diverge as t -> 0+ for a type II weight");
    t = 0.0;
  }
  return {t, nu_I(t), nu_Lambda(t)};
}

Complex PowersWeight::g_inner(const TestFunction& u, double t) const {
  if (u.xs.size() < 2) return {0.0, 0.0};
  double lo = std::max({t, lo_, u.xs(0)});
  double hi = std::min(std::isfinite(hi_) ? hi_ : tail_cut(lo, eps_quad_), u.xs(u.xs.size() - 1));
  if (!(hi > lo)) return {0.0, 0.0};
  double re = 0.0, im = 0.0;
  for (Index i = 0; i + 1 < u.xs.size(); ++i) {
    double s0 = std::max(lo, u.xs(i)), s1 = std::min(hi, u.xs(i + 1));
    if (!(s1 > s0)) continue;
    re += adaptive_quad([&](double x) { return h(x) * u.eval(x).real(); }, s0, s1,
                        eps_quad_ / u.xs.size());
    im += adaptive_quad([&](double x) { return h(x) * u.eval(x).imag(); }, s0, s1,
                        eps_quad_ / u.xs.size());
  }
  return {re, im};
}

double PowersWeight::cross_inner(const PowersWeight& a, const PowersWeight& b, double t) {
  double lo = std::max({t, a.lo_, b.lo_});
  double hi = std::min(a.hi_, b.hi_);
  if (!std::isfinite(hi)) hi = tail_cut(lo, std::min(a.eps_quad_, b.eps_quad_));
  if (!(hi > lo)) return 0.0;
  // split at sample kinks of any grid factor
  std::vector<double> cuts{lo, hi};
  for (const PowersWeight* w : {&a, &b})
    if (w->family_ == WeightFamily::Grid)
      for (Index i = 0; i < w->xs_.size(); ++i)
        if (w->xs_(i) > lo && w->xs_(i) < hi) cuts.push_back(w->xs_(i));
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += adaptive_quad([&](double x) { return a.h(x) * b.h(x); }, cuts[i], cuts[i + 1],
                           1e-12);
  return total;
}

Complex TestFunction::eval(double x) const {
  if (xs.size() < 2 || x < xs(0) || x > xs(xs.size() - 1)) return {0.0, 0.0};
  Index seg = 0;
  while (seg + 2 < xs.size() && x > xs(seg + 1)) ++seg;
  double u = (x - xs(seg)) / (xs(seg + 1) - xs(seg));
  return vals(seg) * (1.0 - u) + vals(seg + 1) * u;
}

TestOperator TestOperator::identity() {
  TestOperator op;
  op.c_identity = 1.0;
  return op;
}

TestOperator TestOperator::zero() { return {}; }

void TestOperator::accumulate(const TestOperator& other, Complex c) {
  c_identity += c * other.c_identity;
  c_lambda += c * other.c_lambda;
  for (const Kernel& k : other.kernels) kernels.push_back({c * k.coeff, k.u, k.v});
}

TestOperatorMatrix identity_test_matrix(Index n) {
  TestOperatorMatrix b(static_cast<std::size_t>(n),
                       std::vector<TestOperator>(static_cast<std::size_t>(n)));
  for (Index i = 0; i < n; ++i)
    b[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = TestOperator::identity();
  return b;
}

Complex nu_t_of(const PowersWeight& nu, double t, const TestOperator& op) {
  Complex total = op.c_identity * nu.nu_I(t) + op.c_lambda * nu.nu_Lambda(t);
  for (const TestOperator::Kernel& k : op.kernels)
    total += k.coeff * nu.g_inner(k.u, t) * std::conj(nu.g_inner(k.v, t));
  return total;
}

CMatrix omega_nu_t(const PowersWeight& nu, double t, const TestOperatorMatrix& b) {
  Index n = static_cast<Index>(b.size());
  CMatrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    if (static_cast<Index>(b[static_cast<std::size_t>(i)].size()) != n)
      fail(Errc::DimensionMismatch, "test operator matrix must be square");
    for (Index j = 0; j < n; ++j)
      m(i, j) = nu_t_of(nu, t, b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  }
  return m;
}

CMatrix boundary_rep_double(const MatrixMap& phi, const PowersWeight& nu, double t,
                            const TestOperatorMatrix& b, const Tolerance& tol) {
  tol.validate();
  if (!(t > 0.0)) {
    WeightMoments m = nu.moments(t);  // throws QuadratureDivergent on type II
    (void)m;
  }
  if (!phi.square() || phi.n_in() != phi.n_out())
    fail(Errc::DimensionMismatch, "boundary_rep_double needs an endomorphism of M_n");
  if (static_cast<Index>(b.size()) != phi.n_in())
    fail(Errc::DimensionMismatch, "test operator matrix size does not match the map");
  double s = nu.nu_Lambda(t);
  CMatrix m = omega_nu_t(nu, t, b);
  return q_resolvent(phi, s).apply(m);
}

Kappa kappa_scalar(const PowersWeight& nu, Complex u, const TGrid& grid, const Tolerance& tol) {
  tol.validate();
  grid.validate();
  if (std::abs(u) > 1.0 + tol.eps_eq) fail(Errc::SchemaError, "kappa needs a contraction |u| <= 1");
  if (std::abs(u - Complex(1.0, 0.0)) <= tol.eps_eq) return {false, 0.0};
  double r = 1.0 - u.real();  // Re(1 - u)
  WeightClassification cls = nu.classify();  // Inconclusive propagates
  if (r > tol.eps_eq && cls.type == WeightType::TypeII) return {true, 0.0};
  double best = 0.0;
  for (double t : grid.ts)
    if (t > 0.0) best = std::max(best, r * nu.nu_Lambda(t));
  return {false, best};
}

WeightQcornerCertificate weight_qcorner_check(const PowersWeight& nu, Complex x, const TGrid& grid,
                                              const Tolerance& tol) {
  tol.validate();
  grid.validate();
  WeightQcornerCertificate out;
  out.hyper_maximal = std::abs(x.real()) <= tol.eps_eq;
  out.cert.mode = CertMode::NumericGrid;
  bool all_ok = true;
  for (double t : grid.ts) {
    if (!(t > 0.0)) continue;
    double s = nu.nu_Lambda(t);
    Complex denom = 1.0 + x + s;
    if (std::abs(denom) < 1e-12) {
      out.cert.skipped.push_back(t);
      all_ok = false;
      continue;
    }
    double diag = 1.0 / (1.0 + s);
    double off = std::abs(1.0 / denom);
    double min_eig = diag - off, max_eig = diag + off;
    bool ok = min_eig >= -tol.eps_psd * (1.0 + max_eig);
    out.cert.grid.push_back(t);
    out.cert.min_eigs.push_back(min_eig);
    out.cert.point_ok.push_back(ok);
    all_ok = all_ok && ok;
  }
  if (x.real() < -tol.eps_eq && nu.classify().type == WeightType::TypeII) {
    // 2(1+s)Re(x) + |x|^2 turns negative once s = nu_t(Lambda) exceeds
    // |x|^2/(2|Re x|) - 1, and s is unbounded as t -> 0+.
    out.tail_violation = true;
    all_ok = false;
  }
  out.cert.verdict = all_ok;
  if (!out.cert.verdict) out.hyper_maximal = false;
  return out;
}

SubordinationReport weight_q_subordinate(const PowersWeight& nu, const PowersWeight& eta,
                                         const TGrid& grid, const Tolerance& tol) {
  tol.validate();
  grid.validate();
  SubordinationReport report{true, 0.0, std::numeric_limits<double>::infinity()};
  double dir_tol = 1e-5;
  for (double t : grid.ts) {
    if (!(t > 0.0)) continue;
    double eta_I = eta.nu_I(t);
    if (eta_I <= tol.eps_eq * tol.eps_eq) continue;  // eta_t vanishes: nothing to dominate
    double nu_Iv = nu.nu_I(t);
    double margin = nu_Iv / (1.0 + nu.nu_Lambda(t)) - eta_I / (1.0 + eta.nu_Lambda(t));
    report.min_margin = std::min(report.min_margin, margin);
    double residual = 1.0;
    if (nu_Iv > 0.0) {
      double cross = PowersWeight::cross_inner(nu, eta, t);
      residual = std::max(0.0, 1.0 - (cross * cross) / (nu_Iv * eta_I));
    }
    report.max_direction_residual = std::max(report.max_direction_residual, residual);
    if (residual > dir_tol || margin < -tol.eps_eq) report.verdict = false;
  }
  if (!std::isfinite(report.min_margin)) report.min_margin = 0.0;
  return report;
}

double conjugation_covariance_check(const MatrixMap& phi, const CMatrix& u, const PowersWeight& nu,
                                    double t, const TestOperatorMatrix& b, const Tolerance& tol) {
  tol.validate();
  if (!is_unitary(u, tol)) fail(Errc::NotUnitary, "conjugation needs a unitary");
  Index n = phi.n_in();
  if (u.rows() != n || static_cast<Index>(b.size()) != n)
    fail(Errc::DimensionMismatch, "dimension mismatch in covariance check");

  MatrixMap phi_u = conjugate_by_unitary(phi, u, tol);
  CMatrix lhs = boundary_rep_double(phi_u, nu, t, b, tol);

  // (u (x) 1) B (u* (x) 1): entry (i,j) = sum_kl u(i,k) conj(u(j,l)) B(k,l)
  TestOperatorMatrix bp(static_cast<std::size_t>(n),
                        std::vector<TestOperator>(static_cast<std::size_t>(n)));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k)
        for (Index l = 0; l < n; ++l)
          bp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].accumulate(
              b[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)],
              u(i, k) * std::conj(u(j, l)));

  CMatrix rhs = u.adjoint() * boundary_rep_double(phi, nu, t, bp, tol) * u;
  return max_abs(lhs - rhs);
}

PsdCertificate double_boundary_rep_certificate(const MatrixMap& phi, const MatrixMap& gamma,
                                               const PowersWeight& nu, const TGrid& grid,
                                               const Tolerance& tol) {
  tol.validate();
  grid.validate();
  MatrixMap theta = assemble_2x2({phi, phi, gamma});
  std::vector<double> positive;
  for (double t : grid.ts)
    if (t > 0.0) positive.push_back(t);

  PsdCertificate cert;
  cert.mode = CertMode::NumericGrid;
  cert.grid = positive;
  cert.min_eigs.resize(positive.size());
  std::vector<char> ok(positive.size(), 0);
  parallel_for_index(positive.size(), [&](std::size_t k) {
    double s = nu.nu_Lambda(positive[k]);
    CpVerdict v = is_completely_positive(q_resolvent(theta, s), tol);
    cert.min_eigs[k] = v.min_eig;
    ok[k] = v.verdict ? 1 : 0;
  });
  bool all_ok = true;
  for (std::size_t k = 0; k < ok.size(); ++k) {
    cert.point_ok.push_back(ok[k] != 0);
    all_ok = all_ok && ok[k];
  }
  cert.verdict = all_ok;
  return cert;
}

}  // namespace qcl
