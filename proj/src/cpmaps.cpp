#include "qcl/cpmaps.hpp"

#include <sstream>

namespace qcl {

namespace {

void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace

MatrixMap::MatrixMap(Index in_rows, Index in_cols, Index out_rows, Index out_cols, CMatrix choi)
    : in_rows_(in_rows), in_cols_(in_cols), out_rows_(out_rows), out_cols_(out_cols),
      choi_(std::move(choi)) {
  require(in_rows_ >= 1 && in_cols_ >= 1 && out_rows_ >= 1 && out_cols_ >= 1,
          Errc::DimensionMismatch, "map dimensions must be >= 1");
  require(choi_.rows() == in_rows_ * out_rows_ && choi_.cols() == in_cols_ * out_cols_,
          Errc::DimensionMismatch, "Choi matrix size does not match map dimensions");
  require(all_finite(choi_), Errc::DimensionMismatch, "Choi matrix has non-finite entries");
}

MatrixMap MatrixMap::from_choi(Index n_in, Index n_out, const CMatrix& choi) {
  return MatrixMap(n_in, n_in, n_out, n_out, choi);
}

MatrixMap MatrixMap::from_action(Index in_rows, Index in_cols, Index out_rows, Index out_cols,
                                 const std::function<CMatrix(const CMatrix&)>& action) {
  CMatrix choi(in_rows * out_rows, in_cols * out_cols);
  CMatrix unit = CMatrix::Zero(in_rows, in_cols);
  for (Index i = 0; i < in_rows; ++i) {
    for (Index j = 0; j < in_cols; ++j) {
      unit(i, j) = 1.0;
      CMatrix img = action(unit);
      unit(i, j) = 0.0;
      require(img.rows() == out_rows && img.cols() == out_cols, Errc::DimensionMismatch,
              "action image has wrong size");
      choi.block(i * out_rows, j * out_cols, out_rows, out_cols) = img;
    }
  }
  return MatrixMap(in_rows, in_cols, out_rows, out_cols, std::move(choi));
}

MatrixMap MatrixMap::identity(Index n) { return identity_rect(n, n); }

MatrixMap MatrixMap::identity_rect(Index rows, Index cols) {
  CMatrix choi = CMatrix::Zero(rows * rows, cols * cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) choi(i * rows + i, j * cols + j) = 1.0;
  return MatrixMap(rows, cols, rows, cols, std::move(choi));
}

MatrixMap MatrixMap::zero(Index in_rows, Index in_cols, Index out_rows, Index out_cols) {
  return MatrixMap(in_rows, in_cols, out_rows, out_cols,
                   CMatrix::Zero(in_rows * out_rows, in_cols * out_cols));
}

MatrixMap MatrixMap::rank_one_state_map(const CMatrix& omega) {
  require(omega.rows() == omega.cols(), Errc::DimensionMismatch, "Omega must be square");
  Index n = omega.rows();
  // phi(e_ij) = tr(e_ij Omega) I = Omega(j,i) I
  CMatrix choi = CMatrix::Zero(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      choi.block(i * n, j * n, n, n) = omega(j, i) * CMatrix::Identity(n, n);
  return MatrixMap(n, n, n, n, std::move(choi));
}

MatrixMap MatrixMap::from_transfer(Index in_rows, Index in_cols, Index out_rows, Index out_cols,
                                   const CMatrix& transfer) {
  require(transfer.rows() == out_rows * out_cols && transfer.cols() == in_rows * in_cols,
          Errc::DimensionMismatch, "transfer matrix size mismatch");
  CMatrix choi(in_rows * out_rows, in_cols * out_cols);
  for (Index i = 0; i < in_rows; ++i) {
    for (Index j = 0; j < in_cols; ++j) {
      // Column of the transfer matrix holding vec(phi(e_ij)), column-major.
      CVector col = transfer.col(j * in_rows + i);
      for (Index s = 0; s < out_cols; ++s)
        choi.block(i * out_rows, j * out_cols + s, out_rows, 1) =
            col.segment(s * out_rows, out_rows);
    }
  }
  return MatrixMap(in_rows, in_cols, out_rows, out_cols, std::move(choi));
}

Index MatrixMap::n_in() const {
  require(square(), Errc::DimensionMismatch, "n_in requires a square-algebra map");
  return in_rows_;
}

Index MatrixMap::n_out() const {
  require(square(), Errc::DimensionMismatch, "n_out requires a square-algebra map");
  return out_rows_;
}

CMatrix MatrixMap::apply(const CMatrix& a) const {
  require(a.rows() == in_rows_ && a.cols() == in_cols_, Errc::DimensionMismatch,
          "apply: argument has wrong size");
  CMatrix out = CMatrix::Zero(out_rows_, out_cols_);
  for (Index i = 0; i < in_rows_; ++i)
    for (Index j = 0; j < in_cols_; ++j)
      if (a(i, j) != 0.0)
        out.noalias() += a(i, j) * choi_.block(i * out_rows_, j * out_cols_, out_rows_, out_cols_);
  return out;
}

CMatrix MatrixMap::transfer() const {
  CMatrix t(out_rows_ * out_cols_, in_rows_ * in_cols_);
  for (Index i = 0; i < in_rows_; ++i) {
    for (Index j = 0; j < in_cols_; ++j) {
      CMatrix img = map_unit(i, j);
      for (Index s = 0; s < out_cols_; ++s)
        t.block(s * out_rows_, j * in_rows_ + i, out_rows_, 1) = img.col(s);
    }
  }
  return t;
}

MatrixMap MatrixMap::operator+(const MatrixMap& other) const {
  require(in_rows_ == other.in_rows_ && in_cols_ == other.in_cols_ &&
              out_rows_ == other.out_rows_ && out_cols_ == other.out_cols_,
          Errc::DimensionMismatch, "map addition needs identical dimensions");
  return MatrixMap(in_rows_, in_cols_, out_rows_, out_cols_, choi_ + other.choi_);
}

MatrixMap MatrixMap::operator-(const MatrixMap& other) const {
  return *this + (other * Complex(-1.0, 0.0));
}

MatrixMap MatrixMap::operator*(Complex c) const {
  return MatrixMap(in_rows_, in_cols_, out_rows_, out_cols_, c * choi_);
}

bool maps_close(const MatrixMap& a, const MatrixMap& b, double eps) {
  if (a.in_rows() != b.in_rows() || a.in_cols() != b.in_cols() ||
      a.out_rows() != b.out_rows() || a.out_cols() != b.out_cols())
    return false;
  return entrywise_close(a.choi(), b.choi(), eps);
}

MatrixMap compose(const MatrixMap& f, const MatrixMap& g) {
  require(f.in_rows() == g.out_rows() && f.in_cols() == g.out_cols(), Errc::DimensionMismatch,
          "compose: inner dimensions do not match");
  return MatrixMap::from_transfer(g.in_rows(), g.in_cols(), f.out_rows(), f.out_cols(),
                                  f.transfer() * g.transfer());
}

MatrixMap adjoint_map(const MatrixMap& gamma) {
  // gamma*: B(K1,K2) -> B(K1,K2) when gamma acts on B(K2,K1); all four
  // dimensions swap. gamma*(e_ij) = [gamma(e_ji)]*.
  Index ir = gamma.in_cols(), ic = gamma.in_rows();
  Index orr = gamma.out_cols(), oc = gamma.out_rows();
  CMatrix choi(ir * orr, ic * oc);
  for (Index i = 0; i < ir; ++i)
    for (Index j = 0; j < ic; ++j)
      choi.block(i * orr, j * oc, orr, oc) = gamma.map_unit(j, i).adjoint();
  return MatrixMap(ir, ic, orr, oc, std::move(choi));
}

MatrixMap conjugate_by_unitary(const MatrixMap& phi, const CMatrix& u, const Tolerance& tol) {
  require(phi.square() && phi.n_in() == phi.n_out(), Errc::DimensionMismatch,
          "conjugate_by_unitary needs an endomorphism of M_n");
  require(u.rows() == phi.n_in() && u.cols() == phi.n_in(), Errc::DimensionMismatch,
          "unitary has wrong size");
  if (!is_unitary(u, tol)) fail(Errc::NotUnitary, "conjugating matrix is not unitary");
  return MatrixMap::from_action(phi.n_in(), phi.n_in(), phi.n_in(), phi.n_in(),
                                [&](const CMatrix& a) -> CMatrix {
                                  return u.adjoint() * phi.apply(u * a * u.adjoint()) * u;
                                });
}

CpVerdict is_completely_positive(const MatrixMap& phi, const Tolerance& tol) {
  tol.validate();
  const CMatrix& c = phi.choi();
  if (!phi.square() || c.rows() != c.cols()) return {false, 0.0};
  if (is_hermitian(c, tol.eps_eq)) {
    PsdVerdict v = is_psd(c, tol);
    return {v.verdict, v.min_eig};
  }
  // Map does not preserve Hermiticity, hence cannot be CP; report the
  // least eigenvalue of the Hermitian part for diagnostics.
  PsdVerdict v = is_psd(CMatrix(0.5 * (c + c.adjoint())), tol);
  return {false, v.min_eig};
}

MatrixMap make_schur(const CMatrix& q) {
  require(q.rows() == q.cols(), Errc::DimensionMismatch, "Schur coefficient matrix must be square");
  Index n = q.rows();
  CMatrix choi = CMatrix::Zero(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) choi(i * n + i, j * n + j) = q(i, j);
  return MatrixMap(n, n, n, n, std::move(choi));
}

CMatrix schur_coefficients(const MatrixMap& phi, const Tolerance& tol) {
  tol.validate();
  require(phi.square() && phi.n_in() == phi.n_out(), Errc::NotSchur,
          "Schur maps are endomorphisms of M_n");
  Index n = phi.n_in();
  double scale = 1.0 + max_abs(phi.choi());
  CMatrix q(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      CMatrix img = phi.map_unit(i, j);
      q(i, j) = img(i, j);
      img(i, j) = 0.0;
      if (max_abs(img) > tol.eps_eq * scale) {
        std::ostringstream msg;
        msg << "phi(e_" << (i + 1) << (j + 1) << ") has support off position ("
            << (i + 1) << "," << (j + 1) << ")";
        fail(Errc::NotSchur, msg.str());
      }
    }
  }
  return q;
}

bool is_schur(const MatrixMap& phi, const Tolerance& tol) {
  if (!phi.square() || phi.n_in() != phi.n_out()) return false;
  try {
    schur_coefficients(phi, tol);
    return true;
  } catch (const Error& e) {
    if (e.code() == Errc::NotSchur) return false;
    throw;
  }
}

Decomposition::Decomposition(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
  require(!sizes_.empty(), Errc::BadDecomposition, "decomposition needs at least one block");
  offsets_.reserve(sizes_.size());
  for (Index s : sizes_) {
    require(s >= 1, Errc::BadDecomposition, "block sizes must be >= 1");
    offsets_.push_back(total_);
    total_ += s;
  }
}

Index Decomposition::block_of(Index flat_index) const {
  require(flat_index >= 0 && flat_index < total_, Errc::BadDecomposition,
          "index outside decomposition range");
  Index b = 0;
  while (flat_index >= offsets_[static_cast<std::size_t>(b)] + sizes_[static_cast<std::size_t>(b)])
    ++b;
  return b;
}

bool is_generalized_schur(const MatrixMap& phi, const Decomposition& d_in,
                          const Decomposition& d_out, const Tolerance& tol) {
  tol.validate();
  require(phi.square(), Errc::BadDecomposition, "generalized Schur structure needs square algebras");
  require(d_in.total() == phi.n_in() && d_out.total() == phi.n_out(), Errc::BadDecomposition,
          "decomposition totals do not match map dimensions");
  require(d_in.count() == d_out.count(), Errc::BadDecomposition,
          "input and output decompositions need the same number of blocks");
  double scale = 1.0 + max_abs(phi.choi());
  for (Index k = 0; k < phi.n_in(); ++k) {
    for (Index l = 0; l < phi.n_in(); ++l) {
      Index r = d_in.block_of(k), s = d_in.block_of(l);
      CMatrix img = phi.map_unit(k, l);
      img.block(d_out.offset(r), d_out.offset(s), d_out.sizes()[static_cast<std::size_t>(r)],
                d_out.sizes()[static_cast<std::size_t>(s)])
          .setZero();
      if (max_abs(img) > tol.eps_eq * scale) return false;
    }
  }
  return true;
}

MatrixMap restrict_block(const MatrixMap& phi, const Decomposition& d_in,
                         const Decomposition& d_out, Index i, Index j, const Tolerance& tol) {
  if (!is_generalized_schur(phi, d_in, d_out, tol))
    fail(Errc::NotGeneralizedSchur, "map is not generalized Schur for these decompositions");
  require(i >= 0 && i < d_in.count() && j >= 0 && j < d_in.count(), Errc::BadDecomposition,
          "block index out of range");
  Index ir = d_in.sizes()[static_cast<std::size_t>(i)];
  Index ic = d_in.sizes()[static_cast<std::size_t>(j)];
  Index orr = d_out.sizes()[static_cast<std::size_t>(i)];
  Index oc = d_out.sizes()[static_cast<std::size_t>(j)];
  CMatrix choi(ir * orr, ic * oc);
  for (Index p = 0; p < ir; ++p)
    for (Index q = 0; q < ic; ++q)
      choi.block(p * orr, q * oc, orr, oc) =
          phi.map_unit(d_in.offset(i) + p, d_in.offset(j) + q)
              .block(d_out.offset(i), d_out.offset(j), orr, oc);
  return MatrixMap(ir, ic, orr, oc, std::move(choi));
}

MatrixMap assemble_generalized_schur(const Decomposition& d_in, const Decomposition& d_out,
                                     const std::vector<std::vector<MatrixMap>>& blocks) {
  require(d_in.count() == d_out.count(), Errc::BadDecomposition,
          "decompositions need the same number of blocks");
  Index k = d_in.count();
  require(static_cast<Index>(blocks.size()) == k, Errc::BadDecomposition,
          "block grid has wrong number of rows");
  Index n_in = d_in.total(), n_out = d_out.total();
  CMatrix choi = CMatrix::Zero(n_in * n_out, n_in * n_out);
  for (Index r = 0; r < k; ++r) {
    require(static_cast<Index>(blocks[static_cast<std::size_t>(r)].size()) == k,
            Errc::BadDecomposition, "block grid has wrong number of columns");
    for (Index s = 0; s < k; ++s) {
      const MatrixMap& blk = blocks[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)];
      Index ir = d_in.sizes()[static_cast<std::size_t>(r)];
      Index ic = d_in.sizes()[static_cast<std::size_t>(s)];
      Index orr = d_out.sizes()[static_cast<std::size_t>(r)];
      Index oc = d_out.sizes()[static_cast<std::size_t>(s)];
      require(blk.in_rows() == ir && blk.in_cols() == ic && blk.out_rows() == orr &&
                  blk.out_cols() == oc,
              Errc::DimensionMismatch, "block map has wrong dimensions for its slot");
      for (Index p = 0; p < ir; ++p)
        for (Index q = 0; q < ic; ++q)
          choi.block((d_in.offset(r) + p) * n_out + d_out.offset(r),
                     (d_in.offset(s) + q) * n_out + d_out.offset(s), orr, oc) =
              blk.map_unit(p, q);
    }
  }
  return MatrixMap(n_in, n_in, n_out, n_out, std::move(choi));
}

MatrixZeroesReport check_matrixzeroes_property(const MatrixMap& phi,
                                               const std::vector<CMatrix>& in_projections,
                                               const std::vector<CMatrix>& out_projections,
                                               const Tolerance& tol) {
  tol.validate();
  require(phi.square(), Errc::DimensionMismatch, "matrixzeroes check needs square algebras");
  Index n_in = phi.n_in(), n_out = phi.n_out();
  require(in_projections.size() == out_projections.size() && !in_projections.empty(),
          Errc::BadDecomposition, "projection families must be non-empty and equally sized");

  auto validate_family = [&](const std::vector<CMatrix>& fam, Index n, const char* side) {
    CMatrix sum = CMatrix::Zero(n, n);
    for (const CMatrix& p : fam) {
      require(p.rows() == n && p.cols() == n, Errc::DimensionMismatch,
              std::string(side) + " projection has wrong size");
      if (max_abs(p * p - p) > tol.eps_eq * (1.0 + max_abs(p)) || !is_hermitian(p, tol.eps_eq))
        fail(Errc::BadDecomposition, std::string(side) + " family contains a non-projection");
      sum += p;
    }
    if (max_abs(sum - CMatrix::Identity(n, n)) > tol.eps_eq * static_cast<double>(fam.size()))
      fail(Errc::BadDecomposition, std::string(side) + " projections do not sum to I");
    for (std::size_t i = 0; i < fam.size(); ++i)
      for (std::size_t j = i + 1; j < fam.size(); ++j)
        if (max_abs(fam[i] * fam[j]) > tol.eps_eq)
          fail(Errc::BadDecomposition, std::string(side) + " projections are not orthogonal");
  };
  validate_family(in_projections, n_in, "input");
  validate_family(out_projections, n_out, "output");

  CMatrix phi_I = phi.apply(CMatrix::Identity(n_in, n_in));
  double op_norm = phi_I.jacobiSvd().singularValues()(0);
  if (op_norm > 1.0 + tol.eps_eq)
    fail(Errc::NotContractive, "||phi(I)|| exceeds 1");

  double scale = 1.0 + max_abs(phi.choi());
  MatrixZeroesReport report{0.0, 0.0};
  std::size_t m = in_projections.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      double r = max_abs(out_projections[i] * phi.apply(in_projections[j]) * out_projections[i]);
      report.max_hypothesis_residual = std::max(report.max_hypothesis_residual, r);
      if (r > tol.eps_eq * scale) {
        std::ostringstream msg;
        msg << "f_" << (i + 1) << " phi(e_" << (j + 1) << ") f_" << (i + 1)
            << " != 0, residual " << r;
        fail(Errc::HypothesisFails, msg.str());
      }
    }
  }

  // Conclusion on a full matrix-unit basis of inputs.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      for (Index k = 0; k < n_in; ++k) {
        for (Index l = 0; l < n_in; ++l) {
          CMatrix a = matrix_unit(n_in, k, l);
          CMatrix mid = phi.apply(in_projections[i] * a * in_projections[j]);
          CMatrix left = out_projections[i] * mid * out_projections[j];
          CMatrix right = out_projections[i] * phi.apply(a) * out_projections[j];
          report.max_violation = std::max(report.max_violation, max_abs(left - mid));
          report.max_violation = std::max(report.max_violation, max_abs(mid - right));
        }
      }
    }
  }
  return report;
}

}  // namespace qcl
