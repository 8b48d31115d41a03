#pragma once

#include "qcl/numcore.hpp"

namespace qcl {

//! Linear map between matrix spaces, stored in Choi form.
//!
//! The Choi convention is fixed as C(phi) = sum_{ij} e_ij (x) phi(e_ij), with
//! the FIRST Kronecker factor carrying the input index. Block (i,j) of the
//! Choi matrix (blocks of size out_rows x out_cols) is phi(e_ij). For a map
//! between square algebras this is the standard Choi matrix, and complete
//! positivity is exactly PSD-ness of C with no partial-transpose bookkeeping.
//!
//! Maps may act on rectangular matrix spaces (corner slots B(K2,K1)); in that
//! case C is (in_rows*out_rows) x (in_cols*out_cols) and is a plain linear
//! carrier rather than a positivity witness.
class MatrixMap {
public:
  MatrixMap(Index in_rows, Index in_cols, Index out_rows, Index out_cols, CMatrix choi);

  //! Square-algebra constructor, choi of size (n_in*n_out)^2.
  static MatrixMap from_choi(Index n_in, Index n_out, const CMatrix& choi);
  static MatrixMap from_action(Index in_rows, Index in_cols, Index out_rows, Index out_cols,
                               const std::function<CMatrix(const CMatrix&)>& action);
  static MatrixMap identity(Index n);
  static MatrixMap identity_rect(Index rows, Index cols);
  static MatrixMap zero(Index in_rows, Index in_cols, Index out_rows, Index out_cols);
  //! phi(A) = tr(A Omega) I on M_n for a density matrix Omega.
  static MatrixMap rank_one_state_map(const CMatrix& omega);
  //! Transfer-matrix constructor: T maps vec(A) to vec(phi(A)), column-major.
  static MatrixMap from_transfer(Index in_rows, Index in_cols, Index out_rows, Index out_cols,
                                 const CMatrix& transfer);

  Index in_rows() const { return in_rows_; }
  Index in_cols() const { return in_cols_; }
  Index out_rows() const { return out_rows_; }
  Index out_cols() const { return out_cols_; }
  bool square() const { return in_rows_ == in_cols_ && out_rows_ == out_cols_; }
  bool endomorphism() const { return in_rows_ == out_rows_ && in_cols_ == out_cols_; }
  //! Input algebra dimension (square maps).
  Index n_in() const;
  Index n_out() const;

  const CMatrix& choi() const { return choi_; }
  //! phi(e_ij), i.e. Choi block (i,j).
  CMatrix map_unit(Index i, Index j) const {
    return choi_.block(i * out_rows_, j * out_cols_, out_rows_, out_cols_);
  }
  CMatrix apply(const CMatrix& a) const;
  CMatrix transfer() const;

  MatrixMap operator+(const MatrixMap& other) const;
  MatrixMap operator-(const MatrixMap& other) const;
  MatrixMap operator*(Complex c) const;

private:
  Index in_rows_, in_cols_, out_rows_, out_cols_;
  CMatrix choi_;
};

inline MatrixMap operator*(Complex c, const MatrixMap& m) { return m * c; }

//! Entrywise Choi comparison with relative scale eps*(1+max scale).
bool maps_close(const MatrixMap& a, const MatrixMap& b, double eps);

//! (f . g)(a) = f(g(a)).
MatrixMap compose(const MatrixMap& f, const MatrixMap& g);

//! Involution gamma*(C) = [gamma(C*)]*. Satisfies gamma** = gamma.
MatrixMap adjoint_map(const MatrixMap& gamma);

//! phi_U(A) = U* phi(U A U*) U; preserves unitality and complete positivity.
MatrixMap conjugate_by_unitary(const MatrixMap& phi, const CMatrix& u, const Tolerance& tol = {});

struct CpVerdict {
  bool verdict;
  double min_eig;
};

//! Complete positivity via Choi PSD-ness. A Choi matrix that is not Hermitian
//! (the map does not preserve Hermiticity) yields verdict=false, with min_eig
//! reported from the Hermitian part.
CpVerdict is_completely_positive(const MatrixMap& phi, const Tolerance& tol = {});

//! Schur (Hadamard multiplier) map phi(e_ij) = q_ij e_ij.
MatrixMap make_schur(const CMatrix& q);

//! Recovers q from a Schur map; NotSchur if some phi(e_ij) has support off
//! position (i,j).
CMatrix schur_coefficients(const MatrixMap& phi, const Tolerance& tol = {});

bool is_schur(const MatrixMap& phi, const Tolerance& tol = {});

//! Direct-sum block sizes (n_1,...,n_k), all >= 1.
class Decomposition {
public:
  explicit Decomposition(std::vector<Index> sizes);
  const std::vector<Index>& sizes() const { return sizes_; }
  Index total() const { return total_; }
  Index count() const { return static_cast<Index>(sizes_.size()); }
  Index offset(Index block) const { return offsets_[static_cast<std::size_t>(block)]; }
  Index block_of(Index flat_index) const;

private:
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;
  Index total_ = 0;
};

//! True iff for every matrix unit in input block (r,s), the image is supported
//! in output block (r,s): [phi(A)]_ij depends only on A_ij.
bool is_generalized_schur(const MatrixMap& phi, const Decomposition& d_in,
                          const Decomposition& d_out, const Tolerance& tol = {});

//! Block map phi_ij(X) = [phi(X^{ij})]_{ij} of a generalized Schur map.
MatrixMap restrict_block(const MatrixMap& phi, const Decomposition& d_in,
                         const Decomposition& d_out, Index i, Index j,
                         const Tolerance& tol = {});

//! Rebuilds the full map from its k x k grid of block maps.
MatrixMap assemble_generalized_schur(const Decomposition& d_in, const Decomposition& d_out,
                                     const std::vector<std::vector<MatrixMap>>& blocks);

struct MatrixZeroesReport {
  double max_hypothesis_residual;  // max over i!=j of ||f_i phi(e_j) f_i||
  double max_violation;            // worst deviation in the conclusion identities
};

//! Checks the compression identity for a contractive CP map phi and two
//! families of orthogonal projections summing to I: if f_i phi(e_j) f_i = 0
//! for all i != j, then f_i phi(e_i a e_j) f_j = phi(e_i a e_j) = f_i phi(a) f_j.
//! Throws HypothesisFails (with the offending pair) when the premise is
//! violated, NotContractive when ||phi(I)|| > 1 + eps_eq.
MatrixZeroesReport check_matrixzeroes_property(const MatrixMap& phi,
                                               const std::vector<CMatrix>& in_projections,
                                               const std::vector<CMatrix>& out_projections,
                                               const Tolerance& tol = {});

}  // namespace qcl
