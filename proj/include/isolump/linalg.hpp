#pragma once

#include "isolump/types.hpp"

#include <memory>
#include <vector>

namespace isolump {

/// Factorized SPD operator; solve() is const and reentrant.
class FactorizedOperator {
 public:
  virtual ~FactorizedOperator() = default;
  virtual Index size() const = 0;
  virtual Vector solve(const Vector& rhs) const = 0;
  /// Solve as a LinearOperator. The operator must outlive the returned function.
  LinearOperator as_solver() const;
};

/// Cholesky factorization A = L L^T of a banded SPD matrix, stored by
/// diagonals. A negative bandwidth means "measure it from the pattern".
class BandedCholesky final : public FactorizedOperator {
 public:
  explicit BandedCholesky(const SparseMatrix& A, Index bandwidth = -1);

  Index size() const override { return n_; }
  Index bandwidth() const { return bw_; }
  Vector solve(const Vector& rhs) const override;
  /// L(i, j) for 0 <= i - j <= bandwidth (zero outside the band).
  double factor(Index i, Index j) const;

 private:
  Index n_ = 0;
  Index bw_ = 0;
  std::vector<double> band_;  ///< row-wise: band_[i * (bw_ + 1) + (j - i + bw_)] = L(i, j)
};

/// Block solver for a saddle point ordering [D C; C^T X] where D holds the
/// patch-interior dofs (block diagonal, one banded Cholesky per block) and
/// X the dofs shared by several patches. The Schur complement
/// S = X - C^T D^-1 C is formed densely once.
class SchurSaddle final : public FactorizedOperator {
 public:
  /// `interior[r]` lists the global dofs owned only by block r (in any
  /// order); `shared` lists the remaining dofs.
  SchurSaddle(const SparseMatrix& P, std::vector<std::vector<Index>> interior, std::vector<Index> shared);

  /// Splits dofs by multiplicity: a dof is shared iff it appears in more than one map.
  static SchurSaddle from_maps(const SparseMatrix& P, const std::vector<std::vector<Index>>& maps);

  Index size() const override { return n_; }
  Index num_shared() const { return static_cast<Index>(shared_.size()); }
  Vector solve(const Vector& rhs) const override;

 private:
  Index n_ = 0;
  std::vector<std::vector<Index>> interior_;
  std::vector<Index> shared_;
  std::vector<std::unique_ptr<BandedCholesky>> blocks_;
  std::vector<SparseMatrix> coupling_;  ///< C_r: interior of block r x shared
  Eigen::LLT<DenseMatrix> schur_;
};

/// Diagonal solve.
class DiagonalSolver final : public FactorizedOperator {
 public:
  explicit DiagonalSolver(Vector diagonal);
  Index size() const override { return diag_.size(); }
  Vector solve(const Vector& rhs) const override { return rhs.cwiseQuotient(diag_); }

 private:
  Vector diag_;
};

/// Picks the cheapest structured factorization: diagonal if the matrix is
/// diagonal, banded Cholesky otherwise.
std::unique_ptr<FactorizedOperator> factorize(const SparseMatrix& A);

/// (B + U2 diag(g) U2^T)^-1 rhs for B-orthonormal U2, computed as
/// B^-1 rhs - U2 diag(g / (1 + g)) U2^T rhs.
Vector woodbury_solve(const FactorizedOperator& base, const DenseMatrix& U2, const Vector& g, const Vector& rhs);

struct GeneralizedEigen {
  Vector values;        ///< ascending
  DenseMatrix vectors;  ///< B-orthonormal columns
};

/// Dense symmetric-definite eigensolver for A u = lambda B u.
GeneralizedEigen dense_generalized_eig(const DenseMatrix& A, const DenseMatrix& B, bool want_vectors = true);

/// sum_k b_k r_k with r_k = prod_{j>k} n_j.
Index hier_bandwidth(const std::vector<Index>& b, const std::vector<Index>& n);

}  // namespace isolump
