#pragma once

#include "isolump/types.hpp"

#include <string>
#include <vector>

namespace isolump {

/// Symmetric sparse matrix tagged with its tensor structure: dims n and
/// per-level bandwidths b. Rows are numbered lexicographically with
/// direction 0 slowest, so level k blocks have size r_k = prod_{j>k} n_j.
struct HierBandedMatrix {
  SparseMatrix matrix;
  std::vector<Index> dims;
  std::vector<Index> bandwidths;

  Index rows() const { return matrix.rows(); }
  int levels() const { return static_cast<int>(dims.size()); }
  /// r_k for k = 1..d (stored 0-based), r_d = 1.
  std::vector<Index> block_sizes() const;
  /// Throws missing-structure unless dims/bandwidths are consistent with the matrix.
  void check_structure() const;
};

/// Tags a matrix with dims and the bandwidths measured from its pattern.
HierBandedMatrix tag_structure(SparseMatrix matrix, std::vector<Index> dims);

/// Per-level bandwidths read off the nonzero pattern: b_k is the largest
/// |i_k - j_k| over all nonzero entries (i, j), with i_k the k-th digit.
std::vector<Index> measure_bandwidths(const SparseMatrix& A, const std::vector<Index>& dims);

/// Largest |i - j| over stored nonzeros.
Index scalar_bandwidth(const SparseMatrix& A);

/// Absolute row sums.
Vector rowsum_diagonal(const SparseMatrix& B);
SparseMatrix lump_rowsum(const SparseMatrix& B);

/// Top-level block lumping L(B).
HierBandedMatrix block_lump(const HierBandedMatrix& B);

/// P_i = D_i + L(R_i), 1 <= i <= n_1. For d = 1 the blocks are scalars and
/// L is the absolute row-sum operator.
HierBandedMatrix block_lumped_family(const HierBandedMatrix& B, Index i);

/// H_k, 1 <= k <= d. H_d is the absolute row-sum lumping of H_{d-1}.
HierBandedMatrix hierarchical_lump(const HierBandedMatrix& B, int k);

/// Selection of a lumping technique.
struct LumpSpec {
  enum class Kind { consistent, block, hierarchical, rowsum };
  Kind kind = Kind::consistent;
  Index index = 1;  ///< i for block (P_i), k for hierarchical (H_k)

  static LumpSpec consistent() { return {Kind::consistent, 0}; }
  static LumpSpec block(Index i) { return {Kind::block, i}; }
  static LumpSpec hierarchical(Index k) { return {Kind::hierarchical, k}; }
  static LumpSpec rowsum() { return {Kind::rowsum, 0}; }

  /// "M", "P<i>", "H<k>" or "rowsum".
  std::string label() const;
  static LumpSpec parse(const std::string& label);
};

/// Applies a lumping technique. For block lumping, i larger than n_1 is
/// clamped to n_1 (which returns B).
HierBandedMatrix apply_lump(const HierBandedMatrix& B, const LumpSpec& spec);

/// sum_r R_r^T P_r R_r with P_r = apply_lump(locals[r], spec).
SparseMatrix multipatch_lump(const std::vector<HierBandedMatrix>& locals, const std::vector<std::vector<Index>>& maps,
                             Index num_global, const LumpSpec& spec);

/// Embeds M into the full tensor of size prod(dims) (embedding[a] is the
/// tensor index of row a), lumps, and removes the padded rows and columns.
SparseMatrix pad_lump_trim(const SparseMatrix& M, const std::vector<Index>& embedding, const std::vector<Index>& dims,
                           const LumpSpec& spec);

}  // namespace isolump
