#pragma once

#include "isolump/geometry.hpp"
#include "isolump/lumping.hpp"

#include <iosfwd>
#include <vector>

namespace isolump {

/// Stiffness and mass over the dofs of a (possibly trimmed) space.
struct AssembledPair {
  HierBandedMatrix K;
  HierBandedMatrix M;
  /// Dirichlet-constrained tensor dims of the underlying space.
  std::vector<Index> tensor_dims;
  /// tensor_index[dof]: linear index of the dof in tensor_dims numbering
  /// (identity unless the system was trimmed).
  std::vector<Index> tensor_index;

  Index size() const { return M.rows(); }
};

AssembledPair assemble_single_patch(const SplineSpace& space, const Patch& patch, const ScalarField& rho,
                                    const ScalarField& kappa);

struct MultipatchSystem {
  AssembledPair global;               ///< tagged as a single level of size num_global
  std::vector<AssembledPair> locals;  ///< per patch, over the constrained local dofs
};

MultipatchSystem assemble_multipatch(const MultipatchTopology& topology, const ScalarField& rho,
                                     const ScalarField& kappa);

/// Inside elements use the standard rule, cut elements integrate every
/// retained subcell (center inside the region) of depth `subdepth` with the
/// same rule, outside elements are skipped. Only active, unconstrained dofs
/// are kept.
AssembledPair assemble_trimmed(const SplineSpace& space, const Patch& patch, const TrimMask& mask,
                               const ScalarField& rho, const ScalarField& kappa, int subdepth);

/// Load vector F_i = int f phi_i over a single patch or a multipatch topology.
Vector assemble_load(const SplineSpace& space, const Patch& patch, const ScalarField& f);
Vector assemble_load(const MultipatchTopology& topology, const ScalarField& f);

/// sum_r R_r^T A_r R_r.
SparseMatrix scatter_locals(const std::vector<SparseMatrix>& locals, const std::vector<std::vector<Index>>& maps,
                            Index num_global);

struct JacobiScaled {
  SparseMatrix A;
  SparseMatrix B;
  Vector D;  ///< d_i = 1 / sqrt(b_ii)
};

/// (DAD, DBD) with D = diag(b_ii)^-1/2.
JacobiScaled jacobi_rescale(const SparseMatrix& A, const SparseMatrix& B);

/// One "row col value" line per stored entry, values at 17 significant digits.
void write_triplets(std::ostream& out, const SparseMatrix& A);
SparseMatrix read_triplets(std::istream& in, Index rows, Index cols);

}  // namespace isolump
