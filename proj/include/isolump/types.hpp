#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <functional>
#include <vector>

namespace isolump {

using Index = std::int64_t;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, Index>;
using Triplet = Eigen::Triplet<double, Index>;

/// y = Op(x). Implementations must be reentrant.
using LinearOperator = std::function<Vector(const Vector&)>;

/// Product of the entries of `dims` (number of dofs of a tensor grid).
inline Index product(const std::vector<Index>& dims) {
  Index n = 1;
  for (Index v : dims) n *= v;
  return n;
}

/// Lexicographic multi-index <-> linear index. Direction 0 varies slowest,
/// so the top-level blocks of a tensor matrix are indexed by direction 0.
inline Index linear_index(const std::vector<Index>& multi, const std::vector<Index>& dims) {
  Index idx = 0;
  for (std::size_t l = 0; l < dims.size(); ++l) idx = idx * dims[l] + multi[l];
  return idx;
}

inline std::vector<Index> multi_index(Index idx, const std::vector<Index>& dims) {
  std::vector<Index> multi(dims.size());
  for (std::size_t l = dims.size(); l-- > 0;) {
    multi[l] = idx % dims[l];
    idx /= dims[l];
  }
  return multi;
}

inline LinearOperator as_operator(const SparseMatrix& A) {
  return [&A](const Vector& x) -> Vector { return A * x; };
}

}  // namespace isolump
