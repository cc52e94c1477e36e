#pragma once

#include "isolump/linalg.hpp"
#include "isolump/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace isolump {

struct LanczosConfig {
  int k = 10;             ///< wanted eigenpairs (largest)
  int m = 0;              ///< basis size; 0 means 2k
  double tol = 1e-3;      ///< relative residual |Au - lambda Bu| / (lambda |Bu|)
  int max_restarts = 500;
  bool full_reorthogonalization = true;

  int basis_size() const { return m > 0 ? m : 2 * k; }
};

struct LanczosResult {
  Vector values;        ///< descending
  DenseMatrix vectors;  ///< B-orthonormal Ritz vectors
  Vector residuals;     ///< relative residual per pair
  bool converged = false;
  Index iterations = 0;  ///< Lanczos steps (one A-apply and one B-solve each)
  Index matvecs = 0;     ///< A-applies including residual checks
  Index restarts = 0;
};

/// Largest eigenpairs of A u = lambda B u by Lanczos on B^-1 A with full
/// B-reorthogonalization and thick restart. Never throws on
/// non-convergence; check `converged`.
LanczosResult lanczos(const LinearOperator& A_apply, const LinearOperator& B_solve, const LinearOperator& B_apply,
                      Index n, const LanczosConfig& config, std::uint64_t seed);

/// Dense or Lanczos top eigenpairs of (A, B), B SPD: `count` largest pairs,
/// descending. Dense when n <= dense_limit.
struct Eigenpairs {
  Vector values;        ///< descending
  DenseMatrix vectors;  ///< B-orthonormal
  bool converged = true;
  Index iterations = 0;
};
Eigenpairs top_eigenpairs(const SparseMatrix& A, const SparseMatrix& B, int count, const LanczosConfig& config,
                          std::uint64_t seed, Index dense_limit = 600);

enum class DeflationMode { scale_stiffness, scale_mass };

/// Pencil (A, B) with its top r eigenvalues mapped to lambda_{n-r}:
/// A + V f(D2) V^T (scale-stiffness, f = lambda_cut - lambda) or
/// B + V g(D2) V^T (scale-mass, g = lambda / lambda_cut - 1), V = B U2.
struct ScaledPencil {
  const SparseMatrix* A = nullptr;
  const SparseMatrix* B = nullptr;
  DenseMatrix U2;  ///< top r eigenvectors, ascending eigenvalue order
  DenseMatrix V;   ///< B U2
  Vector D2;       ///< top r eigenvalues, ascending
  double lambda_cut = 0.0;
  DeflationMode mode = DeflationMode::scale_mass;

  Index rank() const { return D2.size(); }
  Vector f_values() const;
  Vector g_values() const;
  /// Explicit dense scaled matrices (small n only).
  DenseMatrix dense_A() const;
  DenseMatrix dense_B() const;
  /// Scaled stiffness apply.
  Vector apply_A(const Vector& x) const;
};

/// `top` holds at least r + 1 pairs, descending (as returned by lanczos).
/// Requires r <= n / 4.
ScaledPencil deflate(const SparseMatrix& A, const SparseMatrix& B, Index r, DeflationMode mode, const Eigenpairs& top);

/// B-bar^-1 rhs through the Woodbury form; `base` factorizes B.
Vector scaled_mass_solve(const ScaledPencil& pencil, const FactorizedOperator& base, const Vector& rhs);

/// S + W diag(F) W^T.
struct SparsePlusLowRank {
  SparseMatrix S;
  DenseMatrix W;
  Vector F;

  Index size() const { return S.rows(); }
  Vector apply(const Vector& x) const;
  DenseMatrix dense() const;
};

/// K_r + V f(D2) V^T with the top `rank` pairs of (K_r, P_r).
SparsePlusLowRank local_stiffness_scale(const SparseMatrix& K_r, const SparseMatrix& P_r, Index rank,
                                        const LanczosConfig& config, std::uint64_t seed);

/// sum_r R_r^T (S_r + W_r F_r W_r^T) R_r.
SparsePlusLowRank assemble_scaled(const std::vector<SparsePlusLowRank>& locals,
                                  const std::vector<std::vector<Index>>& maps, Index num_global);

/// 2 / sqrt(lambda_max).
double critical_timestep(double lambda_max);

/// sqrt(lambda_n / lambda_{n-r}).
double cfl_gain(double lambda_n, double lambda_n_minus_r);

/// Eigenvalues below rel * max are zero modes.
struct SpectrumSplit {
  std::vector<double> zero;
  std::vector<double> nonzero;
};
SpectrumSplit split_zero_modes(const Vector& ascending, double rel = 1e-8);

/// "k,lambda_k,label" rows (k from 1, values at 17 significant digits).
void write_spectrum_csv(std::ostream& out, const std::vector<double>& ascending, const std::string& label,
                        bool header = true);

}  // namespace isolump
