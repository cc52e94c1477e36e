#pragma once

#include "isolump/assembly.hpp"
#include "isolump/lumping.hpp"
#include "isolump/spectral.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace isolump {

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Global lumped mass sum_r R_r^T L(M_r) R_r of an assembled multipatch system.
SparseMatrix lumped_mass(const MultipatchSystem& system, const MultipatchTopology& topology, const LumpSpec& spec);

/// Smallest eigenvalue of (K, M) for SPD K and M. Dense when n <= dense_limit,
/// otherwise the largest eigenvalue of the inverted pencil (M, K) by Lanczos
/// with a tight tolerance.
double smallest_eigenvalue(const SparseMatrix& K, const SparseMatrix& M, Index dense_limit = 2000,
                           std::uint64_t seed = 1);

/// Ascending eigenvalues of (K, M) by the dense oracle.
Vector pencil_spectrum(const SparseMatrix& K, const SparseMatrix& M);

struct ConvergenceStudy {
  std::vector<std::string> labels;
  std::vector<Index> elements;
  std::vector<double> h;
  std::vector<std::vector<double>> errors;  ///< errors[lump][level], (omega - omega_h) / omega
  std::vector<double> slopes;               ///< fitted on |error| against h
  double reference_omega = 0.0;
  Index reference_elements = 0;
};

/// First-frequency convergence on refinements `elements` (elements per
/// direction and patch). The reference is the consistent-mass omega_1 on
/// `reference_elements`, by default a mesh two levels (factor 4) finer than
/// the last one.
ConvergenceStudy convergence_study(const MultipatchGeometry& geometry, const ScalarField& rho,
                                   const ScalarField& kappa, int p, int k, const std::vector<Index>& elements,
                                   const std::vector<LumpSpec>& lumps, std::uint64_t seed = 1,
                                   Index reference_elements = 0);

struct RatioCurve {
  Index rank = 0;
  Index lanczos_iterations = 0;
  double dt_plain = 0.0;   ///< safeguarded step of the unscaled pencil
  double dt_scaled = 0.0;  ///< safeguarded step after deflating `rank` eigenvalues
  std::vector<double> ratios;
};

/// Iteration ratio (N_s + N_i) / N_w over the time spans `T` for each rank,
/// with N_i the Lanczos iterations needed for the top rank + 1 pairs.
std::vector<RatioCurve> ratio_study(const SparseMatrix& K, const SparseMatrix& M, const std::vector<Index>& ranks,
                                    const std::vector<double>& T, double safeguard, const LanczosConfig& config,
                                    std::uint64_t seed);

}  // namespace isolump
