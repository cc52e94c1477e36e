#pragma once

#include "isolump/assembly.hpp"
#include "isolump/geometry.hpp"
#include "isolump/types.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace isolump {

/// Load vector at time t.
using TimeFunction = std::function<Vector(double t)>;

struct CentralDifferenceOptions {
  bool store_states = true;  ///< keep every coefficient vector
  double blowup_factor = 1e6;
};

/// Central-difference time history. Samples are t_j = j * dt for
/// j = 0..steps; if the run blows up it stops early and `stable` is false.
struct Trajectory {
  double dt = 0.0;
  Index steps = 0;            ///< floor(T / dt) requested steps
  std::vector<double> times;  ///< sample times actually computed
  std::vector<double> norms;  ///< Euclidean coefficient norms
  std::vector<Vector> states;
  bool stable = true;
};

/// Number of steps floor(T / dt) with a tolerance for round-off in T / dt.
Index step_count(double T, double dt);

Trajectory central_difference(const LinearOperator& M_solve, const LinearOperator& K_apply, const TimeFunction& f,
                              const Vector& u0, const Vector& v0, double dt, double T,
                              const CentralDifferenceOptions& options = {});

/// Physical field evaluated at a point and time.
using SpaceTimeField = std::function<double(const Vector& x, double t)>;

/// L2 norm of u_h - exact over a (multipatch) domain with Gauss rules of p+2
/// points per direction.
double l2_error(const MultipatchTopology& topology, const Vector& coeffs, const ScalarField& exact);

/// Wave problem rho u_tt - kappa Laplace u = f with the manufactured solution
/// u = x y (x+4) (y-4) (x^2+y^2-1) (2 + sin 2 pi t) on the quarter plate,
/// rho = kappa = 1.
struct WaveProblem {
  std::shared_ptr<MultipatchTopology> topology;
  MultipatchSystem system;
  Vector load_s;        ///< int S phi
  Vector load_laplace;  ///< int (Laplace S) phi
  Vector u0;            ///< L2 projection of u(., 0)
  Vector v0;            ///< L2 projection of u_t(., 0)
  SpaceTimeField exact;

  /// F(t) = -4 pi^2 sin(2 pi t) load_s - (2 + sin 2 pi t) load_laplace.
  Vector load(double t) const;
};

/// Spatial factor S and its Laplacian.
double manufactured_shape(const Vector& x);
double manufactured_laplacian(const Vector& x);

/// Builds the problem on the one- or two-patch plate with `elements`
/// per direction and patch.
WaveProblem manufactured_wave_problem(int p, const std::vector<Index>& elements, bool two_patch = false);

/// Empirical stability limit of the central difference method: bisection
/// on dt with f = 0, random u0, v0 = 0 and `steps` steps, starting from the
/// bracket [0.5, 2] * guess. Returns the midpoint of the final bracket.
double stability_boundary(const LinearOperator& M_solve, const LinearOperator& K_apply, Index n, double guess,
                          Index steps, std::uint64_t seed, double rel_tol = 1e-4);

/// Fractional iteration ratio (N_s + N_i) / N_w for a simulation of length
/// T: (T / dt_scaled + lanczos_iterations) / (T / dt_plain).
double iteration_ratio(double T, double dt_plain, double dt_scaled, Index lanczos_iterations);

/// "t,norm,l2_error" rows; l2 errors may be empty.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::vector<double>& l2_errors);

}  // namespace isolump
