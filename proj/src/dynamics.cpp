#include "isolump/dynamics.hpp"

#include "element_loop.hpp"
#include "isolump/catalog.hpp"
#include "isolump/error.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>

namespace isolump {

Index step_count(double T, double dt) {
  require(dt > 0.0 && T >= 0.0, ErrorKind::invalid_argument, "need dt > 0 and T >= 0");
  return static_cast<Index>(std::floor(T / dt * (1.0 + 1e-12)));
}

Trajectory central_difference(const LinearOperator& M_solve, const LinearOperator& K_apply, const TimeFunction& f,
                              const Vector& u0, const Vector& v0, double dt, double T,
                              const CentralDifferenceOptions& options) {
  require(u0.size() == v0.size(), ErrorKind::invalid_argument, "initial data sizes differ");
  Trajectory traj;
  traj.dt = dt;
  traj.steps = step_count(T, dt);
  auto accel = [&](const Vector& u, double t) {
    Vector r = -K_apply(u);
    if (f) r += f(t);
    return M_solve(r);
  };
  auto record = [&](double t, const Vector& u) {
    traj.times.push_back(t);
    traj.norms.push_back(u.norm());
    if (options.store_states) traj.states.push_back(u);
  };
  record(0.0, u0);
  if (traj.steps == 0) return traj;
  Vector prev = u0;
  Vector cur = u0 + dt * v0 + (0.5 * dt * dt) * accel(u0, 0.0);
  const double ref = std::max(u0.norm(), cur.norm());
  const double limit = options.blowup_factor * (ref > 0.0 ? ref : 1.0);
  auto blown = [&](const Vector& u) {
    const double nrm = u.norm();
    return !std::isfinite(nrm) || nrm > limit;
  };
  record(dt, cur);
  if (blown(cur)) {
    traj.stable = false;
    return traj;
  }
  for (Index step = 1; step < traj.steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    Vector next = 2.0 * cur - prev + (dt * dt) * accel(cur, t);
    prev = std::move(cur);
    cur = std::move(next);
    record(static_cast<double>(step + 1) * dt, cur);
    if (blown(cur)) {
      traj.stable = false;
      break;
    }
  }
  return traj;
}

double l2_error(const MultipatchTopology& topology, const Vector& coeffs, const ScalarField& exact) {
  require(coeffs.size() == topology.num_global(), ErrorKind::invalid_argument, "coefficient vector has wrong size");
  double sum = 0.0;
  for (Index r = 0; r < topology.num_patches(); ++r) {
    const auto ur = static_cast<std::size_t>(r);
    const SplineSpace& space = topology.spaces()[ur];
    const Patch& patch = topology.patches()[ur];
    const auto& map = topology.local_to_global()[ur];
    std::vector<Index> lookup(static_cast<std::size_t>(space.num_full()));
    for (Index f = 0; f < space.num_full(); ++f) {
      const Index dof = space.dof_of(multi_index(f, space.full_dims()));
      lookup[static_cast<std::size_t>(f)] = dof < 0 ? -1 : map[static_cast<std::size_t>(dof)];
    }
    const detail::ElementLoop loop(space, 1);
    detail::for_each_multi(loop.element_dims(), [&](const std::vector<Index>& e) {
      loop.visit(loop.lower(e), loop.upper(e),
                 [&](const Vector& xhat, double w, const Vector& N, const DenseMatrix&, const std::vector<Index>& full) {
                   double uh = 0.0;
                   for (std::size_t a = 0; a < full.size(); ++a) {
                     const Index g = lookup[static_cast<std::size_t>(full[a])];
                     if (g >= 0) uh += coeffs[g] * N[static_cast<Index>(a)];
                   }
                   const auto [x, jac] = patch.evaluate(xhat);
                   const double diff = uh - exact(x);
                   sum += w * std::abs(jac.det) * diff * diff;
                 });
    });
  }
  return std::sqrt(sum);
}

double manufactured_shape(const Vector& x) {
  const double a = x[0] * (x[0] + 4.0);
  const double b = x[1] * (x[1] - 4.0);
  const double c = x[0] * x[0] + x[1] * x[1] - 1.0;
  return a * b * c;
}

double manufactured_laplacian(const Vector& x) {
  const double a = x[0] * (x[0] + 4.0);
  const double b = x[1] * (x[1] - 4.0);
  const double c = x[0] * x[0] + x[1] * x[1] - 1.0;
  return 2.0 * b * c + 2.0 * a * c + 4.0 * a * b + 4.0 * x[0] * (2.0 * x[0] + 4.0) * b +
         4.0 * x[1] * (2.0 * x[1] - 4.0) * a;
}

Vector WaveProblem::load(double t) const {
  const double s = std::sin(2.0 * std::numbers::pi * t);
  return (-4.0 * std::numbers::pi * std::numbers::pi * s) * load_s - (2.0 + s) * load_laplace;
}

WaveProblem manufactured_wave_problem(int p, const std::vector<Index>& elements, bool two_patch) {
  MultipatchGeometry geo = two_patch ? plate_two_patch(true) : plate_with_hole(true);
  auto spaces = uniform_spaces(geo, p, p - 1, elements);
  WaveProblem prob;
  prob.topology = std::make_shared<MultipatchTopology>(std::move(geo), spaces);
  const ScalarField one = constant_field(1.0);
  prob.system = assemble_multipatch(*prob.topology, one, one);
  prob.load_s = assemble_load(*prob.topology, manufactured_shape);
  prob.load_laplace = assemble_load(*prob.topology, manufactured_laplacian);
  Eigen::SimplicialLLT<SparseMatrix> llt(prob.system.global.M.matrix);
  require(llt.info() == Eigen::Success, ErrorKind::not_positive_definite, "mass matrix is not positive definite");
  prob.u0 = llt.solve(2.0 * prob.load_s);
  prob.v0 = llt.solve(2.0 * std::numbers::pi * prob.load_s);
  prob.exact = [](const Vector& x, double t) {
    return manufactured_shape(x) * (2.0 + std::sin(2.0 * std::numbers::pi * t));
  };
  return prob;
}

double stability_boundary(const LinearOperator& M_solve, const LinearOperator& K_apply, Index n, double guess,
                          Index steps, std::uint64_t seed, double rel_tol) {
  require(guess > 0.0 && steps >= 1, ErrorKind::invalid_argument, "need a positive guess and at least one step");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector u0(n);
  for (Index i = 0; i < n; ++i) u0[i] = dist(rng);
  const Vector v0 = Vector::Zero(n);
  CentralDifferenceOptions opts;
  opts.store_states = false;
  auto stable = [&](double dt) {
    const double T = (static_cast<double>(steps) + 0.5) * dt;
    return central_difference(M_solve, K_apply, {}, u0, v0, dt, T, opts).stable;
  };
  double lo = 0.5 * guess;
  double hi = 2.0 * guess;
  for (int i = 0; i < 60 && !stable(lo); ++i) lo *= 0.5;
  for (int i = 0; i < 60 && stable(hi); ++i) hi *= 2.0;
  while ((hi - lo) > rel_tol * lo) {
    const double mid = 0.5 * (lo + hi);
    (stable(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double iteration_ratio(double T, double dt_plain, double dt_scaled, Index lanczos_iterations) {
  require(T > 0.0 && dt_plain > 0.0 && dt_scaled > 0.0, ErrorKind::invalid_argument, "need positive T and steps");
  return (T / dt_scaled + static_cast<double>(lanczos_iterations)) / (T / dt_plain);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::vector<double>& l2_errors) {
  out << "t,norm,l2_error\n" << std::setprecision(17);
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    out << traj.times[j] << ',' << traj.norms[j] << ',';
    if (j < l2_errors.size()) out << l2_errors[j];
    out << '\n';
  }
}

}  // namespace isolump
