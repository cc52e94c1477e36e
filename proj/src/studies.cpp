#include "isolump/studies.hpp"

#include "isolump/catalog.hpp"
#include "isolump/dynamics.hpp"
#include "isolump/error.hpp"
#include "isolump/linalg.hpp"

#include <cmath>

namespace isolump {

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::invalid_argument, "need at least two points");
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, ErrorKind::invalid_argument, "log-log fit needs positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SparseMatrix lumped_mass(const MultipatchSystem& system, const MultipatchTopology& topology, const LumpSpec& spec) {
  std::vector<HierBandedMatrix> locals;
  for (const auto& l : system.locals) locals.push_back(l.M);
  return multipatch_lump(locals, topology.local_to_global(), topology.num_global(), spec);
}

Vector pencil_spectrum(const SparseMatrix& K, const SparseMatrix& M) {
  return dense_generalized_eig(DenseMatrix(K), DenseMatrix(M), false).values;
}

double smallest_eigenvalue(const SparseMatrix& K, const SparseMatrix& M, Index dense_limit, std::uint64_t seed) {
  const Index n = K.rows();
  if (n <= dense_limit) return pencil_spectrum(K, M)[0];
  const auto kfac = factorize(K);
  LanczosConfig cfg;
  cfg.k = 1;
  cfg.m = 20;
  cfg.tol = 1e-10;
  const auto res = lanczos(as_operator(M), kfac->as_solver(), as_operator(K), n, cfg, seed);
  require(res.converged, ErrorKind::no_convergence, "reference eigenvalue did not converge");
  return 1.0 / res.values[0];
}

ConvergenceStudy convergence_study(const MultipatchGeometry& geometry, const ScalarField& rho,
                                   const ScalarField& kappa, int p, int k, const std::vector<Index>& elements,
                                   const std::vector<LumpSpec>& lumps, std::uint64_t seed, Index reference_elements) {
  require(elements.size() >= 3, ErrorKind::invalid_argument, "convergence study needs at least 3 levels");
  ConvergenceStudy out;
  for (const auto& l : lumps) out.labels.push_back(l.label());
  out.errors.assign(lumps.size(), {});
  out.elements = elements;

  out.reference_elements = reference_elements > 0 ? reference_elements : elements.back() * 4;
  {
    const MultipatchTopology topo(geometry, uniform_spaces(geometry, p, k, {out.reference_elements}));
    const auto sys = assemble_multipatch(topo, rho, kappa);
    out.reference_omega = std::sqrt(smallest_eigenvalue(sys.global.K.matrix, sys.global.M.matrix, 2000, seed));
  }
  for (const Index N : elements) {
    out.h.push_back(1.0 / static_cast<double>(N));
    const MultipatchTopology topo(geometry, uniform_spaces(geometry, p, k, {N}));
    const auto sys = assemble_multipatch(topo, rho, kappa);
    for (std::size_t j = 0; j < lumps.size(); ++j) {
      const SparseMatrix M = lumped_mass(sys, topo, lumps[j]);
      const double omega = std::sqrt(smallest_eigenvalue(sys.global.K.matrix, M, 2000, seed));
      out.errors[j].push_back((out.reference_omega - omega) / out.reference_omega);
    }
  }
  for (const auto& err : out.errors) {
    std::vector<double> mag;
    for (double e : err) mag.push_back(std::abs(e));
    out.slopes.push_back(fit_loglog_slope(out.h, mag));
  }
  return out;
}

std::vector<RatioCurve> ratio_study(const SparseMatrix& K, const SparseMatrix& M, const std::vector<Index>& ranks,
                                    const std::vector<double>& T, double safeguard, const LanczosConfig& config,
                                    std::uint64_t seed) {
  require(safeguard > 0.0, ErrorKind::invalid_argument, "safeguard must be positive");
  const Index n = K.rows();
  const auto mfac = factorize(M);
  const auto solve = mfac->as_solver();
  LanczosConfig top = config;
  top.k = 1;
  top.m = 0;
  const auto first = lanczos(as_operator(K), solve, as_operator(M), n, top, seed);
  require(first.converged, ErrorKind::no_convergence, "largest eigenvalue did not converge");
  const double dt_plain = safeguard * critical_timestep(first.values[0]);
  std::vector<RatioCurve> out;
  for (const Index r : ranks) {
    require(r >= 1 && r <= n / 4, ErrorKind::invalid_argument, "rank must satisfy 1 <= r <= n / 4");
    LanczosConfig cfg = config;
    cfg.k = static_cast<int>(r + 1);
    cfg.m = 0;
    const auto res = lanczos(as_operator(K), solve, as_operator(M), n, cfg, seed);
    require(res.converged, ErrorKind::no_convergence, "deflation eigenpairs did not converge");
    RatioCurve c;
    c.rank = r;
    c.lanczos_iterations = res.iterations;
    c.dt_plain = dt_plain;
    c.dt_scaled = safeguard * critical_timestep(res.values[r]);
    for (const double t : T) c.ratios.push_back(iteration_ratio(t, c.dt_plain, c.dt_scaled, c.lanczos_iterations));
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace isolump
