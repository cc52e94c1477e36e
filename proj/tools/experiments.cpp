#include "experiments.hpp"

#include "svg_plot.hpp"

#include "isolump/assembly.hpp"
#include "isolump/catalog.hpp"
#include "isolump/dynamics.hpp"
#include "isolump/error.hpp"
#include "isolump/linalg.hpp"
#include "isolump/spectral.hpp"
#include "isolump/studies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <numbers>
#include <sstream>
#include <thread>

namespace isolump::cli {

namespace {

namespace fs = std::filesystem;

const std::set<std::string> kCommonKeys{"experiment", "output", "seed"};

std::set<std::string> keys(std::initializer_list<std::string> extra) {
  std::set<std::string> all = kCommonKeys;
  all.insert(extra.begin(), extra.end());
  return all;
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream f(path);
  require(static_cast<bool>(f), ErrorKind::io, "cannot write " + path.string());
  f << std::setprecision(17);
  return f;
}

// Runs body(0..count-1) on up to `threads` workers; rethrows the failure
// with the lowest index so errors are reproducible.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Problem {
  std::string id;
  int p = 2;
  int k = 1;
  std::vector<Index> elements;
  std::unique_ptr<MultipatchTopology> topology;
  MultipatchSystem system;

  int dim() const { return topology->patches().front().dim(); }
  const SparseMatrix& K() const { return system.global.K.matrix; }
  const SparseMatrix& M() const { return system.global.M.matrix; }
  SparseMatrix mass(const LumpSpec& spec) const { return lumped_mass(system, *topology, spec); }
};

struct Discretization {
  int p;
  int k;
};

Discretization read_degree(const ConfigNode& cfg) {
  const int p = cfg.get_int("p", 2, 1, 6);
  const int k = cfg.get_int("k", p - 1, 0, p - 1);
  return {p, k};
}

MultipatchGeometry read_geometry(const ConfigNode& cfg, std::string& id) {
  const auto ids = catalog_ids();
  bool dirichlet = true;
  if (!cfg.has("geometry")) cfg.fail("geometry", "missing geometry");
  if (cfg.raw().at("geometry").is_string()) {
    id = cfg.get_string("geometry", "", ids);
  } else {
    const ConfigNode g = cfg.child("geometry");
    g.allow_only({"id", "dirichlet"});
    if (!g.has("id")) g.fail("id", "missing geometry id");
    id = g.get_string("id", "", ids);
    dirichlet = g.get_bool("dirichlet", true);
  }
  return catalog_geometry(id, dirichlet);
}

std::vector<Index> read_elements(const ConfigNode& cfg, const std::string& key, int dim, Index fallback) {
  auto e = cfg.get_index_list(key, {fallback}, 1, 4096);
  if (e.size() != 1 && static_cast<int>(e.size()) != dim) {
    cfg.fail(key, "give one count or one per direction (" + std::to_string(dim) + ")");
  }
  return e;
}

Problem read_problem(const ConfigNode& cfg, Index default_elements) {
  Problem pr;
  MultipatchGeometry geo = read_geometry(cfg, pr.id);
  const auto [p, k] = read_degree(cfg);
  pr.p = p;
  pr.k = k;
  pr.elements = read_elements(cfg, "elements", geo.patches.front().dim(), default_elements);
  auto spaces = uniform_spaces(geo, p, k, pr.elements);
  pr.topology = std::make_unique<MultipatchTopology>(std::move(geo), std::move(spaces));
  const ScalarField one = constant_field(1.0);
  pr.system = assemble_multipatch(*pr.topology, one, one);
  return pr;
}

void write_resolved_config(const RunContext& ctx) {
  Json j = ctx.config.raw();
  j["seed"] = ctx.seed;
  j["output"] = ctx.out.string();
  std::ofstream f(ctx.out / "config.json");
  require(static_cast<bool>(f), ErrorKind::io, "cannot write config.json");
  f << j.dump(2) << '\n';
}

// Largest eigenvalue of (A, B): dense below the limit, otherwise Lanczos.
double largest_eigenvalue(const SparseMatrix& A, const SparseMatrix& B, Index dense_limit, std::uint64_t seed) {
  if (A.rows() <= dense_limit) {
    const Vector ev = pencil_spectrum(A, B);
    return ev[ev.size() - 1];
  }
  LanczosConfig cfg;
  cfg.k = 1;
  cfg.tol = 1e-8;
  const auto top = top_eigenpairs(A, B, 1, cfg, seed, 0);
  require(top.converged, ErrorKind::no_convergence, "largest eigenvalue did not converge");
  return top.values[0];
}

DeflationMode read_mode(const ConfigNode& cfg, const std::string& key) {
  return cfg.get_string(key, "mass", {"mass", "stiffness"}) == "mass" ? DeflationMode::scale_mass
                                                                      : DeflationMode::scale_stiffness;
}

// ---------------------------------------------------------------------------

void run_spectrum(const RunContext& ctx) {
  const ConfigNode& cfg = ctx.config;
  cfg.allow_only(keys({"geometry", "p", "k", "elements", "lumping", "pencil", "lanczos_k", "dense_limit", "scaled"}));
  const Problem pr = read_problem(cfg, 8);
  const auto lumps = cfg.get_lumps("lumping", {"M", "P1"}, pr.dim());
  const bool mass_pencil = cfg.get_string("pencil", "stiffness", {"stiffness", "mass"}) == "mass";
  const int lanczos_k = cfg.get_int("lanczos_k", 0, 0, 100000);
  const Index dense_limit = cfg.get_int("dense_limit", 4000, 1, 20000);
  const Index n = pr.K().rows();
  if (lanczos_k == 0 && n > dense_limit) {
    cfg.fail("lanczos_k", "problem has " + std::to_string(n) + " dofs, above dense_limit; set lanczos_k");
  }
  if (lanczos_k > 0 && 2 * lanczos_k > n) cfg.fail("lanczos_k", "must not exceed half the problem size");

  struct Curve {
    std::string label;
    std::vector<Index> index;  // 1-based positions in the ascending spectrum
    std::vector<double> values;
  };
  std::vector<std::pair<std::string, std::function<void(Curve&)>>> jobs;
  for (const auto& spec : lumps) {
    jobs.emplace_back(spec.label(), [&, spec](Curve& c) {
      const SparseMatrix P = pr.mass(spec);
      const SparseMatrix& A = mass_pencil ? pr.M() : pr.K();
      if (lanczos_k == 0) {
        const Vector ev = pencil_spectrum(A, P);
        for (Index i = 0; i < ev.size(); ++i) {
          c.index.push_back(i + 1);
          c.values.push_back(ev[i]);
        }
      } else {
        LanczosConfig lc;
        lc.k = lanczos_k;
        const auto top = top_eigenpairs(A, P, lanczos_k, lc, ctx.seed, 0);
        require(top.converged, ErrorKind::no_convergence, "Lanczos did not converge for " + spec.label());
        for (Index i = top.values.size(); i-- > 0;) {
          c.index.push_back(n - i);
          c.values.push_back(top.values[i]);
        }
      }
    });
  }
  if (cfg.has("scaled")) {
    const ConfigNode s = cfg.child("scaled");
    s.allow_only({"rank", "lumping", "mode"});
    const int rank = s.get_int("rank", 10, 0, static_cast<int>(n / 4));
    const auto base = s.get_lumps("lumping", {"P1"}, pr.dim());
    if (base.size() != 1) s.fail("lumping", "give exactly one lumping label");
    const DeflationMode mode = read_mode(s, "mode");
    if (lanczos_k > 0) s.fail("rank", "scaled curves need the dense spectrum (lanczos_k = 0)");
    const LumpSpec spec = base.front();
    jobs.emplace_back(spec.label() + "-scaled-r" + std::to_string(rank), [&, spec, rank, mode](Curve& c) {
      const SparseMatrix P = pr.mass(spec);
      LanczosConfig lc;
      lc.k = rank + 1;
      lc.tol = 1e-10;
      const auto top = top_eigenpairs(pr.K(), P, rank + 1, lc, ctx.seed, 0);
      require(top.converged, ErrorKind::no_convergence, "Lanczos did not converge for the scaled pencil");
      const auto pencil = deflate(pr.K(), P, rank, mode, top);
      const Vector ev = dense_generalized_eig(pencil.dense_A(), pencil.dense_B(), false).values;
      for (Index i = 0; i < ev.size(); ++i) {
        c.index.push_back(i + 1);
        c.values.push_back(ev[i]);
      }
    });
  }

  std::vector<Curve> curves(jobs.size());
  parallel_for(jobs.size(), ctx.threads, [&](std::size_t j) {
    curves[j].label = jobs[j].first;
    jobs[j].second(curves[j]);
  });

  auto csv = open_csv(ctx.out / "spectrum.csv");
  csv << "k,lambda,label\n";
  Plot plot;
  plot.title = pr.id + (mass_pencil ? " mass pencils" : " spectra") + ", p=" + std::to_string(pr.p);
  plot.xlabel = "k / n";
  plot.ylabel = mass_pencil ? "lambda_k(M, P)" : "lambda_k";
  plot.logy = !mass_pencil;
  for (const auto& c : curves) {
    Series s{c.label, {}, c.values};
    for (std::size_t i = 0; i < c.values.size(); ++i) {
      csv << c.index[i] << ',' << c.values[i] << ',' << c.label << '\n';
      s.x.push_back(static_cast<double>(c.index[i]) / static_cast<double>(n));
    }
    plot.series.push_back(std::move(s));
  }
  plot.save((ctx.out / "spectrum.svg").string());
}

void run_convergence(const RunContext& ctx) {
  const ConfigNode& cfg = ctx.config;
  cfg.allow_only(keys({"geometry", "p", "k", "levels", "lumping", "density", "reference_elements"}));
  std::string id;
  const MultipatchGeometry geo = read_geometry(cfg, id);
  const int dim = geo.patches.front().dim();
  const auto [p, k] = read_degree(cfg);
  const auto levels = cfg.get_index_list("levels", {2, 4, 8, 16}, 1, 1024);
  if (levels.size() < 3) cfg.fail("levels", "need at least 3 refinement levels");
  if (!std::is_sorted(levels.begin(), levels.end())) cfg.fail("levels", "levels must increase");
  const auto lumps = cfg.get_lumps("lumping", {"M", "P1"}, dim);
  const std::string density = cfg.get_string("density", "one", {"one", "sin-xy"});
  if (density == "sin-xy" && dim < 2) cfg.fail("density", "sin-xy needs a 2D or 3D geometry");
  const Index reference = cfg.get_int("reference_elements", 0, 0, 4096);
  const ScalarField rho = density == "one" ? constant_field(1.0) : ScalarField([](const Vector& x) {
    return std::abs(std::sin(x[0] * x[1])) + x[0] + x[1] + 1.0;
  });

  const auto study = convergence_study(geo, rho, constant_field(1.0), p, k, levels, lumps, ctx.seed, reference);

  auto csv = open_csv(ctx.out / "convergence.csv");
  csv << "label,elements,h,rel_error\n";
  Plot plot;
  plot.title = id + " first frequency, p=" + std::to_string(p);
  plot.xlabel = "h";
  plot.ylabel = "|omega - omega_h| / omega";
  plot.logx = plot.logy = true;
  for (std::size_t j = 0; j < study.labels.size(); ++j) {
    Series s{study.labels[j], study.h, {}, true};
    for (std::size_t l = 0; l < levels.size(); ++l) {
      csv << study.labels[j] << ',' << study.elements[l] << ',' << study.h[l] << ',' << study.errors[j][l] << '\n';
      s.y.push_back(std::abs(study.errors[j][l]));
    }
    plot.series.push_back(std::move(s));
  }
  auto slopes = open_csv(ctx.out / "slopes.csv");
  slopes << "label,slope\n";
  for (std::size_t j = 0; j < study.labels.size(); ++j) slopes << study.labels[j] << ',' << study.slopes[j] << '\n';
  auto ref = open_csv(ctx.out / "reference.csv");
  ref << "reference_elements,omega\n" << study.reference_elements << ',' << study.reference_omega << '\n';
  plot.save((ctx.out / "convergence.svg").string());
}

void run_simulate(const RunContext& ctx) {
  const ConfigNode& cfg = ctx.config;
  cfg.allow_only(keys({"p", "elements", "two_patch", "lumping", "T", "safeguard", "initial", "samples", "dense_limit"}));
  const int p = cfg.get_int("p", 3, 1, 6);
  const bool two_patch = cfg.get_bool("two_patch", false);
  const auto elements = read_elements(cfg, "elements", 2, 8);
  const auto lumps = cfg.get_lumps("lumping", {"M", "P1", "P2", "P3"}, 2);
  const double T = cfg.get_double("T", 6.0, 1e-12, 1e6);
  const double safeguard = cfg.get_double("safeguard", 0.85, 1e-6, 1.0);
  const bool zero = cfg.get_string("initial", "manufactured", {"manufactured", "zero"}) == "zero";
  const Index samples = cfg.get_int("samples", 200, 2, 1000000);
  const Index dense_limit = cfg.get_int("dense_limit", 4000, 1, 20000);

  const WaveProblem prob = manufactured_wave_problem(p, elements, two_patch);
  const MultipatchTopology& topo = *prob.topology;
  const SparseMatrix& K = prob.system.global.K.matrix;
  const Index n = K.rows();
  const Vector u0 = zero ? Vector::Zero(n) : prob.u0;
  const Vector v0 = zero ? Vector::Zero(n) : prob.v0;
  const TimeFunction load = zero ? TimeFunction{} : TimeFunction([&prob](double t) { return prob.load(t); });
  const SpaceTimeField exact = zero ? SpaceTimeField([](const Vector&, double) { return 0.0; }) : prob.exact;

  const double dt_common =
      safeguard * critical_timestep(largest_eigenvalue(K, prob.system.global.M.matrix, dense_limit, ctx.seed));

  struct Run {
    std::string label;
    std::string kind;
    double dt = 0.0;
    Trajectory sampled;
    std::vector<double> errors;
  };
  std::vector<Run> runs(2 * lumps.size());
  parallel_for(lumps.size(), ctx.threads, [&](std::size_t j) {
    const SparseMatrix P = lumped_mass(prob.system, topo, lumps[j]);
    const auto solver = factorize(P);
    const double dt_own = safeguard * critical_timestep(largest_eigenvalue(K, P, dense_limit, ctx.seed));
    for (int variant = 0; variant < 2; ++variant) {
      Run& run = runs[2 * j + static_cast<std::size_t>(variant)];
      run.label = lumps[j].label();
      run.kind = variant == 0 ? "common" : "critical";
      run.dt = variant == 0 ? dt_common : dt_own;
      const Trajectory tr = central_difference(solver->as_solver(), as_operator(K), load, u0, v0, run.dt, T);
      if (!tr.stable) throw Error(ErrorKind::no_convergence, run.label + " " + run.kind + " run blew up");
      const std::size_t count = tr.times.size();
      const std::size_t stride = std::max<std::size_t>(1, (count - 1) / static_cast<std::size_t>(samples - 1));
      run.sampled.dt = tr.dt;
      run.sampled.steps = tr.steps;
      for (std::size_t s = 0; s < count; s += stride) {
        const double t = tr.times[s];
        run.sampled.times.push_back(t);
        run.sampled.norms.push_back(tr.norms[s]);
        run.errors.push_back(l2_error(topo, tr.states[s], [&](const Vector& x) { return exact(x, t); }));
      }
    }
  });

  auto steps = open_csv(ctx.out / "steps.csv");
  steps << "label,run,dt,steps\n";
  Plot plot;
  plot.title = std::string(two_patch ? "two-patch " : "") + "plate, relative L2 error at the consistent step";
  plot.xlabel = "t";
  plot.ylabel = zero ? "L2 error" : "relative L2 error";
  plot.logy = !zero;
  for (const auto& run : runs) {
    steps << run.label << ',' << run.kind << ',' << run.dt << ',' << run.sampled.steps << '\n';
    auto csv = open_csv(ctx.out / ("trajectory_" + run.label + "_" + run.kind + ".csv"));
    write_trajectory_csv(csv, run.sampled, run.errors);
    if (run.kind != "common") continue;
    Series s{run.label, run.sampled.times, {}};
    for (std::size_t i = 0; i < run.errors.size(); ++i) {
      double scale = 1.0;
      if (!zero) {
        const double t = run.sampled.times[i];
        scale = l2_error(topo, Vector::Zero(n), [&](const Vector& x) { return exact(x, t); });
      }
      s.y.push_back(run.errors[i] / scale);
    }
    plot.series.push_back(std::move(s));
  }
  plot.save((ctx.out / "error.svg").string());
}

void run_deflate_ratio(const RunContext& ctx) {
  const ConfigNode& cfg = ctx.config;
  cfg.allow_only(keys({"geometry", "p", "k", "elements", "mass", "ranks", "T", "T_range", "safeguard", "lanczos"}));
  const Problem pr = read_problem(cfg, 16);
  const auto mass = cfg.get_lumps("mass", {"M"}, pr.dim());
  if (mass.size() != 1) cfg.fail("mass", "give exactly one lumping label");
  const Index n = pr.K().rows();
  const auto ranks = cfg.get_index_list("ranks", {10, 20, 40}, 1, n / 4);
  std::vector<double> T;
  if (cfg.has("T_range")) {
    if (cfg.has("T")) cfg.fail("T_range", "give either T or T_range");
    const ConfigNode r = cfg.child("T_range");
    r.allow_only({"min", "max", "points"});
    const double lo = r.get_double("min", 1e-4, 1e-12, 1e12);
    const double hi = r.get_double("max", 1e2, lo, 1e12);
    const int points = r.get_int("points", 25, 2, 10000);
    for (int i = 0; i < points; ++i) T.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1)));
  } else {
    T = cfg.get_double_list("T", {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0}, 1e-12, 1e12);
  }
  const double safeguard = cfg.get_double("safeguard", 0.85, 1e-6, 1.0);
  LanczosConfig lc;
  if (cfg.has("lanczos")) {
    const ConfigNode l = cfg.child("lanczos");
    l.allow_only({"tol", "m", "max_restarts"});
    lc.tol = l.get_double("tol", lc.tol, 1e-14, 0.5);
    lc.m = l.get_int("m", 0, 0, 100000);
    lc.max_restarts = l.get_int("max_restarts", lc.max_restarts, 1, 100000);
  }
  const auto curves = ratio_study(pr.K(), pr.mass(mass.front()), ranks, T, safeguard, lc, ctx.seed);

  auto csv = open_csv(ctx.out / "ratio.csv");
  csv << "rank,lanczos_iterations,dt_plain,dt_scaled,T,ratio\n";
  Plot plot;
  plot.title = pr.id + " iteration ratio (N_s + N_i) / N_w, " + mass.front().label();
  plot.xlabel = "T";
  plot.ylabel = "ratio";
  plot.logx = true;
  for (const auto& c : curves) {
    Series s{"r=" + std::to_string(c.rank), T, c.ratios};
    for (std::size_t i = 0; i < T.size(); ++i) {
      csv << c.rank << ',' << c.lanczos_iterations << ',' << c.dt_plain << ',' << c.dt_scaled << ',' << T[i] << ','
          << c.ratios[i] << '\n';
    }
    plot.series.push_back(std::move(s));
  }
  plot.series.push_back(Series{"1", {T.front(), T.back()}, {1.0, 1.0}});
  plot.save((ctx.out / "ratio.svg").string());
}

void run_trimmed_sweep(const RunContext& ctx) {
  const ConfigNode& cfg = ctx.config;
  cfg.allow_only(keys({"p", "k", "elements", "region", "angles", "lumping", "subdepth", "dense_limit"}));
  const auto [p, k] = read_degree(cfg);
  const auto elements = read_elements(cfg, "elements", 2, 20);
  const auto lumps = cfg.get_lumps("lumping", {"M", "P1", "P2", "rowsum"}, 2);
  const int subdepth = cfg.get_int("subdepth", 3, 0, 8);
  const Index dense_limit = cfg.get_int("dense_limit", 4000, 1, 20000);
  double scale = 1.0, sx = 0.0, sy = 0.0;
  if (cfg.has("region")) {
    const ConfigNode r = cfg.child("region");
    r.allow_only({"scale", "shift"});
    scale = r.get_double("scale", 1.0, 1e-3, 1.0);
    const auto shift = r.get_double_list("shift", {0.0, 0.0}, -1.0, 1.0);
    if (shift.size() != 2) r.fail("shift", "expected two numbers");
    sx = shift[0];
    sy = shift[1];
  }
  int count = 40;
  double amin = 0.0, amax = 2.0 * std::numbers::pi;
  if (cfg.has("angles")) {
    const ConfigNode a = cfg.child("angles");
    a.allow_only({"count", "min", "max"});
    count = a.get_int("count", count, 1, 100000);
    amin = a.get_double("min", amin, -1e3, 1e3);
    amax = a.get_double("max", amax, amin, 1e3);
  }

  const auto space = make_uniform_space(elements.size() == 1 ? std::vector<Index>{elements[0], elements[0]} : elements,
                                        p, k);
  const Patch patch = identity_patch(2);

  struct Row {
    std::string label;
    Index n = 0;
    Index zero_modes = 0;
    double lambda_max = 0.0;
  };
  std::vector<double> angles(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) angles[static_cast<std::size_t>(i)] = amin + (amax - amin) * i / count;
  std::vector<std::vector<Row>> rows(angles.size());
  const int width = static_cast<int>(std::to_string(count - 1).size());

  parallel_for(angles.size(), ctx.threads, [&](std::size_t a) {
    const auto mask = classify_elements(space, patch, rotated_square(scale, angles[a], sx, sy), subdepth);
    const auto pair = assemble_trimmed(space, patch, mask, constant_field(1.0), constant_field(1.0), subdepth);
    const SparseMatrix& K = pair.K.matrix;
    if (K.rows() > dense_limit) {
      throw Error(ErrorKind::config, "dense_limit: trimmed system has " + std::to_string(K.rows()) + " dofs");
    }
    std::ostringstream name;
    name << "spectrum_angle_" << std::setw(width) << std::setfill('0') << a << ".csv";
    auto csv = open_csv(ctx.out / name.str());
    csv << "k,lambda,label\n";
    for (const auto& spec : lumps) {
      const SparseMatrix P = spec.kind == LumpSpec::Kind::consistent
                                 ? pair.M.matrix
                                 : pad_lump_trim(pair.M.matrix, pair.tensor_index, pair.tensor_dims, spec);
      const auto scaled = jacobi_rescale(K, P);
      try {
        BandedCholesky chol(scaled.B);
      } catch (const Error&) {
        throw Error(ErrorKind::not_positive_definite,
                    spec.label() + " is not positive definite at angle " + std::to_string(angles[a]));
      }
      const Vector ev = pencil_spectrum(scaled.A, scaled.B);
      const auto split = split_zero_modes(ev);
      std::vector<double> asc(ev.data(), ev.data() + ev.size());
      write_spectrum_csv(csv, asc, spec.label(), false);
      rows[a].push_back({spec.label(), ev.size(), static_cast<Index>(split.zero.size()), ev[ev.size() - 1]});
    }
  });

  auto summary = open_csv(ctx.out / "summary.csv");
  summary << "angle_index,angle,label,n,zero_modes,lambda_max\n";
  Plot plot;
  plot.title = "trimmed rotated square, p=" + std::to_string(p) + ", largest eigenvalue";
  plot.xlabel = "angle";
  plot.ylabel = "lambda_max";
  plot.logy = true;
  for (const auto& spec : lumps) plot.series.push_back(Series{spec.label(), angles, {}, true});
  for (std::size_t a = 0; a < angles.size(); ++a) {
    for (std::size_t j = 0; j < rows[a].size(); ++j) {
      const Row& r = rows[a][j];
      summary << a << ',' << angles[a] << ',' << r.label << ',' << r.n << ',' << r.zero_modes << ',' << r.lambda_max
              << '\n';
      plot.series[j].y.push_back(r.lambda_max);
    }
  }
  plot.save((ctx.out / "lambda_max.svg").string());
}

void run_bandwidth_report(const RunContext& ctx) {
  const ConfigNode& cfg = ctx.config;
  cfg.allow_only(keys({"geometry", "cases", "lumping"}));
  std::string id;
  const MultipatchGeometry geo = read_geometry(cfg, id);
  if (geo.patches.size() != 1) cfg.fail("geometry", "bandwidth reports need a single-patch geometry");
  const int dim = geo.patches.front().dim();
  std::vector<std::string> fallback{"M"};
  for (int l = 1; l <= dim; ++l) fallback.push_back("H" + std::to_string(l));
  const auto lumps = cfg.get_lumps("lumping", fallback, dim);

  std::vector<std::pair<int, Index>> cases{{2, 6}, {3, 4}};
  if (cfg.has("cases")) {
    const Json& arr = cfg.raw().at("cases");
    if (!arr.is_array() || arr.empty()) cfg.fail("cases", "expected a non-empty array of {p, elements}");
    cases.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "cases[" + std::to_string(i) + "]";
      if (!arr[i].is_object()) cfg.fail(where, "expected an object with p and elements");
      const auto& c = arr[i];
      for (const auto& item : c.items()) {
        if (item.key() != "p" && item.key() != "elements") cfg.fail(where + "." + item.key(), "unknown key");
      }
      if (!c.contains("p") || !c["p"].is_number_integer() || c["p"].get<int>() < 1 || c["p"].get<int>() > 6) {
        cfg.fail(where + ".p", "expected an integer in [1, 6]");
      }
      if (!c.contains("elements") || !c["elements"].is_number_integer() || c["elements"].get<long long>() < 1 ||
          c["elements"].get<long long>() > 256) {
        cfg.fail(where + ".elements", "expected an integer in [1, 256]");
      }
      cases.emplace_back(c["p"].get<int>(), c["elements"].get<Index>());
    }
  }

  auto csv = open_csv(ctx.out / "bandwidths.csv");
  csv << "p,elements,label,scalar_bandwidth,expected,level_bandwidths,nnz\n";
  for (const auto& [p, N] : cases) {
    const MultipatchTopology topo(geo, uniform_spaces(geo, p, p - 1, {N}));
    const auto sys = assemble_multipatch(topo, constant_field(1.0), constant_field(1.0));
    const HierBandedMatrix& M = sys.locals.front().M;
    const std::vector<Index>& dims = M.dims;
    std::vector<Index> r(dims.size(), 1);
    for (std::size_t i = dims.size() - 1; i-- > 0;) r[i] = r[i + 1] * dims[i + 1];
    auto tail = [&](std::size_t from) {
      Index s = 0;
      for (std::size_t i = from; i < dims.size(); ++i) s += p * r[i];
      return s;
    };
    for (const auto& spec : lumps) {
      const HierBandedMatrix L = apply_lump(M, spec);
      Index expected = 0;
      switch (spec.kind) {
        case LumpSpec::Kind::consistent: expected = tail(0); break;
        case LumpSpec::Kind::hierarchical: expected = tail(static_cast<std::size_t>(spec.index)); break;
        case LumpSpec::Kind::rowsum: expected = 0; break;
        case LumpSpec::Kind::block:
          expected = std::min<Index>(spec.index - 1, std::min<Index>(p, dims[0] - 1)) * r[0] + tail(1);
          break;
      }
      const auto levels = measure_bandwidths(L.matrix, dims);
      std::string joined;
      for (std::size_t l = 0; l < levels.size(); ++l) joined += (l ? ";" : "") + std::to_string(levels[l]);
      csv << p << ',' << N << ',' << spec.label() << ',' << scalar_bandwidth(L.matrix) << ',' << expected << ','
          << joined << ',' << L.matrix.nonZeros() << '\n';
    }
  }
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"spectrum",      "convergence",   "simulate",
                                              "deflate-ratio", "trimmed-sweep", "bandwidth-report"};
  return kinds;
}

void run_experiment(const std::string& kind, const RunContext& ctx) {
  const std::string declared = ctx.config.get_string("experiment", kind, experiment_kinds());
  if (declared != kind) ctx.config.fail("experiment", "config is for \"" + declared + "\", not \"" + kind + "\"");
  fs::create_directories(ctx.out);
  if (kind == "spectrum") run_spectrum(ctx);
  else if (kind == "convergence") run_convergence(ctx);
  else if (kind == "simulate") run_simulate(ctx);
  else if (kind == "deflate-ratio") run_deflate_ratio(ctx);
  else if (kind == "trimmed-sweep") run_trimmed_sweep(ctx);
  else if (kind == "bandwidth-report") run_bandwidth_report(ctx);
  else throw Error(ErrorKind::config, "unknown experiment " + kind);
  write_resolved_config(ctx);
}

}  // namespace isolump::cli
