#include "isolump/assembly.hpp"

#include "element_loop.hpp"
#include "isolump/error.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace isolump {

namespace {

struct ElementMatrices {
  DenseMatrix K;
  DenseMatrix M;
  std::vector<Index> full;
  bool empty() const { return full.empty(); }
};

void add_box(const detail::ElementLoop& loop, const Patch& patch, const ScalarField& rho, const ScalarField& kappa,
             const std::vector<double>& lo, const std::vector<double>& hi, ElementMatrices& em) {
  loop.visit(lo, hi, [&](const Vector& xhat, double w, const Vector& N, const DenseMatrix& dN,
                         const std::vector<Index>& full) {
    if (em.empty()) {
      em.full = full;
      em.K = DenseMatrix::Zero(N.size(), N.size());
      em.M = DenseMatrix::Zero(N.size(), N.size());
    }
    const auto pb = pullback_coeffs(patch, rho, kappa, xhat);
    em.M.noalias() += (w * pb.c) * N * N.transpose();
    em.K.noalias() += w * (dN.transpose() * (pb.G * dN));
  });
}

void scatter(ElementMatrices& em, const std::vector<Index>& lookup, std::vector<Triplet>& tk,
             std::vector<Triplet>& tm) {
  if (em.empty()) return;
  em.K = 0.5 * (em.K + em.K.transpose()).eval();
  const auto nloc = static_cast<Index>(em.full.size());
  for (Index a = 0; a < nloc; ++a) {
    const Index ga = lookup[static_cast<std::size_t>(em.full[static_cast<std::size_t>(a)])];
    if (ga < 0) continue;
    for (Index b = 0; b < nloc; ++b) {
      const Index gb = lookup[static_cast<std::size_t>(em.full[static_cast<std::size_t>(b)])];
      if (gb < 0) continue;
      tk.emplace_back(ga, gb, em.K(a, b));
      tm.emplace_back(ga, gb, em.M(a, b));
    }
  }
}

SparseMatrix build(Index n, const std::vector<Triplet>& t) {
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

std::vector<Index> constrained_lookup(const SplineSpace& space) {
  std::vector<Index> lookup(static_cast<std::size_t>(space.num_full()));
  for (Index f = 0; f < space.num_full(); ++f) {
    lookup[static_cast<std::size_t>(f)] = space.dof_of(multi_index(f, space.full_dims()));
  }
  return lookup;
}

void check_patch(const SplineSpace& space, const Patch& patch) {
  require(space.dim() == patch.dim(), ErrorKind::invalid_argument, "space and patch dimensions differ");
}

}  // namespace

AssembledPair assemble_single_patch(const SplineSpace& space, const Patch& patch, const ScalarField& rho,
                                    const ScalarField& kappa) {
  check_patch(space, patch);
  const detail::ElementLoop loop(space);
  const auto lookup = constrained_lookup(space);
  std::vector<Triplet> tk;
  std::vector<Triplet> tm;
  detail::for_each_multi(loop.element_dims(), [&](const std::vector<Index>& e) {
    ElementMatrices em;
    add_box(loop, patch, rho, kappa, loop.lower(e), loop.upper(e), em);
    scatter(em, lookup, tk, tm);
  });
  const Index n = space.num_dofs();
  AssembledPair out;
  out.K = tag_structure(build(n, tk), space.dims());
  out.M = tag_structure(build(n, tm), space.dims());
  out.tensor_dims = space.dims();
  out.tensor_index.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out.tensor_index[static_cast<std::size_t>(i)] = i;
  return out;
}

SparseMatrix scatter_locals(const std::vector<SparseMatrix>& locals, const std::vector<std::vector<Index>>& maps,
                            Index num_global) {
  require(locals.size() == maps.size(), ErrorKind::inconsistent_maps, "one map per local matrix required");
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < locals.size(); ++r) {
    require(static_cast<Index>(maps[r].size()) == locals[r].rows(), ErrorKind::inconsistent_maps,
            "local-to-global map does not match the local matrix size");
    for (Index col = 0; col < locals[r].outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(locals[r], col); it; ++it) {
        t.emplace_back(maps[r][static_cast<std::size_t>(it.row())], maps[r][static_cast<std::size_t>(col)],
                       it.value());
      }
    }
  }
  return build(num_global, t);
}

MultipatchSystem assemble_multipatch(const MultipatchTopology& topology, const ScalarField& rho,
                                     const ScalarField& kappa) {
  MultipatchSystem sys;
  std::vector<SparseMatrix> ks;
  std::vector<SparseMatrix> ms;
  for (Index r = 0; r < topology.num_patches(); ++r) {
    const auto ur = static_cast<std::size_t>(r);
    sys.locals.push_back(assemble_single_patch(topology.spaces()[ur], topology.patches()[ur], rho, kappa));
    ks.push_back(sys.locals.back().K.matrix);
    ms.push_back(sys.locals.back().M.matrix);
  }
  const Index n = topology.num_global();
  require(n > 0, ErrorKind::empty_system, "multipatch system has no free dofs");
  sys.global.K = tag_structure(scatter_locals(ks, topology.local_to_global(), n), {n});
  sys.global.M = tag_structure(scatter_locals(ms, topology.local_to_global(), n), {n});
  sys.global.tensor_dims = {n};
  sys.global.tensor_index.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) sys.global.tensor_index[static_cast<std::size_t>(i)] = i;
  return sys;
}

AssembledPair assemble_trimmed(const SplineSpace& space, const Patch& patch, const TrimMask& mask,
                               const ScalarField& rho, const ScalarField& kappa, int subdepth) {
  check_patch(space, patch);
  require(subdepth >= 0, ErrorKind::invalid_argument, "subdepth must be nonnegative");
  const detail::ElementLoop loop(space);
  require(mask.element_dims == loop.element_dims() &&
              static_cast<Index>(mask.active.size()) == space.num_full(),
          ErrorKind::invalid_argument, "trim mask was built on a different mesh");
  const int d = space.dim();
  AssembledPair out;
  out.tensor_dims = space.dims();
  std::vector<Index> lookup = constrained_lookup(space);
  std::vector<Index> tensor_to_active(static_cast<std::size_t>(space.num_dofs()), -1);
  for (Index f = 0; f < space.num_full(); ++f) {
    const Index dof = lookup[static_cast<std::size_t>(f)];
    if (dof >= 0 && mask.active[static_cast<std::size_t>(f)]) tensor_to_active[static_cast<std::size_t>(dof)] = 0;
  }
  Index n = 0;
  for (Index dof = 0; dof < space.num_dofs(); ++dof) {
    if (tensor_to_active[static_cast<std::size_t>(dof)] == 0) {
      tensor_to_active[static_cast<std::size_t>(dof)] = n++;
      out.tensor_index.push_back(dof);
    }
  }
  require(n > 0, ErrorKind::empty_system, "trimmed region contains no active functions");
  for (auto& g : lookup) {
    if (g >= 0) g = tensor_to_active[static_cast<std::size_t>(g)];
  }

  const Index sub = Index{1} << subdepth;
  const std::vector<Index> sub_dims(static_cast<std::size_t>(d), sub);
  std::vector<Triplet> tk;
  std::vector<Triplet> tm;
  std::size_t index = 0;
  detail::for_each_multi(loop.element_dims(), [&](const std::vector<Index>& e) {
    const ElementState state = mask.elements[index++];
    if (state == ElementState::outside) return;
    ElementMatrices em;
    const auto lo = loop.lower(e);
    const auto hi = loop.upper(e);
    if (state == ElementState::inside) {
      add_box(loop, patch, rho, kappa, lo, hi, em);
    } else {
      std::vector<double> slo(static_cast<std::size_t>(d));
      std::vector<double> shi(static_cast<std::size_t>(d));
      Vector center(d);
      detail::for_each_multi(sub_dims, [&](const std::vector<Index>& s) {
        for (std::size_t l = 0; l < slo.size(); ++l) {
          const double h = (hi[l] - lo[l]) / static_cast<double>(sub);
          slo[l] = lo[l] + h * static_cast<double>(s[l]);
          shi[l] = slo[l] + h;
          center[static_cast<Index>(l)] = 0.5 * (slo[l] + shi[l]);
        }
        if (mask.region(patch.map(center))) add_box(loop, patch, rho, kappa, slo, shi, em);
      });
    }
    scatter(em, lookup, tk, tm);
  });
  out.K = tag_structure(build(n, tk), {n});
  out.M = tag_structure(build(n, tm), {n});
  return out;
}

Vector assemble_load(const SplineSpace& space, const Patch& patch, const ScalarField& f) {
  check_patch(space, patch);
  const detail::ElementLoop loop(space, 1);
  const auto lookup = constrained_lookup(space);
  Vector F = Vector::Zero(space.num_dofs());
  detail::for_each_multi(loop.element_dims(), [&](const std::vector<Index>& e) {
    loop.visit(loop.lower(e), loop.upper(e),
               [&](const Vector& xhat, double w, const Vector& N, const DenseMatrix&, const std::vector<Index>& full) {
                 const auto [x, jac] = patch.evaluate(xhat);
                 const double scale = w * std::abs(jac.det) * f(x);
                 for (std::size_t a = 0; a < full.size(); ++a) {
                   const Index g = lookup[static_cast<std::size_t>(full[a])];
                   if (g >= 0) F[g] += scale * N[static_cast<Index>(a)];
                 }
               });
  });
  return F;
}

Vector assemble_load(const MultipatchTopology& topology, const ScalarField& f) {
  Vector F = Vector::Zero(topology.num_global());
  for (Index r = 0; r < topology.num_patches(); ++r) {
    const auto ur = static_cast<std::size_t>(r);
    const Vector local = assemble_load(topology.spaces()[ur], topology.patches()[ur], f);
    const auto& map = topology.local_to_global()[ur];
    for (Index a = 0; a < local.size(); ++a) F[map[static_cast<std::size_t>(a)]] += local[a];
  }
  return F;
}

JacobiScaled jacobi_rescale(const SparseMatrix& A, const SparseMatrix& B) {
  require(A.rows() == B.rows() && A.cols() == B.cols(), ErrorKind::invalid_argument, "pencil sizes differ");
  const Vector diag = B.diagonal();
  require((diag.array() > 0.0).all(), ErrorKind::nonpositive_diagonal, "B has a nonpositive diagonal entry");
  JacobiScaled out;
  out.D = diag.array().rsqrt();
  out.A = out.D.asDiagonal() * A * out.D.asDiagonal();
  out.B = out.D.asDiagonal() * B * out.D.asDiagonal();
  return out;
}

void write_triplets(std::ostream& out, const SparseMatrix& A) {
  std::ostringstream buf;
  buf << std::setprecision(17);
  for (Index col = 0; col < A.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(A, col); it; ++it) buf << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  }
  out << buf.str();
}

SparseMatrix read_triplets(std::istream& in, Index rows, Index cols) {
  std::vector<Triplet> t;
  Index i = 0;
  Index j = 0;
  double v = 0.0;
  while (in >> i >> j >> v) {
    require(i >= 0 && i < rows && j >= 0 && j < cols, ErrorKind::io, "triplet index out of range");
    t.emplace_back(i, j, v);
  }
  require(in.eof(), ErrorKind::io, "malformed triplet line");
  SparseMatrix A(rows, cols);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

}  // namespace isolump
