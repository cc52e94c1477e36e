#include "isolump/assembly.hpp"
#include "isolump/catalog.hpp"
#include "isolump/error.hpp"
#include "isolump/quadrature.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace isolump;
using namespace isolump::testing;

namespace {

const ScalarField one = constant_field(1.0);

double max_abs(const SparseMatrix& A) {
  double m = 0.0;
  for (Index c = 0; c < A.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

double max_abs_diff(const SparseMatrix& A, const SparseMatrix& B) {
  return A.rows() == 0 ? 0.0 : (DenseMatrix(A) - DenseMatrix(B)).cwiseAbs().maxCoeff();
}

// 1D mass matrix by exact integration of products of B-splines: Gauss with
// many points per element is exact for polynomial integrands.
DenseMatrix mass_1d(const KnotVector& kv) {
  const Index n = kv.dimension();
  DenseMatrix M = DenseMatrix::Zero(n, n);
  const auto br = kv.breakpoints();
  for (std::size_t e = 0; e + 1 < br.size(); ++e) {
    const auto q = gauss_legendre(8, br[e], br[e + 1]);
    for (std::size_t g = 0; g < q.points.size(); ++g) {
      const auto b = eval_basis(kv, q.points[g], 0);
      for (std::size_t a = 0; a < b.values.size(); ++a) {
        for (std::size_t c = 0; c < b.values.size(); ++c) {
          M(b.first + static_cast<Index>(a), b.first + static_cast<Index>(c)) +=
              q.weights[g] * b.values[a] * b.values[c];
        }
      }
    }
  }
  return M;
}

DenseMatrix dense_kron(const DenseMatrix& A, const DenseMatrix& B) {
  DenseMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  }
  return K;
}

}  // namespace

TEST(Assembly, LinearElementMass) {
  const auto pair = assemble_single_patch(make_uniform_space({1}, 1, 0), identity_patch(1), one, one);
  DenseMatrix expected(2, 2);
  expected << 1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0;
  EXPECT_LT((DenseMatrix(pair.M.matrix) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Assembly, LinearElementStiffness) {
  const auto pair = assemble_single_patch(make_uniform_space({1}, 1, 0), identity_patch(1), one, one);
  DenseMatrix expected(2, 2);
  expected << 1, -1, -1, 1;
  EXPECT_LT((DenseMatrix(pair.K.matrix) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Assembly, MassSumsToMeasure) {
  for (int p = 1; p <= 3; ++p) {
    const auto pair = assemble_single_patch(make_uniform_space({3, 4}, p, p - 1), identity_patch(2), one, one);
    EXPECT_NEAR(DenseMatrix(pair.M.matrix).sum(), 1.0, 1e-13);
  }
}

TEST(Assembly, KroneckerStructureOnIdentityGeometry) {
  for (int p = 1; p <= 3; ++p) {
    for (int k = 0; k < p; ++k) {
      const auto space = make_uniform_space({3, 4}, p, k);
      const auto pair = assemble_single_patch(space, identity_patch(2), one, one);
      const DenseMatrix expected = dense_kron(mass_1d(space.direction(0)), mass_1d(space.direction(1)));
      EXPECT_LT((DenseMatrix(pair.M.matrix) - expected).cwiseAbs().maxCoeff(), 1e-13);
    }
  }
}

TEST(Assembly, SymmetryAndSigns) {
  for (const std::string id : {"stretched-square", "plate", "magnet"}) {
    const auto geo = catalog_geometry(id);
    const MultipatchTopology topo(geo, uniform_spaces(geo, 2, 1, {4}));
    const auto sys = assemble_multipatch(topo, one, one);
    const auto& M = sys.global.M.matrix;
    const auto& K = sys.global.K.matrix;
    EXPECT_LE(max_abs_diff(M, SparseMatrix(M.transpose())), 1e-14 * max_abs(M)) << id;
    EXPECT_LE(max_abs_diff(K, SparseMatrix(K.transpose())), 1e-14 * max_abs(K)) << id;
    for (Index c = 0; c < M.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(M, c); it; ++it) EXPECT_GE(it.value(), 0.0);
    }
    Eigen::LLT<DenseMatrix> llt_m{DenseMatrix(M)};
    Eigen::LLT<DenseMatrix> llt_k{DenseMatrix(K)};
    EXPECT_EQ(llt_m.info(), Eigen::Success) << id;
    EXPECT_EQ(llt_k.info(), Eigen::Success) << id;
  }
}

TEST(Assembly, NeumannStiffnessIsSemidefinite) {
  const auto pair = assemble_single_patch(make_uniform_space({4, 4}, 2, 1), plate_with_hole(false).patches[0], one, one);
  const Vector e = Vector::Ones(pair.size());
  EXPECT_LT((pair.K.matrix * e).norm(), 1e-12 * max_abs(pair.K.matrix));
  const Vector ev = eigenvalues(pair.K.matrix, pair.M.matrix);
  EXPECT_GT(ev[0], -1e-10);
  EXPECT_GT(ev[1], 1e-3);
}

TEST(Assembly, SparsityMatchesParametricMass) {
  const auto geo = plate_with_hole();
  const auto space = uniform_spaces(geo, 3, 2, {5})[0].with_dirichlet(geo.dirichlet[0]);
  const auto mapped = assemble_single_patch(space, geo.patches[0], one, one);
  const auto param = assemble_single_patch(space, identity_patch(2), one, one);
  const DenseMatrix a(mapped.M.matrix);
  const DenseMatrix b(param.M.matrix);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) EXPECT_EQ(a(i, j) != 0.0, b(i, j) != 0.0);
  }
}

TEST(Assembly, MassIsHierarchicallyBanded) {
  for (int p = 1; p <= 3; ++p) {
    const auto space = make_uniform_space({5, 6}, p, p - 1, all_faces(2, true));
    const auto pair = assemble_single_patch(space, stretched_square().patches[0], one, one);
    EXPECT_EQ(pair.M.dims, space.dims());
    EXPECT_EQ(pair.M.bandwidths, (std::vector<Index>{p, p}));
    EXPECT_NO_THROW(pair.M.check_structure());
  }
}

// Every block and sub-block is symmetric and every diagonal block at every
// level is positive definite.
TEST(Assembly, MassInSnPlus) {
  for (int p = 1; p <= 3; ++p) {
    for (Index N : {3, 6, 10}) {
      const auto space = make_uniform_space({N, N}, p, p - 1, all_faces(2, true));
      const auto pair = assemble_single_patch(space, plate_with_hole().patches[0], one, one);
      const DenseMatrix M(pair.M.matrix);
      const Index n1 = space.dims()[0];
      const Index r1 = space.dims()[1];
      for (Index I = 0; I < n1; ++I) {
        for (Index J = 0; J < n1; ++J) {
          const DenseMatrix blk = M.block(I * r1, J * r1, r1, r1);
          EXPECT_LT((blk - blk.transpose()).cwiseAbs().maxCoeff(), 1e-14 * M.cwiseAbs().maxCoeff());
          Eigen::SelfAdjointEigenSolver<DenseMatrix> es(blk);
          EXPECT_GE(es.eigenvalues()[0], -1e-13 * M.cwiseAbs().maxCoeff());
          for (Index i = 0; i < r1; ++i) EXPECT_GE(blk(i, i), 0.0);
        }
        Eigen::LLT<DenseMatrix> llt(M.block(I * r1, I * r1, r1, r1));
        EXPECT_EQ(llt.info(), Eigen::Success);
      }
    }
  }
}

TEST(Multipatch, SinglePatchGlobalEqualsLocal) {
  const auto geo = plate_with_hole();
  const MultipatchTopology topo(geo, uniform_spaces(geo, 2, 1, {4}));
  const auto sys = assemble_multipatch(topo, one, one);
  ASSERT_EQ(sys.locals.size(), 1u);
  EXPECT_EQ(max_abs_diff(sys.global.M.matrix, sys.locals[0].M.matrix), 0.0);
  EXPECT_EQ(max_abs_diff(sys.global.K.matrix, sys.locals[0].K.matrix), 0.0);
}

TEST(Multipatch, TwoIntervalsHandAssembly) {
  const auto geo = two_intervals(false);
  const MultipatchTopology topo(geo, uniform_spaces(geo, 1, 0, {1}));
  const auto sys = assemble_multipatch(topo, one, one);
  ASSERT_EQ(sys.global.size(), 3);
  const DenseMatrix M(sys.global.M.matrix);
  DenseMatrix expected(3, 3);
  expected << 1.0 / 3, 1.0 / 6, 0, 1.0 / 6, 2.0 / 3, 1.0 / 6, 0, 1.0 / 6, 1.0 / 3;
  EXPECT_LT((M - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Multipatch, OnesVectorGivesMeasure) {
  const auto geo = rectangle_grid(1, 16, 4.0, 0.25, false);
  const MultipatchTopology topo(geo, uniform_spaces(geo, 3, 2, {3}));
  const auto sys = assemble_multipatch(topo, one, one);
  const Vector e = Vector::Ones(sys.global.size());
  EXPECT_NEAR(e.dot(sys.global.M.matrix * e), 1.0, 1e-13);
}

TEST(Trimmed, AllInsideMatchesUntrimmed) {
  const auto space = make_uniform_space({5, 5}, 2, 1);
  const Patch patch = identity_patch(2);
  const auto mask = classify_elements(space, patch, [](const Vector&) { return true; }, 2);
  const auto trimmed = assemble_trimmed(space, patch, mask, one, one, 2);
  const auto full = assemble_single_patch(space, patch, one, one);
  EXPECT_LE(max_abs_diff(trimmed.M.matrix, full.M.matrix), 1e-14);
  EXPECT_LE(max_abs_diff(trimmed.K.matrix, full.K.matrix), 1e-14);
}

TEST(Trimmed, HalfPlaneMatchesSubRectangle) {
  const auto space = make_uniform_space({4, 4}, 2, 1);
  const Patch patch = identity_patch(2);
  const auto mask = classify_elements(space, patch, [](const Vector& x) { return x[0] < 0.5; }, 2);
  const auto trimmed = assemble_trimmed(space, patch, mask, one, one, 2);
  // Direct oracle: integrate the background basis over [0, 0.5] x [0, 1].
  const Index nf = space.num_full();
  DenseMatrix M = DenseMatrix::Zero(nf, nf);
  const auto& kx = space.direction(0);
  const auto& ky = space.direction(1);
  for (int ex = 0; ex < 2; ++ex) {
    for (int ey = 0; ey < 4; ++ey) {
      const auto qx = gauss_legendre(4, ex * 0.25, (ex + 1) * 0.25);
      const auto qy = gauss_legendre(4, ey * 0.25, (ey + 1) * 0.25);
      for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = 0; b < 4; ++b) {
          const auto bx = eval_basis(kx, qx.points[a], 0);
          const auto by = eval_basis(ky, qy.points[b], 0);
          const double w = qx.weights[a] * qy.weights[b];
          for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
              for (std::size_t k = 0; k < 3; ++k) {
                for (std::size_t l = 0; l < 3; ++l) {
                  const Index r = (bx.first + static_cast<Index>(i)) * 6 + by.first + static_cast<Index>(j);
                  const Index c = (bx.first + static_cast<Index>(k)) * 6 + by.first + static_cast<Index>(l);
                  M(r, c) += w * bx.values[i] * by.values[j] * bx.values[k] * by.values[l];
                }
              }
            }
          }
        }
      }
    }
  }
  ASSERT_EQ(trimmed.size(), 4 * 6);
  const DenseMatrix T(trimmed.M.matrix);
  for (Index a = 0; a < trimmed.size(); ++a) {
    for (Index b = 0; b < trimmed.size(); ++b) {
      const Index ta = trimmed.tensor_index[static_cast<std::size_t>(a)];
      const Index tb = trimmed.tensor_index[static_cast<std::size_t>(b)];
      EXPECT_NEAR(T(a, b), M(ta, tb), 1e-14);
    }
  }
}

TEST(Trimmed, DegenerateRotatedSquareKeepsEveryDof) {
  const auto space = make_uniform_space({6, 6}, 2, 1);
  const Patch patch = identity_patch(2);
  const auto mask = classify_elements(space, patch, rotated_square(1.0, 0.0, 0.0, 0.0), 3);
  const auto trimmed = assemble_trimmed(space, patch, mask, one, one, 3);
  EXPECT_EQ(trimmed.size(), space.num_dofs());
}

TEST(Trimmed, AllOutsideThrows) {
  const auto space = make_uniform_space({3, 3}, 2, 1);
  const Patch patch = identity_patch(2);
  const auto mask = classify_elements(space, patch, [](const Vector&) { return false; }, 2);
  try {
    assemble_trimmed(space, patch, mask, one, one, 2);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::empty_system);
  }
}

TEST(Trimmed, MaskFromDifferentMeshThrows) {
  const auto mask = classify_elements(make_uniform_space({3, 3}, 2, 1), identity_patch(2),
                                      [](const Vector&) { return true; }, 1);
  EXPECT_THROW(assemble_trimmed(make_uniform_space({4, 4}, 2, 1), identity_patch(2), mask, one, one, 1), Error);
}

TEST(Jacobi, DiagonalBBecomesIdentity) {
  std::mt19937_64 rng(3);
  const SparseMatrix A = to_sparse(random_spd(5, rng));
  Vector d(5);
  d << 1, 2, 3, 4, 5;
  const SparseMatrix B = to_sparse(DenseMatrix(d.asDiagonal()));
  const auto s = jacobi_rescale(A, B);
  EXPECT_LT((DenseMatrix(s.B) - DenseMatrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Jacobi, EqualPencilStaysOne) {
  std::mt19937_64 rng(4);
  const SparseMatrix A = to_sparse(random_spd(6, rng));
  const auto s = jacobi_rescale(A, A);
  const Vector ev = eigenvalues(s.A, s.B);
  EXPECT_LT((ev.array() - 1.0).abs().maxCoeff(), 1e-12);
}

TEST(Jacobi, PreservesEigenvalues) {
  std::mt19937_64 rng(5);
  const SparseMatrix A = to_sparse(random_spd(6, rng));
  const SparseMatrix B = to_sparse(random_spd(6, rng));
  const auto s = jacobi_rescale(A, B);
  const Vector e1 = eigenvalues(A, B);
  const Vector e2 = eigenvalues(s.A, s.B);
  EXPECT_LT(((e1 - e2).array() / e1.array()).abs().maxCoeff(), 1e-10);
}

TEST(Jacobi, NonpositiveDiagonalThrows) {
  DenseMatrix B = DenseMatrix::Identity(3, 3);
  B(1, 1) = 0.0;
  try {
    jacobi_rescale(to_sparse(DenseMatrix::Identity(3, 3)), to_sparse(B));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::nonpositive_diagonal);
  }
}

TEST(Triplets, RoundTrip) {
  const auto pair = assemble_single_patch(make_uniform_space({3, 3}, 2, 1), plate_with_hole().patches[0], one, one);
  std::stringstream ss;
  write_triplets(ss, pair.M.matrix);
  const SparseMatrix back = read_triplets(ss, pair.size(), pair.size());
  EXPECT_EQ(max_abs_diff(back, pair.M.matrix), 0.0);
}

TEST(Load, ConstantLoadIntegratesToMeasure) {
  const auto geo = plate_two_patch(false);
  const MultipatchTopology topo(geo, uniform_spaces(geo, 2, 1, {6}));
  const Vector F = assemble_load(topo, one);
  EXPECT_NEAR(F.sum(), 16.0 - std::numbers::pi / 4.0, 1e-6);
}
