#include "isolump/linalg.hpp"

#include "isolump/error.hpp"
#include "isolump/lumping.hpp"

#include <algorithm>
#include <cmath>

namespace isolump {

LinearOperator FactorizedOperator::as_solver() const {
  return [this](const Vector& x) { return solve(x); };
}

BandedCholesky::BandedCholesky(const SparseMatrix& A, Index bandwidth) : n_(A.rows()) {
  require(A.rows() == A.cols(), ErrorKind::invalid_argument, "matrix must be square");
  require(n_ > 0, ErrorKind::empty_system, "cannot factorize an empty matrix");
  const Index measured = scalar_bandwidth(A);
  bw_ = bandwidth < 0 ? measured : bandwidth;
  require(measured <= bw_, ErrorKind::invalid_argument, "matrix has entries outside the declared band");
  const Index w = bw_ + 1;
  band_.assign(static_cast<std::size_t>(n_ * w), 0.0);
  for (Index col = 0; col < A.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(A, col); it; ++it) {
      const Index i = it.row();
      const Index j = it.col();
      if (i >= j) band_[static_cast<std::size_t>(i * w + (j - i + bw_))] = it.value();
    }
  }
  double* L = band_.data();
  for (Index i = 0; i < n_; ++i) {
    double* Li = L + i * w;
    const Index j0 = std::max<Index>(0, i - bw_);
    for (Index j = j0; j <= i; ++j) {
      const double* Lj = L + j * w;
      // Shared columns k in [max(j0, j - bw), j).
      const Index k0 = std::max(j0, j - bw_);
      double s = Li[j - i + bw_];
      for (Index k = k0; k < j; ++k) s -= Li[k - i + bw_] * Lj[k - j + bw_];
      if (j < i) {
        Li[j - i + bw_] = s / Lj[bw_];
      } else {
        if (!(s > 0.0)) {
          throw Error(ErrorKind::not_positive_definite,
                      "nonpositive pivot in banded Cholesky at row " + std::to_string(i));
        }
        Li[bw_] = std::sqrt(s);
      }
    }
  }
}

double BandedCholesky::factor(Index i, Index j) const {
  if (j > i || i - j > bw_) return 0.0;
  return band_[static_cast<std::size_t>(i * (bw_ + 1) + (j - i + bw_))];
}

Vector BandedCholesky::solve(const Vector& rhs) const {
  require(rhs.size() == n_, ErrorKind::invalid_argument, "right-hand side has wrong size");
  const Index w = bw_ + 1;
  const double* L = band_.data();
  Vector x = rhs;
  for (Index i = 0; i < n_; ++i) {
    const double* Li = L + i * w;
    double s = x[i];
    for (Index k = std::max<Index>(0, i - bw_); k < i; ++k) s -= Li[k - i + bw_] * x[k];
    x[i] = s / Li[bw_];
  }
  for (Index i = n_; i-- > 0;) {
    double s = x[i];
    const Index kmax = std::min(n_ - 1, i + bw_);
    for (Index k = i + 1; k <= kmax; ++k) s -= L[k * w + (i - k + bw_)] * x[k];
    x[i] = s / L[i * w + bw_];
  }
  return x;
}

DiagonalSolver::DiagonalSolver(Vector diagonal) : diag_(std::move(diagonal)) {
  require(diag_.size() > 0, ErrorKind::empty_system, "cannot factorize an empty matrix");
  require((diag_.array() > 0.0).all(), ErrorKind::not_positive_definite, "diagonal has nonpositive entries");
}

std::unique_ptr<FactorizedOperator> factorize(const SparseMatrix& A) {
  if (scalar_bandwidth(A) == 0) return std::make_unique<DiagonalSolver>(Vector(A.diagonal()));
  return std::make_unique<BandedCholesky>(A);
}

namespace {

// P(rows, cols) where row_pos maps a global row to its position in `rows` (or -1).
SparseMatrix extract(const SparseMatrix& P, const std::vector<Index>& rows, const std::vector<Index>& cols,
                     const std::vector<Index>& row_pos) {
  std::vector<Triplet> t;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (SparseMatrix::InnerIterator it(P, cols[c]); it; ++it) {
      const Index r = row_pos[static_cast<std::size_t>(it.row())];
      if (r >= 0) t.emplace_back(r, static_cast<Index>(c), it.value());
    }
  }
  SparseMatrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

}  // namespace

SchurSaddle::SchurSaddle(const SparseMatrix& P, std::vector<std::vector<Index>> interior, std::vector<Index> shared)
    : n_(P.rows()), interior_(std::move(interior)), shared_(std::move(shared)) {
  require(P.rows() == P.cols(), ErrorKind::invalid_argument, "matrix must be square");
  std::vector<Index> owner(static_cast<std::size_t>(n_), -2);
  for (std::size_t r = 0; r < interior_.size(); ++r) {
    for (Index g : interior_[r]) {
      require(g >= 0 && g < n_ && owner[static_cast<std::size_t>(g)] == -2, ErrorKind::invalid_argument,
              "interior dof lists must be disjoint and in range");
      owner[static_cast<std::size_t>(g)] = static_cast<Index>(r);
    }
  }
  for (Index g : shared_) {
    require(g >= 0 && g < n_ && owner[static_cast<std::size_t>(g)] == -2, ErrorKind::invalid_argument,
            "shared dofs must be disjoint from interior dofs");
    owner[static_cast<std::size_t>(g)] = -1;
  }
  require(std::none_of(owner.begin(), owner.end(), [](Index o) { return o == -2; }), ErrorKind::invalid_argument,
          "every dof must be interior or shared");
  for (Index col = 0; col < P.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(P, col); it; ++it) {
      const Index a = owner[static_cast<std::size_t>(it.row())];
      const Index b = owner[static_cast<std::size_t>(col)];
      require(a < 0 || b < 0 || a == b || it.value() == 0.0, ErrorKind::invalid_argument,
              "interior dofs of different blocks are coupled");
    }
  }

  std::vector<Index> shared_pos(static_cast<std::size_t>(n_), -1);
  for (std::size_t s = 0; s < shared_.size(); ++s) shared_pos[static_cast<std::size_t>(shared_[s])] = static_cast<Index>(s);
  const auto ns = static_cast<Index>(shared_.size());
  DenseMatrix S = DenseMatrix::Zero(ns, ns);
  if (ns > 0) S = DenseMatrix(extract(P, shared_, shared_, shared_pos));

  for (const auto& rows : interior_) {
    std::vector<Index> pos(static_cast<std::size_t>(n_), -1);
    for (std::size_t a = 0; a < rows.size(); ++a) pos[static_cast<std::size_t>(rows[a])] = static_cast<Index>(a);
    if (rows.empty()) {
      blocks_.push_back(nullptr);
      coupling_.emplace_back();
      continue;
    }
    blocks_.push_back(std::make_unique<BandedCholesky>(extract(P, rows, rows, pos)));
    coupling_.push_back(extract(P, rows, shared_, pos));
    if (ns > 0) {
      const DenseMatrix C(coupling_.back());
      DenseMatrix DinvC(C.rows(), C.cols());
      for (Index c = 0; c < C.cols(); ++c) DinvC.col(c) = blocks_.back()->solve(C.col(c));
      S.noalias() -= C.transpose() * DinvC;
    }
  }
  if (ns > 0) {
    S = 0.5 * (S + S.transpose()).eval();
    schur_.compute(S);
    require(schur_.info() == Eigen::Success, ErrorKind::not_positive_definite,
            "Schur complement is not positive definite");
  }
}

SchurSaddle SchurSaddle::from_maps(const SparseMatrix& P, const std::vector<std::vector<Index>>& maps) {
  std::vector<Index> count(static_cast<std::size_t>(P.rows()), 0);
  for (const auto& m : maps) {
    for (Index g : m) ++count[static_cast<std::size_t>(g)];
  }
  std::vector<std::vector<Index>> interior(maps.size());
  std::vector<Index> shared;
  for (std::size_t r = 0; r < maps.size(); ++r) {
    for (Index g : maps[r]) {
      if (count[static_cast<std::size_t>(g)] == 1) interior[r].push_back(g);
    }
  }
  for (Index g = 0; g < P.rows(); ++g) {
    if (count[static_cast<std::size_t>(g)] > 1) shared.push_back(g);
  }
  return SchurSaddle(P, std::move(interior), std::move(shared));
}

Vector SchurSaddle::solve(const Vector& rhs) const {
  require(rhs.size() == n_, ErrorKind::invalid_argument, "right-hand side has wrong size");
  const auto ns = static_cast<Index>(shared_.size());
  Vector g(ns);
  for (Index s = 0; s < ns; ++s) g[s] = rhs[shared_[static_cast<std::size_t>(s)]];
  std::vector<Vector> y(interior_.size());
  for (std::size_t r = 0; r < interior_.size(); ++r) {
    if (!blocks_[r]) continue;
    Vector f(static_cast<Index>(interior_[r].size()));
    for (std::size_t a = 0; a < interior_[r].size(); ++a) f[static_cast<Index>(a)] = rhs[interior_[r][a]];
    y[r] = blocks_[r]->solve(f);
    if (ns > 0) g.noalias() -= coupling_[r].transpose() * y[r];
  }
  Vector xs = ns > 0 ? Vector(schur_.solve(g)) : Vector();
  Vector x(n_);
  for (Index s = 0; s < ns; ++s) x[shared_[static_cast<std::size_t>(s)]] = xs[s];
  for (std::size_t r = 0; r < interior_.size(); ++r) {
    if (!blocks_[r]) continue;
    Vector xr = y[r];
    if (ns > 0) xr -= blocks_[r]->solve(coupling_[r] * xs);
    for (std::size_t a = 0; a < interior_[r].size(); ++a) x[interior_[r][a]] = xr[static_cast<Index>(a)];
  }
  return x;
}

Vector woodbury_solve(const FactorizedOperator& base, const DenseMatrix& U2, const Vector& g, const Vector& rhs) {
  require(U2.cols() == g.size(), ErrorKind::invalid_argument, "U2 and g(D2) sizes differ");
  require(U2.cols() == 0 || U2.rows() == rhs.size(), ErrorKind::invalid_argument, "U2 has wrong row count");
  Vector x = base.solve(rhs);
  if (g.size() == 0) return x;
  for (Index j = 0; j < g.size(); ++j) {
    require(g[j] != 0.0, ErrorKind::invalid_argument, "g(D2) must be nonsingular");
    require(1.0 + g[j] > 0.0, ErrorKind::not_positive_definite, "updated matrix is not positive definite");
  }
  const Vector coeff = (g.array() / (1.0 + g.array())).matrix().cwiseProduct(U2.transpose() * rhs);
  x.noalias() -= U2 * coeff;
  return x;
}

GeneralizedEigen dense_generalized_eig(const DenseMatrix& A, const DenseMatrix& B, bool want_vectors) {
  require(A.rows() == A.cols() && B.rows() == B.cols() && A.rows() == B.rows(), ErrorKind::invalid_argument,
          "pencil matrices must be square and of equal size");
  Eigen::LLT<DenseMatrix> llt(B);
  require(llt.info() == Eigen::Success, ErrorKind::not_positive_definite, "B is not positive definite");
  DenseMatrix C = llt.matrixL().solve(A);
  C = llt.matrixL().solve(C.transpose().eval());
  C = 0.5 * (C + C.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(C, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorKind::no_convergence, "dense eigensolver failed");
  GeneralizedEigen out;
  out.values = es.eigenvalues();
  if (want_vectors) out.vectors = llt.matrixU().solve(es.eigenvectors());
  return out;
}

Index hier_bandwidth(const std::vector<Index>& b, const std::vector<Index>& n) {
  require(b.size() == n.size(), ErrorKind::invalid_argument, "bandwidth and dims vectors differ in length");
  Index total = 0;
  Index r = 1;
  for (std::size_t k = n.size(); k-- > 0;) {
    total += b[k] * r;
    r *= n[k];
  }
  return total;
}

}  // namespace isolump
