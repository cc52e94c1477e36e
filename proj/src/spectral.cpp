#include "isolump/spectral.hpp"

#include "isolump/assembly.hpp"
#include "isolump/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

namespace isolump {

namespace {

Vector random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

}  // namespace

LanczosResult lanczos(const LinearOperator& A_apply, const LinearOperator& B_solve, const LinearOperator& B_apply,
                      Index n, const LanczosConfig& config, std::uint64_t seed) {
  require(n >= 1, ErrorKind::empty_system, "Lanczos needs a nonempty problem");
  require(config.k >= 1 && config.tol > 0.0, ErrorKind::invalid_argument, "Lanczos needs k >= 1 and tol > 0");
  require(config.m == 0 || config.m > config.k, ErrorKind::invalid_argument, "basis size must exceed k");
  const Index k = std::min<Index>(config.k, n);
  const Index m = std::min<Index>(std::max<Index>(config.basis_size(), k + 1), n);

  std::mt19937_64 rng(seed);
  DenseMatrix V = DenseMatrix::Zero(n, m + 1);
  DenseMatrix BV = DenseMatrix::Zero(n, m + 1);
  DenseMatrix AV = DenseMatrix::Zero(n, m);
  DenseMatrix H = DenseMatrix::Zero(m + 1, m + 1);
  LanczosResult res;
  double scale = 0.0;

  // B-orthonormalizes x against V[:, 0..j) (twice) and stores it in column j.
  auto store_orthonormal = [&](Vector x, Index j) {
    for (int pass = 0; pass < 2; ++pass) {
      const Vector Bx = B_apply(x);
      ++res.matvecs;
      x -= V.leftCols(j) * (V.leftCols(j).transpose() * Bx);
    }
    Vector Bx = B_apply(x);
    ++res.matvecs;
    const double nrm = std::sqrt(std::max(0.0, x.dot(Bx)));
    require(nrm > 0.0, ErrorKind::no_convergence, "could not generate a new Lanczos vector");
    V.col(j) = x / nrm;
    BV.col(j) = Bx / nrm;
  };

  store_orthonormal(random_vector(n, rng), 0);
  Index j = 0;
  while (true) {
    bool exhausted = false;
    while (j < m) {
      const Vector Av = A_apply(V.col(j));
      Vector w = B_solve(Av);
      res.matvecs += 2;
      ++res.iterations;
      AV.col(j) = Av;
      const auto Vj = V.leftCols(j + 1);
      Vector c = Vj.transpose() * Av;
      w -= Vj * c;
      Vector Bw = B_apply(w);
      ++res.matvecs;
      if (config.full_reorthogonalization) {
        const Vector c2 = Vj.transpose() * Bw;
        w -= Vj * c2;
        Bw -= BV.leftCols(j + 1) * c2;
        c += c2;
      }
      H.col(j).head(j + 1) = c;
      H.row(j).head(j + 1) = c.transpose();
      scale = std::max(scale, c.cwiseAbs().maxCoeff());
      const double beta = std::sqrt(std::max(0.0, w.dot(Bw)));
      if (j + 1 == n) {
        exhausted = true;
        ++j;
        break;
      }
      if (beta <= 1e-12 * scale) {
        store_orthonormal(random_vector(n, rng), j + 1);
        H(j + 1, j) = H(j, j + 1) = 0.0;
      } else {
        V.col(j + 1) = w / beta;
        BV.col(j + 1) = Bw / beta;
        H(j + 1, j) = H(j, j + 1) = beta;
      }
      ++j;
    }

    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(H.topLeftCorner(j, j));
    require(es.info() == Eigen::Success, ErrorKind::no_convergence, "projected eigenproblem failed");
    const Vector& theta = es.eigenvalues();
    const DenseMatrix& Y = es.eigenvectors();
    const DenseMatrix Yk = Y.rightCols(k).rowwise().reverse();
    const DenseMatrix U = V.leftCols(j) * Yk;
    const DenseMatrix AU = AV.leftCols(j) * Yk;
    const DenseMatrix BU = BV.leftCols(j) * Yk;
    res.values = theta.tail(k).reverse();
    res.residuals.resize(k);
    bool all = true;
    for (Index i = 0; i < k; ++i) {
      const double lam = res.values[i];
      const double denom = std::abs(lam) * BU.col(i).norm();
      const double r = (AU.col(i) - lam * BU.col(i)).norm();
      res.residuals[i] = denom > 0.0 ? r / denom : (r == 0.0 ? 0.0 : INFINITY);
      if (!(res.residuals[i] <= config.tol)) all = false;
    }
    res.vectors = U;
    if (all || exhausted) {
      res.converged = all || exhausted;
      return res;
    }
    if (res.restarts >= config.max_restarts) {
      res.converged = false;
      return res;
    }

    // Thick restart: keep the top k Ritz vectors and the last basis vector.
    const double beta_last = H(j, j - 1);
    const Vector last = Y.row(j - 1).tail(k).reverse().transpose();
    const Vector vnext = V.col(j);
    const Vector Bvnext = BV.col(j);
    V.leftCols(k) = U;
    AV.leftCols(k) = AU;
    BV.leftCols(k) = BU;
    V.col(k) = vnext;
    BV.col(k) = Bvnext;
    H.setZero();
    for (Index i = 0; i < k; ++i) {
      H(i, i) = res.values[i];
      H(k, i) = H(i, k) = beta_last * last[i];
    }
    j = k;
    ++res.restarts;
  }
}

Eigenpairs top_eigenpairs(const SparseMatrix& A, const SparseMatrix& B, int count, const LanczosConfig& config,
                          std::uint64_t seed, Index dense_limit) {
  const Index n = A.rows();
  require(count >= 1 && count <= n, ErrorKind::invalid_argument, "requested eigenpair count out of range");
  Eigenpairs out;
  if (n <= dense_limit) {
    const auto eig = dense_generalized_eig(DenseMatrix(A), DenseMatrix(B));
    out.values = eig.values.tail(count).reverse();
    out.vectors = eig.vectors.rightCols(count).rowwise().reverse();
    return out;
  }
  const auto factor = factorize(B);
  LanczosConfig cfg = config;
  cfg.k = count;
  if (cfg.m != 0 && cfg.m <= count) cfg.m = 0;
  const auto res = lanczos(as_operator(A), factor->as_solver(), as_operator(B), n, cfg, seed);
  out.values = res.values;
  out.vectors = res.vectors;
  out.converged = res.converged;
  out.iterations = res.iterations;
  return out;
}

Vector ScaledPencil::f_values() const { return (lambda_cut - D2.array()).matrix(); }

Vector ScaledPencil::g_values() const { return (D2.array() / lambda_cut - 1.0).matrix(); }

DenseMatrix ScaledPencil::dense_A() const {
  DenseMatrix out(*A);
  if (mode == DeflationMode::scale_stiffness && rank() > 0) out += V * f_values().asDiagonal() * V.transpose();
  return out;
}

DenseMatrix ScaledPencil::dense_B() const {
  DenseMatrix out(*B);
  if (mode == DeflationMode::scale_mass && rank() > 0) out += V * g_values().asDiagonal() * V.transpose();
  return out;
}

Vector ScaledPencil::apply_A(const Vector& x) const {
  Vector y = (*A) * x;
  if (mode == DeflationMode::scale_stiffness && rank() > 0) {
    y.noalias() += V * f_values().cwiseProduct(V.transpose() * x);
  }
  return y;
}

ScaledPencil deflate(const SparseMatrix& A, const SparseMatrix& B, Index r, DeflationMode mode, const Eigenpairs& top) {
  const Index n = A.rows();
  require(r >= 0 && r < n, ErrorKind::invalid_argument, "deflation rank must satisfy 0 <= r < n");
  require(r <= n / 4, ErrorKind::invalid_argument, "deflation rank must not exceed n / 4");
  require(top.converged, ErrorKind::no_convergence, "eigendata did not converge");
  require(top.values.size() >= r + 1 && top.vectors.cols() >= r, ErrorKind::invalid_argument,
          "deflation needs the top r + 1 eigenpairs");
  ScaledPencil p;
  p.A = &A;
  p.B = &B;
  p.mode = mode;
  p.lambda_cut = top.values[r];
  require(p.lambda_cut > 0.0, ErrorKind::invalid_argument, "cut eigenvalue must be positive");
  p.D2 = top.values.head(r).reverse();
  p.U2 = top.vectors.leftCols(r).rowwise().reverse();
  p.V = B * p.U2;
  return p;
}

Vector scaled_mass_solve(const ScaledPencil& pencil, const FactorizedOperator& base, const Vector& rhs) {
  require(pencil.mode == DeflationMode::scale_mass, ErrorKind::invalid_argument, "pencil does not scale the mass");
  const Vector g = pencil.g_values();
  std::vector<Index> keep;
  for (Index j = 0; j < g.size(); ++j) {
    if (g[j] != 0.0) keep.push_back(j);
  }
  DenseMatrix U(pencil.U2.rows(), static_cast<Index>(keep.size()));
  Vector gk(static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    U.col(static_cast<Index>(c)) = pencil.U2.col(keep[c]);
    gk[static_cast<Index>(c)] = g[keep[c]];
  }
  return woodbury_solve(base, U, gk, rhs);
}

Vector SparsePlusLowRank::apply(const Vector& x) const {
  Vector y = S * x;
  if (W.cols() > 0) y.noalias() += W * F.cwiseProduct(W.transpose() * x);
  return y;
}

DenseMatrix SparsePlusLowRank::dense() const {
  DenseMatrix out(S);
  if (W.cols() > 0) out += W * F.asDiagonal() * W.transpose();
  return out;
}

SparsePlusLowRank local_stiffness_scale(const SparseMatrix& K_r, const SparseMatrix& P_r, Index rank,
                                        const LanczosConfig& config, std::uint64_t seed) {
  SparsePlusLowRank out;
  out.S = K_r;
  out.W = DenseMatrix(K_r.rows(), 0);
  out.F = Vector(0);
  if (rank == 0) return out;
  const auto top = top_eigenpairs(K_r, P_r, static_cast<int>(rank + 1), config, seed);
  const ScaledPencil p = deflate(K_r, P_r, rank, DeflationMode::scale_stiffness, top);
  out.W = p.V;
  out.F = p.f_values();
  return out;
}

SparsePlusLowRank assemble_scaled(const std::vector<SparsePlusLowRank>& locals,
                                  const std::vector<std::vector<Index>>& maps, Index num_global) {
  std::vector<SparseMatrix> parts;
  Index cols = 0;
  for (const auto& l : locals) {
    parts.push_back(l.S);
    cols += l.W.cols();
  }
  SparsePlusLowRank out;
  out.S = scatter_locals(parts, maps, num_global);
  out.W = DenseMatrix::Zero(num_global, cols);
  out.F = Vector(cols);
  Index c0 = 0;
  for (std::size_t r = 0; r < locals.size(); ++r) {
    const auto& l = locals[r];
    for (Index c = 0; c < l.W.cols(); ++c) {
      for (Index a = 0; a < l.W.rows(); ++a) out.W(maps[r][static_cast<std::size_t>(a)], c0 + c) += l.W(a, c);
      out.F[c0 + c] = l.F[c];
    }
    c0 += l.W.cols();
  }
  return out;
}

double critical_timestep(double lambda_max) {
  require(lambda_max > 0.0, ErrorKind::invalid_argument, "largest eigenvalue must be positive");
  return 2.0 / std::sqrt(lambda_max);
}

double cfl_gain(double lambda_n, double lambda_n_minus_r) {
  require(lambda_n > 0.0 && lambda_n_minus_r > 0.0, ErrorKind::invalid_argument, "eigenvalues must be positive");
  require(lambda_n >= lambda_n_minus_r, ErrorKind::invalid_argument, "need lambda_n >= lambda_{n-r}");
  return std::sqrt(lambda_n / lambda_n_minus_r);
}

SpectrumSplit split_zero_modes(const Vector& ascending, double rel) {
  SpectrumSplit out;
  if (ascending.size() == 0) return out;
  const double threshold = rel * ascending.cwiseAbs().maxCoeff();
  for (Index i = 0; i < ascending.size(); ++i) {
    (std::abs(ascending[i]) < threshold ? out.zero : out.nonzero).push_back(ascending[i]);
  }
  return out;
}

void write_spectrum_csv(std::ostream& out, const std::vector<double>& ascending, const std::string& label,
                        bool header) {
  if (header) out << "k,lambda,label\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < ascending.size(); ++i) out << i + 1 << ',' << ascending[i] << ',' << label << '\n';
}

}  // namespace isolump
