#include "isolump/lumping.hpp"

#include "isolump/error.hpp"

#include <algorithm>
#include <cstdlib>

namespace isolump {

namespace {

template <class F>
void for_each_nonzero(const SparseMatrix& A, F&& f) {
  for (Index col = 0; col < A.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(A, col); it; ++it) f(it.row(), it.col(), it.value());
  }
}

SparseMatrix from_triplets(Index n, const std::vector<Triplet>& t) {
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

// Moves entry (a, b) to (a, c) where c keeps the block of a at level k
// (block size r) and the position of b inside its block.
SparseMatrix fold_to_level(const SparseMatrix& B, Index r) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(B.nonZeros()));
  for_each_nonzero(B, [&](Index a, Index b, double v) { t.emplace_back(a, (a / r) * r + b % r, v); });
  return from_triplets(B.rows(), t);
}

SparseMatrix diagonal_matrix(const Vector& d) {
  SparseMatrix D(d.size(), d.size());
  D.reserve(Eigen::VectorXi::Constant(d.size(), 1));
  for (Index i = 0; i < d.size(); ++i) D.insert(i, i) = d[i];
  D.makeCompressed();
  return D;
}

}  // namespace

std::vector<Index> HierBandedMatrix::block_sizes() const {
  std::vector<Index> r(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) r[k - 1] = r[k] * dims[k];
  return r;
}

void HierBandedMatrix::check_structure() const {
  require(!dims.empty(), ErrorKind::missing_structure, "matrix carries no dims vector");
  require(bandwidths.size() == dims.size(), ErrorKind::missing_structure, "bandwidths and dims differ in length");
  require(product(dims) == matrix.rows() && matrix.rows() == matrix.cols(), ErrorKind::missing_structure,
          "dims vector does not match the matrix size");
}

HierBandedMatrix tag_structure(SparseMatrix matrix, std::vector<Index> dims) {
  HierBandedMatrix out;
  out.bandwidths = measure_bandwidths(matrix, dims);
  out.matrix = std::move(matrix);
  out.dims = std::move(dims);
  return out;
}

std::vector<Index> measure_bandwidths(const SparseMatrix& A, const std::vector<Index>& dims) {
  require(product(dims) == A.rows(), ErrorKind::missing_structure, "dims vector does not match the matrix size");
  std::vector<Index> b(dims.size(), 0);
  for_each_nonzero(A, [&](Index i, Index j, double v) {
    if (v == 0.0) return;
    for (std::size_t k = dims.size(); k-- > 0;) {
      b[k] = std::max(b[k], std::abs(i % dims[k] - j % dims[k]));
      i /= dims[k];
      j /= dims[k];
    }
  });
  return b;
}

Index scalar_bandwidth(const SparseMatrix& A) {
  Index bw = 0;
  for_each_nonzero(A, [&](Index i, Index j, double v) {
    if (v != 0.0) bw = std::max(bw, std::abs(i - j));
  });
  return bw;
}

Vector rowsum_diagonal(const SparseMatrix& B) {
  Vector d = Vector::Zero(B.rows());
  for_each_nonzero(B, [&](Index i, Index, double v) { d[i] += std::abs(v); });
  return d;
}

SparseMatrix lump_rowsum(const SparseMatrix& B) { return diagonal_matrix(rowsum_diagonal(B)); }

HierBandedMatrix block_lump(const HierBandedMatrix& B) {
  B.check_structure();
  require(B.levels() >= 2, ErrorKind::missing_structure, "block lumping needs at least two levels");
  return block_lumped_family(B, 1);
}

HierBandedMatrix block_lumped_family(const HierBandedMatrix& B, Index i) {
  B.check_structure();
  const Index n1 = B.dims.front();
  require(i >= 1 && i <= n1, ErrorKind::out_of_range, "block index must lie in [1, n_1]");
  HierBandedMatrix out;
  out.dims = B.dims;
  out.bandwidths = B.bandwidths;
  out.bandwidths.front() = std::min(out.bandwidths.front(), i - 1);
  if (i == n1) {
    out.matrix = B.matrix;
    return out;
  }
  const Index r1 = B.block_sizes().front();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(B.matrix.nonZeros()));
  if (B.levels() == 1) {
    Vector extra = Vector::Zero(B.rows());
    for_each_nonzero(B.matrix, [&](Index a, Index b, double v) {
      if (std::abs(a - b) < i) {
        t.emplace_back(a, b, v);
      } else {
        extra[a] += std::abs(v);
      }
    });
    for (Index a = 0; a < B.rows(); ++a) {
      if (extra[a] != 0.0) t.emplace_back(a, a, extra[a]);
    }
  } else {
    for_each_nonzero(B.matrix, [&](Index a, Index b, double v) {
      const Index I = a / r1;
      const Index J = b / r1;
      if (std::abs(I - J) < i) {
        t.emplace_back(a, b, v);
      } else {
        t.emplace_back(a, I * r1 + b % r1, v);
      }
    });
  }
  out.matrix = from_triplets(B.rows(), t);
  return out;
}

HierBandedMatrix hierarchical_lump(const HierBandedMatrix& B, int k) {
  B.check_structure();
  const int d = B.levels();
  require(k >= 1 && k <= d, ErrorKind::out_of_range, "hierarchical level must lie in [1, d]");
  HierBandedMatrix out;
  out.dims = B.dims;
  out.bandwidths = B.bandwidths;
  std::fill(out.bandwidths.begin(), out.bandwidths.begin() + k, Index{0});
  if (k == d) {
    const SparseMatrix prev = d >= 2 ? fold_to_level(B.matrix, B.block_sizes()[static_cast<std::size_t>(d - 2)])
                                     : B.matrix;
    out.matrix = lump_rowsum(prev);
  } else {
    out.matrix = fold_to_level(B.matrix, B.block_sizes()[static_cast<std::size_t>(k - 1)]);
  }
  return out;
}

std::string LumpSpec::label() const {
  switch (kind) {
    case Kind::consistent: return "M";
    case Kind::block: return "P" + std::to_string(index);
    case Kind::hierarchical: return "H" + std::to_string(index);
    case Kind::rowsum: return "rowsum";
  }
  return "?";
}

LumpSpec LumpSpec::parse(const std::string& label) {
  if (label == "M" || label == "consistent") return consistent();
  if (label == "rowsum") return rowsum();
  if (label.size() >= 2 && (label[0] == 'P' || label[0] == 'H')) {
    const std::string digits = label.substr(1);
    require(std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }),
            ErrorKind::invalid_argument, "bad lumping label '" + label + "'");
    const Index idx = std::stoll(digits);
    require(idx >= 1, ErrorKind::invalid_argument, "lumping index must be positive in '" + label + "'");
    return label[0] == 'P' ? block(idx) : hierarchical(idx);
  }
  throw Error(ErrorKind::invalid_argument, "bad lumping label '" + label + "' (expected M, P<i>, H<k> or rowsum)");
}

HierBandedMatrix apply_lump(const HierBandedMatrix& B, const LumpSpec& spec) {
  switch (spec.kind) {
    case LumpSpec::Kind::consistent: return B;
    case LumpSpec::Kind::block: {
      B.check_structure();
      return block_lumped_family(B, std::min(spec.index, B.dims.front()));
    }
    case LumpSpec::Kind::hierarchical: return hierarchical_lump(B, static_cast<int>(spec.index));
    case LumpSpec::Kind::rowsum: {
      HierBandedMatrix out;
      out.matrix = lump_rowsum(B.matrix);
      out.dims = B.dims;
      out.bandwidths.assign(B.dims.size(), 0);
      return out;
    }
  }
  return B;
}

SparseMatrix multipatch_lump(const std::vector<HierBandedMatrix>& locals, const std::vector<std::vector<Index>>& maps,
                             Index num_global, const LumpSpec& spec) {
  require(locals.size() == maps.size(), ErrorKind::inconsistent_maps, "one local-to-global map per patch required");
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < locals.size(); ++r) {
    require(static_cast<Index>(maps[r].size()) == locals[r].rows(), ErrorKind::inconsistent_maps,
            "local-to-global map does not match the local matrix size");
    for (Index g : maps[r]) {
      require(g >= 0 && g < num_global, ErrorKind::inconsistent_maps, "local-to-global map out of range");
    }
    const SparseMatrix P = apply_lump(locals[r], spec).matrix;
    for_each_nonzero(P, [&](Index a, Index b, double v) {
      t.emplace_back(maps[r][static_cast<std::size_t>(a)], maps[r][static_cast<std::size_t>(b)], v);
    });
  }
  return from_triplets(num_global, t);
}

SparseMatrix pad_lump_trim(const SparseMatrix& M, const std::vector<Index>& embedding, const std::vector<Index>& dims,
                           const LumpSpec& spec) {
  const Index full = product(dims);
  require(static_cast<Index>(embedding.size()) == M.rows(), ErrorKind::invalid_argument,
          "embedding must list one tensor index per row");
  std::vector<Index> inverse(static_cast<std::size_t>(full), -1);
  for (std::size_t a = 0; a < embedding.size(); ++a) {
    const Index e = embedding[a];
    require(e >= 0 && e < full && inverse[static_cast<std::size_t>(e)] < 0, ErrorKind::invalid_argument,
            "embedding must be injective into the tensor index set");
    inverse[static_cast<std::size_t>(e)] = static_cast<Index>(a);
  }
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(M.nonZeros()));
  for_each_nonzero(M, [&](Index a, Index b, double v) {
    t.emplace_back(embedding[static_cast<std::size_t>(a)], embedding[static_cast<std::size_t>(b)], v);
  });
  const HierBandedMatrix padded = tag_structure(from_triplets(full, t), dims);
  const SparseMatrix lumped = apply_lump(padded, spec).matrix;
  t.clear();
  for_each_nonzero(lumped, [&](Index a, Index b, double v) {
    const Index ia = inverse[static_cast<std::size_t>(a)];
    const Index ib = inverse[static_cast<std::size_t>(b)];
    if (ia >= 0 && ib >= 0) t.emplace_back(ia, ib, v);
  });
  return from_triplets(M.rows(), t);
}

}  // namespace isolump
