#include "isolump/geometry.hpp"

#include "detail.hpp"
#include "isolump/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isolump {

Patch::Patch(std::vector<KnotVector> directions, DenseMatrix control_points, Vector weights)
    : directions_(std::move(directions)), ctrl_(std::move(control_points)), weights_(std::move(weights)) {
  const auto d = static_cast<Index>(directions_.size());
  require(d >= 1 && d <= 3, ErrorKind::invalid_argument, "patches must be 1D, 2D or 3D");
  const Index count = product(net_dims());
  require(ctrl_.rows() == count, ErrorKind::invalid_argument, "control point count does not match the knot vectors");
  require(ctrl_.cols() == d, ErrorKind::invalid_argument, "control points must have the parametric dimension");
  if (weights_.size() == 0) {
    weights_ = Vector::Ones(count);
  }
  require(weights_.size() == count, ErrorKind::invalid_argument, "weight count does not match control points");
  require((weights_.array() > 0.0).all(), ErrorKind::invalid_argument, "weights must be positive");
  rational_ = (weights_.array() != 1.0).any();
}

std::vector<Index> Patch::net_dims() const {
  std::vector<Index> dims;
  for (const auto& kv : directions_) dims.push_back(kv.dimension());
  return dims;
}

std::pair<Vector, Jacobian> Patch::evaluate(const Vector& xhat) const {
  const int d = dim();
  require(xhat.size() == d, ErrorKind::invalid_argument, "parametric point has wrong dimension");
  std::vector<BasisValuesAndDerivs> basis;
  std::vector<Index> local_dims;
  for (int l = 0; l < d; ++l) {
    basis.push_back(eval_basis_and_derivs(directions_[static_cast<std::size_t>(l)], xhat[l]));
    local_dims.push_back(directions_[static_cast<std::size_t>(l)].degree() + 1);
  }
  const auto dims = net_dims();
  double W = 0.0;
  Vector dW = Vector::Zero(d);
  Vector A = Vector::Zero(d);
  DenseMatrix dA = DenseMatrix::Zero(d, d);
  std::vector<Index> global(static_cast<std::size_t>(d));
  detail::for_each_multi(local_dims, [&](const std::vector<Index>& a) {
    double N = 1.0;
    Vector dN = Vector::Ones(d);
    for (int l = 0; l < d; ++l) {
      const auto& b = basis[static_cast<std::size_t>(l)];
      const double v = b.values[static_cast<std::size_t>(a[l])];
      const double dv = b.derivs[static_cast<std::size_t>(a[l])];
      N *= v;
      for (int m = 0; m < d; ++m) dN[m] *= (m == l) ? dv : v;
      global[static_cast<std::size_t>(l)] = b.first + a[l];
    }
    const Index idx = linear_index(global, dims);
    const double w = weights_[idx];
    const auto P = ctrl_.row(idx).transpose();
    W += w * N;
    dW += w * dN;
    A += w * N * P;
    dA += w * P * dN.transpose();
  });
  Vector x = A / W;
  Jacobian jac;
  jac.J = (dA - x * dW.transpose()) / W;
  jac.det = jac.J.determinant();
  return {std::move(x), std::move(jac)};
}

Vector Patch::map(const Vector& xhat) const { return evaluate(xhat).first; }

Jacobian Patch::jacobian(const Vector& xhat) const { return evaluate(xhat).second; }

Jacobian jacobian(const Patch& patch, const Vector& xhat) { return patch.jacobian(xhat); }

Patch identity_patch(int d) {
  return affine_patch(std::vector<double>(static_cast<std::size_t>(d), 1.0),
                      std::vector<double>(static_cast<std::size_t>(d), 0.0));
}

Patch affine_patch(const std::vector<double>& scale, const std::vector<double>& shift) {
  const auto d = static_cast<Index>(scale.size());
  require(shift.size() == scale.size(), ErrorKind::invalid_argument, "scale/shift length mismatch");
  std::vector<KnotVector> dirs(static_cast<std::size_t>(d), KnotVector({0.0, 0.0, 1.0, 1.0}, 1));
  const std::vector<Index> dims(static_cast<std::size_t>(d), 2);
  DenseMatrix ctrl(product(dims), d);
  Index row = 0;
  detail::for_each_multi(dims, [&](const std::vector<Index>& m) {
    for (Index l = 0; l < d; ++l) {
      ctrl(row, l) = shift[static_cast<std::size_t>(l)] + scale[static_cast<std::size_t>(l)] * static_cast<double>(m[static_cast<std::size_t>(l)]);
    }
    ++row;
  });
  return Patch(std::move(dirs), std::move(ctrl));
}

PullbackCoefficients pullback_coeffs(const Patch& patch, const ScalarField& rho, const ScalarField& kappa,
                                     const Vector& xhat) {
  auto [x, jac] = patch.evaluate(xhat);
  require(std::abs(jac.det) >= 1e-14, ErrorKind::singular_jacobian, "Jacobian determinant vanishes");
  const double adet = std::abs(jac.det);
  PullbackCoefficients out;
  out.c = rho(x) * adet;
  const DenseMatrix JtJ = jac.J.transpose() * jac.J;
  out.G = kappa(x) * adet * JtJ.inverse();
  out.G = 0.5 * (out.G + out.G.transpose()).eval();
  return out;
}

namespace {

struct UnionFind {
  std::vector<Index> parent;
  explicit UnionFind(Index n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), Index{0}); }
  Index find(Index a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

std::vector<int> face_directions(int d, int face) {
  std::vector<int> dirs;
  for (int l = 0; l < d; ++l) {
    if (l != face / 2) dirs.push_back(l);
  }
  return dirs;
}

KnotVector reversed(const KnotVector& kv) {
  std::vector<double> k(kv.knots().rbegin(), kv.knots().rend());
  const double a = kv.front();
  const double b = kv.back();
  for (double& v : k) v = a + b - v;
  return KnotVector(std::move(k), kv.degree());
}

bool same_knots(const KnotVector& a, const KnotVector& b) {
  if (a.degree() != b.degree() || a.knots().size() != b.knots().size()) return false;
  for (std::size_t i = 0; i < a.knots().size(); ++i) {
    if (std::abs(a.knots()[i] - b.knots()[i]) > 1e-12) return false;
  }
  return true;
}

// Maps face coordinates of side a to side b (face coords ordered by increasing direction).
std::vector<Index> map_face_coords(const std::vector<Index>& ca, const Orientation& o,
                                   const std::vector<Index>& dims_b) {
  std::vector<Index> cb = ca;
  if (o.swap && cb.size() == 2) std::swap(cb[0], cb[1]);
  for (std::size_t j = 0; j < cb.size(); ++j) {
    if (o.flip[j]) cb[j] = dims_b[j] - 1 - cb[j];
  }
  return cb;
}

std::vector<double> map_face_params(const std::vector<double>& ta, const Orientation& o) {
  std::vector<double> tb = ta;
  if (o.swap && tb.size() == 2) std::swap(tb[0], tb[1]);
  for (std::size_t j = 0; j < tb.size(); ++j) {
    if (o.flip[j]) tb[j] = 1.0 - tb[j];
  }
  return tb;
}

Vector face_point(int d, int face, const std::vector<double>& t) {
  Vector x(d);
  const auto dirs = face_directions(d, face);
  x[face / 2] = static_cast<double>(face % 2);
  for (std::size_t j = 0; j < dirs.size(); ++j) x[dirs[j]] = t[j];
  return x;
}

}  // namespace

MultipatchTopology::MultipatchTopology(MultipatchGeometry geometry, const std::vector<SplineSpace>& spaces)
    : geometry_(std::move(geometry)) {
  const auto np = geometry_.patches.size();
  require(np >= 1, ErrorKind::invalid_argument, "multipatch geometry has no patches");
  require(spaces.size() == np, ErrorKind::invalid_argument, "need one discretization space per patch");
  const int d = geometry_.dim();
  if (geometry_.dirichlet.empty()) geometry_.dirichlet.assign(np, all_faces(d, false));
  require(geometry_.dirichlet.size() == np, ErrorKind::invalid_argument, "need one face mask per patch");

  std::vector<Index> base(np + 1, 0);
  std::vector<std::vector<Index>> full_dims(np);
  for (std::size_t r = 0; r < np; ++r) {
    require(geometry_.patches[r].dim() == d && spaces[r].dim() == d, ErrorKind::invalid_argument,
            "all patches must share the dimension");
    full_dims[r] = spaces[r].full_dims();
    base[r + 1] = base[r] + product(full_dims[r]);
  }
  UnionFind uf(base[np]);

  for (const auto& itf : geometry_.interfaces) {
    const auto a = static_cast<std::size_t>(itf.patch_a);
    const auto b = static_cast<std::size_t>(itf.patch_b);
    require(a < np && b < np && itf.face_a >= 0 && itf.face_a < 2 * d && itf.face_b >= 0 && itf.face_b < 2 * d,
            ErrorKind::invalid_argument, "interface references a missing patch or face");
    require(!geometry_.dirichlet[a][static_cast<std::size_t>(itf.face_a)] &&
                !geometry_.dirichlet[b][static_cast<std::size_t>(itf.face_b)],
            ErrorKind::invalid_argument, "interface face is marked Dirichlet");
    const auto dirs_a = face_directions(d, itf.face_a);
    const auto dirs_b = face_directions(d, itf.face_b);
    // Conformity: knot vectors along the face must agree after orientation.
    std::vector<Index> face_dims_a;
    std::vector<Index> face_dims_b;
    for (int dir : dirs_a) face_dims_a.push_back(full_dims[a][static_cast<std::size_t>(dir)]);
    for (int dir : dirs_b) face_dims_b.push_back(full_dims[b][static_cast<std::size_t>(dir)]);
    for (std::size_t j = 0; j < dirs_a.size(); ++j) {
      const std::size_t jb = (itf.orientation.swap && dirs_a.size() == 2) ? 1 - j : j;
      KnotVector ka = spaces[a].direction(dirs_a[j]);
      const KnotVector& kb = spaces[b].direction(dirs_b[jb]);
      if (itf.orientation.flip[jb]) ka = reversed(ka);
      require(same_knots(ka, kb), ErrorKind::nonconforming_interface,
              "knot vectors or degrees differ across an interface");
    }
    // Geometric match at a few points along the face.
    const std::vector<double> samples{0.0, 0.3141, 0.5, 0.8, 1.0};
    std::vector<Index> sdims(dirs_a.size(), static_cast<Index>(samples.size()));
    detail::for_each_multi(sdims, [&](const std::vector<Index>& s) {
      std::vector<double> ta;
      for (Index v : s) ta.push_back(samples[static_cast<std::size_t>(v)]);
      const Vector xa = geometry_.patches[a].map(face_point(d, itf.face_a, ta));
      const Vector xb = geometry_.patches[b].map(face_point(d, itf.face_b, map_face_params(ta, itf.orientation)));
      require((xa - xb).norm() <= 1e-9 * (1.0 + xa.norm()), ErrorKind::nonconforming_interface,
              "glued faces do not coincide geometrically");
    });
    detail::for_each_multi(face_dims_a, [&](const std::vector<Index>& ca) {
      const auto cb = map_face_coords(ca, itf.orientation, face_dims_b);
      std::vector<Index> ma(static_cast<std::size_t>(d));
      std::vector<Index> mb(static_cast<std::size_t>(d));
      ma[static_cast<std::size_t>(itf.face_a / 2)] = (itf.face_a % 2) ? full_dims[a][static_cast<std::size_t>(itf.face_a / 2)] - 1 : 0;
      mb[static_cast<std::size_t>(itf.face_b / 2)] = (itf.face_b % 2) ? full_dims[b][static_cast<std::size_t>(itf.face_b / 2)] - 1 : 0;
      for (std::size_t j = 0; j < dirs_a.size(); ++j) ma[static_cast<std::size_t>(dirs_a[j])] = ca[j];
      for (std::size_t j = 0; j < dirs_b.size(); ++j) mb[static_cast<std::size_t>(dirs_b[j])] = cb[j];
      uf.unite(base[a] + linear_index(ma, full_dims[a]), base[b] + linear_index(mb, full_dims[b]));
    });
  }

  // A class is constrained if any member lies on a Dirichlet face of its patch.
  std::vector<bool> constrained(static_cast<std::size_t>(base[np]), false);
  std::vector<bool> on_own_dirichlet(static_cast<std::size_t>(base[np]), false);
  for (std::size_t r = 0; r < np; ++r) {
    const auto& mask = geometry_.dirichlet[r];
    detail::for_each_multi(full_dims[r], [&](const std::vector<Index>& m) {
      bool dir = false;
      for (int l = 0; l < d; ++l) {
        const auto ul = static_cast<std::size_t>(l);
        if ((mask[2 * ul] && m[ul] == 0) || (mask[2 * ul + 1] && m[ul] == full_dims[r][ul] - 1)) dir = true;
      }
      const Index id = base[r] + linear_index(m, full_dims[r]);
      on_own_dirichlet[static_cast<std::size_t>(id)] = dir;
      if (dir) constrained[static_cast<std::size_t>(uf.find(id))] = true;
    });
  }

  std::vector<Index> class_id(static_cast<std::size_t>(base[np]), -1);
  l2g_.resize(np);
  for (std::size_t r = 0; r < np; ++r) {
    spaces_.push_back(spaces[r].with_dirichlet(geometry_.dirichlet[r]));
    const auto& sp = spaces_.back();
    l2g_[r].assign(static_cast<std::size_t>(sp.num_dofs()), -1);
    detail::for_each_multi(full_dims[r], [&](const std::vector<Index>& m) {
      const Index id = base[r] + linear_index(m, full_dims[r]);
      const Index root = uf.find(id);
      const bool cls_constrained = constrained[static_cast<std::size_t>(root)];
      if (cls_constrained != on_own_dirichlet[static_cast<std::size_t>(id)]) {
        throw Error(ErrorKind::inconsistent_maps,
                    "a shared function is constrained on one patch but free on another");
      }
      if (cls_constrained) return;
      if (class_id[static_cast<std::size_t>(root)] < 0) class_id[static_cast<std::size_t>(root)] = num_global_++;
      l2g_[r][static_cast<std::size_t>(sp.dof_of(m))] = class_id[static_cast<std::size_t>(root)];
    });
  }
  for (const auto& map : l2g_) {
    std::vector<Index> sorted = map;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), ErrorKind::inconsistent_maps,
            "local-to-global map is not injective (patch glued to itself?)");
  }
}

std::vector<Index> MultipatchTopology::multiplicity() const {
  std::vector<Index> count(static_cast<std::size_t>(num_global_), 0);
  for (const auto& map : l2g_) {
    for (Index g : map) ++count[static_cast<std::size_t>(g)];
  }
  return count;
}

std::vector<std::vector<double>> element_breaks(const SplineSpace& space) {
  std::vector<std::vector<double>> out;
  for (const auto& kv : space.directions()) out.push_back(kv.breakpoints());
  return out;
}

Index TrimMask::num_active() const { return std::count(active.begin(), active.end(), true); }

TrimMask classify_elements(const SplineSpace& space, const Patch& patch, ImplicitRegion region, int subdepth) {
  require(subdepth >= 0, ErrorKind::invalid_argument, "subdepth must be nonnegative");
  const int d = space.dim();
  const auto breaks = element_breaks(space);
  TrimMask mask;
  mask.region = std::move(region);
  mask.subdepth = subdepth;
  for (const auto& b : breaks) mask.element_dims.push_back(static_cast<Index>(b.size()) - 1);
  mask.active.assign(static_cast<std::size_t>(space.num_full()), false);
  const Index sub = Index{1} << subdepth;
  const std::vector<Index> sub_dims(static_cast<std::size_t>(d), sub);
  const Index total_sub = product(sub_dims);
  const auto& full_dims = space.full_dims();

  detail::for_each_multi(mask.element_dims, [&](const std::vector<Index>& e) {
    Index inside = 0;
    detail::for_each_multi(sub_dims, [&](const std::vector<Index>& s) {
      Vector xhat(d);
      for (int l = 0; l < d; ++l) {
        const auto ul = static_cast<std::size_t>(l);
        const double a = breaks[ul][static_cast<std::size_t>(e[ul])];
        const double b = breaks[ul][static_cast<std::size_t>(e[ul] + 1)];
        xhat[l] = a + (b - a) * (static_cast<double>(s[ul]) + 0.5) / static_cast<double>(sub);
      }
      if (mask.region(patch.map(xhat))) ++inside;
    });
    const ElementState state = inside == total_sub ? ElementState::inside
                               : inside == 0       ? ElementState::outside
                                                   : ElementState::cut;
    mask.elements.push_back(state);
    if (state == ElementState::outside) return;
    // Functions supported on this element: span-based p+1 per direction.
    std::vector<Index> first(static_cast<std::size_t>(d));
    std::vector<Index> local(static_cast<std::size_t>(d));
    for (int l = 0; l < d; ++l) {
      const auto ul = static_cast<std::size_t>(l);
      const double mid = 0.5 * (breaks[ul][static_cast<std::size_t>(e[ul])] + breaks[ul][static_cast<std::size_t>(e[ul] + 1)]);
      const auto& kv = space.direction(l);
      first[ul] = kv.find_span(mid) - kv.degree();
      local[ul] = kv.degree() + 1;
    }
    detail::for_each_multi(local, [&](const std::vector<Index>& a) {
      std::vector<Index> m(static_cast<std::size_t>(d));
      for (std::size_t l = 0; l < m.size(); ++l) m[l] = first[l] + a[l];
      mask.active[static_cast<std::size_t>(linear_index(m, full_dims))] = true;
    });
  });
  return mask;
}

}  // namespace isolump
