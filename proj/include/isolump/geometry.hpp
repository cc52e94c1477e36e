#pragma once

#include "isolump/spline.hpp"
#include "isolump/types.hpp"

#include <array>
#include <functional>
#include <utility>
#include <vector>

namespace isolump {

/// Scalar coefficient field evaluated at a physical point.
using ScalarField = std::function<double(const Vector& x)>;

inline ScalarField constant_field(double value) {
  return [value](const Vector&) { return value; };
}

struct Jacobian {
  DenseMatrix J;  ///< column l = dF/dxhat_l
  double det = 0.0;
};

/// Single patch map F: [0,1]^d -> R^d given by a B-spline or NURBS control net.
/// Control points are stored row-major lexicographic with direction 0
/// varying slowest, matching the dof numbering of SplineSpace.
class Patch {
 public:
  Patch() = default;
  Patch(std::vector<KnotVector> directions, DenseMatrix control_points, Vector weights = {});

  int dim() const { return static_cast<int>(directions_.size()); }
  const std::vector<KnotVector>& directions() const { return directions_; }
  const DenseMatrix& control_points() const { return ctrl_; }
  const Vector& weights() const { return weights_; }
  bool rational() const { return rational_; }
  std::vector<Index> net_dims() const;

  Vector map(const Vector& xhat) const;
  Jacobian jacobian(const Vector& xhat) const;
  /// Point and Jacobian in one evaluation.
  std::pair<Vector, Jacobian> evaluate(const Vector& xhat) const;

 private:
  std::vector<KnotVector> directions_;
  DenseMatrix ctrl_;
  Vector weights_;
  bool rational_ = false;
};

/// Identity map of [0,1]^d (degree-1 patch).
Patch identity_patch(int d);
/// Affine map xhat -> diag(scale) * xhat + shift.
Patch affine_patch(const std::vector<double>& scale, const std::vector<double>& shift);

Jacobian jacobian(const Patch& patch, const Vector& xhat);

struct PullbackCoefficients {
  double c = 0.0;  ///< rho(F) |det J|
  DenseMatrix G;   ///< kappa(F) |det J| (J^T J)^-1
};

PullbackCoefficients pullback_coeffs(const Patch& patch, const ScalarField& rho, const ScalarField& kappa,
                                     const Vector& xhat);

/// Orientation of a glued face pair. Face parameters are the remaining
/// directions in increasing order; `swap` exchanges the two face
/// parameters (3D only), then `flip[j]` reverses parameter j on side b.
struct Orientation {
  bool swap = false;
  std::array<bool, 2> flip{false, false};
};

/// Face f lies in direction f / 2 at xhat = f % 2.
struct Interface {
  int patch_a = 0;
  int face_a = 0;
  int patch_b = 0;
  int face_b = 0;
  Orientation orientation;
};

/// Patches plus gluing and boundary conditions, independent of the
/// discretization.
struct MultipatchGeometry {
  std::vector<Patch> patches;
  std::vector<Interface> interfaces;
  std::vector<FaceMask> dirichlet;  ///< per patch; interface faces must be false
  int dim() const { return patches.empty() ? 0 : patches.front().dim(); }
};

/// Multipatch geometry with C0-conforming global numbering built for a
/// set of per-patch discretization spaces.
class MultipatchTopology {
 public:
  /// `spaces` are unconstrained; Dirichlet masks are taken from `geometry`.
  MultipatchTopology(MultipatchGeometry geometry, const std::vector<SplineSpace>& spaces);

  const MultipatchGeometry& geometry() const { return geometry_; }
  const std::vector<Patch>& patches() const { return geometry_.patches; }
  Index num_patches() const { return static_cast<Index>(geometry_.patches.size()); }
  /// Constrained per-patch spaces.
  const std::vector<SplineSpace>& spaces() const { return spaces_; }
  const std::vector<std::vector<Index>>& local_to_global() const { return l2g_; }
  Index num_global() const { return num_global_; }
  /// Number of patches sharing each global dof.
  std::vector<Index> multiplicity() const;

 private:
  MultipatchGeometry geometry_;
  std::vector<SplineSpace> spaces_;
  std::vector<std::vector<Index>> l2g_;
  Index num_global_ = 0;
};

/// Implicit region: true iff the physical point is inside.
using ImplicitRegion = std::function<bool(const Vector& x)>;

enum class ElementState { inside, outside, cut };

struct TrimMask {
  ImplicitRegion region;
  int subdepth = 0;
  std::vector<Index> element_dims;       ///< elements per direction
  std::vector<ElementState> elements;    ///< lexicographic over the element grid
  std::vector<bool> active;              ///< per unconstrained function of the space
  Index num_active() const;
};

/// Elements are sampled at the centers of their 2^(d*subdepth) uniform
/// subcells; a subcell is retained iff its center is inside. An element is
/// inside (all retained), outside (none) or cut. A function is active iff
/// its support meets a non-outside element.
TrimMask classify_elements(const SplineSpace& space, const Patch& patch, ImplicitRegion region, int subdepth);

/// Element breakpoints per direction of a space.
std::vector<std::vector<double>> element_breaks(const SplineSpace& space);

}  // namespace isolump
