#pragma once

#include "isolump/types.hpp"

#include <array>
#include <vector>

namespace isolump {

/// Open knot vector of degree p. Interior knots may have multiplicity
/// 1..p, which gives C^(p-m) continuity across them.
class KnotVector {
 public:
  KnotVector() = default;
  KnotVector(std::vector<double> knots, int degree);

  int degree() const { return degree_; }
  const std::vector<double>& knots() const { return knots_; }
  /// Number of basis functions n (knots().size() == n + p + 1).
  Index dimension() const { return static_cast<Index>(knots_.size()) - degree_ - 1; }

  /// Distinct knot values; element e spans [breaks[e], breaks[e+1]].
  std::vector<double> breakpoints() const;
  Index num_elements() const { return static_cast<Index>(breakpoints().size()) - 1; }

  /// Knot span s with knots[s] <= x < knots[s+1]; the right end of the
  /// domain maps to the last nonempty span.
  Index find_span(double x) const;

  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }

 private:
  std::vector<double> knots_;
  int degree_ = 0;
};

/// Open uniform knot vector on [0,1] with `elements` elements and interior
/// multiplicity p - k (so the space is C^k).
KnotVector make_open_uniform(Index elements, int p, int k);

/// Values (or first derivatives) of the p+1 B-splines that may be nonzero at x.
struct BasisValues {
  Index first = 0;  ///< index of the first active function (unconstrained numbering)
  std::vector<double> values;
};

BasisValues eval_basis(const KnotVector& kv, double x, int deriv_order);

/// Values and first derivatives in one pass.
struct BasisValuesAndDerivs {
  Index first = 0;
  std::vector<double> values;
  std::vector<double> derivs;
};

BasisValuesAndDerivs eval_basis_and_derivs(const KnotVector& kv, double x);

/// Homogeneous Dirichlet flag per face: faces[2*l] is the x_l = 0 face,
/// faces[2*l+1] the x_l = 1 face.
using FaceMask = std::vector<bool>;

/// Tensor-product B-spline space. Dirichlet faces are eliminated by dropping
/// the basis functions that are nonzero on them (first/last per direction).
class SplineSpace {
 public:
  SplineSpace() = default;
  explicit SplineSpace(std::vector<KnotVector> directions, FaceMask dirichlet = {});

  int dim() const { return static_cast<int>(directions_.size()); }
  const KnotVector& direction(int l) const { return directions_.at(static_cast<std::size_t>(l)); }
  const std::vector<KnotVector>& directions() const { return directions_; }
  const FaceMask& dirichlet() const { return dirichlet_; }

  /// Unconstrained dimensions per direction.
  const std::vector<Index>& full_dims() const { return full_dims_; }
  /// Dimensions after eliminating Dirichlet faces.
  const std::vector<Index>& dims() const { return dims_; }
  std::vector<int> degrees() const;
  Index num_dofs() const { return product(dims_); }
  Index num_full() const { return product(full_dims_); }

  /// Offset of the first kept function in direction l (1 if the low face is
  /// Dirichlet, else 0).
  Index offset(int l) const { return offsets_[static_cast<std::size_t>(l)]; }

  /// Constrained linear dof index of an unconstrained multi-index, or -1 if
  /// the function was eliminated.
  Index dof_of(const std::vector<Index>& full_multi) const;
  /// Unconstrained linear index (in full_dims numbering) of a dof.
  Index full_index_of_dof(Index dof) const;

  SplineSpace with_dirichlet(FaceMask dirichlet) const { return SplineSpace(directions_, std::move(dirichlet)); }

 private:
  std::vector<KnotVector> directions_;
  FaceMask dirichlet_;
  std::vector<Index> full_dims_;
  std::vector<Index> dims_;
  std::vector<Index> offsets_;
};

/// Uniform space with the same (elements, p, k) in every direction.
SplineSpace make_uniform_space(const std::vector<Index>& elements, int p, int k, FaceMask dirichlet = {});

/// All faces Dirichlet (or none) for a d-dimensional space.
FaceMask all_faces(int d, bool dirichlet);

/// Approximation constant C_{p,k,r} of L2 spline projection on uniform meshes
/// (per element size h). Requires 0 <= k <= p-1 and 1 <= r <= p+1.
double approximation_constant(int p, int k, int r);

}  // namespace isolump
