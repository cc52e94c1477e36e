#pragma once

#include "detail.hpp"
#include "isolump/geometry.hpp"
#include "isolump/quadrature.hpp"

#include <vector>

namespace isolump::detail {

/// Tensor Gauss quadrature over boxes inside the elements of a space.
class ElementLoop {
 public:
  ElementLoop(const SplineSpace& space, int extra_points = 0) : space_(space), breaks_(element_breaks(space)) {
    for (const auto& b : breaks_) element_dims_.push_back(static_cast<Index>(b.size()) - 1);
    for (int l = 0; l < space.dim(); ++l) points_.push_back(space.direction(l).degree() + 1 + extra_points);
  }

  const std::vector<Index>& element_dims() const { return element_dims_; }

  std::vector<double> lower(const std::vector<Index>& e) const { return corner(e, 0); }
  std::vector<double> upper(const std::vector<Index>& e) const { return corner(e, 1); }

  /// Calls f(xhat, weight, N, dN, full) at each Gauss point of the box
  /// [lo, hi]; N holds the values of the functions active on the box, dN
  /// (d x nloc) their parametric gradients and full their unconstrained
  /// linear indices. The box must lie inside a single element.
  template <class F>
  void visit(const std::vector<double>& lo, const std::vector<double>& hi, F&& f) const {
    const int d = space_.dim();
    std::vector<std::vector<BasisValuesAndDerivs>> basis(static_cast<std::size_t>(d));
    std::vector<QuadratureRule> rules;
    std::vector<Index> nq;
    std::vector<Index> local;
    std::vector<Index> first;
    for (int l = 0; l < d; ++l) {
      const auto ul = static_cast<std::size_t>(l);
      rules.push_back(gauss_legendre(points_[ul], lo[ul], hi[ul]));
      for (double x : rules.back().points) basis[ul].push_back(eval_basis_and_derivs(space_.direction(l), x));
      nq.push_back(static_cast<Index>(rules.back().points.size()));
      local.push_back(space_.direction(l).degree() + 1);
      first.push_back(basis[ul].front().first);
    }
    const Index nloc = product(local);
    std::vector<Index> full(static_cast<std::size_t>(nloc));
    {
      Index a = 0;
      std::vector<Index> m(static_cast<std::size_t>(d));
      for_each_multi(local, [&](const std::vector<Index>& la) {
        for (std::size_t l = 0; l < m.size(); ++l) m[l] = first[l] + la[l];
        full[static_cast<std::size_t>(a++)] = linear_index(m, space_.full_dims());
      });
    }
    Vector N(nloc);
    DenseMatrix dN(d, nloc);
    Vector xhat(d);
    for_each_multi(nq, [&](const std::vector<Index>& q) {
      double w = 1.0;
      for (int l = 0; l < d; ++l) {
        const auto ul = static_cast<std::size_t>(l);
        xhat[l] = rules[ul].points[static_cast<std::size_t>(q[ul])];
        w *= rules[ul].weights[static_cast<std::size_t>(q[ul])];
      }
      Index a = 0;
      for_each_multi(local, [&](const std::vector<Index>& la) {
        double v = 1.0;
        for (int l = 0; l < d; ++l) {
          const auto ul = static_cast<std::size_t>(l);
          v *= basis[ul][static_cast<std::size_t>(q[ul])].values[static_cast<std::size_t>(la[ul])];
        }
        N[a] = v;
        for (int m = 0; m < d; ++m) {
          double g = 1.0;
          for (int l = 0; l < d; ++l) {
            const auto ul = static_cast<std::size_t>(l);
            const auto& b = basis[ul][static_cast<std::size_t>(q[ul])];
            g *= (l == m) ? b.derivs[static_cast<std::size_t>(la[ul])] : b.values[static_cast<std::size_t>(la[ul])];
          }
          dN(m, a) = g;
        }
        ++a;
      });
      f(static_cast<const Vector&>(xhat), w, static_cast<const Vector&>(N), static_cast<const DenseMatrix&>(dN),
        static_cast<const std::vector<Index>&>(full));
    });
  }

 private:
  std::vector<double> corner(const std::vector<Index>& e, int side) const {
    std::vector<double> c;
    for (std::size_t l = 0; l < e.size(); ++l) c.push_back(breaks_[l][static_cast<std::size_t>(e[l] + side)]);
    return c;
  }

  const SplineSpace& space_;
  std::vector<std::vector<double>> breaks_;
  std::vector<Index> element_dims_;
  std::vector<int> points_;
};

}  // namespace isolump::detail
