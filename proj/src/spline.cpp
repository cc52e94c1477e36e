#include "isolump/spline.hpp"

#include "isolump/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace isolump {

namespace {

// Cox-de Boor triangle for the degree-q functions active in span s.
std::vector<double> cox_de_boor(const std::vector<double>& U, Index s, int q, double x) {
  std::vector<double> N(static_cast<std::size_t>(q) + 1, 0.0);
  std::vector<double> left(static_cast<std::size_t>(q) + 1, 0.0);
  std::vector<double> right(static_cast<std::size_t>(q) + 1, 0.0);
  N[0] = 1.0;
  for (int j = 1; j <= q; ++j) {
    left[j] = x - U[static_cast<std::size_t>(s + 1 - j)];
    right[j] = U[static_cast<std::size_t>(s + j)] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom != 0.0 ? N[r] / denom : 0.0;
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }
  return N;
}

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_degree: return "invalid-degree";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::singular_jacobian: return "singular-jacobian";
    case ErrorKind::nonconforming_interface: return "nonconforming-interface";
    case ErrorKind::inconsistent_maps: return "inconsistent-maps";
    case ErrorKind::missing_structure: return "missing-structure";
    case ErrorKind::empty_system: return "empty-system";
    case ErrorKind::nonpositive_diagonal: return "nonpositive-diagonal";
    case ErrorKind::not_positive_definite: return "not-positive-definite";
    case ErrorKind::no_convergence: return "no-convergence";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

KnotVector::KnotVector(std::vector<double> knots, int degree) : knots_(std::move(knots)), degree_(degree) {
  require(degree_ >= 0, ErrorKind::invalid_degree, "negative degree");
  const auto p = static_cast<std::size_t>(degree_);
  require(knots_.size() >= 2 * p + 2, ErrorKind::invalid_argument, "knot vector too short for its degree");
  require(std::is_sorted(knots_.begin(), knots_.end()), ErrorKind::invalid_argument,
          "knot vector must be nondecreasing");
  require(knots_.front() < knots_.back(), ErrorKind::invalid_argument, "knot vector has empty range");
  for (std::size_t i = 1; i <= p; ++i) {
    require(knots_[i] == knots_[0] && knots_[knots_.size() - 1 - i] == knots_.back(), ErrorKind::invalid_argument,
            "knot vector is not open");
  }
  // Interior multiplicity must stay within 1..p.
  std::size_t i = p + 1;
  const std::size_t last = knots_.size() - p - 1;
  while (i < last) {
    std::size_t j = i;
    while (j < last && knots_[j] == knots_[i]) ++j;
    require(j - i <= std::max<std::size_t>(p, 1), ErrorKind::invalid_argument,
            "interior knot multiplicity exceeds the degree");
    require(knots_[i] > knots_.front() && knots_[i] < knots_.back(), ErrorKind::invalid_argument,
            "interior knot repeats an end knot");
    i = j;
  }
}

std::vector<double> KnotVector::breakpoints() const {
  std::vector<double> b;
  for (double v : knots_) {
    if (b.empty() || v > b.back()) b.push_back(v);
  }
  return b;
}

Index KnotVector::find_span(double x) const {
  const Index n = dimension();
  const auto p = static_cast<Index>(degree_);
  const double lo = knots_.front();
  const double hi = knots_.back();
  require(x >= lo && x <= hi, ErrorKind::out_of_range, "parameter outside the knot range");
  if (x >= knots_[static_cast<std::size_t>(n)]) return n - 1;
  // Largest s in [p, n-1] with knots[s] <= x.
  Index a = p;
  Index b = n;
  while (b - a > 1) {
    const Index mid = (a + b) / 2;
    if (knots_[static_cast<std::size_t>(mid)] <= x) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return a;
}

KnotVector make_open_uniform(Index elements, int p, int k) {
  require(p >= 1, ErrorKind::invalid_degree, "degree must be at least 1");
  require(k >= 0 && k <= p - 1, ErrorKind::invalid_degree, "smoothness must satisfy 0 <= k <= p-1");
  require(elements >= 1, ErrorKind::invalid_argument, "need at least one element");
  const int mult = p - k;
  std::vector<double> knots(static_cast<std::size_t>(p) + 1, 0.0);
  for (Index e = 1; e < elements; ++e) {
    const double xi = static_cast<double>(e) / static_cast<double>(elements);
    for (int m = 0; m < mult; ++m) knots.push_back(xi);
  }
  for (int i = 0; i <= p; ++i) knots.push_back(1.0);
  return KnotVector(std::move(knots), p);
}

BasisValues eval_basis(const KnotVector& kv, double x, int deriv_order) {
  require(deriv_order == 0 || deriv_order == 1, ErrorKind::invalid_argument, "deriv_order must be 0 or 1");
  if (deriv_order == 0) {
    const Index s = kv.find_span(x);
    return {s - kv.degree(), cox_de_boor(kv.knots(), s, kv.degree(), x)};
  }
  auto both = eval_basis_and_derivs(kv, x);
  return {both.first, std::move(both.derivs)};
}

BasisValuesAndDerivs eval_basis_and_derivs(const KnotVector& kv, double x) {
  const Index s = kv.find_span(x);
  const int p = kv.degree();
  const auto& U = kv.knots();
  BasisValuesAndDerivs out;
  out.first = s - p;
  out.values = cox_de_boor(U, s, p, x);
  out.derivs.assign(static_cast<std::size_t>(p) + 1, 0.0);
  if (p == 0) return out;
  // Degree p-1 functions active in span s are s-p+1 .. s.
  const auto lower = cox_de_boor(U, s, p - 1, x);
  for (int a = 0; a <= p; ++a) {
    const Index i = s - p + a;
    double d = 0.0;
    if (a >= 1) {
      const double den = U[static_cast<std::size_t>(i + p)] - U[static_cast<std::size_t>(i)];
      if (den > 0.0) d += p * lower[static_cast<std::size_t>(a - 1)] / den;
    }
    if (a <= p - 1) {
      const double den = U[static_cast<std::size_t>(i + p + 1)] - U[static_cast<std::size_t>(i + 1)];
      if (den > 0.0) d -= p * lower[static_cast<std::size_t>(a)] / den;
    }
    out.derivs[static_cast<std::size_t>(a)] = d;
  }
  return out;
}

SplineSpace::SplineSpace(std::vector<KnotVector> directions, FaceMask dirichlet)
    : directions_(std::move(directions)), dirichlet_(std::move(dirichlet)) {
  const auto d = directions_.size();
  require(d >= 1, ErrorKind::invalid_argument, "spline space needs at least one direction");
  if (dirichlet_.empty()) dirichlet_.assign(2 * d, false);
  require(dirichlet_.size() == 2 * d, ErrorKind::invalid_argument, "face mask must have 2*d entries");
  for (std::size_t l = 0; l < d; ++l) {
    const Index nf = directions_[l].dimension();
    const Index lo = dirichlet_[2 * l] ? 1 : 0;
    const Index hi = dirichlet_[2 * l + 1] ? 1 : 0;
    require(nf - lo - hi >= 1, ErrorKind::empty_system, "boundary conditions eliminate every function");
    full_dims_.push_back(nf);
    dims_.push_back(nf - lo - hi);
    offsets_.push_back(lo);
  }
}

std::vector<int> SplineSpace::degrees() const {
  std::vector<int> p;
  for (const auto& kv : directions_) p.push_back(kv.degree());
  return p;
}

Index SplineSpace::dof_of(const std::vector<Index>& full_multi) const {
  Index idx = 0;
  for (std::size_t l = 0; l < dims_.size(); ++l) {
    const Index local = full_multi[l] - offsets_[l];
    if (local < 0 || local >= dims_[l]) return -1;
    idx = idx * dims_[l] + local;
  }
  return idx;
}

Index SplineSpace::full_index_of_dof(Index dof) const {
  auto m = multi_index(dof, dims_);
  for (std::size_t l = 0; l < m.size(); ++l) m[l] += offsets_[l];
  return linear_index(m, full_dims_);
}

SplineSpace make_uniform_space(const std::vector<Index>& elements, int p, int k, FaceMask dirichlet) {
  std::vector<KnotVector> dirs;
  for (Index e : elements) dirs.push_back(make_open_uniform(e, p, k));
  return SplineSpace(std::move(dirs), std::move(dirichlet));
}

FaceMask all_faces(int d, bool dirichlet) { return FaceMask(2 * static_cast<std::size_t>(d), dirichlet); }

double approximation_constant(int p, int k, int r) {
  require(p >= 1 && k >= 0 && k <= p - 1, ErrorKind::invalid_argument, "need 0 <= k <= p-1");
  require(r >= 1 && r <= p + 1, ErrorKind::invalid_argument, "need 1 <= r <= p+1");
  if (k == p - 1) return std::pow(1.0 / std::numbers::pi, r);
  const double base = 1.0 / std::sqrt(static_cast<double>((p - k) * (p - k + 1)));
  if (k >= r - 2) return std::pow(0.5, r) * std::pow(base, r);
  // (p+1-r)! / (p-1+r-2k)! as a product of reciprocals (numerator <= denominator).
  double ratio = 1.0;
  for (int i = p + 1 - r + 1; i <= p - 1 + r - 2 * k; ++i) ratio /= static_cast<double>(i);
  return std::pow(0.5, r) * std::pow(base, k + 1) * std::sqrt(ratio);
}

}  // namespace isolump
