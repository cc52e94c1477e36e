#include "isolump/catalog.hpp"

#include "detail.hpp"
#include "isolump/error.hpp"

#include <cmath>
#include <numbers>

namespace isolump {

namespace {

KnotVector linear_knots() { return KnotVector({0.0, 0.0, 1.0, 1.0}, 1); }
KnotVector quadratic_knots() { return KnotVector({0.0, 0.0, 0.0, 1.0, 1.0, 1.0}, 2); }

DenseMatrix rows_to_matrix(const std::vector<std::vector<double>>& pts) {
  DenseMatrix m(static_cast<Index>(pts.size()), static_cast<Index>(pts.front().size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = pts[i][j];
  }
  return m;
}

MultipatchGeometry single(Patch patch, bool dirichlet) {
  MultipatchGeometry g;
  const int d = patch.dim();
  g.patches.push_back(std::move(patch));
  g.dirichlet.push_back(all_faces(d, dirichlet));
  return g;
}

// One half of the two-patch plate: ruled surface between the 45 degree arc
// from (-1,0) to (-sqrt2/2, sqrt2/2) and the segment x = -4, 0 <= y <= 4.
Patch plate_half() {
  const double c = std::cos(std::numbers::pi / 8.0);
  const double t = std::tan(std::numbers::pi / 8.0);
  const double s = std::sqrt(0.5);
  // Net ordered with direction 0 (along the arc) slowest.
  const std::vector<std::vector<double>> pts{
      {-1.0, 0.0}, {-4.0, 0.0},  //
      {-1.0, t},   {-4.0, 2.0},  //
      {-s, s},     {-4.0, 4.0},
  };
  Vector w(6);
  w << 1.0, 1.0, c, c, 1.0, 1.0;
  return Patch({quadratic_knots(), linear_knots()}, rows_to_matrix(pts), w);
}

}  // namespace

MultipatchGeometry unit_box(int d, bool dirichlet) {
  require(d >= 1 && d <= 3, ErrorKind::invalid_argument, "dimension must be 1, 2 or 3");
  return single(identity_patch(d), dirichlet);
}

MultipatchGeometry two_intervals(bool dirichlet) {
  MultipatchGeometry g;
  g.patches.push_back(affine_patch({1.0}, {0.0}));
  g.patches.push_back(affine_patch({1.0}, {1.0}));
  g.interfaces.push_back({0, 1, 1, 0, {}});
  g.dirichlet = {{dirichlet, false}, {false, dirichlet}};
  return g;
}

MultipatchGeometry stretched_square(bool dirichlet) {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) pts.push_back({0.5 * i, 0.5 * j});
  }
  pts[4] = {0.8, 0.8};
  return single(Patch({quadratic_knots(), quadratic_knots()}, rows_to_matrix(pts)), dirichlet);
}

MultipatchGeometry plate_with_hole(bool dirichlet) {
  const double w = 0.5 * (1.0 + std::sqrt(0.5));
  const double a = std::sqrt(2.0) - 1.0;
  // Columns along the hole, rows outwards (circle, middle, outer).
  const std::vector<std::vector<double>> circle{{-1.0, 0.0}, {-1.0, a}, {-a, 1.0}, {0.0, 1.0}};
  const std::vector<std::vector<double>> middle{{-2.5, 0.0}, {-2.5, 0.75}, {-0.75, 2.5}, {0.0, 2.5}};
  const std::vector<std::vector<double>> outer{{-4.0, 0.0}, {-4.0, 4.0}, {-4.0, 4.0}, {0.0, 4.0}};
  const std::vector<double> col_w{1.0, w, w, 1.0};
  std::vector<std::vector<double>> pts;
  Vector weights(12);
  for (int i = 0; i < 4; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    pts.push_back(circle[ui]);
    pts.push_back(middle[ui]);
    pts.push_back(outer[ui]);
    weights.segment(3 * i, 3).setConstant(col_w[ui]);
  }
  KnotVector xi({0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0}, 2);
  return single(Patch({xi, quadratic_knots()}, rows_to_matrix(pts), weights), dirichlet);
}

MultipatchGeometry plate_two_patch(bool dirichlet) {
  MultipatchGeometry g;
  Patch a = plate_half();
  // Mirror across y = -x and reverse direction 0 to keep the orientation.
  const auto& ca = a.control_points();
  DenseMatrix cb(ca.rows(), 2);
  Vector wb(ca.rows());
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 2; ++j) {
      const Index src = (2 - i) * 2 + j;
      cb(i * 2 + j, 0) = -ca(src, 1);
      cb(i * 2 + j, 1) = -ca(src, 0);
      wb[i * 2 + j] = a.weights()[src];
    }
  }
  Patch b({quadratic_knots(), linear_knots()}, cb, wb);
  g.patches = {a, b};
  g.interfaces.push_back({0, 1, 1, 0, {}});
  g.dirichlet = {{dirichlet, false, dirichlet, dirichlet}, {false, dirichlet, dirichlet, dirichlet}};
  return g;
}

MultipatchGeometry magnet(bool dirichlet) {
  const double s = std::sqrt(0.5);
  const std::vector<std::vector<double>> arc{{1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {-1.0, 1.0}, {-1.0, 0.0}};
  const std::vector<double> arc_w{1.0, s, 1.0, s, 1.0};
  std::vector<std::vector<double>> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < arc.size(); ++i) {
    for (double radius : {1.0, 2.0}) {
      for (double z : {0.0, 1.0}) {
        pts.push_back({radius * arc[i][0], radius * arc[i][1], z});
        w.push_back(arc_w[i]);
      }
    }
  }
  KnotVector xi({0.0, 0.0, 0.0, 0.5, 0.5, 1.0, 1.0, 1.0}, 2);
  return single(Patch({xi, linear_knots(), linear_knots()}, rows_to_matrix(pts),
                      Eigen::Map<Vector>(w.data(), static_cast<Index>(w.size()))),
                dirichlet);
}

MultipatchGeometry twisted_box(bool dirichlet) {
  const double rate = std::numbers::pi / 8.0;
  MultipatchGeometry g;
  for (int r = 0; r < 3; ++r) {
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 3; ++i) {
      const double x = r + 0.5 * i;
      const double th = rate * x;
      for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
          const double y = j - 0.5;
          const double z = k - 0.5;
          pts.push_back({x, 0.5 + std::cos(th) * y - std::sin(th) * z, 0.5 + std::sin(th) * y + std::cos(th) * z});
        }
      }
    }
    g.patches.emplace_back(std::vector<KnotVector>{quadratic_knots(), linear_knots(), linear_knots()},
                           rows_to_matrix(pts));
    FaceMask mask = all_faces(3, dirichlet);
    if (r > 0) mask[0] = false;
    if (r < 2) mask[1] = false;
    g.dirichlet.push_back(mask);
    if (r > 0) g.interfaces.push_back({r - 1, 1, r, 0, {}});
  }
  return g;
}

MultipatchGeometry rectangle_grid(int rows, int cols, double width, double height, bool dirichlet) {
  require(rows >= 1 && cols >= 1, ErrorKind::invalid_argument, "grid needs at least one patch");
  MultipatchGeometry g;
  const double hx = width / cols;
  const double hy = height / rows;
  auto id = [cols](int i, int j) { return i * cols + j; };
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      g.patches.push_back(affine_patch({hx, hy}, {j * hx, i * hy}));
      g.dirichlet.push_back({dirichlet && j == 0, dirichlet && j == cols - 1, dirichlet && i == 0,
                             dirichlet && i == rows - 1});
      if (j > 0) g.interfaces.push_back({id(i, j - 1), 1, id(i, j), 0, {}});
      if (i > 0) g.interfaces.push_back({id(i - 1, j), 3, id(i, j), 2, {}});
    }
  }
  return g;
}

std::vector<std::string> catalog_ids() {
  return {"unit-interval", "unit-square", "unit-cube",   "two-intervals", "stretched-square", "plate",
          "plate-2patch",  "magnet",      "twisted-box", "grid-4x4",      "grid-1x16"};
}

MultipatchGeometry catalog_geometry(const std::string& id, bool dirichlet) {
  if (id == "unit-interval") return unit_box(1, dirichlet);
  if (id == "unit-square") return unit_box(2, dirichlet);
  if (id == "unit-cube") return unit_box(3, dirichlet);
  if (id == "two-intervals") return two_intervals(dirichlet);
  if (id == "stretched-square") return stretched_square(dirichlet);
  if (id == "plate") return plate_with_hole(dirichlet);
  if (id == "plate-2patch") return plate_two_patch(dirichlet);
  if (id == "magnet") return magnet(dirichlet);
  if (id == "twisted-box") return twisted_box(dirichlet);
  if (id == "grid-4x4") return rectangle_grid(4, 4, 1.0, 1.0, dirichlet);
  if (id == "grid-1x16") return rectangle_grid(1, 16, 4.0, 0.25, dirichlet);
  throw Error(ErrorKind::invalid_argument, "unknown geometry id '" + id + "'");
}

ImplicitRegion rotated_square(double scale, double angle, double shift_x, double shift_y) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double half = 0.5 * scale / (std::abs(c) + std::abs(s));
  const double cx = 0.5 + shift_x;
  const double cy = 0.5 + shift_y;
  return [=](const Vector& x) {
    const double dx = x[0] - cx;
    const double dy = x[1] - cy;
    const double u = c * dx + s * dy;
    const double v = -s * dx + c * dy;
    return std::abs(u) <= half && std::abs(v) <= half;
  };
}

std::vector<SplineSpace> uniform_spaces(const MultipatchGeometry& geometry, int p, int k,
                                        const std::vector<Index>& elements) {
  std::vector<SplineSpace> spaces;
  for (std::size_t r = 0; r < geometry.patches.size(); ++r) {
    std::vector<Index> e = elements;
    if (e.size() == 1) e.assign(static_cast<std::size_t>(geometry.patches[r].dim()), elements.front());
    require(static_cast<int>(e.size()) == geometry.patches[r].dim(), ErrorKind::invalid_argument,
            "element counts must match the patch dimension");
    spaces.push_back(make_uniform_space(e, p, k));
  }
  return spaces;
}

}  // namespace isolump
