#pragma once

#include "isolump/geometry.hpp"

#include <string>
#include <vector>

namespace isolump {

/// Unit interval, square or cube as a single patch with the given faces
/// Dirichlet.
MultipatchGeometry unit_box(int d, bool dirichlet = true);

/// Two unit intervals glued at x = 1.
MultipatchGeometry two_intervals(bool dirichlet = false);

/// Quadratic 3x3 net on the unit square with the center control point
/// pulled towards (0.8, 0.8).
MultipatchGeometry stretched_square(bool dirichlet = true);

/// Quarter plate with a hole: circle of radius 1 around the origin cut from
/// the square [-4,0] x [0,4]. Single rational quadratic patch; direction 0
/// runs along the hole, direction 1 outwards.
MultipatchGeometry plate_with_hole(bool dirichlet = true);

/// The same plate split at the diagonal into two patches.
MultipatchGeometry plate_two_patch(bool dirichlet = true);

/// Half annulus (radii 1 and 2) extruded to height 1.
MultipatchGeometry magnet(bool dirichlet = true);

/// Three unit cubes stacked along x, each twisted about the x axis.
MultipatchGeometry twisted_box(bool dirichlet = true);

/// rows x cols grid of conforming rectangles covering [0,width] x [0,height].
MultipatchGeometry rectangle_grid(int rows, int cols, double width, double height, bool dirichlet = true);

/// Catalog lookup by id: unit-interval, unit-square, unit-cube,
/// two-intervals, stretched-square, plate, plate-2patch, magnet,
/// twisted-box, grid-4x4, grid-1x16.
MultipatchGeometry catalog_geometry(const std::string& id, bool dirichlet = true);
std::vector<std::string> catalog_ids();

/// Square rotated by `angle` (radians) about its center (0.5, 0.5) + shift.
/// Its side is scale / (|cos angle| + |sin angle|), so with scale 1 and no
/// shift it is the largest such square inside the unit square, and angle 0
/// gives the unit square itself.
ImplicitRegion rotated_square(double scale, double angle, double shift_x, double shift_y);

/// Per-patch uniform discretization spaces with `elements` per direction.
std::vector<SplineSpace> uniform_spaces(const MultipatchGeometry& geometry, int p, int k,
                                        const std::vector<Index>& elements);

}  // namespace isolump
