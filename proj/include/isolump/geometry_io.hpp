#pragma once

#include "isolump/geometry.hpp"

#include <iosfwd>
#include <string>

namespace isolump {

/// JSON geometry format:
///
///   {"patches": [{"degrees": [p...], "knots": [[...], ...],
///                 "control_points": [[x, y, ...], ...], "weights": [...]}],
///    "interfaces": [{"patch_a": 0, "face_a": 1, "patch_b": 1, "face_b": 0,
///                    "swap": false, "flip": [false, false]}],
///    "dirichlet": [[true, false, ...], ...]}
///
/// Control points are listed lexicographically with direction 0 slowest.
/// "weights", "interfaces" and "dirichlet" are optional.
void write_geometry(std::ostream& out, const MultipatchGeometry& geometry);
MultipatchGeometry read_geometry(std::istream& in);

void save_geometry(const std::string& path, const MultipatchGeometry& geometry);
MultipatchGeometry load_geometry(const std::string& path);

}  // namespace isolump
