#pragma once

#include <string>
#include <vector>

#include "rcbf/types.hpp"

namespace rcbf {

// Near-uniform vertex set on an ellipsoid: Fibonacci sphere scaled by the
// semi-axes. Deterministic for a given n.
std::vector<Vec3> generate_ellipsoid_mesh(const Vec3& semi_axes, int n);

// Plain text, one vertex per line as "x y z". Lines starting with '#' and
// blank lines are skipped on load.
std::vector<Vec3> load_mesh(const std::string& path);
void save_mesh(const std::string& path, const std::vector<Vec3>& vertices);

// Largest nearest-neighbor distance over the vertex set (coverage metric).
double max_nearest_neighbor_spacing(const std::vector<Vec3>& vertices);

}  // namespace rcbf
