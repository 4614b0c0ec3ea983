#include "rcbf/mesh.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace rcbf {

std::vector<Vec3> generate_ellipsoid_mesh(const Vec3& semi_axes, int n) {
  if (n < 1) throw ConfigError("generate_ellipsoid_mesh: n must be positive");
  if (semi_axes.minCoeff() <= 0.0)
    throw ConfigError("generate_ellipsoid_mesh: semi-axes must be positive");
  std::vector<Vec3> pts;
  pts.reserve(n);
  const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    const Vec3 unit(rad * std::cos(phi), rad * std::sin(phi), z);
    pts.push_back(unit.cwiseProduct(semi_axes));
  }
  return pts;
}

std::vector<Vec3> load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_mesh: cannot open " + path);
  std::vector<Vec3> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    Vec3 p;
    if (!(ss >> p.x() >> p.y() >> p.z())) {
      throw ConfigError("load_mesh: " + path + ":" + std::to_string(lineno) +
                        ": expected three numbers");
    }
    pts.push_back(p);
  }
  if (pts.empty()) throw ConfigError("load_mesh: " + path + " has no vertices");
  return pts;
}

void save_mesh(const std::string& path, const std::vector<Vec3>& vertices) {
  std::ofstream out(path);
  if (!out) throw ConfigError("save_mesh: cannot open " + path);
  out.precision(17);
  for (const auto& v : vertices) {
    out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  }
  if (!out) throw ConfigError("save_mesh: write failed for " + path);
}

double max_nearest_neighbor_spacing(const std::vector<Vec3>& vertices) {
  const size_t n = vertices.size();
  if (n < 2) return 0.0;
  double worst = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      best = std::min(best, (vertices[i] - vertices[j]).squaredNorm());
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

}  // namespace rcbf
