#include "cluttergrasp/geometry/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace cluttergrasp::shapes {

TriangleMesh box(const Vec3& lo, const Vec3& hi) {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(), (i & 4) ? hi.z() : lo.z());
  }
  // Outward winding, two triangles per face.
  m.triangles = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                 {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

TriangleMesh box(const Vec3& size) { return box(-0.5 * size, 0.5 * size); }

TriangleMesh icosphere(double radius, int subdivisions) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh m;
  m.vertices = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
                {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : m.vertices) v.normalize();
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                 {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                 {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      const int idx = static_cast<int>(m.vertices.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Triangle> next;
    next.reserve(m.triangles.size() * 4);
    for (const auto& t : m.triangles) {
      const int ab = mid(t[0], t[1]);
      const int bc = mid(t[1], t[2]);
      const int ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.triangles = std::move(next);
  }
  for (auto& v : m.vertices) v *= radius;
  return m;
}

TriangleMesh cylinder(double radius, double height, int segments) {
  TriangleMesh m;
  const double hz = 0.5 * height;
  m.vertices.emplace_back(0, 0, -hz);
  m.vertices.emplace_back(0, 0, hz);
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * std::numbers::pi * i / segments;
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), -hz);
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), hz);
  }
  for (int i = 0; i < segments; ++i) {
    const int j = (i + 1) % segments;
    const int b0 = 2 + 2 * i, t0 = b0 + 1;
    const int b1 = 2 + 2 * j, t1 = b1 + 1;
    m.triangles.push_back({0, b1, b0});
    m.triangles.push_back({1, t0, t1});
    m.triangles.push_back({b0, b1, t1});
    m.triangles.push_back({b0, t1, t0});
  }
  return m;
}

TriangleMesh cylinder_x(double radius, double x0, double x1, int segments) {
  TriangleMesh m = cylinder(radius, x1 - x0, segments);
  // Rotate z -> x (right-handed: (x, y, z) -> (z, x, y)) and shift.
  for (auto& v : m.vertices) v = Vec3(v.z() + 0.5 * (x0 + x1), v.x(), v.y());
  return m;
}

TriangleMesh torus(double major_radius, double minor_radius, int major_segments, int minor_segments) {
  TriangleMesh m;
  for (int i = 0; i < major_segments; ++i) {
    const double u = 2.0 * std::numbers::pi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double v = 2.0 * std::numbers::pi * j / minor_segments;
      const double r = major_radius + minor_radius * std::cos(v);
      m.vertices.emplace_back(r * std::cos(u), r * std::sin(u), minor_radius * std::sin(v));
    }
  }
  auto idx = [&](int i, int j) { return (i % major_segments) * minor_segments + (j % minor_segments); };
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      const int a = idx(i, j), b = idx(i + 1, j), c = idx(i + 1, j + 1), d = idx(i, j + 1);
      m.triangles.push_back({a, b, c});
      m.triangles.push_back({a, c, d});
    }
  }
  return m;
}

void compact(TriangleMesh& mesh) {
  std::vector<int> remap(mesh.vertices.size(), -1);
  std::vector<Vec3> kept;
  for (auto& t : mesh.triangles) {
    for (int& k : t) {
      if (remap[k] < 0) {
        remap[k] = static_cast<int>(kept.size());
        kept.push_back(mesh.vertices[k]);
      }
      k = remap[k];
    }
  }
  mesh.vertices = std::move(kept);
}

TriangleMesh heightfield_slab(const HeightfieldSpec& spec) {
  const int nx = std::max(1, static_cast<int>(std::lround((spec.x1 - spec.x0) / spec.cell)));
  const int ny = std::max(1, static_cast<int>(std::lround((spec.y1 - spec.y0) / spec.cell)));
  const double dx = (spec.x1 - spec.x0) / nx;
  const double dy = (spec.y1 - spec.y0) / ny;
  auto x_at = [&](int i) { return i == nx ? spec.x1 : spec.x0 + i * dx; };
  auto y_at = [&](int j) { return j == ny ? spec.y1 : spec.y0 + j * dy; };

  std::vector<char> solid(static_cast<std::size_t>(nx) * ny, 1);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      if (spec.solid) solid[i * ny + j] = spec.solid(spec.x0 + (i + 0.5) * dx, spec.y0 + (j + 0.5) * dy) ? 1 : 0;
    }
  }
  auto is_solid = [&](int i, int j) { return i >= 0 && j >= 0 && i < nx && j < ny && solid[i * ny + j]; };

  TriangleMesh m;
  const int stride = ny + 1;
  const int layer = (nx + 1) * stride;
  m.vertices.resize(2 * static_cast<std::size_t>(layer));
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      const double x = x_at(i), y = y_at(j);
      m.vertices[i * stride + j] = Vec3(x, y, spec.height(x, y));
      m.vertices[layer + i * stride + j] = Vec3(x, y, spec.bottom_z);
    }
  }
  auto top = [&](int i, int j) { return i * stride + j; };
  auto bot = [&](int i, int j) { return layer + i * stride + j; };

  // Adds quad p0-p1-p2-p3 as two triangles whose normal points along `outward`.
  auto quad = [&](int p0, int p1, int p2, int p3, const Vec3& outward) {
    const Vec3 n = (m.vertices[p1] - m.vertices[p0]).cross(m.vertices[p2] - m.vertices[p0]);
    if (n.dot(outward) >= 0.0) {
      m.triangles.push_back({p0, p1, p2});
      m.triangles.push_back({p0, p2, p3});
    } else {
      m.triangles.push_back({p0, p2, p1});
      m.triangles.push_back({p0, p3, p2});
    }
  };

  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      if (!is_solid(i, j)) continue;
      quad(top(i, j), top(i + 1, j), top(i + 1, j + 1), top(i, j + 1), Vec3::UnitZ());
      quad(bot(i, j), bot(i + 1, j), bot(i + 1, j + 1), bot(i, j + 1), -Vec3::UnitZ());
      if (!is_solid(i - 1, j)) quad(top(i, j), top(i, j + 1), bot(i, j + 1), bot(i, j), -Vec3::UnitX());
      if (!is_solid(i + 1, j)) quad(top(i + 1, j), top(i + 1, j + 1), bot(i + 1, j + 1), bot(i + 1, j), Vec3::UnitX());
      if (!is_solid(i, j - 1)) quad(top(i, j), top(i + 1, j), bot(i + 1, j), bot(i, j), -Vec3::UnitY());
      if (!is_solid(i, j + 1)) quad(top(i, j + 1), top(i + 1, j + 1), bot(i + 1, j + 1), bot(i, j + 1), Vec3::UnitY());
    }
  }
  compact(m);
  drop_degenerate(m);
  return m;
}

}  // namespace cluttergrasp::shapes
