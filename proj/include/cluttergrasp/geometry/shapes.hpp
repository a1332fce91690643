#pragma once

#include <functional>

#include "cluttergrasp/geometry/mesh.hpp"

namespace cluttergrasp::shapes {

/// Axis-aligned box centred at the origin with full side lengths `size`.
TriangleMesh box(const Vec3& size);
TriangleMesh box(const Vec3& lo, const Vec3& hi);

/// Icosahedron subdivided `subdivisions` times: 10*4^s + 2 vertices, 20*4^s triangles.
TriangleMesh icosphere(double radius, int subdivisions);

/// Closed cylinder along +z, centred at the origin.
TriangleMesh cylinder(double radius, double height, int segments = 32);

/// Closed cylinder between two x coordinates, axis along x.
TriangleMesh cylinder_x(double radius, double x0, double x1, int segments = 32);

TriangleMesh torus(double major_radius, double minor_radius, int major_segments = 32, int minor_segments = 16);

/// Closed slab over a regular grid: top surface z = height(x, y), flat bottom at `bottom_z`.
/// Cells whose centre fails `solid(x, y)` are removed (holes), and walls close the boundary.
struct HeightfieldSpec {
  double x0 = -0.025, x1 = 0.025;
  double y0 = -0.025, y1 = 0.025;
  double cell = 0.0005;
  double bottom_z = 0.0;
  std::function<double(double, double)> height;
  std::function<bool(double, double)> solid;  // empty: everything solid
};

TriangleMesh heightfield_slab(const HeightfieldSpec& spec);

/// Drops vertices no triangle references and re-indexes.
void compact(TriangleMesh& mesh);

}  // namespace cluttergrasp::shapes
