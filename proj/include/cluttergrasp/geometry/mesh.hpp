#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cluttergrasp/geometry/types.hpp"

namespace cluttergrasp {

using Triangle = std::array<int, 3>;

/// Triangles with area at or below this are dropped at load time [m^2].
inline constexpr double kDegenerateArea = 1e-12;

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  /// Optional per-triangle material density [kg/m^3]; empty when unset.
  std::vector<double> densities;

  bool empty() const { return triangles.empty(); }
  std::size_t size() const { return triangles.size(); }

  Vec3 corner(std::size_t tri, int k) const { return vertices[triangles[tri][k]]; }
  /// Unnormalized normal (b - a) x (c - a); length is twice the area.
  Vec3 cross(std::size_t tri) const;
  Vec3 face_normal(std::size_t tri) const;
  double area(std::size_t tri) const;
  double surface_area() const;
  Aabb bounds() const;
};

struct MeshLoadResult {
  TriangleMesh mesh;
  int dropped_degenerate = 0;
};

/// Parses Wavefront OBJ `v` and `f` records. Faces with more than three corners are fan
/// triangulated; `vn`/`vt` references (`f 1/2/3`) are accepted and ignored.
/// Throws ValidationError naming the line on malformed input or when no triangle survives.
MeshLoadResult parse_obj(std::istream& in, const std::string& source_name = "<stream>");
MeshLoadResult load_obj(const std::filesystem::path& path);
void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path);
void write_obj(const TriangleMesh& mesh, std::ostream& out);

/// Removes triangles with area <= kDegenerateArea or repeated indices. Returns the count dropped.
int drop_degenerate(TriangleMesh& mesh);

struct VolumeResult {
  double volume = 0.0;     // absolute value of the signed-tetrahedron sum [m^3]
  bool inverted = false;   // signed sum was negative (inward-facing winding)
  bool watertight = true;  // every edge shared by exactly two triangles
};

VolumeResult mesh_volume(const TriangleMesh& mesh);

/// Centre of mass of the enclosed solid, assuming uniform density. Falls back to the
/// area-weighted surface centroid for meshes enclosing no volume.
Vec3 mesh_centroid(const TriangleMesh& mesh);

/// World-space copy: p -> pose.apply(scale * p).
TriangleMesh transformed(const TriangleMesh& mesh, const Pose& pose, double scale = 1.0);

/// Appends `other` to `mesh`, re-indexing its triangles.
void append(TriangleMesh& mesh, const TriangleMesh& other);

/// Reverses the winding of every triangle.
void flip_winding(TriangleMesh& mesh);

/// Number of edge-connected components after welding coincident vertices.
int connected_components(const TriangleMesh& mesh);

/// True when every undirected edge (after welding) is used by exactly two triangles.
bool is_watertight(const TriangleMesh& mesh);

/// Volume of the convex hull of the vertex set (incremental hull construction).
double convex_hull_volume(const TriangleMesh& mesh);

}  // namespace cluttergrasp
