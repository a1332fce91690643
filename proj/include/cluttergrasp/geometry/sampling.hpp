#pragma once

#include <cstdint>
#include <vector>

#include "cluttergrasp/geometry/mesh.hpp"

namespace cluttergrasp {

/// Area-weighted uniform samples on the mesh surface; normals are the face normals.
/// Deterministic per seed. Throws ValidationError for n == 0 or an empty mesh.
std::vector<PointNormal> sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed,
                                        int instance_id = -1);

/// As sample_surface, also filling `faces` with the source triangle of each sample.
std::vector<PointNormal> sample_surface_with_faces(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed,
                                                   std::vector<int>& faces, int instance_id = -1);

}  // namespace cluttergrasp
