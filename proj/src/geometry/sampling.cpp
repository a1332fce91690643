#include "cluttergrasp/geometry/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "cluttergrasp/random.hpp"

namespace cluttergrasp {

std::vector<PointNormal> sample_surface_with_faces(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed,
                                                   std::vector<int>& faces, int instance_id) {
  if (n == 0) throw ValidationError("sample_surface: sample count must be at least 1");
  if (mesh.empty()) throw ValidationError("sample_surface: mesh is empty");
  std::vector<double> cdf(mesh.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    total += mesh.area(i);
    cdf[i] = total;
  }
  Rng rng(seed);
  std::vector<PointNormal> out;
  out.reserve(n);
  faces.clear();
  faces.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double pick = rng.uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), pick);
    const std::size_t tri = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), mesh.size() - 1);
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const Vec3 p = (1.0 - r1) * mesh.corner(tri, 0) + r1 * (1.0 - r2) * mesh.corner(tri, 1) +
                   r1 * r2 * mesh.corner(tri, 2);
    out.push_back({p, mesh.face_normal(tri), instance_id});
    faces.push_back(static_cast<int>(tri));
  }
  return out;
}

std::vector<PointNormal> sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed,
                                        int instance_id) {
  std::vector<int> faces;
  return sample_surface_with_faces(mesh, n, seed, faces, instance_id);
}

}  // namespace cluttergrasp
