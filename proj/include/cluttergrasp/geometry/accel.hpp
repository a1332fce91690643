#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "cluttergrasp/geometry/mesh.hpp"
#include "cluttergrasp/geometry/types.hpp"

namespace cluttergrasp {

struct MeshInstance {
  std::shared_ptr<const TriangleMesh> mesh;
  Pose pose;
  double scale = 1.0;
  int instance_id = -1;  // -1: use the position in the instance list
};

/// A mesh prepared for repeated overlap queries: local triangles plus one interior
/// reference point per connected component (used by the containment fallback).
class OverlapProbe {
 public:
  OverlapProbe() = default;
  explicit OverlapProbe(TriangleMesh mesh);

  const TriangleMesh& mesh() const { return mesh_; }
  const std::vector<Vec3>& component_centroids() const { return centroids_; }

 private:
  TriangleMesh mesh_;
  std::vector<Vec3> centroids_;
};

struct OverlapResult {
  bool overlap = false;
  std::vector<int> instances;  // sorted, unique
};

/// Bounding-volume hierarchy over the world-space triangles of a set of posed mesh instances.
/// Immutable after construction; all queries are const and safe to call concurrently.
class SceneAccel {
 public:
  /// Throws ValidationError when `instances` is empty or a scale is not positive.
  explicit SceneAccel(std::span<const MeshInstance> instances);

  std::optional<RayHit> raycast(const Ray& ray) const;

  /// Visits every triangle hit along the ray (unordered).
  void for_each_hit(const Ray& ray, const std::function<void(const RayHit&)>& visit) const;

  /// Triangle-level overlap between the posed probe and every non-excluded instance, plus a
  /// ray-parity test of each probe component centroid. With `first_only` the query stops at
  /// the first contact.
  OverlapResult overlap(const OverlapProbe& probe, const Pose& probe_pose, const std::set<int>& exclude = {},
                        bool first_only = false) const;

  /// Instances with at least one triangle intersecting the solid box.
  std::vector<int> box_query(const OrientedBox& box, const std::set<int>& exclude = {}) const;

  /// Instances with a triangle within `radius` of segment [p, q] (a capsule query).
  std::vector<int> capsule_query(const Vec3& p, const Vec3& q, double radius, const std::set<int>& exclude = {}) const;

  /// Ray-parity inside test against one instance (assumes a closed mesh).
  bool contains(const Vec3& point, int instance_id) const;

  std::size_t triangle_count() const { return tris_.size(); }
  std::size_t instance_count() const { return instance_bounds_.size(); }
  const Aabb& bounds() const { return nodes_.front().box; }
  /// World bounds of one instance (by position in the build list).
  const Aabb& instance_bounds(std::size_t index) const { return instance_bounds_[index]; }
  const std::vector<int>& instance_ids() const { return instance_ids_; }

  /// Reference implementation that tests every triangle; shares tie-breaking with raycast.
  std::optional<RayHit> raycast_brute_force(const Ray& ray) const;

 private:
  struct WorldTriangle {
    Vec3 a, b, c;
    Vec3 normal;
    int instance_id;
    int local_index;
  };
  struct Node {
    Aabb box;
    int first = 0;  // leaf: first triangle slot; inner: left child index
    int count = 0;  // leaf: triangle count; inner: 0
    int right = -1;
  };

  int build_node(int first, int count, std::vector<Vec3>& centroids);
  template <typename BoxTest, typename TriVisit>
  void traverse_boxes(const BoxTest& box_test, const TriVisit& visit) const;
  RayHit make_hit(const Ray& ray, double t, const WorldTriangle& tri) const;

  std::vector<WorldTriangle> tris_;
  std::vector<Node> nodes_;
  std::vector<Aabb> instance_bounds_;
  std::vector<int> instance_ids_;
};

/// Strict ordering used for nearest-hit selection: distance, then instance, then triangle.
bool hit_precedes(const RayHit& a, const RayHit& b);

/// Convenience wrapper: overlap between a probe and an accel, returning the flag and ids.
OverlapResult mesh_overlap(const SceneAccel& accel, const TriangleMesh& probe, const Pose& probe_pose,
                           const std::set<int>& exclude = {});

}  // namespace cluttergrasp
