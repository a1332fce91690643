#include "cluttergrasp/geometry/accel.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cluttergrasp/geometry/intersect.hpp"

namespace cluttergrasp {

namespace {

constexpr int kLeafSize = 4;

Aabb triangle_bounds(const Vec3& a, const Vec3& b, const Vec3& c) {
  Aabb box;
  box.extend(a);
  box.extend(b);
  box.extend(c);
  return box;
}

Vec3 safe_inverse(const Vec3& d) {
  return {1.0 / d.x(), 1.0 / d.y(), 1.0 / d.z()};
}

}  // namespace

bool hit_precedes(const RayHit& a, const RayHit& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  if (a.instance_id != b.instance_id) return a.instance_id < b.instance_id;
  return a.triangle_index < b.triangle_index;
}

OverlapProbe::OverlapProbe(TriangleMesh mesh) : mesh_(std::move(mesh)) {
  if (mesh_.empty()) throw ValidationError("overlap probe mesh is empty");
  // Split into components by union-find over shared vertex indices.
  std::vector<int> parent(mesh_.vertices.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& t : mesh_.triangles) {
    for (int k = 1; k < 3; ++k) {
      const int a = find(t[0]), b = find(t[k]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<int> roots;
  std::vector<TriangleMesh> parts;
  for (const auto& t : mesh_.triangles) {
    const int r = find(t[0]);
    auto it = std::find(roots.begin(), roots.end(), r);
    std::size_t slot = static_cast<std::size_t>(it - roots.begin());
    if (it == roots.end()) {
      roots.push_back(r);
      parts.push_back({mesh_.vertices, {}, {}});
    }
    parts[slot].triangles.push_back(t);
  }
  for (const auto& part : parts) centroids_.push_back(mesh_centroid(part));
}

SceneAccel::SceneAccel(std::span<const MeshInstance> instances) {
  if (instances.empty()) throw ValidationError("cannot build an acceleration structure from zero instances");
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    if (!inst.mesh) throw ValidationError("mesh instance without a mesh");
    if (!(inst.scale > 0.0) || !std::isfinite(inst.scale)) {
      throw ValidationError("instance scale must be positive and finite");
    }
    const int id = inst.instance_id >= 0 ? inst.instance_id : static_cast<int>(i);
    instance_ids_.push_back(id);
    Aabb ib;
    const Mat3 r = inst.pose.matrix();
    std::vector<Vec3> world(inst.mesh->vertices.size());
    for (std::size_t v = 0; v < world.size(); ++v) {
      world[v] = r * (inst.scale * inst.mesh->vertices[v]) + inst.pose.translation;
    }
    for (std::size_t t = 0; t < inst.mesh->triangles.size(); ++t) {
      const auto& tri = inst.mesh->triangles[t];
      WorldTriangle w{world[tri[0]], world[tri[1]], world[tri[2]], Vec3::Zero(), id, static_cast<int>(t)};
      const Vec3 n = (w.b - w.a).cross(w.c - w.a);
      const double len = n.norm();
      if (!(len > 0.0)) continue;
      w.normal = n / len;
      ib.extend(triangle_bounds(w.a, w.b, w.c));
      tris_.push_back(w);
    }
    instance_bounds_.push_back(ib);
  }
  if (tris_.empty()) throw ValidationError("acceleration structure has no triangles");
  std::vector<Vec3> centroids(tris_.size());
  for (std::size_t i = 0; i < tris_.size(); ++i) centroids[i] = (tris_[i].a + tris_[i].b + tris_[i].c) / 3.0;
  nodes_.reserve(2 * tris_.size() / kLeafSize + 1);
  build_node(0, static_cast<int>(tris_.size()), centroids);
}

int SceneAccel::build_node(int first, int count, std::vector<Vec3>& centroids) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  Aabb cbox;
  for (int i = first; i < first + count; ++i) {
    box.extend(triangle_bounds(tris_[i].a, tris_[i].b, tris_[i].c));
    cbox.extend(centroids[i]);
  }
  nodes_[index].box = box;
  const Vec3 spread = cbox.extent();
  int axis = 0;
  spread.maxCoeff(&axis);
  if (count <= kLeafSize || spread[axis] <= 0.0) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }
  // Median split on the widest centroid axis; permute triangles and centroids together.
  std::vector<int> order(count);
  for (int i = 0; i < count; ++i) order[i] = first + i;
  const int mid = count / 2;
  std::nth_element(order.begin(), order.begin() + mid, order.end(), [&](int a, int b) {
    if (centroids[a][axis] != centroids[b][axis]) return centroids[a][axis] < centroids[b][axis];
    return a < b;
  });
  std::vector<WorldTriangle> tmp_t(count);
  std::vector<Vec3> tmp_c(count);
  for (int i = 0; i < count; ++i) {
    tmp_t[i] = tris_[order[i]];
    tmp_c[i] = centroids[order[i]];
  }
  std::copy(tmp_t.begin(), tmp_t.end(), tris_.begin() + first);
  std::copy(tmp_c.begin(), tmp_c.end(), centroids.begin() + first);

  const int left = build_node(first, mid, centroids);
  const int right = build_node(first + mid, count - mid, centroids);
  nodes_[index].first = left;
  nodes_[index].right = right;
  nodes_[index].count = 0;
  return index;
}

RayHit SceneAccel::make_hit(const Ray& ray, double t, const WorldTriangle& tri) const {
  RayHit hit;
  hit.distance = t;
  hit.point = ray.at(t);
  hit.face_normal = tri.normal;
  hit.instance_id = tri.instance_id;
  hit.triangle_index = tri.local_index;
  return hit;
}

std::optional<RayHit> SceneAccel::raycast(const Ray& ray) const {
  const Vec3 inv = safe_inverse(ray.direction);
  std::optional<RayHit> best;
  double limit = ray.max_distance;
  std::array<int, 128> stack{};
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    const auto entry = ray_aabb(ray.origin, inv, node.box, limit);
    if (!entry) continue;
    if (node.count > 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const auto& tri = tris_[i];
        Ray bounded = ray;
        bounded.max_distance = limit;
        const auto t = ray_triangle(bounded, tri.a, tri.b, tri.c);
        if (!t) continue;
        RayHit hit = make_hit(ray, *t, tri);
        if (!best || hit_precedes(hit, *best)) {
          best = hit;
          limit = hit.distance;
        }
      }
      continue;
    }
    const Node& l = nodes_[node.first];
    const Node& r = nodes_[node.right];
    const auto tl = ray_aabb(ray.origin, inv, l.box, limit);
    const auto tr = ray_aabb(ray.origin, inv, r.box, limit);
    // Push the farther child first so the nearer one is visited next.
    if (tl && tr) {
      if (*tl <= *tr) {
        stack[top++] = node.right;
        stack[top++] = node.first;
      } else {
        stack[top++] = node.first;
        stack[top++] = node.right;
      }
    } else if (tl) {
      stack[top++] = node.first;
    } else if (tr) {
      stack[top++] = node.right;
    }
  }
  return best;
}

std::optional<RayHit> SceneAccel::raycast_brute_force(const Ray& ray) const {
  std::optional<RayHit> best;
  for (const auto& tri : tris_) {
    const auto t = ray_triangle(ray, tri.a, tri.b, tri.c);
    if (!t) continue;
    RayHit hit = make_hit(ray, *t, tri);
    if (!best || hit_precedes(hit, *best)) best = hit;
  }
  return best;
}

template <typename BoxTest, typename TriVisit>
void SceneAccel::traverse_boxes(const BoxTest& box_test, const TriVisit& visit) const {
  std::array<int, 128> stack{};
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!box_test(node.box)) continue;
    if (node.count > 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        if (!visit(tris_[i])) return;
      }
      continue;
    }
    stack[top++] = node.right;
    stack[top++] = node.first;
  }
}

void SceneAccel::for_each_hit(const Ray& ray, const std::function<void(const RayHit&)>& visit) const {
  const Vec3 inv = safe_inverse(ray.direction);
  traverse_boxes([&](const Aabb& box) { return ray_aabb(ray.origin, inv, box, ray.max_distance).has_value(); },
                 [&](const WorldTriangle& tri) {
                   if (const auto t = ray_triangle(ray, tri.a, tri.b, tri.c)) visit(make_hit(ray, *t, tri));
                   return true;
                 });
}

bool SceneAccel::contains(const Vec3& point, int instance_id) const {
  // Majority vote over three skew directions guards against double-counted shared edges.
  static const std::array<Vec3, 3> dirs{Vec3(0.5773502691896258, 0.5773502691896257, 0.5773502691896259),
                                        Vec3(-0.2672612419124244, 0.5345224838248488, 0.8017837257372732),
                                        Vec3(0.8164965809277261, -0.4082482904638630, -0.4082482904638631)};
  int inside_votes = 0;
  for (const auto& d : dirs) {
    Ray ray{point, d.normalized(), std::numeric_limits<double>::infinity()};
    int crossings = 0;
    for_each_hit(ray, [&](const RayHit& h) {
      if (h.instance_id == instance_id) ++crossings;
    });
    inside_votes += crossings % 2;
  }
  return inside_votes >= 2;
}

OverlapResult SceneAccel::overlap(const OverlapProbe& probe, const Pose& probe_pose, const std::set<int>& exclude,
                                  bool first_only) const {
  OverlapResult result;
  std::set<int> hits;
  const TriangleMesh& local = probe.mesh();
  const Mat3 r = probe_pose.matrix();
  std::vector<Vec3> world(local.vertices.size());
  for (std::size_t i = 0; i < world.size(); ++i) world[i] = r * local.vertices[i] + probe_pose.translation;

  for (const auto& t : local.triangles) {
    const Vec3& a = world[t[0]];
    const Vec3& b = world[t[1]];
    const Vec3& c = world[t[2]];
    const Aabb tb = triangle_bounds(a, b, c);
    bool stop = false;
    traverse_boxes([&](const Aabb& box) { return box.overlaps(tb); },
                   [&](const WorldTriangle& tri) {
                     if (exclude.count(tri.instance_id) || hits.count(tri.instance_id)) return true;
                     if (!tb.overlaps(triangle_bounds(tri.a, tri.b, tri.c))) return true;
                     if (triangles_overlap(a, b, c, tri.a, tri.b, tri.c)) {
                       hits.insert(tri.instance_id);
                       if (first_only) {
                         stop = true;
                         return false;
                       }
                     }
                     return true;
                   });
    if (stop) break;
  }

  if (hits.empty() || !first_only) {
    // Probe components buried inside an instance without touching its surface.
    for (const Vec3& c_local : probe.component_centroids()) {
      const Vec3 c = probe_pose.apply(c_local);
      for (std::size_t i = 0; i < instance_ids_.size(); ++i) {
        const int id = instance_ids_[i];
        if (exclude.count(id) || hits.count(id)) continue;
        const Aabb& ib = instance_bounds_[i];
        if (!(ib.lo.array() <= c.array()).all() || !(c.array() <= ib.hi.array()).all()) continue;
        if (contains(c, id)) hits.insert(id);
      }
    }
  }
  result.instances.assign(hits.begin(), hits.end());
  result.overlap = !result.instances.empty();
  return result;
}

std::vector<int> SceneAccel::box_query(const OrientedBox& box, const std::set<int>& exclude) const {
  std::set<int> hits;
  const Aabb bb = box.bounds();
  traverse_boxes([&](const Aabb& node) { return node.overlaps(bb); },
                 [&](const WorldTriangle& tri) {
                   if (exclude.count(tri.instance_id) || hits.count(tri.instance_id)) return true;
                   if (box_triangle_overlap(box, tri.a, tri.b, tri.c)) hits.insert(tri.instance_id);
                   return true;
                 });
  return {hits.begin(), hits.end()};
}

std::vector<int> SceneAccel::capsule_query(const Vec3& p, const Vec3& q, double radius,
                                           const std::set<int>& exclude) const {
  std::set<int> hits;
  Aabb bb;
  bb.extend(p);
  bb.extend(q);
  bb.lo.array() -= radius;
  bb.hi.array() += radius;
  traverse_boxes([&](const Aabb& node) { return node.overlaps(bb); },
                 [&](const WorldTriangle& tri) {
                   if (exclude.count(tri.instance_id) || hits.count(tri.instance_id)) return true;
                   if (segment_triangle_distance(p, q, tri.a, tri.b, tri.c) <= radius) hits.insert(tri.instance_id);
                   return true;
                 });
  return {hits.begin(), hits.end()};
}

OverlapResult mesh_overlap(const SceneAccel& accel, const TriangleMesh& probe, const Pose& probe_pose,
                           const std::set<int>& exclude) {
  return accel.overlap(OverlapProbe(probe), probe_pose, exclude);
}

}  // namespace cluttergrasp
