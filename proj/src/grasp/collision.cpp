#include "cluttergrasp/grasp/collision.hpp"

#include <algorithm>
#include <set>

#include "cluttergrasp/geometry/shapes.hpp"

namespace cluttergrasp {

namespace {

std::vector<int> merge(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

bool mesh_touches_ground(const TriangleMesh& local, const Pose& pose, double ground_z) {
  for (const auto& v : local.vertices) {
    if (pose.apply(v).z() <= ground_z) return true;
  }
  return false;
}

OrientedBox to_world(const OrientedBox& local, const Pose& pose) { return {pose * local.pose, local.half}; }

}  // namespace

CollisionReport check_grasp_collision(const SceneGeometry& scene, const GraspCandidate& cand,
                                      const GripperSpec& gripper, GripperGeometry geometry) {
  if (cand.gripper != gripper.name) {
    throw ValidationError("candidate gripper '" + cand.gripper + "' does not match '" + gripper.name + "'");
  }
  CollisionReport r;
  const SceneAccel* accel = scene.accel();
  const double ground = scene.scene().ground_plane_z;

  if (geometry == GripperGeometry::Mesh) {
    r.ground_contact = mesh_touches_ground(gripper.collision_mesh, cand.pose, ground);
    if (accel) {
      r.contacting_instances = accel->overlap(OverlapProbe(gripper.collision_mesh), cand.pose).instances;
    }
  } else {
    const auto parts = gripper.parts();
    const OrientedBox palm = to_world(parts[2], cand.pose);
    const Mat3 rp = palm.pose.matrix();
    for (int c = 0; c < 8 && !r.ground_contact; ++c) {
      const Vec3 s((c & 1) ? 1 : -1, (c & 2) ? 1 : -1, (c & 4) ? 1 : -1);
      if ((palm.pose.translation + rp * s.cwiseProduct(palm.half)).z() <= ground) r.ground_contact = true;
    }
    std::vector<int> hits;
    if (accel) hits = accel->box_query(palm);
    const double radius = 0.5 * std::min(gripper.finger_thickness, gripper.finger_width);
    const double x0 = std::min(radius, 0.5 * gripper.finger_depth);
    const double x1 = std::max(gripper.finger_depth - radius, x0);
    for (int f = 0; f < 2; ++f) {
      const Vec3 c = parts[f].pose.translation;
      const Vec3 p = cand.pose.apply({x0, c.y(), c.z()});
      const Vec3 q = cand.pose.apply({x1, c.y(), c.z()});
      if (std::min(p.z(), q.z()) - radius <= ground) r.ground_contact = true;
      if (accel) hits = merge(std::move(hits), accel->capsule_query(p, q, radius));
    }
    r.contacting_instances = std::move(hits);
  }

  r.close_region_has_target = false;
  if (accel) {
    for (int id : accel->box_query(to_world(gripper.close_region, cand.pose))) {
      if (id == cand.target_instance) {
        r.close_region_has_target = true;
      } else {
        r.close_region_occupied_by.push_back(id);
      }
    }
  }
  r.q_collision = r.contacting_instances.empty() && !r.ground_contact && r.close_region_has_target &&
                  r.close_region_occupied_by.empty();
  return r;
}

TriangleMesh cup_body_mesh(const SuctionCupSpec& cup, double rim_clearance) {
  return shapes::cylinder_x(cup.radius, -cup.bellows_height, -rim_clearance, 32);
}

CollisionReport check_suction_collision(const SceneGeometry& scene, const SuctionCandidate& cand,
                                        const SuctionCupSpec& cup, double rim_clearance) {
  if (cand.cup != cup.name) {
    throw ValidationError("candidate cup '" + cand.cup + "' does not match '" + cup.name + "'");
  }
  CollisionReport r;
  const TriangleMesh body = cup_body_mesh(cup, rim_clearance);
  r.ground_contact = mesh_touches_ground(body, cand.pose, scene.scene().ground_plane_z);
  if (const SceneAccel* accel = scene.accel()) {
    r.contacting_instances = accel->overlap(OverlapProbe(body), cand.pose).instances;
  }
  r.q_collision = r.contacting_instances.empty() && !r.ground_contact;
  return r;
}

}  // namespace cluttergrasp
