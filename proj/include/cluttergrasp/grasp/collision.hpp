#pragma once

#include <vector>

#include "cluttergrasp/grasp/sampling.hpp"
#include "cluttergrasp/scene/scene.hpp"

namespace cluttergrasp {

struct CollisionReport {
  bool q_collision = false;
  std::vector<int> contacting_instances;      // sorted
  std::vector<int> close_region_occupied_by;  // non-target instances, sorted
  bool ground_contact = false;
  bool close_region_has_target = true;        // always true for suction
};

enum class GripperGeometry {
  Mesh,        // full triangle mesh of the open gripper
  Primitives,  // palm box plus capsules inscribed in the fingers, analytic queries
};

/// Parallel-jaw collision: the gripper touches no object and not the ground, and the close
/// region intersects the target surface and no other object. Contact includes touching.
CollisionReport check_grasp_collision(const SceneGeometry& scene, const GraspCandidate& cand,
                                      const GripperSpec& gripper,
                                      GripperGeometry geometry = GripperGeometry::Mesh);

/// Bellows body of the cup, a cylinder of the cup radius spanning x in [-h, -rim_clearance]
/// in the cup frame. It may touch nothing, the ground included.
CollisionReport check_suction_collision(const SceneGeometry& scene, const SuctionCandidate& cand,
                                        const SuctionCupSpec& cup, double rim_clearance = 0.001);

/// Cup body mesh in the cup frame.
TriangleMesh cup_body_mesh(const SuctionCupSpec& cup, double rim_clearance = 0.001);

}  // namespace cluttergrasp
