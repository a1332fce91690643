#pragma once

#include <string>
#include <vector>

#include "cluttergrasp/grasp/sampling.hpp"
#include "cluttergrasp/scene/scene.hpp"

namespace cluttergrasp {

enum class DynamicsFailure {
  None,
  PayloadExceedsForceLimit,
  BendLimitExceeded,
  BlockedByPile,
  NoAntipodalContact,
  FrictionConeViolated,
};
std::string to_string(DynamicsFailure f);

struct DynamicsParams {
  double gravity = 9.81;          // [m/s^2]
  double acceleration_factor = 1.5;
};

struct DynamicsVerdict {
  bool q_dynamics = false;
  DynamicsFailure failure = DynamicsFailure::None;
  double payload_mass = 0.0;             // [kg]
  std::vector<int> blocking_instances;   // objects resting on the target (clutter-aware runs)
  double bend_angle_deg = 0.0;           // suction only
  double contact_angle_deg = 0.0;        // jaw only: larger of the two contact angles
};

/// Static hold check for a seated cup. Payload is the target, plus everything resting on it
/// when clutter_aware. Fails when payload * g * a exceeds the force limit, or when the bend
/// angle under the gravity torque about the cup axis exceeds the bend limit. The torque is
/// g * sum(m_i * distance of COM_i from the cup axis) and the angular stiffness is
/// force_limit * radius / bend_limit. Failures caused only by the stacked load are blocked_by_pile.
DynamicsVerdict suction_quasistatic(const SceneGeometry& scene, const SuctionCandidate& cand,
                                    const SuctionCupSpec& cup, const SupportGraph& support, bool clutter_aware,
                                    const DynamicsParams& params = {});

/// Antipodal check for a parallel jaw. Two rays from the finger planes toward the close-region
/// centre along the closing line must both first meet the target; each contact normal must lie
/// within the friction cone atan(mu) of the closing line. The payload is held against the
/// gripper's grip force as in the suction check.
DynamicsVerdict grasp_quasistatic(const SceneGeometry& scene, const GraspCandidate& cand, const GripperSpec& gripper,
                                  const SupportGraph& support, bool clutter_aware, const DynamicsParams& params = {});

}  // namespace cluttergrasp
