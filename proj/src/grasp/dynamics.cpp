#include "cluttergrasp/grasp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cluttergrasp {

std::string to_string(DynamicsFailure f) {
  switch (f) {
    case DynamicsFailure::None: return "none";
    case DynamicsFailure::PayloadExceedsForceLimit: return "payload_exceeds_force_limit";
    case DynamicsFailure::BendLimitExceeded: return "bend_limit_exceeded";
    case DynamicsFailure::BlockedByPile: return "blocked_by_pile";
    case DynamicsFailure::NoAntipodalContact: return "no_antipodal_contact";
    case DynamicsFailure::FrictionConeViolated: return "friction_cone_violated";
  }
  return "none";
}

namespace {

constexpr double kGrazing = 1e-9;

double mass_of(const SceneGeometry& scene, const std::vector<int>& ids) {
  double m = 0.0;
  for (int id : ids) m += scene.object(id).mass;
  return m;
}

// Picks the failure label: a failure that the target alone would not have is charged to the pile.
DynamicsFailure charge(bool fails_alone, DynamicsFailure own) {
  return fails_alone ? own : DynamicsFailure::BlockedByPile;
}

}  // namespace

DynamicsVerdict suction_quasistatic(const SceneGeometry& scene, const SuctionCandidate& cand,
                                    const SuctionCupSpec& cup, const SupportGraph& support, bool clutter_aware,
                                    const DynamicsParams& params) {
  DynamicsVerdict v;
  const int target = cand.target_instance;
  std::vector<int> load;
  if (clutter_aware) load = support.load_on(target);
  v.blocking_instances = load;
  const double m_target = scene.object(target).mass;
  v.payload_mass = m_target + mass_of(scene, load);

  const double lift = params.gravity * params.acceleration_factor;
  if (v.payload_mass * lift > cup.force_limit) {
    v.failure = charge(m_target * lift > cup.force_limit, DynamicsFailure::PayloadExceedsForceLimit);
    return v;
  }

  const Vec3 origin = cand.pose.translation;
  const Vec3 axis = cand.pose.apply_direction(Vec3::UnitX());
  auto lever = [&](int id) {
    const Vec3 d = scene.center_of_mass(id) - origin;
    return (d - d.dot(axis) * axis).norm();
  };
  const double tau_target = params.gravity * m_target * lever(target);
  double tau = tau_target;
  for (int id : load) tau += params.gravity * scene.object(id).mass * lever(id);
  const double limit_rad = cup.bend_limit_deg * std::numbers::pi / 180.0;
  const double k_bend = cup.force_limit * cup.radius / limit_rad;
  v.bend_angle_deg = tau / k_bend * 180.0 / std::numbers::pi;
  if (v.bend_angle_deg > cup.bend_limit_deg) {
    v.failure = charge(tau_target / k_bend > limit_rad, DynamicsFailure::BendLimitExceeded);
    return v;
  }
  v.q_dynamics = true;
  return v;
}

DynamicsVerdict grasp_quasistatic(const SceneGeometry& scene, const GraspCandidate& cand, const GripperSpec& gripper,
                                  const SupportGraph& support, bool clutter_aware, const DynamicsParams& params) {
  DynamicsVerdict v;
  const int target = cand.target_instance;
  const SceneAccel* accel = scene.accel();
  const double w = gripper.max_open_width;
  const Vec3 centre = cand.pose.apply(Vec3(0.5 * gripper.finger_depth, 0.0, 0.0));
  const Vec3 y = cand.pose.apply_direction(Vec3::UnitY());

  // Contact on the +Y finger (ray travelling -Y) and on the -Y finger (ray travelling +Y).
  // Faces edge-on to the closing line are skipped; a back-facing first hit means the finger
  // plane already lies inside an object, i.e. the object is wider than the opening.
  std::optional<RayHit> contact[2];
  for (int s = 0; s < 2; ++s) {
    const Vec3 outward = s == 0 ? y : Vec3(-y);
    if (accel) {
      accel->for_each_hit(Ray{centre + 0.5 * w * outward, -outward, w}, [&](const RayHit& h) {
        if (std::abs(h.face_normal.dot(outward)) <= kGrazing) return;
        if (!contact[s] || hit_precedes(h, *contact[s])) contact[s] = h;
      });
    }
    if (!contact[s] || contact[s]->instance_id != target || contact[s]->face_normal.dot(outward) <= 0.0) {
      v.failure = DynamicsFailure::NoAntipodalContact;
      return v;
    }
  }
  if ((contact[0]->point - contact[1]->point).norm() > w) {
    v.failure = DynamicsFailure::NoAntipodalContact;
    return v;
  }
  const double cone = std::atan(scene.object(target).friction);
  for (int s = 0; s < 2; ++s) {
    const Vec3 outward = s == 0 ? y : Vec3(-y);
    const double c = std::clamp(contact[s]->face_normal.dot(outward), -1.0, 1.0);
    v.contact_angle_deg = std::max(v.contact_angle_deg, std::acos(c) * 180.0 / std::numbers::pi);
    if (std::acos(c) > cone + 1e-9) v.failure = DynamicsFailure::FrictionConeViolated;
  }
  if (v.failure != DynamicsFailure::None) return v;

  std::vector<int> load;
  if (clutter_aware) load = support.load_on(target);
  v.blocking_instances = load;
  const double m_target = scene.object(target).mass;
  v.payload_mass = m_target + mass_of(scene, load);
  const double lift = params.gravity * params.acceleration_factor;
  if (v.payload_mass * lift > gripper.grip_force) {
    v.failure = charge(m_target * lift > gripper.grip_force, DynamicsFailure::PayloadExceedsForceLimit);
    return v;
  }
  v.q_dynamics = true;
  return v;
}

}  // namespace cluttergrasp
