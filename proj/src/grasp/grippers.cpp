#include "cluttergrasp/grasp/grippers.hpp"

#include "cluttergrasp/geometry/shapes.hpp"

namespace cluttergrasp {

std::vector<OrientedBox> GripperSpec::parts() const {
  const double finger_y = 0.5 * (max_open_width + finger_thickness);
  const Vec3 finger_half(0.5 * finger_depth, 0.5 * finger_thickness, 0.5 * finger_width);
  std::vector<OrientedBox> out;
  out.push_back({Pose::translation_only({0.5 * finger_depth, finger_y, 0.0}), finger_half});
  out.push_back({Pose::translation_only({0.5 * finger_depth, -finger_y, 0.0}), finger_half});
  out.push_back({Pose::translation_only({finger_depth + 0.5 * palm_size.x(), 0.0, 0.0}), 0.5 * palm_size});
  return out;
}

GripperSpec make_gripper(std::string name, double finger_depth, double max_open_width, double finger_thickness,
                         double finger_width, const Vec3& palm_size, double grip_force) {
  if (!(finger_depth > 0.0) || !(max_open_width > 0.0)) {
    throw ValidationError("gripper " + name + ": finger depth and open width must be positive");
  }
  GripperSpec g;
  g.name = std::move(name);
  g.finger_depth = finger_depth;
  g.max_open_width = max_open_width;
  g.finger_thickness = finger_thickness;
  g.finger_width = finger_width;
  g.palm_size = palm_size;
  g.grip_force = grip_force;
  for (const auto& part : g.parts()) {
    append(g.collision_mesh, shapes::box(part.pose.translation - part.half, part.pose.translation + part.half));
  }
  g.close_region = {Pose::translation_only({0.5 * finger_depth, 0.0, 0.0}),
                    Vec3(0.5 * finger_depth, 0.5 * max_open_width, 0.5 * finger_width)};
  return g;
}

// Simplified volumetric stand-ins at the published stroke and finger dimensions.
GripperSpec fetch_gripper() {
  return make_gripper("fetch", 0.045, 0.10, 0.01, 0.02, Vec3(0.03, 0.12, 0.05));
}

GripperSpec robotiq_2f140_gripper() {
  return make_gripper("robotiq_2f140", 0.06, 0.14, 0.012, 0.027, Vec3(0.05, 0.164, 0.05));
}

SuctionCupSpec suction_cup_15mm() { return {"suction_15mm", 0.015, 0.02, 20.0, 7.0}; }
SuctionCupSpec suction_cup_25mm() { return {"suction_25mm", 0.025, 0.03, 30.0, 7.0}; }

GripperSpec gripper_by_name(const std::string& name) {
  if (name == "fetch") return fetch_gripper();
  if (name == "robotiq_2f140") return robotiq_2f140_gripper();
  throw ValidationError("unknown gripper '" + name + "'");
}

SuctionCupSpec cup_by_name(const std::string& name) {
  if (name == "suction_15mm") return suction_cup_15mm();
  if (name == "suction_25mm") return suction_cup_25mm();
  throw ValidationError("unknown suction cup '" + name + "'");
}

std::vector<std::string> gripper_names() { return {"fetch", "robotiq_2f140"}; }
std::vector<std::string> cup_names() { return {"suction_15mm", "suction_25mm"}; }

}  // namespace cluttergrasp
