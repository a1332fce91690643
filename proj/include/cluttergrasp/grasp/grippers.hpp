#pragma once

#include <string>
#include <vector>

#include "cluttergrasp/geometry/mesh.hpp"

namespace cluttergrasp {

/// Parallel-jaw gripper in its open configuration.
///
/// Gripper frame: origin midway between the fingertips, +X pointing back toward the palm
/// (the gripper approaches along -X), +Y the closing direction. Fingers occupy
/// x in [0, finger_depth] at y = +/-(max_open_width + finger_thickness) / 2; the palm sits
/// behind them. The close region is the space swept between the open fingers.
struct GripperSpec {
  std::string name;
  double finger_depth = 0.045;      // d [m]
  double max_open_width = 0.10;     // inner distance between open fingers [m]
  double finger_thickness = 0.01;   // along Y [m]
  double finger_width = 0.02;       // along Z [m]
  Vec3 palm_size{0.03, 0.12, 0.05};  // X (depth), Y, Z [m]
  double grip_force = 60.0;         // closing force budget [N]
  TriangleMesh collision_mesh;      // open configuration, gripper frame
  OrientedBox close_region;         // gripper frame

  /// Finger boxes and palm in the gripper frame (the primitives behind collision_mesh).
  std::vector<OrientedBox> parts() const;
};

/// Builds the palm-plus-two-fingers mesh and close region from the dimensional fields.
GripperSpec make_gripper(std::string name, double finger_depth, double max_open_width, double finger_thickness,
                         double finger_width, const Vec3& palm_size, double grip_force = 60.0);

GripperSpec fetch_gripper();
GripperSpec robotiq_2f140_gripper();

/// Bellows suction cup. Cup frame: +X is the approach direction (into the surface), the rim
/// lies in the x = 0 plane centred on the origin, and the bellows extend toward -X.
struct SuctionCupSpec {
  std::string name;
  double radius = 0.015;          // [m]
  double bellows_height = 0.02;   // h [m]
  double force_limit = 20.0;      // [N]
  double bend_limit_deg = 7.0;
};

SuctionCupSpec suction_cup_15mm();
SuctionCupSpec suction_cup_25mm();

/// Lookup of the built-in tools by name; throws ValidationError on unknown names.
GripperSpec gripper_by_name(const std::string& name);
SuctionCupSpec cup_by_name(const std::string& name);
std::vector<std::string> gripper_names();
std::vector<std::string> cup_names();

}  // namespace cluttergrasp
