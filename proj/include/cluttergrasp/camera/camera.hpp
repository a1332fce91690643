#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "cluttergrasp/scene/scene.hpp"

namespace cluttergrasp {

/// Pinhole intrinsics. Defaults are nominal values for a 640x480 structured-light sensor.
struct CameraIntrinsics {
  double fx = 525.0;
  double fy = 525.0;
  double cx = 319.5;
  double cy = 239.5;
  int width = 640;
  int height = 480;

  void validate() const;
};

/// Spherical viewpoint ranges: polar angle phi from +z, azimuth theta from +x.
struct ViewpointConfig {
  double rho_min = 0.5, rho_max = 10.0;
  double phi_min = 0.0, phi_max = 1.5707963267948966;
  double theta_min = 0.0, theta_max = 3.141592653589793;
  Vec3 look_at = Vec3::Zero();

  void validate() const;
};

/// Camera-to-world pose of a camera at `position` whose optical (+z) axis points at `target`.
/// Image x runs right, image y down. Uses world +z as up, or +x when looking straight along z.
Pose look_at_pose(const Vec3& position, const Vec3& target);

/// Position on the sphere (rho, phi, theta) around cfg.look_at.
Vec3 spherical_position(const ViewpointConfig& cfg, double rho, double phi, double theta);

/// rho, phi and theta drawn independently and uniformly in their ranges. Deterministic per seed.
Pose sample_viewpoint(const ViewpointConfig& cfg, std::uint64_t seed);

struct DepthFrame {
  CameraIntrinsics intrinsics;
  Pose camera_pose;                 // camera-to-world
  std::vector<double> depth;        // row-major, z-depth in the camera frame [m]; 0 = miss
  std::vector<int> instance_ids;    // row-major; -1 = miss
  std::vector<Vec3> normals;        // world-frame face normal of the hit; zero on miss

  std::size_t index(int u, int v) const { return static_cast<std::size_t>(v) * intrinsics.width + u; }
};

struct RenderOptions {
  double depth_noise_mm = 0.0;  // additive Gaussian sigma; 0 disables
  std::uint64_t noise_seed = 0;
  int workers = 1;
  double max_range = 100.0;     // [m]
};

/// Unit ray direction through pixel (u, v), in the camera frame.
Vec3 pixel_direction(const CameraIntrinsics& k, double u, double v);

/// One ray per pixel centre against the scene geometry. Rows are distributed over workers,
/// output is assembled row-major regardless of worker count.
DepthFrame render_depth(const SceneGeometry& scene, const Pose& camera_pose, const CameraIntrinsics& intrinsics,
                        const RenderOptions& options = {});

/// Back-projects every hit pixel into the world frame, grouped by instance id.
std::map<int, std::vector<PointNormal>> depth_to_pointcloud(const DepthFrame& frame);

/// 16-bit PNG writers: depth in 0.1 mm units (saturating at 65535), ids stored as id + 1.
void write_depth_png(const DepthFrame& frame, const std::filesystem::path& path);
void write_instance_png(const DepthFrame& frame, const std::filesystem::path& path);
/// Reads a 16-bit grayscale PNG as raw values (width, height, row-major data).
std::vector<std::uint16_t> read_png16(const std::filesystem::path& path, int& width, int& height);

/// JSON sidecar with camera pose and intrinsics.
std::string frame_metadata_json(const DepthFrame& frame);

}  // namespace cluttergrasp
