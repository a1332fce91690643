#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cluttergrasp/camera/camera.hpp"
#include "cluttergrasp/grasp/dynamics.hpp"
#include "cluttergrasp/grasp/grippers.hpp"
#include "cluttergrasp/grasp/sampling.hpp"
#include "cluttergrasp/scene/scene.hpp"

namespace cluttergrasp {

enum class Modality { Jaw, Suction };
std::string to_string(Modality m);
Modality modality_from_string(const std::string& s);

enum class Variant { Default, Dexnet8Seal, SingleObjectDynamics, SimplifiedGripper };
std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);
std::vector<Variant> all_variants();

struct SamplingConfig {
  FrameSamplingParams frames;
  int n_roll = 12;
  int n_standoff = 3;
  double approach_cone_half_angle = 1.5707963267948966;  // alpha
  double approach_tilt = 0.0;                            // beta

  void validate() const;
};

struct EvaluationConfig {
  Variant variant = Variant::Default;
  std::string gripper = "fetch";
  std::string cup = "suction_15mm";
  int seal_rings = 15;
  int seal_vertices_per_ring = 64;
  double deformation_limit = 0.10;   // fraction of bellows height
  double dexnet_strain_limit = 0.10;
  double rim_clearance = 0.001;      // [m]
  DynamicsParams dynamics;
  SupportParams support;

  void validate() const;
};

struct CameraConfig {
  CameraIntrinsics intrinsics;
  ViewpointConfig viewpoint;
  int frames = 8;
  double depth_noise_mm = 0.0;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  int workers = 1;
  SceneDistributionConfig scene;
  std::vector<std::string> asset_pool;  // defaults to the built-in catalog
  DifficultyThresholds difficulty;
  CameraConfig camera;
  SamplingConfig sampling;
  EvaluationConfig evaluation;
  std::vector<GripperSpec> grippers;    // dimensional fields only
  std::vector<SuctionCupSpec> cups;
  int export_scenes = 1;

  PipelineConfig();
  void validate() const;

  const GripperSpec& gripper(const std::string& name) const;
  const SuctionCupSpec& cup(const std::string& name) const;
};

std::string config_to_json(const PipelineConfig& cfg);
/// Keys absent from the JSON keep their defaults; unknown keys and wrong types throw
/// ValidationError naming the key path.
PipelineConfig config_from_json(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Canonical JSON of the evaluation section together with the tool specs it refers to.
std::string evaluation_json(const PipelineConfig& cfg);
/// 64-bit FNV-1a over evaluation_json, as 16 hex digits.
std::string config_hash(const PipelineConfig& cfg);
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace cluttergrasp
