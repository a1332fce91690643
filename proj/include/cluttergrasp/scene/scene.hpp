#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "cluttergrasp/geometry/accel.hpp"
#include "cluttergrasp/scene/assets.hpp"

namespace cluttergrasp {

struct SceneObject {
  int instance_id = 0;
  std::string asset_id;
  Pose pose;
  double scale = 1.0;
  double mass = 0.0;      // [kg]
  double friction = 0.5;  // Coulomb coefficient

  bool operator==(const SceneObject& o) const;
};

struct Scene {
  std::uint64_t seed = 0;
  double ground_plane_z = 0.0;
  std::vector<SceneObject> objects;
  /// Optional asset manifest (path as written in the file, relative to the scene file).
  std::string asset_manifest;

  bool operator==(const Scene& o) const;
};

struct SceneDistributionConfig {
  int min_objects = 1;
  int max_objects = 20;
  Vec3 drop_lo{-0.1, -0.1, 0.5};
  Vec3 drop_hi{0.1, 0.1, 0.8};
  double min_scale = 1.0;
  double max_scale = 1.5;
  double min_friction = 0.0;
  double max_friction = 1.0;
  /// Friction is drawn once per scene and copied to each object (see README).
  bool per_object_friction = false;
  double settle_step = 0.002;         // coarse downward sweep step [m]
  double contact_resolution = 1e-4;   // binary-search tolerance at first contact [m]

  void validate() const;
};

struct PlannedDrop {
  std::string asset_id;
  Pose pose;
  double scale = 1.0;
  double friction = 0.5;
};

struct ScenePlan {
  std::uint64_t seed = 0;
  std::vector<PlannedDrop> drops;
};

/// Object count uniform in [min, max], positions uniform in the drop box, orientations
/// uniform on SO(3) (normalized 4D Gaussian quaternion). Deterministic per seed.
ScenePlan sample_scene_plan(const SceneDistributionConfig& cfg, const std::vector<std::string>& asset_pool,
                            std::uint64_t seed);

struct SettleReport {
  Scene scene;
  std::vector<std::string> warnings;
  int skipped = 0;
};

/// Places each planned drop in order: orientation frozen, translated along -z until first
/// contact with the ground or an already placed object, resolved to cfg.contact_resolution.
SettleReport settle_scene(const ScenePlan& plan, const AssetLibrary& assets, const SceneDistributionConfig& cfg = {});

/// Posed, scaled instances of a scene plus derived per-object quantities. Immutable.
class SceneGeometry {
 public:
  SceneGeometry(Scene scene, const AssetLibrary& assets);

  const Scene& scene() const { return scene_; }
  /// Null for an empty scene.
  const SceneAccel* accel() const { return accel_.get(); }
  const std::vector<MeshInstance>& instances() const { return instances_; }
  std::size_t size() const { return scene_.objects.size(); }
  /// Position of an instance id in scene().objects; throws for unknown ids.
  std::size_t index_of(int instance_id) const;
  const SceneObject& object(int instance_id) const { return scene_.objects[index_of(instance_id)]; }
  const TriangleMesh& world_mesh(int instance_id) const { return world_meshes_[index_of(instance_id)]; }
  Vec3 center_of_mass(int instance_id) const { return coms_[index_of(instance_id)]; }
  /// Single-instance acceleration structure (used for singulated evaluation).
  const SceneAccel& isolated_accel(int instance_id) const { return *isolated_[index_of(instance_id)]; }
  std::optional<RayHit> raycast(const Ray& ray) const;

 private:
  Scene scene_;
  std::vector<MeshInstance> instances_;
  std::vector<TriangleMesh> world_meshes_;
  std::vector<Vec3> coms_;
  std::unique_ptr<SceneAccel> accel_;
  std::vector<std::unique_ptr<SceneAccel>> isolated_;
};

/// Recomputes mass = density * scale^3 * volume for every object.
void assign_masses(Scene& scene, const AssetLibrary& assets);

/// Directed resting-contact relation: edge a -> b when a rests on b.
struct SupportGraph {
  std::vector<int> ids;                      // instance ids, scene order
  std::vector<std::pair<int, int>> edges;    // (upper, lower), sorted

  bool has_edge(int upper, int lower) const;
  /// Every instance resting on `id`, directly or through a stack.
  std::vector<int> load_on(int id) const;
};

struct SupportParams {
  std::size_t samples = 400;
  double lowest_fraction = 0.1;
  double reach = 0.002;  // [m]
};

/// Edge a -> b iff a downward ray from one of a's lowest-decile surface samples first
/// meets b within `reach`.
SupportGraph support_graph(const SceneGeometry& geometry, const SupportParams& params = {});

/// True when the object touches (within `reach`) the ground or another object beneath it.
bool is_supported(const SceneGeometry& geometry, int instance_id, double reach = 0.002);

/// Scene JSON: {"seed", "ground_plane_z", "objects": [{"instance_id", "asset_id",
/// "pose": {"q": [w,x,y,z], "t": [x,y,z]}, "scale", "mass", "friction"}], "asset_manifest"?}.
/// Parsing throws ValidationError naming the offending field path.
std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);
void save_scene(const Scene& scene, const std::filesystem::path& path);
Scene load_scene(const std::filesystem::path& path);

/// Asset library for a scene file: the built-in catalog plus the scene's manifest, if any.
AssetLibrary assets_for_scene(const Scene& scene, const std::filesystem::path& scene_path);

}  // namespace cluttergrasp
