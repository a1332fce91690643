#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cluttergrasp/geometry/mesh.hpp"

namespace cluttergrasp {

enum class Difficulty { L1, L2, L3 };

std::string to_string(Difficulty d);
Difficulty difficulty_from_string(const std::string& s);

/// Thresholds quantifying the mesh-complexity difficulty levels.
struct DifficultyThresholds {
  int max_l1_triangles = 500;
  double max_l1_hull_ratio = 1.2;
  double min_l3_hull_ratio = 3.0;
};

/// L3: several connected components or hull/mesh volume ratio >= min_l3_hull_ratio.
/// L1: at most max_l1_triangles and hull ratio <= max_l1_hull_ratio. Otherwise L2.
Difficulty classify_difficulty(const TriangleMesh& mesh, const DifficultyThresholds& thresholds = {});

inline constexpr double kDefaultDensity = 500.0;  // [kg/m^3]

struct ObjectAsset {
  std::string asset_id;
  std::shared_ptr<const TriangleMesh> mesh;
  double density = kDefaultDensity;
  Difficulty difficulty = Difficulty::L1;
  double volume = 0.0;                 // unscaled [m^3]
  Vec3 centroid = Vec3::Zero();        // unscaled, mesh frame

  double mass(double scale) const { return density * scale * scale * scale * volume; }
};

/// Builds an asset, computing volume and centroid; difficulty is classified unless given.
ObjectAsset make_asset(std::string asset_id, TriangleMesh mesh, std::optional<double> density = std::nullopt,
                       std::optional<Difficulty> difficulty = std::nullopt);

/// Asset pool keyed by id. Ids starting with "builtin/" resolve to the procedural catalog
/// on demand; anything else must be registered or loaded from a manifest.
class AssetLibrary {
 public:
  void add(ObjectAsset asset);
  bool contains(const std::string& id) const;
  /// Throws ValidationError for unknown ids.
  const ObjectAsset& get(const std::string& id) const;
  std::vector<std::string> ids() const;

  /// Manifest JSON: { "<asset_id>": { "path": "mesh.obj", "density": 500, "difficulty": "L2" } }.
  /// Paths are relative to the manifest's directory; density and difficulty are optional.
  void load_manifest(const std::filesystem::path& manifest_path);

  /// Library holding every procedural catalog asset.
  static AssetLibrary builtin();

 private:
  mutable std::map<std::string, ObjectAsset> assets_;
};

/// Ids of the procedural catalog, in a fixed order.
std::vector<std::string> builtin_asset_ids();
/// Procedural catalog entry; throws ValidationError for unknown ids.
ObjectAsset builtin_asset(const std::string& id);

}  // namespace cluttergrasp
