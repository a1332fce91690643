#include "cluttergrasp/scene/assets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>

#include <json.hpp>

#include "cluttergrasp/geometry/shapes.hpp"

namespace cluttergrasp {

std::string to_string(Difficulty d) {
  switch (d) {
    case Difficulty::L1: return "L1";
    case Difficulty::L2: return "L2";
    case Difficulty::L3: return "L3";
  }
  return "L2";
}

Difficulty difficulty_from_string(const std::string& s) {
  if (s == "L1") return Difficulty::L1;
  if (s == "L2") return Difficulty::L2;
  if (s == "L3") return Difficulty::L3;
  throw ValidationError("unknown difficulty level '" + s + "' (expected L1, L2 or L3)");
}

Difficulty classify_difficulty(const TriangleMesh& mesh, const DifficultyThresholds& th) {
  if (mesh.empty()) throw ValidationError("classify_difficulty: empty mesh");
  if (connected_components(mesh) > 1) return Difficulty::L3;
  const double volume = mesh_volume(mesh).volume;
  const double hull = convex_hull_volume(mesh);
  const double ratio = volume > 0.0 ? hull / volume : std::numeric_limits<double>::infinity();
  if (ratio >= th.min_l3_hull_ratio) return Difficulty::L3;
  if (static_cast<int>(mesh.size()) <= th.max_l1_triangles && ratio <= th.max_l1_hull_ratio) return Difficulty::L1;
  return Difficulty::L2;
}

ObjectAsset make_asset(std::string asset_id, TriangleMesh mesh, std::optional<double> density,
                       std::optional<Difficulty> difficulty) {
  ObjectAsset a;
  a.asset_id = std::move(asset_id);
  a.density = density.value_or(kDefaultDensity);
  if (!(a.density > 0.0)) throw ValidationError("asset " + a.asset_id + ": density must be positive");
  a.volume = mesh_volume(mesh).volume;
  a.centroid = mesh_centroid(mesh);
  a.difficulty = difficulty ? *difficulty : classify_difficulty(mesh);
  a.mesh = std::make_shared<const TriangleMesh>(std::move(mesh));
  return a;
}

void AssetLibrary::add(ObjectAsset asset) {
  const std::string id = asset.asset_id;
  assets_.insert_or_assign(id, std::move(asset));
}

bool AssetLibrary::contains(const std::string& id) const {
  if (assets_.count(id)) return true;
  const auto ids = builtin_asset_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

const ObjectAsset& AssetLibrary::get(const std::string& id) const {
  auto it = assets_.find(id);
  if (it != assets_.end()) return it->second;
  if (id.rfind("builtin/", 0) == 0) {
    auto [pos, inserted] = assets_.emplace(id, builtin_asset(id));
    return pos->second;
  }
  throw ValidationError("unknown asset id '" + id + "'");
}

std::vector<std::string> AssetLibrary::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, a] : assets_) out.push_back(id);
  return out;
}

void AssetLibrary::load_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw ValidationError("cannot open asset manifest " + manifest_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(manifest_path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ValidationError(manifest_path.string() + ": manifest must be a JSON object");
  const auto base = manifest_path.parent_path();
  for (const auto& [id, entry] : j.items()) {
    const std::string where = manifest_path.string() + ": " + id;
    if (!entry.is_object() || !entry.contains("path") || !entry["path"].is_string()) {
      throw ValidationError(where + ".path: missing or not a string");
    }
    std::optional<double> density;
    if (entry.contains("density")) {
      if (!entry["density"].is_number()) throw ValidationError(where + ".density: not a number");
      density = entry["density"].get<double>();
    }
    std::optional<Difficulty> difficulty;
    if (entry.contains("difficulty")) difficulty = difficulty_from_string(entry["difficulty"].get<std::string>());
    auto loaded = load_obj(base / entry["path"].get<std::string>());
    add(make_asset(id, std::move(loaded.mesh), density, difficulty));
  }
}

AssetLibrary AssetLibrary::builtin() {
  AssetLibrary lib;
  for (const auto& id : builtin_asset_ids()) lib.add(builtin_asset(id));
  return lib;
}

namespace {

using Builder = std::function<ObjectAsset(const std::string&)>;

// Heightfield block centred on the origin: footprint sx x sy, nominal thickness sz.
TriangleMesh relief_block(double sx, double sy, double sz, double cell,
                          std::function<double(double, double)> relief,
                          std::function<bool(double, double)> solid = {}) {
  shapes::HeightfieldSpec hf;
  hf.x0 = -0.5 * sx;
  hf.x1 = 0.5 * sx;
  hf.y0 = -0.5 * sy;
  hf.y1 = 0.5 * sy;
  hf.cell = cell;
  hf.bottom_z = -0.5 * sz;
  hf.height = [relief, sz](double x, double y) { return 0.5 * sz + relief(x, y); };
  hf.solid = std::move(solid);
  return shapes::heightfield_slab(hf);
}

const std::vector<std::pair<std::string, Builder>>& catalog() {
  static const std::vector<std::pair<std::string, Builder>> entries = {
      {"builtin/cube_40", [](const std::string& id) { return make_asset(id, shapes::box(Vec3(0.04, 0.04, 0.04))); }},
      {"builtin/cube_60", [](const std::string& id) { return make_asset(id, shapes::box(Vec3(0.06, 0.06, 0.06))); }},
      {"builtin/box_flat",
       [](const std::string& id) { return make_asset(id, shapes::box(Vec3(0.10, 0.08, 0.025)), 700.0); }},
      {"builtin/box_long", [](const std::string& id) { return make_asset(id, shapes::box(Vec3(0.14, 0.05, 0.04))); }},
      {"builtin/box_tall", [](const std::string& id) { return make_asset(id, shapes::box(Vec3(0.05, 0.05, 0.10))); }},
      {"builtin/steel_block",
       [](const std::string& id) { return make_asset(id, shapes::box(Vec3(0.04, 0.04, 0.04)), 7800.0); }},
      {"builtin/can", [](const std::string& id) { return make_asset(id, shapes::cylinder(0.033, 0.12, 48), 600.0); }},
      {"builtin/puck",
       [](const std::string& id) { return make_asset(id, shapes::cylinder(0.04, 0.025, 48), 1100.0); }},
      {"builtin/hex_prism", [](const std::string& id) { return make_asset(id, shapes::cylinder(0.035, 0.05, 6)); }},
      {"builtin/sphere_30",
       [](const std::string& id) { return make_asset(id, shapes::icosphere(0.03, 3), 400.0, Difficulty::L1); }},
      {"builtin/sphere_50",
       [](const std::string& id) { return make_asset(id, shapes::icosphere(0.05, 3), 300.0, Difficulty::L1); }},
      {"builtin/ball_small", [](const std::string& id) { return make_asset(id, shapes::icosphere(0.025, 2)); }},
      {"builtin/torus", [](const std::string& id) { return make_asset(id, shapes::torus(0.04, 0.012, 40, 16)); }},
      {"builtin/grooved_block",
       [](const std::string& id) {
         // Two 6 mm wide, 5 mm deep grooves across the top.
         auto relief = [](double x, double) { return (std::abs(std::abs(x) - 0.012) < 0.003) ? -0.005 : 0.0; };
         return make_asset(id, relief_block(0.07, 0.07, 0.03, 0.001, relief));
       }},
      {"builtin/perforated_plate",
       [](const std::string& id) {
         auto solid = [](double x, double y) {
           for (double cx : {-0.02, 0.02}) {
             for (double cy : {-0.02, 0.02}) {
               if (std::hypot(x - cx, y - cy) < 0.006) return false;
             }
           }
           return true;
         };
         return make_asset(id, relief_block(0.08, 0.08, 0.012, 0.001, [](double, double) { return 0.0; }, solid),
                           900.0);
       }},
      {"builtin/ridged_tile",
       [](const std::string& id) {
         auto relief = [](double x, double) { return 0.003 * std::sin(2.0 * std::numbers::pi * x / 0.012); };
         return make_asset(id, relief_block(0.07, 0.07, 0.02, 0.001, relief));
       }},
      {"builtin/dish",
       [](const std::string& id) {
         auto relief = [](double x, double y) {
           const double r2 = x * x + y * y;
           const double radius = 0.03, depth = 0.012;
           const double cap = radius - std::sqrt(std::max(0.0, radius * radius - r2));
           return std::min(0.0, cap - depth);
         };
         return make_asset(id, relief_block(0.08, 0.08, 0.03, 0.001, relief));
       }},
      {"builtin/l_bracket",
       [](const std::string& id) {
         auto solid = [](double x, double y) { return x < -0.01 || y < -0.01; };
         return make_asset(id, relief_block(0.08, 0.08, 0.03, 0.002, [](double, double) { return 0.0; }, solid));
       }},
      {"builtin/dumbbell",
       [](const std::string& id) {
         TriangleMesh m = shapes::cylinder_x(0.008, -0.04, 0.04, 24);
         append(m, transformed(shapes::icosphere(0.022, 2), Pose::translation_only({-0.05, 0, 0})));
         append(m, transformed(shapes::icosphere(0.022, 2), Pose::translation_only({0.05, 0, 0})));
         return make_asset(id, std::move(m), 2000.0);
       }},
      {"builtin/wedge",
       [](const std::string& id) {
         auto relief = [](double x, double) { return -0.02 * (x + 0.035) / 0.07; };
         return make_asset(id, relief_block(0.07, 0.05, 0.04, 0.005, relief));
       }},
  };
  return entries;
}

}  // namespace

std::vector<std::string> builtin_asset_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, b] : catalog()) ids.push_back(id);
  return ids;
}

ObjectAsset builtin_asset(const std::string& id) {
  // Built assets are immutable (shared mesh), so one copy per process is enough.
  static std::mutex mutex;
  static std::map<std::string, ObjectAsset> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(id); it != cache.end()) return it->second;
  for (const auto& [name, build] : catalog()) {
    if (name == id) return cache.emplace(id, build(id)).first->second;
  }
  throw ValidationError("unknown builtin asset '" + id + "'");
}

}  // namespace cluttergrasp
