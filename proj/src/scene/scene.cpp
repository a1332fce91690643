#include "cluttergrasp/scene/scene.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cluttergrasp/geometry/sampling.hpp"
#include "cluttergrasp/random.hpp"

namespace cluttergrasp {

using nlohmann::json;

bool SceneObject::operator==(const SceneObject& o) const {
  return instance_id == o.instance_id && asset_id == o.asset_id && pose.rotation.coeffs() == o.pose.rotation.coeffs() &&
         pose.translation == o.pose.translation && scale == o.scale && mass == o.mass && friction == o.friction;
}

bool Scene::operator==(const Scene& o) const {
  return seed == o.seed && ground_plane_z == o.ground_plane_z && objects == o.objects &&
         asset_manifest == o.asset_manifest;
}

void SceneDistributionConfig::validate() const {
  if (min_objects < 1 || max_objects < min_objects) throw ValidationError("scene: object_count_range is empty");
  if ((drop_lo.array() > drop_hi.array()).any()) throw ValidationError("scene: drop_region is empty");
  if (!(min_scale > 0.0) || max_scale < min_scale) throw ValidationError("scene: scale_range is invalid");
  if (min_friction < 0.0 || max_friction > 1.0 || max_friction < min_friction) {
    throw ValidationError("scene: friction_range must lie within [0, 1]");
  }
  if (!(settle_step > 0.0) || !(contact_resolution > 0.0)) throw ValidationError("scene: settle steps must be positive");
}

ScenePlan sample_scene_plan(const SceneDistributionConfig& cfg, const std::vector<std::string>& asset_pool,
                            std::uint64_t seed) {
  if (asset_pool.empty()) throw ValidationError("sample_scene_plan: asset pool is empty");
  cfg.validate();
  Rng rng(seed);
  ScenePlan plan;
  plan.seed = seed;
  const auto count = rng.uniform_int(cfg.min_objects, cfg.max_objects);
  const double scene_friction = rng.uniform(cfg.min_friction, cfg.max_friction);
  for (std::int64_t i = 0; i < count; ++i) {
    PlannedDrop d;
    d.asset_id = asset_pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(asset_pool.size()) - 1))];
    const Vec3 t(rng.uniform(cfg.drop_lo.x(), cfg.drop_hi.x()), rng.uniform(cfg.drop_lo.y(), cfg.drop_hi.y()),
                 rng.uniform(cfg.drop_lo.z(), cfg.drop_hi.z()));
    Eigen::Vector4d g(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    while (g.norm() < 1e-12) g = Eigen::Vector4d(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    g.normalize();
    d.pose = Pose(Quat(g[0], g[1], g[2], g[3]), t);
    d.scale = rng.uniform(cfg.min_scale, cfg.max_scale);
    d.friction = cfg.per_object_friction ? rng.uniform(cfg.min_friction, cfg.max_friction) : scene_friction;
    plan.drops.push_back(std::move(d));
  }
  return plan;
}

SettleReport settle_scene(const ScenePlan& plan, const AssetLibrary& assets, const SceneDistributionConfig& cfg) {
  cfg.validate();
  SettleReport report;
  report.scene.seed = plan.seed;
  const double ground = report.scene.ground_plane_z;
  std::vector<MeshInstance> placed;
  std::unique_ptr<SceneAccel> accel;

  for (std::size_t i = 0; i < plan.drops.size(); ++i) {
    const PlannedDrop& drop = plan.drops[i];
    const ObjectAsset& asset = assets.get(drop.asset_id);
    TriangleMesh at_drop = transformed(*asset.mesh, drop.pose, drop.scale);
    const Aabb box = at_drop.bounds();
    const double dz_floor = ground - box.lo.z();
    double dz = dz_floor;

    if (accel) {
      const OverlapProbe probe(std::move(at_drop));
      auto hits = [&](double shift) {
        return accel->overlap(probe, Pose::translation_only({0, 0, shift}), {}, true).overlap;
      };
      // First downward shift at which the probe's box can reach a placed object's box.
      double dz_start = dz_floor;
      for (std::size_t k = 0; k < placed.size(); ++k) {
        const Aabb& ib = accel->instance_bounds(k);
        const bool xy = box.lo.x() <= ib.hi.x() && ib.lo.x() <= box.hi.x() && box.lo.y() <= ib.hi.y() &&
                        ib.lo.y() <= box.hi.y();
        if (xy) dz_start = std::max(dz_start, ib.hi.z() - box.lo.z() + cfg.settle_step);
      }
      dz_start = std::min(dz_start, 0.0);

      double free_shift = 0.0;
      std::optional<double> blocked;
      if (hits(dz_start)) {
        if (hits(0.0)) {
          report.warnings.push_back("drop " + std::to_string(i) + " (" + drop.asset_id +
                                    "): overlaps at its drop pose, skipped");
          ++report.skipped;
          continue;
        }
        blocked = dz_start;
      } else {
        free_shift = dz_start;
        for (double s = dz_start - cfg.settle_step;; s -= cfg.settle_step) {
          const double shift = std::max(s, dz_floor);
          if (hits(shift)) {
            blocked = shift;
            break;
          }
          free_shift = shift;
          if (shift <= dz_floor) break;
        }
      }
      if (blocked) {
        double lo = *blocked;
        double hi = free_shift;
        while (hi - lo > cfg.contact_resolution) {
          const double mid = 0.5 * (lo + hi);
          (hits(mid) ? lo : hi) = mid;
        }
        dz = hi;
      } else {
        dz = dz_floor;
      }
    }

    SceneObject obj;
    obj.instance_id = static_cast<int>(report.scene.objects.size());
    obj.asset_id = drop.asset_id;
    obj.pose = drop.pose;
    obj.pose.translation.z() += dz;
    obj.scale = drop.scale;
    obj.mass = asset.mass(drop.scale);
    obj.friction = drop.friction;
    report.scene.objects.push_back(obj);
    placed.push_back({asset.mesh, obj.pose, obj.scale, obj.instance_id});
    accel = std::make_unique<SceneAccel>(placed);
  }
  return report;
}

void assign_masses(Scene& scene, const AssetLibrary& assets) {
  for (auto& o : scene.objects) o.mass = assets.get(o.asset_id).mass(o.scale);
}

SceneGeometry::SceneGeometry(Scene scene, const AssetLibrary& assets) : scene_(std::move(scene)) {
  std::set<int> seen;
  for (const auto& o : scene_.objects) {
    if (!seen.insert(o.instance_id).second) {
      throw ValidationError("scene: duplicate instance_id " + std::to_string(o.instance_id));
    }
    const ObjectAsset& asset = assets.get(o.asset_id);
    MeshInstance inst{asset.mesh, o.pose, o.scale, o.instance_id};
    instances_.push_back(inst);
    world_meshes_.push_back(transformed(*asset.mesh, o.pose, o.scale));
    coms_.push_back(o.pose.apply(o.scale * asset.centroid));
    isolated_.push_back(std::make_unique<SceneAccel>(std::span<const MeshInstance>(&instances_.back(), 1)));
  }
  if (!instances_.empty()) accel_ = std::make_unique<SceneAccel>(instances_);
}

std::size_t SceneGeometry::index_of(int instance_id) const {
  for (std::size_t i = 0; i < scene_.objects.size(); ++i) {
    if (scene_.objects[i].instance_id == instance_id) return i;
  }
  throw ValidationError("scene has no instance " + std::to_string(instance_id));
}

std::optional<RayHit> SceneGeometry::raycast(const Ray& ray) const {
  if (!accel_) return std::nullopt;
  return accel_->raycast(ray);
}

bool SupportGraph::has_edge(int upper, int lower) const {
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(upper, lower));
}

std::vector<int> SupportGraph::load_on(int id) const {
  std::set<int> visited;
  std::deque<int> queue{id};
  while (!queue.empty()) {
    const int lower = queue.front();
    queue.pop_front();
    for (const auto& [a, b] : edges) {
      if (b == lower && a != id && visited.insert(a).second) queue.push_back(a);
    }
  }
  return {visited.begin(), visited.end()};
}

namespace {

// Nearest hit along the ray on any instance other than `self`.
std::optional<RayHit> first_hit_excluding(const SceneAccel& accel, const Ray& ray, int self) {
  std::optional<RayHit> best;
  accel.for_each_hit(ray, [&](const RayHit& h) {
    if (h.instance_id == self) return;
    if (!best || hit_precedes(h, *best)) best = h;
  });
  return best;
}

}  // namespace

SupportGraph support_graph(const SceneGeometry& geometry, const SupportParams& params) {
  SupportGraph g;
  const Scene& scene = geometry.scene();
  for (const auto& o : scene.objects) g.ids.push_back(o.instance_id);
  if (!geometry.accel()) return g;
  std::set<std::pair<int, int>> edges;
  for (const auto& o : scene.objects) {
    auto pts = sample_surface(geometry.world_mesh(o.instance_id), params.samples,
                              derive_seed(scene.seed, 0x50770 + static_cast<std::uint64_t>(o.instance_id)));
    std::sort(pts.begin(), pts.end(), [](const PointNormal& a, const PointNormal& b) {
      return a.point.z() < b.point.z();
    });
    const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(params.lowest_fraction * pts.size()));
    for (std::size_t k = 0; k < n; ++k) {
      const Ray ray{pts[k].point, -Vec3::UnitZ(), params.reach};
      if (auto hit = first_hit_excluding(*geometry.accel(), ray, o.instance_id)) {
        edges.insert({o.instance_id, hit->instance_id});
      }
    }
  }
  g.edges.assign(edges.begin(), edges.end());
  return g;
}

bool is_supported(const SceneGeometry& geometry, int instance_id, double reach) {
  const TriangleMesh& mesh = geometry.world_mesh(instance_id);
  const double ground = geometry.scene().ground_plane_z;
  Vec3 lowest = mesh.vertices[mesh.triangles.front()[0]];
  for (const auto& t : mesh.triangles) {
    for (int k : t) {
      if (mesh.vertices[k].z() < lowest.z()) lowest = mesh.vertices[k];
    }
  }
  if (lowest.z() - ground <= reach) return true;
  const SceneAccel* accel = geometry.accel();
  if (!accel) return false;
  if (first_hit_excluding(*accel, Ray{lowest, -Vec3::UnitZ(), reach}, instance_id)) return true;
  // Resting on an edge or face away from the lowest vertex: probe a small drop.
  return accel->overlap(OverlapProbe(mesh), Pose::translation_only({0, 0, -reach}), {instance_id}, true).overlap;
}

namespace {

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError("scene: missing key '" + path + key + "'");
  return j.at(key);
}

double require_number(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number()) throw ValidationError("scene: '" + path + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> require_array(const json& j, const std::string& key, std::size_t n, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_array() || v.size() != n) {
    throw ValidationError("scene: '" + path + key + "' must be an array of " + std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ValidationError("scene: '" + path + key + "' must contain numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

std::string scene_to_json(const Scene& scene) {
  json j;
  j["seed"] = scene.seed;
  j["ground_plane_z"] = scene.ground_plane_z;
  if (!scene.asset_manifest.empty()) j["asset_manifest"] = scene.asset_manifest;
  json objs = json::array();
  for (const auto& o : scene.objects) {
    const Quat& q = o.pose.rotation;
    const Vec3& t = o.pose.translation;
    objs.push_back({{"instance_id", o.instance_id},
                    {"asset_id", o.asset_id},
                    {"pose", {{"q", {q.w(), q.x(), q.y(), q.z()}}, {"t", {t.x(), t.y(), t.z()}}}},
                    {"scale", o.scale},
                    {"mass", o.mass},
                    {"friction", o.friction}});
  }
  j["objects"] = objs;
  return j.dump(2);
}

Scene scene_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scene: invalid JSON: ") + e.what());
  }
  Scene s;
  const json& seed = require(j, "seed", "");
  if (!seed.is_number_integer()) throw ValidationError("scene: 'seed' must be an integer");
  s.seed = seed.get<std::uint64_t>();
  if (j.contains("ground_plane_z")) s.ground_plane_z = require_number(j, "ground_plane_z", "");
  if (j.contains("asset_manifest")) s.asset_manifest = j["asset_manifest"].get<std::string>();
  const json& objs = require(j, "objects", "");
  if (!objs.is_array()) throw ValidationError("scene: 'objects' must be an array");
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const std::string path = "objects[" + std::to_string(i) + "].";
    const json& o = objs[i];
    SceneObject obj;
    const json& id = require(o, "instance_id", path);
    if (!id.is_number_integer()) throw ValidationError("scene: '" + path + "instance_id' must be an integer");
    obj.instance_id = id.get<int>();
    const json& asset = require(o, "asset_id", path);
    if (!asset.is_string()) throw ValidationError("scene: '" + path + "asset_id' must be a string");
    obj.asset_id = asset.get<std::string>();
    const json& pose = require(o, "pose", path);
    const auto q = require_array(pose, "q", 4, path + "pose.");
    const auto t = require_array(pose, "t", 3, path + "pose.");
    obj.pose.rotation = Quat(q[0], q[1], q[2], q[3]);
    if (std::abs(obj.pose.rotation.norm() - 1.0) > 1e-9) {
      throw ValidationError("scene: '" + path + "pose.q' is not a unit quaternion");
    }
    obj.pose.translation = Vec3(t[0], t[1], t[2]);
    obj.scale = require_number(o, "scale", path);
    if (!(obj.scale > 0.0)) throw ValidationError("scene: '" + path + "scale' must be positive");
    obj.mass = require_number(o, "mass", path);
    obj.friction = require_number(o, "friction", path);
    if (obj.friction < 0.0 || obj.friction > 1.0) {
      throw ValidationError("scene: '" + path + "friction' must lie in [0, 1]");
    }
    s.objects.push_back(std::move(obj));
  }
  return s;
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write scene file " + path.string());
  out << scene_to_json(scene) << '\n';
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scene file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return scene_from_json(ss.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

AssetLibrary assets_for_scene(const Scene& scene, const std::filesystem::path& scene_path) {
  AssetLibrary lib;
  if (!scene.asset_manifest.empty()) {
    std::filesystem::path manifest = scene.asset_manifest;
    if (manifest.is_relative()) manifest = scene_path.parent_path() / manifest;
    lib.load_manifest(manifest);
  }
  return lib;
}

}  // namespace cluttergrasp
