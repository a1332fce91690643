#include "cluttergrasp/pipeline/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cluttergrasp {

using json = nlohmann::ordered_json;

std::string to_string(Modality m) { return m == Modality::Jaw ? "jaw" : "suction"; }

Modality modality_from_string(const std::string& s) {
  if (s == "jaw") return Modality::Jaw;
  if (s == "suction") return Modality::Suction;
  throw ValidationError("unknown modality '" + s + "' (expected jaw or suction)");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Default: return "default";
    case Variant::Dexnet8Seal: return "dexnet8_seal";
    case Variant::SingleObjectDynamics: return "single_object_dynamics";
    case Variant::SimplifiedGripper: return "simplified_gripper";
  }
  return "default";
}

Variant variant_from_string(const std::string& s) {
  for (Variant v : all_variants()) {
    if (to_string(v) == s) return v;
  }
  throw ValidationError("unknown variant '" + s +
                        "' (expected default, dexnet8_seal, single_object_dynamics or simplified_gripper)");
}

std::vector<Variant> all_variants() {
  return {Variant::Default, Variant::Dexnet8Seal, Variant::SingleObjectDynamics, Variant::SimplifiedGripper};
}

void SamplingConfig::validate() const {
  if (frames.surface_samples == 0) throw ValidationError("sampling.surface_samples must be positive");
  if (frames.fps_points == 0) throw ValidationError("sampling.fps_points must be positive");
  if (!(frames.neighbourhood_radius > 0.0)) throw ValidationError("sampling.neighbourhood_radius must be positive");
  if (n_roll < 1 || n_standoff < 1) throw ValidationError("sampling.n_roll and sampling.n_standoff must be >= 1");
}

void EvaluationConfig::validate() const {
  if (seal_rings < 1 || seal_vertices_per_ring < 3) throw ValidationError("evaluation.seal: invalid discretization");
  if (!(deformation_limit > 0.0) || !(dexnet_strain_limit > 0.0)) {
    throw ValidationError("evaluation.seal: limits must be positive");
  }
  if (rim_clearance < 0.0) throw ValidationError("evaluation.rim_clearance must be >= 0");
  if (!(dynamics.gravity > 0.0) || !(dynamics.acceleration_factor > 0.0)) {
    throw ValidationError("evaluation.dynamics: gravity and acceleration_factor must be positive");
  }
}

PipelineConfig::PipelineConfig() {
  asset_pool = builtin_asset_ids();
  grippers = {fetch_gripper(), robotiq_2f140_gripper()};
  cups = {suction_cup_15mm(), suction_cup_25mm()};
}

void PipelineConfig::validate() const {
  if (workers < 1) throw ValidationError("workers must be >= 1");
  scene.validate();
  if (asset_pool.empty()) throw ValidationError("scene.assets must not be empty");
  camera.intrinsics.validate();
  camera.viewpoint.validate();
  if (camera.frames < 0) throw ValidationError("camera.frames must be >= 0");
  sampling.validate();
  evaluation.validate();
  gripper(evaluation.gripper);
  cup(evaluation.cup);
  for (const auto& c : cups) {
    if (!(c.radius > 0.0) || !(c.force_limit > 0.0) || !(c.bellows_height > 0.0)) {
      throw ValidationError("cup " + c.name + ": radius, bellows_height and force_limit must be positive");
    }
  }
  if (export_scenes < 1) throw ValidationError("export.scenes must be >= 1");
}

const GripperSpec& PipelineConfig::gripper(const std::string& name) const {
  for (const auto& g : grippers) {
    if (g.name == name) return g;
  }
  throw ValidationError("unknown gripper '" + name + "'");
}

const SuctionCupSpec& PipelineConfig::cup(const std::string& name) const {
  for (const auto& c : cups) {
    if (c.name == name) return c;
  }
  throw ValidationError("unknown suction cup '" + name + "'");
}

namespace {

json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

json gripper_json(const GripperSpec& g) {
  return {{"name", g.name},
          {"finger_depth", g.finger_depth},
          {"max_open_width", g.max_open_width},
          {"finger_thickness", g.finger_thickness},
          {"finger_width", g.finger_width},
          {"palm_size", vec_json(g.palm_size)},
          {"grip_force", g.grip_force}};
}

json cup_json(const SuctionCupSpec& c) {
  return {{"name", c.name},
          {"radius", c.radius},
          {"bellows_height", c.bellows_height},
          {"force_limit", c.force_limit},
          {"bend_limit_deg", c.bend_limit_deg}};
}

json evaluation_section(const EvaluationConfig& e) {
  return {{"variant", to_string(e.variant)},
          {"gripper", e.gripper},
          {"cup", e.cup},
          {"seal",
           {{"rings", e.seal_rings},
            {"vertices_per_ring", e.seal_vertices_per_ring},
            {"deformation_limit", e.deformation_limit},
            {"dexnet_strain_limit", e.dexnet_strain_limit}}},
          {"collision", {{"rim_clearance", e.rim_clearance}}},
          {"dynamics", {{"gravity", e.dynamics.gravity}, {"acceleration_factor", e.dynamics.acceleration_factor}}},
          {"support",
           {{"samples", e.support.samples},
            {"lowest_fraction", e.support.lowest_fraction},
            {"reach", e.support.reach}}}};
}

// Typed access with key-path error messages and unknown-key rejection.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError("config: '" + where() + "' must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) throw ValidationError("config: unknown key '" + path_ + k + "'");
    }
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }
  const json& at(const std::string& key) { return j_.at(key); }
  std::string key_path(const std::string& key) const { return path_ + key; }

  void num(const std::string& key, double& out) {
    if (!has(key)) return;
    if (!at(key).is_number()) throw ValidationError("config: '" + key_path(key) + "' must be a number");
    out = at(key).get<double>();
  }
  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number_integer()) throw ValidationError("config: '" + key_path(key) + "' must be an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.get<std::int64_t>() < 0 && !v.is_number_unsigned()) {
        throw ValidationError("config: '" + key_path(key) + "' must be non-negative");
      }
    }
    out = v.get<Int>();
  }
  void flag(const std::string& key, bool& out) {
    if (!has(key)) return;
    if (!at(key).is_boolean()) throw ValidationError("config: '" + key_path(key) + "' must be a boolean");
    out = at(key).get<bool>();
  }
  void str(const std::string& key, std::string& out) {
    if (!has(key)) return;
    if (!at(key).is_string()) throw ValidationError("config: '" + key_path(key) + "' must be a string");
    out = at(key).get<std::string>();
  }
  void vec(const std::string& key, Vec3& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
      throw ValidationError("config: '" + key_path(key) + "' must be an array of 3 numbers");
    }
    out = Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  }
  void range(const std::string& key, double& lo, double& hi) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ValidationError("config: '" + key_path(key) + "' must be an array [min, max]");
    }
    lo = v[0].get<double>();
    hi = v[1].get<double>();
  }
  Section sub(const std::string& key) { return Section(at(key), path_ + key + "."); }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_.substr(0, path_.size() - 1); }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

GripperSpec read_gripper(Section s, const std::string& path) {
  std::string name;
  s.str("name", name);
  if (name.empty()) throw ValidationError("config: '" + path + ".name' is required");
  GripperSpec base;
  try {
    base = gripper_by_name(name);
  } catch (const ValidationError&) {
  }
  double d = base.finger_depth, w = base.max_open_width, t = base.finger_thickness, fw = base.finger_width,
         f = base.grip_force;
  Vec3 palm = base.palm_size;
  s.num("finger_depth", d);
  s.num("max_open_width", w);
  s.num("finger_thickness", t);
  s.num("finger_width", fw);
  s.vec("palm_size", palm);
  s.num("grip_force", f);
  return make_gripper(name, d, w, t, fw, palm, f);
}

SuctionCupSpec read_cup(Section s, const std::string& path) {
  SuctionCupSpec c;
  s.str("name", c.name);
  if (c.name.empty()) throw ValidationError("config: '" + path + ".name' is required");
  try {
    c = cup_by_name(c.name);
  } catch (const ValidationError&) {
  }
  s.num("radius", c.radius);
  s.num("bellows_height", c.bellows_height);
  s.num("force_limit", c.force_limit);
  s.num("bend_limit_deg", c.bend_limit_deg);
  return c;
}

}  // namespace

std::string evaluation_json(const PipelineConfig& cfg) {
  json j = evaluation_section(cfg.evaluation);
  j["tools"] = {{"gripper", gripper_json(cfg.gripper(cfg.evaluation.gripper))},
                {"cup", cup_json(cfg.cup(cfg.evaluation.cup))}};
  return j.dump();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const PipelineConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(evaluation_json(cfg))));
  return buf;
}

std::string config_to_json(const PipelineConfig& cfg) {
  const auto& sc = cfg.scene;
  const auto& cam = cfg.camera;
  const auto& k = cam.intrinsics;
  const auto& vp = cam.viewpoint;
  const auto& sm = cfg.sampling;
  json j;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["scene"] = {{"min_objects", sc.min_objects},
                {"max_objects", sc.max_objects},
                {"drop_lo", vec_json(sc.drop_lo)},
                {"drop_hi", vec_json(sc.drop_hi)},
                {"scale_range", {sc.min_scale, sc.max_scale}},
                {"friction_range", {sc.min_friction, sc.max_friction}},
                {"per_object_friction", sc.per_object_friction},
                {"settle_step", sc.settle_step},
                {"contact_resolution", sc.contact_resolution},
                {"default_density", kDefaultDensity},
                {"assets", cfg.asset_pool}};
  j["difficulty"] = {{"max_l1_triangles", cfg.difficulty.max_l1_triangles},
                     {"max_l1_hull_ratio", cfg.difficulty.max_l1_hull_ratio},
                     {"min_l3_hull_ratio", cfg.difficulty.min_l3_hull_ratio}};
  j["camera"] = {{"intrinsics",
                  {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}}},
                 {"viewpoint",
                  {{"rho_range", {vp.rho_min, vp.rho_max}},
                   {"phi_range", {vp.phi_min, vp.phi_max}},
                   {"theta_range", {vp.theta_min, vp.theta_max}},
                   {"look_at", vec_json(vp.look_at)}}},
                 {"frames", cam.frames},
                 {"depth_noise_mm", cam.depth_noise_mm}};
  j["sampling"] = {{"surface_samples", sm.frames.surface_samples},
                   {"fps_points", sm.frames.fps_points},
                   {"neighbourhood_radius", sm.frames.neighbourhood_radius},
                   {"n_roll", sm.n_roll},
                   {"n_standoff", sm.n_standoff},
                   {"approach_cone_half_angle", sm.approach_cone_half_angle},
                   {"approach_tilt", sm.approach_tilt}};
  j["evaluation"] = evaluation_section(cfg.evaluation);
  json grippers = json::array();
  for (const auto& g : cfg.grippers) grippers.push_back(gripper_json(g));
  json cups = json::array();
  for (const auto& c : cfg.cups) cups.push_back(cup_json(c));
  j["grippers"] = grippers;
  j["cups"] = cups;
  j["export"] = {{"scenes", cfg.export_scenes}};
  return j.dump(2);
}

PipelineConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  PipelineConfig cfg;
  {
    Section root(j, "");
    root.integer("seed", cfg.seed);
    root.integer("workers", cfg.workers);
    if (root.has("scene")) {
      Section s = root.sub("scene");
      auto& sc = cfg.scene;
      s.integer("min_objects", sc.min_objects);
      s.integer("max_objects", sc.max_objects);
      s.vec("drop_lo", sc.drop_lo);
      s.vec("drop_hi", sc.drop_hi);
      s.range("scale_range", sc.min_scale, sc.max_scale);
      s.range("friction_range", sc.min_friction, sc.max_friction);
      s.flag("per_object_friction", sc.per_object_friction);
      s.num("settle_step", sc.settle_step);
      s.num("contact_resolution", sc.contact_resolution);
      double density = kDefaultDensity;
      s.num("default_density", density);
      if (density != kDefaultDensity) throw ValidationError("config: 'scene.default_density' is fixed at 500");
      if (s.has("assets")) {
        const json& a = s.at("assets");
        if (!a.is_array()) throw ValidationError("config: 'scene.assets' must be an array of strings");
        cfg.asset_pool.clear();
        for (const auto& e : a) {
          if (!e.is_string()) throw ValidationError("config: 'scene.assets' must be an array of strings");
          cfg.asset_pool.push_back(e.get<std::string>());
        }
      }
    }
    if (root.has("difficulty")) {
      Section s = root.sub("difficulty");
      s.integer("max_l1_triangles", cfg.difficulty.max_l1_triangles);
      s.num("max_l1_hull_ratio", cfg.difficulty.max_l1_hull_ratio);
      s.num("min_l3_hull_ratio", cfg.difficulty.min_l3_hull_ratio);
    }
    if (root.has("camera")) {
      Section s = root.sub("camera");
      if (s.has("intrinsics")) {
        Section k = s.sub("intrinsics");
        auto& in = cfg.camera.intrinsics;
        k.num("fx", in.fx);
        k.num("fy", in.fy);
        k.num("cx", in.cx);
        k.num("cy", in.cy);
        k.integer("width", in.width);
        k.integer("height", in.height);
      }
      if (s.has("viewpoint")) {
        Section v = s.sub("viewpoint");
        auto& vp = cfg.camera.viewpoint;
        v.range("rho_range", vp.rho_min, vp.rho_max);
        v.range("phi_range", vp.phi_min, vp.phi_max);
        v.range("theta_range", vp.theta_min, vp.theta_max);
        v.vec("look_at", vp.look_at);
      }
      s.integer("frames", cfg.camera.frames);
      s.num("depth_noise_mm", cfg.camera.depth_noise_mm);
    }
    if (root.has("sampling")) {
      Section s = root.sub("sampling");
      auto& sm = cfg.sampling;
      s.integer("surface_samples", sm.frames.surface_samples);
      s.integer("fps_points", sm.frames.fps_points);
      s.num("neighbourhood_radius", sm.frames.neighbourhood_radius);
      s.integer("n_roll", sm.n_roll);
      s.integer("n_standoff", sm.n_standoff);
      s.num("approach_cone_half_angle", sm.approach_cone_half_angle);
      s.num("approach_tilt", sm.approach_tilt);
    }
    if (root.has("evaluation")) {
      Section s = root.sub("evaluation");
      auto& ev = cfg.evaluation;
      std::string variant = to_string(ev.variant);
      s.str("variant", variant);
      ev.variant = variant_from_string(variant);
      s.str("gripper", ev.gripper);
      s.str("cup", ev.cup);
      if (s.has("seal")) {
        Section t = s.sub("seal");
        t.integer("rings", ev.seal_rings);
        t.integer("vertices_per_ring", ev.seal_vertices_per_ring);
        t.num("deformation_limit", ev.deformation_limit);
        t.num("dexnet_strain_limit", ev.dexnet_strain_limit);
      }
      if (s.has("collision")) {
        Section t = s.sub("collision");
        t.num("rim_clearance", ev.rim_clearance);
      }
      if (s.has("dynamics")) {
        Section t = s.sub("dynamics");
        t.num("gravity", ev.dynamics.gravity);
        t.num("acceleration_factor", ev.dynamics.acceleration_factor);
      }
      if (s.has("support")) {
        Section t = s.sub("support");
        t.integer("samples", ev.support.samples);
        t.num("lowest_fraction", ev.support.lowest_fraction);
        t.num("reach", ev.support.reach);
      }
    }
    if (root.has("grippers")) {
      const json& a = root.at("grippers");
      if (!a.is_array()) throw ValidationError("config: 'grippers' must be an array");
      cfg.grippers.clear();
      for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string path = "grippers[" + std::to_string(i) + "]";
        cfg.grippers.push_back(read_gripper(Section(a[i], path + "."), path));
      }
    }
    if (root.has("cups")) {
      const json& a = root.at("cups");
      if (!a.is_array()) throw ValidationError("config: 'cups' must be an array");
      cfg.cups.clear();
      for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string path = "cups[" + std::to_string(i) + "]";
        cfg.cups.push_back(read_cup(Section(a[i], path + "."), path));
      }
    }
    if (root.has("export")) {
      Section s = root.sub("export");
      s.integer("scenes", cfg.export_scenes);
    }
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return config_from_json(ss.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace cluttergrasp
