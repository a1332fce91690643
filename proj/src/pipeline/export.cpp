#include "cluttergrasp/pipeline/export.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>

#include <json.hpp>

#include "cluttergrasp/random.hpp"

namespace cluttergrasp {

using json = nlohmann::ordered_json;

std::vector<ExportScene> build_dataset(const PipelineConfig& cfg) {
  cfg.validate();
  const AssetLibrary assets = AssetLibrary::builtin();
  std::vector<ExportScene> out;
  for (int i = 0; i < cfg.export_scenes; ++i) {
    ExportScene e;
    e.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
    char id[32];
    std::snprintf(id, sizeof id, "scene_%04d", i);
    e.scene_id = id;
    e.scene = settle_scene(sample_scene_plan(cfg.scene, cfg.asset_pool, e.seed), assets, cfg.scene).scene;
    const SceneGeometry geometry(e.scene, assets);
    RenderOptions ro;
    ro.depth_noise_mm = cfg.camera.depth_noise_mm;
    ro.workers = cfg.workers;
    for (int f = 0; f < cfg.camera.frames; ++f) {
      const std::uint64_t fs = derive_seed(e.seed, 1000 + static_cast<std::uint64_t>(f));
      ro.noise_seed = fs;
      e.frame_seeds.push_back(fs);
      e.frames.push_back(render_depth(geometry, sample_viewpoint(cfg.camera.viewpoint, fs), cfg.camera.intrinsics, ro));
    }
    if (geometry.accel()) {
      PipelineConfig sc = cfg;
      sc.seed = e.seed;
      for (Modality m : {Modality::Jaw, Modality::Suction}) {
        auto recs = run_label_pipeline(geometry, m, sc, e.scene_id);
        e.records.insert(e.records.end(), recs.begin(), recs.end());
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string export_dataset(const std::vector<ExportScene>& scenes, const PipelineConfig& cfg,
                           const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  std::set<std::string> ids;
  for (const auto& s : scenes) {
    if (!ids.insert(s.scene_id).second) throw ValidationError("export: duplicate scene id " + s.scene_id);
    if (s.frames.size() != s.frame_seeds.size()) throw ValidationError("export: frame/seed count mismatch");
    for (const auto& r : s.records) {
      if (r.scene_id != s.scene_id) {
        throw ValidationError("export: record for scene '" + r.scene_id + "' filed under '" + s.scene_id + "'");
      }
    }
  }
  std::error_code ec;
  for (const char* sub : {"scenes", "frames", "labels"}) fs::create_directories(out / sub, ec);
  if (ec) throw ValidationError("cannot create export directory " + out.string());

  std::size_t n_frames = 0, n_records = 0;
  std::set<std::string> assets;
  json scene_entries = json::array();
  for (const auto& s : scenes) {
    save_scene(s.scene, out / "scenes" / (s.scene_id + ".json"));
    for (const auto& o : s.scene.objects) assets.insert(o.asset_id);
    json frames = json::array();
    for (std::size_t f = 0; f < s.frames.size(); ++f) {
      char stem[64];
      std::snprintf(stem, sizeof stem, "%s_view_%03zu", s.scene_id.c_str(), f);
      write_depth_png(s.frames[f], out / "frames" / (std::string(stem) + "_depth.png"));
      write_instance_png(s.frames[f], out / "frames" / (std::string(stem) + "_ids.png"));
      write_text(out / "frames" / (std::string(stem) + ".json"), frame_metadata_json(s.frames[f]) + "\n");
      frames.push_back({{"file", std::string(stem)}, {"seed", s.frame_seeds[f]}});
    }
    save_records(s.records, out / "labels" / (s.scene_id + ".ndjson"));
    n_frames += s.frames.size();
    n_records += s.records.size();
    scene_entries.push_back({{"scene_id", s.scene_id},
                             {"seed", s.seed},
                             {"frames", frames},
                             {"records", s.records.size()}});
  }

  json m;
  m["tool_version"] = kToolVersion;
  m["created_at"] = utc_now();
  m["config_hash"] = config_hash(cfg);
  m["config"] = json::parse(config_to_json(cfg));
  m["base_seed"] = cfg.seed;
  m["scenes"] = scene_entries;
  m["assets"] = std::vector<std::string>(assets.begin(), assets.end());
  m["counts"] = {{"scenes", scenes.size()}, {"frames", n_frames}, {"records", n_records}};
  m["fidelity_gaps"] = {
      "scene settling is a frozen-orientation vertical drop, not rigid-body simulation",
      "dynamics labels come from a quasi-static force, bend and friction-cone proxy, not an arm simulation",
      "depth is rendered by ray casting without RGB, lighting or sensor noise (unless depth_noise_mm > 0)",
      "gripper geometry is a palm-and-finger box approximation of the published dimensions",
  };
  const std::string text = m.dump(2);
  write_text(out / "manifest.json", text + "\n");
  return text;
}

}  // namespace cluttergrasp
