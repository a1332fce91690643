#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "cluttergrasp/pipeline/corner_corpus.hpp"
#include "cluttergrasp/pipeline/export.hpp"
#include "cluttergrasp/random.hpp"

using namespace cluttergrasp;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;

  PipelineConfig load() const {
    PipelineConfig cfg = config.empty() ? PipelineConfig() : load_config(config);
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    cfg.validate();
    return cfg;
  }
};

void add_common(CLI::App* cmd, Common& c, bool with_seed = true) {
  cmd->add_option("--config", c.config, "JSON config file (defaults apply to missing keys)");
  if (with_seed) cmd->add_option("--seed", c.seed, "Base seed (overrides the config)");
  cmd->add_option("--workers", c.workers, "Worker threads (overrides the config)");
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

// Writes to `out` when given, otherwise to stdout.
void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
}

struct PlyPoint {
  Vec3 p;
  int r, g, b;
};

void write_ply(const fs::path& path, const std::vector<PlyPoint>& pts) {
  std::ostringstream s;
  s << "ply\nformat ascii 1.0\nelement vertex " << pts.size()
    << "\nproperty float x\nproperty float y\nproperty float z\n"
       "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  for (const auto& q : pts) {
    s << q.p.x() << ' ' << q.p.y() << ' ' << q.p.z() << ' ' << q.r << ' ' << q.g << ' ' << q.b << '\n';
  }
  write_file(path, s.str());
}

// Distinct, stable colour per instance id.
PlyPoint coloured(const Vec3& p, int id) {
  const std::uint64_t h = derive_seed(0x5eed, static_cast<std::uint64_t>(id));
  return {p, 64 + static_cast<int>(h & 0xbf), 64 + static_cast<int>((h >> 8) & 0xbf),
          64 + static_cast<int>((h >> 16) & 0xbf)};
}

SceneGeometry open_scene(const fs::path& path) {
  Scene scene = load_scene(path);
  AssetLibrary assets = assets_for_scene(scene, path);
  return SceneGeometry(std::move(scene), assets);
}

int cmd_gen_scene(const Common& c, const std::string& out) {
  const PipelineConfig cfg = c.load();
  const AssetLibrary assets = AssetLibrary::builtin();
  const auto settled = settle_scene(sample_scene_plan(cfg.scene, cfg.asset_pool, cfg.seed), assets, cfg.scene);
  const fs::path path = fs::path(out).extension() == ".json" ? fs::path(out) : fs::path(out) / "scene.json";
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_scene(settled.scene, path);
  std::cout << path.string() << '\n';
  return 0;
}

int cmd_render(const Common& c, const std::string& scene_path, std::optional<int> frames, const std::string& out,
               bool dump_ply) {
  const PipelineConfig cfg = c.load();
  const SceneGeometry geometry = open_scene(scene_path);
  const int n = frames.value_or(cfg.camera.frames);
  if (n < 1) throw ValidationError("--frames must be >= 1");
  const fs::path dir = out.empty() ? fs::path(scene_path).parent_path() / "frames" : fs::path(out);
  fs::create_directories(dir);
  const std::string stem = fs::path(scene_path).stem().string();
  RenderOptions ro;
  ro.depth_noise_mm = cfg.camera.depth_noise_mm;
  ro.workers = cfg.workers;
  for (int f = 0; f < n; ++f) {
    const std::uint64_t seed = derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(f));
    ro.noise_seed = seed;
    const auto frame = render_depth(geometry, sample_viewpoint(cfg.camera.viewpoint, seed), cfg.camera.intrinsics, ro);
    char name[256];
    std::snprintf(name, sizeof name, "%s_view_%03d", stem.c_str(), f);
    write_depth_png(frame, dir / (std::string(name) + "_depth.png"));
    write_instance_png(frame, dir / (std::string(name) + "_ids.png"));
    auto meta = nlohmann::ordered_json::parse(frame_metadata_json(frame));
    meta["seed"] = seed;
    write_file(dir / (std::string(name) + ".json"), meta.dump(2) + "\n");
    if (dump_ply) {
      std::vector<PlyPoint> pts;
      for (const auto& [id, cloud] : depth_to_pointcloud(frame)) {
        for (const auto& pn : cloud) pts.push_back(coloured(pn.point, id));
      }
      write_ply(dir / (std::string(name) + ".ply"), pts);
    }
    std::cout << (dir / name).string() << '\n';
  }
  return 0;
}

int cmd_sample(const Common& c, const std::string& scene_path, const std::string& modality_name,
               std::string tool, const std::string& out) {
  const PipelineConfig cfg = c.load();
  const Modality modality = modality_from_string(modality_name);
  if (tool.empty()) tool = modality == Modality::Jaw ? cfg.evaluation.gripper : cfg.evaluation.cup;
  if (modality == Modality::Jaw) {
    cfg.gripper(tool);
  } else {
    cfg.cup(tool);
  }
  const SceneGeometry geometry = open_scene(scene_path);
  const auto candidates = sample_candidates(geometry, modality, tool, cfg, cfg.seed);
  // Scene paths are stored relative to the candidate file so the pair can be moved together.
  std::string ref;
  if (out.empty()) {
    ref = fs::absolute(scene_path).lexically_normal().string();
  } else {
    const fs::path base = fs::absolute(out).parent_path();
    ref = fs::absolute(scene_path).lexically_normal().lexically_relative(base).string();
  }
  emit(out, candidates_to_ndjson(candidates, ref));
  if (!out.empty()) std::cerr << candidates.size() << " candidates -> " << out << '\n';
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& candidates_path, const std::string& variant,
                 const std::string& out, const std::string& dump_ply) {
  PipelineConfig cfg = c.load();
  if (!variant.empty()) cfg.evaluation.variant = variant_from_string(variant);
  const CandidateFile file = load_candidates(candidates_path);
  // Candidates are grouped per scene (first-appearance order); output follows file order.
  std::vector<fs::path> order;
  std::map<fs::path, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < file.candidates.size(); ++i) {
    auto [it, fresh] = groups.try_emplace(file.scene_paths[i]);
    if (fresh) order.push_back(file.scene_paths[i]);
    it->second.push_back(i);
  }
  std::vector<LabelRecord> records(file.candidates.size());
  std::vector<PlyPoint> seal_points;
  for (const auto& scene_path : order) {
    const SceneGeometry geometry = open_scene(scene_path);
    const auto& idx = groups[scene_path];
    std::vector<Candidate> subset;
    for (std::size_t i : idx) subset.push_back(file.candidates[i]);
    auto recs = evaluate_candidates(geometry, subset, cfg, scene_path.stem().string(), cfg.workers);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      recs[k].candidate_index = idx[k];
      records[idx[k]] = std::move(recs[k]);
    }
    if (!dump_ply.empty()) {
      for (const auto& cand : subset) {
        const auto* s = std::get_if<SuctionCandidate>(&cand);
        if (!s) continue;
        const auto e = evaluate_seal(geometry, *s, build_seal_model(cfg.cup(s->cup)));
        for (std::size_t v = 0; v < e.hit.size(); ++v) {
          if (!e.hit[v]) continue;
          const bool ok = e.hit_instance[v] == s->target_instance;
          seal_points.push_back({e.hit_points[v], ok ? 40 : 230, ok ? 200 : 40, 40});
        }
      }
    }
  }
  emit(out, records_to_ndjson(records));
  if (!dump_ply.empty()) write_ply(dump_ply, seal_points);
  return 0;
}

std::vector<Variant> parse_variants(const std::vector<std::string>& names) {
  std::vector<Variant> out;
  for (const auto& list : names) {
    std::stringstream s(list);
    std::string item;
    while (std::getline(s, item, ',')) {
      if (!item.empty()) out.push_back(variant_from_string(item));
    }
  }
  if (out.empty()) throw ValidationError("--variants is empty");
  return out;
}

int cmd_ablate(const Common& c, const std::string& corpus_dir, const std::vector<std::string>& variant_names,
               const std::string& modality, const std::string& out) {
  const PipelineConfig cfg = c.load();
  const auto variants = parse_variants(variant_names);
  const auto table = run_ablation(load_corpus(corpus_dir), variants, modality_from_string(modality), cfg);
  std::cout << ablation_to_text(table);
  if (!out.empty()) write_file(out, ablation_to_json(table) + "\n");
  return 0;
}

int cmd_export(const Common& c, const std::string& out) {
  const PipelineConfig cfg = c.load();
  const auto manifest = nlohmann::json::parse(export_dataset(build_dataset(cfg), cfg, out));
  std::cout << manifest["counts"].dump() << '\n';
  return 0;
}

int cmd_stats(const std::string& labels) {
  const auto records = load_records(labels);
  std::cout << report_to_json(compute_pass_rates(records)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluttered-scene grasp labeling engine"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  std::function<int()> action;

  Common gen_c;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-scene", "Sample and settle one scene");
  add_common(gen, gen_c);
  gen->add_option("--out", gen_out, "Output directory (or .json file)")->required();
  gen->callback([&] { action = [&] { return cmd_gen_scene(gen_c, gen_out); }; });

  Common ren_c;
  std::string ren_scene, ren_out;
  std::optional<int> ren_frames;
  bool ren_ply = false;
  auto* ren = app.add_subcommand("render", "Render depth and instance maps of a scene");
  add_common(ren, ren_c);
  ren->add_option("--scene", ren_scene, "Scene JSON")->required();
  ren->add_option("--frames", ren_frames, "Number of viewpoints");
  ren->add_option("--out", ren_out, "Output directory (default: <scene dir>/frames)");
  ren->add_flag("--dump-ply", ren_ply, "Also write each frame's point cloud as PLY");
  ren->callback([&] { action = [&] { return cmd_render(ren_c, ren_scene, ren_frames, ren_out, ren_ply); }; });

  Common smp_c;
  std::string smp_scene, smp_modality, smp_tool, smp_out;
  auto* smp = app.add_subcommand("sample", "Sample grasp candidates on every object of a scene");
  add_common(smp, smp_c);
  smp->add_option("--scene", smp_scene, "Scene JSON")->required();
  smp->add_option("--modality", smp_modality, "jaw or suction")->required()->check(CLI::IsMember({"jaw", "suction"}));
  smp->add_option("--gripper", smp_tool, "Gripper name (jaw) or cup name (suction)");
  smp->add_option("--out", smp_out, "Candidate NDJSON (default: stdout)");
  smp->callback([&] { action = [&] { return cmd_sample(smp_c, smp_scene, smp_modality, smp_tool, smp_out); }; });

  Common ev_c;
  std::string ev_cands, ev_variant, ev_out, ev_ply;
  auto* ev = app.add_subcommand("evaluate", "Label candidates through collision, seal and dynamics");
  add_common(ev, ev_c, false);
  ev->add_option("--candidates", ev_cands, "Candidate NDJSON")->required();
  ev->add_option("--variant", ev_variant, "default, dexnet8_seal, single_object_dynamics or simplified_gripper");
  ev->add_option("--out", ev_out, "Label NDJSON (default: stdout)");
  ev->add_option("--dump-ply", ev_ply, "Write seal-vertex hit points of suction candidates to this PLY file");
  ev->callback([&] { action = [&] { return cmd_evaluate(ev_c, ev_cands, ev_variant, ev_out, ev_ply); }; });

  Common ab_c;
  std::string ab_corpus, ab_modality = "suction", ab_out;
  std::vector<std::string> ab_variants;
  auto* ab = app.add_subcommand("ablate", "Compare variants over a scene corpus");
  add_common(ab, ab_c);
  ab->add_option("--corpus", ab_corpus, "Corpus directory")->required();
  ab->add_option("--variants", ab_variants, "Comma-separated variant list")->required();
  ab->add_option("--modality", ab_modality, "jaw or suction")->check(CLI::IsMember({"jaw", "suction"}));
  ab->add_option("--out", ab_out, "Also write the table as JSON");
  ab->callback([&] { action = [&] { return cmd_ablate(ab_c, ab_corpus, ab_variants, ab_modality, ab_out); }; });

  std::string cc_out;
  auto* cc = app.add_subcommand("corner-corpus", "Write the six suction corner-case fixtures");
  cc->add_option("--out", cc_out, "Output directory")->required();
  cc->callback([&] {
    action = [&] {
      gen_corner_corpus(cc_out);
      std::cout << cc_out << '\n';
      return 0;
    };
  });

  Common ex_c;
  std::string ex_out;
  auto* ex = app.add_subcommand("export", "Generate, render, label and export a dataset");
  add_common(ex, ex_c);
  ex->add_option("--out", ex_out, "Output directory")->required();
  ex->callback([&] { action = [&] { return cmd_export(ex_c, ex_out); }; });

  std::string st_labels;
  auto* st = app.add_subcommand("stats", "Stage pass rates of a label file");
  st->add_option("--labels", st_labels, "Label NDJSON")->required();
  st->callback([&] { action = [&] { return cmd_stats(st_labels); }; });

  std::string dc_out;
  auto* dc = app.add_subcommand("default-config", "Print the full default configuration");
  dc->add_option("--out", dc_out, "Write to this file instead of stdout");
  dc->callback([&] {
    action = [&] {
      emit(dc_out, config_to_json(PipelineConfig()) + "\n");
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    return action();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
