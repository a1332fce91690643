#include "cluttergrasp/pipeline/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cluttergrasp/geometry/sampling.hpp"
#include "cluttergrasp/random.hpp"

namespace cluttergrasp {

std::vector<Candidate> sample_candidates(const SceneGeometry& scene, Modality modality, const std::string& tool,
                                         const PipelineConfig& cfg, std::uint64_t seed) {
  std::vector<Candidate> out;
  for (const auto& obj : scene.scene().objects) {
    const auto frames =
        sample_frames(scene.world_mesh(obj.instance_id), cfg.sampling.frames, derive_seed(seed, obj.instance_id));
    for (const auto& f : frames) {
      if (modality == Modality::Jaw) {
        for (auto& c : gen_parallel_grasps(f, cfg.gripper(tool), cfg.sampling.n_roll, cfg.sampling.n_standoff,
                                           obj.instance_id)) {
          out.emplace_back(std::move(c));
        }
      } else {
        out.emplace_back(gen_suction_grasp(f, cfg.cup(tool), obj.instance_id));
      }
    }
  }
  return out;
}

bool variant_applies(Variant variant, Modality modality) {
  if (variant == Variant::Dexnet8Seal) return modality == Modality::Suction;
  if (variant == Variant::SimplifiedGripper) return modality == Modality::Jaw;
  return true;
}

CandidateEvaluator::CandidateEvaluator(const SceneGeometry& scene, const PipelineConfig& cfg, std::string scene_id)
    : scene_(scene), cfg_(cfg), scene_id_(std::move(scene_id)), hash_(config_hash(cfg)) {
  if (scene.accel()) support_ = support_graph(scene, cfg.evaluation.support);
  seal_model_ = build_seal_model(cfg.cup(cfg.evaluation.cup), cfg.evaluation.seal_rings,
                                 cfg.evaluation.seal_vertices_per_ring);
  seal_model_.deformation_limit = cfg.evaluation.deformation_limit;
}

LabelRecord CandidateEvaluator::evaluate(const Candidate& cand, std::size_t index) const {
  LabelRecord r;
  r.scene_id = scene_id_;
  r.candidate_index = index;
  r.variant = to_string(cfg_.evaluation.variant);
  r.config_hash = hash_;
  if (const auto* g = std::get_if<GraspCandidate>(&cand)) {
    r.modality = Modality::Jaw;
    r.tool = g->gripper;
    r.target_instance = g->target_instance;
    r.pose = g->pose;
    r.standoff = g->standoff;
    r.roll = g->roll;
    return evaluate_jaw(*g, std::move(r));
  }
  const auto& s = std::get<SuctionCandidate>(cand);
  r.modality = Modality::Suction;
  r.tool = s.cup;
  r.target_instance = s.target_instance;
  r.pose = s.pose;
  return evaluate_suction(s, std::move(r));
}

namespace {

std::string collision_reason(const CollisionReport& c) {
  if (!c.contacting_instances.empty()) return "gripper_contact";
  if (c.ground_contact) return "ground_contact";
  if (!c.close_region_occupied_by.empty()) return "close_region_occupied";
  if (!c.close_region_has_target) return "close_region_empty";
  return "none";
}

}  // namespace

LabelRecord CandidateEvaluator::evaluate_jaw(const GraspCandidate& c, LabelRecord r) const {
  const Variant v = cfg_.evaluation.variant;
  if (!variant_applies(v, Modality::Jaw)) {
    throw ValidationError("variant " + to_string(v) + " does not apply to jaw candidates");
  }
  scene_.index_of(c.target_instance);
  const GripperSpec& gripper = cfg_.gripper(c.gripper);
  const auto col = check_grasp_collision(
      scene_, c, gripper, v == Variant::SimplifiedGripper ? GripperGeometry::Primitives : GripperGeometry::Mesh);
  r.q_collision = col.q_collision;
  if (!col.q_collision) {
    r.failure_reason = collision_reason(col);
    return r;
  }
  const auto dyn =
      grasp_quasistatic(scene_, c, gripper, support_, v != Variant::SingleObjectDynamics, cfg_.evaluation.dynamics);
  r.q_dynamics = dyn.q_dynamics;
  if (dyn.payload_mass > 0.0) r.payload_mass = dyn.payload_mass;
  r.final_label = dyn.q_dynamics;
  r.failure_reason = to_string(dyn.failure);
  return r;
}

LabelRecord CandidateEvaluator::evaluate_suction(const SuctionCandidate& c, LabelRecord r) const {
  const Variant v = cfg_.evaluation.variant;
  if (!variant_applies(v, Modality::Suction)) {
    throw ValidationError("variant " + to_string(v) + " does not apply to suction candidates");
  }
  scene_.index_of(c.target_instance);
  const SuctionCupSpec& cup = cfg_.cup(c.cup);
  const auto col = check_suction_collision(scene_, c, cup, cfg_.evaluation.rim_clearance);
  r.q_collision = col.q_collision;
  if (!col.q_collision) {
    r.failure_reason = collision_reason(col);
    return r;
  }
  if (v == Variant::Dexnet8Seal) {
    const auto seal =
        evaluate_seal_dexnet8(scene_.isolated_accel(c.target_instance), c, cup, cfg_.evaluation.dexnet_strain_limit);
    r.q_seal = seal.q_seal;
    if (!seal.q_seal) {
      r.failure_reason = seal.all_hit ? "strain_exceeded" : "ray_miss";
      return r;
    }
  } else {
    SealModel scaled;
    const SealModel* model = &seal_model_;
    if (c.cup != cfg_.evaluation.cup) {
      scaled = build_seal_model(cup, cfg_.evaluation.seal_rings, cfg_.evaluation.seal_vertices_per_ring);
      scaled.deformation_limit = cfg_.evaluation.deformation_limit;
      model = &scaled;
    }
    const auto seal = evaluate_seal(scene_, c, *model);
    r.q_seal = seal.q_seal;
    r.max_deformation = seal.max_deformation;
    if (!seal.q_seal) {
      r.failure_reason = to_string(seal.failure);
      return r;
    }
  }
  const auto dyn =
      suction_quasistatic(scene_, c, cup, support_, v != Variant::SingleObjectDynamics, cfg_.evaluation.dynamics);
  r.q_dynamics = dyn.q_dynamics;
  r.payload_mass = dyn.payload_mass;
  r.final_label = dyn.q_dynamics;
  r.failure_reason = to_string(dyn.failure);
  return r;
}

std::vector<LabelRecord> evaluate_candidates(const SceneGeometry& scene, const std::vector<Candidate>& candidates,
                                             const PipelineConfig& cfg, const std::string& scene_id, int workers) {
  const CandidateEvaluator evaluator(scene, cfg, scene_id);
  std::vector<LabelRecord> out(candidates.size());
  const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(candidates.size())));
  if (n_workers <= 1) {
    for (std::size_t i = 0; i < candidates.size(); ++i) out[i] = evaluator.evaluate(candidates[i], i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= candidates.size()) return;
        try {
          out[i] = evaluator.evaluate(candidates[i], i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = candidates.size();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<LabelRecord> run_label_pipeline(const SceneGeometry& scene, Modality modality, const PipelineConfig& cfg,
                                            const std::string& scene_id) {
  const std::string tool = modality == Modality::Jaw ? cfg.evaluation.gripper : cfg.evaluation.cup;
  if (!variant_applies(cfg.evaluation.variant, modality)) {
    throw ValidationError("variant " + to_string(cfg.evaluation.variant) + " does not apply to " +
                          to_string(modality) + " runs");
  }
  const auto candidates = sample_candidates(scene, modality, tool, cfg, cfg.seed);
  return evaluate_candidates(scene, candidates, cfg, scene_id, cfg.workers);
}

std::vector<Candidate> random_suction_candidates(const SceneGeometry& scene, const std::string& cup, std::size_t n,
                                                 const PipelineConfig& cfg, std::uint64_t seed) {
  const auto& objects = scene.scene().objects;
  if (objects.empty()) throw ValidationError("random_suction_candidates: empty scene");
  const SuctionCupSpec& spec = cfg.cup(cup);
  std::vector<std::vector<PointNormal>> pools;
  for (const auto& o : objects) {
    pools.push_back(sample_surface(scene.world_mesh(o.instance_id), cfg.sampling.frames.surface_samples,
                                   derive_seed(seed, o.instance_id)));
  }
  Rng rng(seed);
  std::vector<Candidate> out;
  std::size_t attempts = 0;
  while (out.size() < n) {
    if (++attempts > 100 * n + 100) throw ValidationError("random_suction_candidates: too few supported points");
    const auto k = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(objects.size()) - 1));
    const auto& pool = pools[k];
    const auto& t = pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))];
    try {
      out.emplace_back(gen_suction_grasp(darboux_frame(pool, t, cfg.sampling.frames.neighbourhood_radius), spec,
                                         objects[k].instance_id));
    } catch (const InsufficientSupport&) {
    }
  }
  return out;
}

AblationTable run_ablation(const std::vector<AblationScene>& corpus, const std::vector<Variant>& variants,
                           Modality modality, const PipelineConfig& cfg) {
  if (corpus.empty()) throw ValidationError("ablation: empty corpus");
  if (variants.empty()) throw ValidationError("ablation: no variants");
  for (Variant v : variants) {
    if (!variant_applies(v, modality)) {
      throw ValidationError("variant " + to_string(v) + " does not apply to " + to_string(modality) + " candidates");
    }
  }
  const std::string tool = modality == Modality::Jaw ? cfg.evaluation.gripper : cfg.evaluation.cup;
  // Candidates are fixed per scene so every variant sees the same set.
  std::vector<std::vector<Candidate>> candidates;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::vector<Candidate> cands;
    for (const auto& c : corpus[i].candidates) {
      const bool jaw = std::holds_alternative<GraspCandidate>(c);
      if (jaw == (modality == Modality::Jaw)) cands.push_back(c);
    }
    if (corpus[i].candidates.empty()) {
      cands = sample_candidates(*corpus[i].geometry, modality, tool, cfg, derive_seed(cfg.seed, i));
    }
    candidates.push_back(std::move(cands));
  }
  AblationTable table;
  table.modality = modality;
  for (Variant v : variants) {
    PipelineConfig vc = cfg;
    vc.evaluation.variant = v;
    std::vector<LabelRecord> all;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      auto recs = evaluate_candidates(*corpus[i].geometry, candidates[i], vc, corpus[i].scene_id, cfg.workers);
      all.insert(all.end(), recs.begin(), recs.end());
    }
    if (all.empty()) throw ValidationError("ablation: corpus yields no " + to_string(modality) + " candidates");
    table.rows.push_back({v, config_hash(vc), compute_pass_rates(all)});
  }
  return table;
}

std::string ablation_to_json(const AblationTable& table) {
  nlohmann::ordered_json j;
  j["modality"] = to_string(table.modality);
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r;
    r["variant"] = to_string(row.variant);
    r["config_hash"] = row.config_hash;
    r["report"] = nlohmann::ordered_json::parse(report_to_json(row.report));
    j["rows"].push_back(r);
  }
  return j.dump(2);
}

std::string ablation_to_text(const AblationTable& table) {
  auto pct = [](const std::optional<double>& v) {
    if (!v) return std::string("-");
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << 100.0 * *v << "%";
    return s.str();
  };
  std::ostringstream out;
  out << std::left << std::setw(24) << "variant" << std::right << std::setw(8) << "total" << std::setw(12)
      << "collision" << std::setw(12) << "seal" << std::setw(12) << "dynamics" << std::setw(12) << "final" << '\n';
  for (const auto& row : table.rows) {
    const auto& r = row.report;
    out << std::left << std::setw(24) << to_string(row.variant) << std::right << std::setw(8) << r.total
        << std::setw(12) << pct(r.collision_pass_rate) << std::setw(12)
        << (table.modality == Modality::Jaw ? std::string("-") : pct(r.seal_pass_rate)) << std::setw(12)
        << pct(r.dynamics_pass_rate) << std::setw(12) << pct(r.final_pass_rate) << '\n';
  }
  return out.str();
}

std::string candidates_to_ndjson(const std::vector<Candidate>& candidates, const std::string& scene_path) {
  std::string out;
  for (const auto& c : candidates) {
    if (const auto* g = std::get_if<GraspCandidate>(&c)) {
      out += grasp_candidate_json(*g, scene_path);
    } else {
      out += suction_candidate_json(std::get<SuctionCandidate>(c), scene_path);
    }
    out += '\n';
  }
  return out;
}

CandidateFile load_candidates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  CandidateFile out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    CandidateLine c;
    try {
      c = parse_candidate_json(line);
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
    if (c.scene_path.empty()) {
      throw ValidationError(path.string() + ":" + std::to_string(n) + ": candidate has no scene path");
    }
    std::filesystem::path sp(c.scene_path);
    if (sp.is_relative()) sp = path.parent_path() / sp;
    out.scene_paths.push_back(sp.lexically_normal());
    if (c.grasp) {
      out.candidates.emplace_back(*c.grasp);
    } else {
      out.candidates.emplace_back(*c.suction);
    }
  }
  return out;
}

std::vector<AblationScene> load_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ValidationError("corpus directory not found: " + dir.string());
  const fs::path scene_dir = fs::is_directory(dir / "scenes") ? dir / "scenes" : dir;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(scene_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ValidationError("corpus " + dir.string() + " contains no scene files");

  std::map<fs::path, std::vector<Candidate>> fixed;
  if (fs::exists(dir / "candidates.ndjson")) {
    auto cf = load_candidates(dir / "candidates.ndjson");
    for (std::size_t i = 0; i < cf.candidates.size(); ++i) {
      fixed[fs::weakly_canonical(cf.scene_paths[i])].push_back(cf.candidates[i]);
    }
  }
  std::vector<AblationScene> out;
  for (const auto& f : files) {
    Scene scene = load_scene(f);
    const AssetLibrary assets = assets_for_scene(scene, f);
    AblationScene a;
    a.scene_id = f.stem().string();
    a.geometry = std::make_shared<const SceneGeometry>(std::move(scene), assets);
    auto it = fixed.find(fs::weakly_canonical(f));
    if (it != fixed.end()) a.candidates = it->second;
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace cluttergrasp
