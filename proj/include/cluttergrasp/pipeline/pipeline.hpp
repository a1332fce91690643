#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cluttergrasp/grasp/collision.hpp"
#include "cluttergrasp/grasp/dynamics.hpp"
#include "cluttergrasp/grasp/seal.hpp"
#include "cluttergrasp/pipeline/records.hpp"

namespace cluttergrasp {

using Candidate = std::variant<GraspCandidate, SuctionCandidate>;

/// Candidates for every object in scene order: surface samples, FPS, Darboux frames, then the
/// jaw grid (n_roll x n_standoff per frame) or one suction candidate per frame. Object i uses
/// the sub-seed derive_seed(seed, instance_id).
std::vector<Candidate> sample_candidates(const SceneGeometry& scene, Modality modality, const std::string& tool,
                                         const PipelineConfig& cfg, std::uint64_t seed);

/// Staged evaluation of single candidates against one scene. Construction precomputes the
/// support graph and seal model; evaluate() is const and thread-safe.
class CandidateEvaluator {
 public:
  CandidateEvaluator(const SceneGeometry& scene, const PipelineConfig& cfg, std::string scene_id);

  LabelRecord evaluate(const Candidate& cand, std::size_t index) const;
  const SupportGraph& support() const { return support_; }

 private:
  LabelRecord evaluate_jaw(const GraspCandidate& c, LabelRecord r) const;
  LabelRecord evaluate_suction(const SuctionCandidate& c, LabelRecord r) const;

  const SceneGeometry& scene_;
  PipelineConfig cfg_;
  std::string scene_id_;
  std::string hash_;
  SupportGraph support_;
  SealModel seal_model_;
};

/// Evaluates every candidate on `workers` threads; records come back in candidate order.
/// Throws ValidationError when a variant does not apply to a candidate's modality.
std::vector<LabelRecord> evaluate_candidates(const SceneGeometry& scene, const std::vector<Candidate>& candidates,
                                             const PipelineConfig& cfg, const std::string& scene_id, int workers);

/// sample_candidates followed by evaluate_candidates with cfg.workers.
std::vector<LabelRecord> run_label_pipeline(const SceneGeometry& scene, Modality modality, const PipelineConfig& cfg,
                                            const std::string& scene_id);

/// `n` suction candidates at uniformly chosen objects and surface points (a frame per point,
/// points without neighbourhood support are redrawn). Deterministic per seed.
std::vector<Candidate> random_suction_candidates(const SceneGeometry& scene, const std::string& cup, std::size_t n,
                                                 const PipelineConfig& cfg, std::uint64_t seed);

struct AblationScene {
  std::string scene_id;
  std::shared_ptr<const SceneGeometry> geometry;
  /// Fixed candidates; sampled from the scene when empty.
  std::vector<Candidate> candidates;
};

struct AblationRow {
  Variant variant = Variant::Default;
  std::string config_hash;
  PassRateReport report;
};

struct AblationTable {
  Modality modality = Modality::Suction;
  std::vector<AblationRow> rows;
};

/// One report per variant over the whole corpus; only the variant differs between runs.
AblationTable run_ablation(const std::vector<AblationScene>& corpus, const std::vector<Variant>& variants,
                           Modality modality, const PipelineConfig& cfg);
std::string ablation_to_json(const AblationTable& table);
std::string ablation_to_text(const AblationTable& table);

/// Whether `variant` changes anything for `modality` (dexnet8_seal is suction only,
/// simplified_gripper jaw only).
bool variant_applies(Variant variant, Modality modality);

/// Reads a corpus directory: every scene JSON under <dir>/scenes (or <dir> itself), plus fixed
/// candidates from <dir>/candidates.ndjson when present.
std::vector<AblationScene> load_corpus(const std::filesystem::path& dir);

/// Loads a candidate NDJSON file; scene paths are resolved against the file's directory.
struct CandidateFile {
  std::vector<std::filesystem::path> scene_paths;  // one per candidate
  std::vector<Candidate> candidates;
};
CandidateFile load_candidates(const std::filesystem::path& path);
std::string candidates_to_ndjson(const std::vector<Candidate>& candidates, const std::string& scene_path);

}  // namespace cluttergrasp
