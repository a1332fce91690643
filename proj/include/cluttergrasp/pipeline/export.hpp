#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cluttergrasp/camera/camera.hpp"
#include "cluttergrasp/pipeline/pipeline.hpp"

namespace cluttergrasp {

inline constexpr const char* kToolVersion = "0.1.0";

struct ExportScene {
  std::string scene_id;
  std::uint64_t seed = 0;
  Scene scene;
  std::vector<DepthFrame> frames;
  std::vector<std::uint64_t> frame_seeds;
  std::vector<LabelRecord> records;
};

/// Generates cfg.export_scenes scenes (scene i uses derive_seed(cfg.seed, i)), renders
/// cfg.camera.frames views of each and labels jaw and suction candidates.
std::vector<ExportScene> build_dataset(const PipelineConfig& cfg);

/// Writes scenes/, frames/, labels/ and manifest.json under `out` and returns the manifest JSON.
/// Only the manifest's "created_at" field differs between exports of identical inputs.
/// Throws ValidationError when a record names a scene that is not part of the export.
std::string export_dataset(const std::vector<ExportScene>& scenes, const PipelineConfig& cfg,
                           const std::filesystem::path& out);

}  // namespace cluttergrasp
