#pragma once

#include <memory>

#include "cluttergrasp/pipeline/pipeline.hpp"
#include "test_util.hpp"

namespace cluttergrasp::test {

/// Steel block (7 x 7 x 12 cm, 4.59 kg) resting on a cardboard box (8 x 16 x 6 cm, 0.384 kg),
/// plus a free-standing 6 cm cube. Instance 0 is the pile bottom.
inline Scene pile_scene(AssetLibrary& assets) {
  SceneBuilder b;
  b.add(shapes::box(Vec3(-0.04, -0.08, 0), Vec3(0.04, 0.08, 0.06)), Pose(), 0.5);
  b.add(shapes::box(Vec3(-0.035, -0.035, 0.06), Vec3(0.035, 0.035, 0.18)), Pose(), 0.5);
  b.add(shapes::box(Vec3(0.15, -0.03, 0), Vec3(0.21, 0.03, 0.06)), Pose(), 0.5);
  b.set_mass(0, 0.384);
  b.set_mass(1, 4.59);
  assets = b.assets;
  return b.scene;
}

inline std::shared_ptr<const SceneGeometry> pile_geometry() {
  AssetLibrary assets;
  Scene scene = pile_scene(assets);
  return std::make_shared<const SceneGeometry>(std::move(scene), assets);
}

/// Catalog objects with grooves, holes, ridges, concavities or strong curvature.
inline std::vector<std::string> surface_feature_pool() {
  return {"builtin/grooved_block", "builtin/perforated_plate", "builtin/ridged_tile", "builtin/dish",
          "builtin/l_bracket",     "builtin/torus",            "builtin/sphere_50",   "builtin/can",
          "builtin/box_flat",      "builtin/hex_prism"};
}

/// Settled scene of `n` objects dropped into a small footprint so they pile up.
inline std::shared_ptr<const SceneGeometry> cluttered_geometry(int n, std::uint64_t seed,
                                                               std::vector<std::string> pool = builtin_asset_ids()) {
  const AssetLibrary assets = AssetLibrary::builtin();
  SceneDistributionConfig cfg;
  cfg.min_objects = cfg.max_objects = n;
  cfg.drop_lo = Vec3(-0.08, -0.08, 0.3);
  cfg.drop_hi = Vec3(0.08, 0.08, 0.6);
  Scene scene = settle_scene(sample_scene_plan(cfg, pool, seed), assets, cfg).scene;
  return std::make_shared<const SceneGeometry>(std::move(scene), assets);
}

/// Config with small sampling counts for fast tests.
inline PipelineConfig small_config() {
  PipelineConfig cfg;
  cfg.sampling.frames.fps_points = 8;
  cfg.sampling.n_roll = 4;
  cfg.sampling.n_standoff = 2;
  return cfg;
}

}  // namespace cluttergrasp::test
