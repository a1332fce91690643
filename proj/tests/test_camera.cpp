#include <gtest/gtest.h>

#include <filesystem>

#include "cluttergrasp/camera/camera.hpp"
#include "test_util.hpp"

using namespace cluttergrasp;

namespace {

CameraIntrinsics small_intrinsics() {
  CameraIntrinsics k;
  k.width = 64;
  k.height = 48;
  k.fx = k.fy = 60.0;
  k.cx = 31.5;
  k.cy = 23.5;
  return k;
}

}  // namespace

TEST(Viewpoint, LookAtPointsOpticalAxisAtTarget) {
  ViewpointConfig cfg;
  for (const auto& [rho, phi, theta] : std::vector<std::tuple<double, double, double>>{
           {1.0, 0.0, 0.0}, {2.0, 0.7, 0.3}, {0.5, 1.5707963267948966, 3.0}}) {
    const Vec3 pos = spherical_position(cfg, rho, phi, theta);
    EXPECT_NEAR(pos.norm(), rho, 1e-12);
    const Pose pose = look_at_pose(pos, cfg.look_at);
    EXPECT_LT((pose.translation - pos).norm(), 1e-12);
    EXPECT_LT((pose.apply_direction(Vec3::UnitZ()) - (cfg.look_at - pos).normalized()).norm(), 1e-9);
    EXPECT_NEAR(pose.matrix().determinant(), 1.0, 1e-12);
  }
  const Pose top = look_at_pose(spherical_position(cfg, 1.0, 0.0, 0.0), Vec3::Zero());
  EXPECT_LT((top.translation - Vec3(0, 0, 1)).norm(), 1e-12);
}

TEST(Viewpoint, SampledRadiiInRangeAndDeterministic) {
  ViewpointConfig cfg;
  for (int i = 0; i < 10000; ++i) {
    const Pose p = sample_viewpoint(cfg, derive_seed(3, i));
    const double rho = p.translation.norm();
    EXPECT_GE(rho, 0.5 - 1e-12);
    EXPECT_LE(rho, 10.0 + 1e-12);
    EXPECT_GE(p.translation.z(), -1e-12);
    EXPECT_GE(p.translation.y(), -1e-12);
  }
  const Pose a = sample_viewpoint(cfg, 11), b = sample_viewpoint(cfg, 11);
  EXPECT_EQ(a.translation, b.translation);
  EXPECT_EQ(a.rotation.coeffs(), b.rotation.coeffs());
}

TEST(Render, CubeFromAboveCentreDepth) {
  test::SceneBuilder b;
  b.add(shapes::box(Vec3(0.1, 0.1, 0.1)));
  const auto g = b.geometry();
  CameraIntrinsics k = small_intrinsics();
  k.width = 65;
  k.height = 49;
  k.cx = 32;
  k.cy = 24;
  const auto frame = render_depth(g, look_at_pose({0, 0, 1}, Vec3::Zero()), k);
  EXPECT_NEAR(frame.depth[frame.index(32, 24)], 1.0 - 0.05, 1e-6);
  EXPECT_EQ(frame.instance_ids[frame.index(32, 24)], 0);
  EXPECT_EQ(frame.instance_ids[frame.index(0, 0)], -1);

  const auto clouds = depth_to_pointcloud(frame);
  bool found = false;
  for (const auto& p : clouds.at(0)) {
    if ((p.point.head<2>()).norm() < 1e-9) {
      EXPECT_NEAR(p.point.z(), 0.05, 1e-6);
      EXPECT_LT((p.normal - Vec3::UnitZ()).norm(), 1e-9);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Render, EmptySceneAllMisses) {
  const SceneGeometry g(Scene{}, AssetLibrary{});
  const auto frame = render_depth(g, look_at_pose({0, 0, 1}, Vec3::Zero()), small_intrinsics());
  for (std::size_t i = 0; i < frame.depth.size(); ++i) {
    EXPECT_EQ(frame.depth[i], 0.0);
    EXPECT_EQ(frame.instance_ids[i], -1);
  }
  EXPECT_TRUE(depth_to_pointcloud(frame).empty());
}

TEST(Render, OcclusionMatchesPerPixelOracle) {
  test::SceneBuilder b;
  b.add(shapes::box(Vec3(0.2, 0.2, 0.05)));                                   // far, large
  b.add(transformed(shapes::box(Vec3(0.06, 0.06, 0.05)), Pose::translation_only({0.01, 0, 0.3})));  // near, small
  const auto g = b.geometry();
  const CameraIntrinsics k = small_intrinsics();
  const Pose cam = look_at_pose({0.02, 0.01, 1.0}, Vec3::Zero());
  RenderOptions opts;
  opts.workers = 3;
  const auto frame = render_depth(g, cam, k, opts);
  int occluder_pixels = 0;
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const Vec3 d = cam.apply_direction(pixel_direction(k, u, v));
      const auto hit = test::oracle_raycast(g.instances(), Ray{cam.translation, d});
      const int want = hit ? hit->instance_id : -1;
      ASSERT_EQ(frame.instance_ids[frame.index(u, v)], want) << u << "," << v;
      if (want == 1) ++occluder_pixels;
      EXPECT_EQ(frame.depth[frame.index(u, v)] == 0.0, want == -1);
    }
  }
  EXPECT_GT(occluder_pixels, 20);
}

TEST(Render, WorkerCountDoesNotChangeOutput) {
  const auto assets = AssetLibrary::builtin();
  const auto scene = settle_scene(sample_scene_plan({}, {"builtin/cube_40", "builtin/can"}, 4), assets).scene;
  const SceneGeometry g(scene, assets);
  const Pose cam = sample_viewpoint({0.5, 1.0}, 2);
  RenderOptions one, many;
  many.workers = 4;
  const auto a = render_depth(g, cam, small_intrinsics(), one), c = render_depth(g, cam, small_intrinsics(), many);
  EXPECT_EQ(a.depth, c.depth);
  EXPECT_EQ(a.instance_ids, c.instance_ids);
}

TEST(Backproject, PointsLieOnSurfacesAndPlaneRoundTrip) {
  test::SceneBuilder b;
  b.add(shapes::box(Vec3(-1, -1, -0.1), Vec3(1, 1, 0)));
  b.add(transformed(shapes::icosphere(0.1, 3), Pose::translation_only({0.05, 0.05, 0.12})));
  const auto g = b.geometry();
  const CameraIntrinsics k = small_intrinsics();
  const Pose cam = look_at_pose({0.3, -0.4, 0.8}, Vec3::Zero());
  const auto frame = render_depth(g, cam, k);
  std::size_t hits = 0;
  for (int id : frame.instance_ids) hits += id >= 0;
  std::size_t total = 0;
  for (const auto& [id, pts] : depth_to_pointcloud(frame)) {
    total += pts.size();
    for (const auto& p : pts) {
      const Vec3 dir = (p.point - cam.translation).normalized();
      const auto hit = g.raycast(Ray{cam.translation, dir});
      ASSERT_TRUE(hit);
      EXPECT_LT((hit->point - p.point).norm(), 1e-5);
      EXPECT_EQ(hit->instance_id, id);
    }
  }
  EXPECT_EQ(total, hits);

  // Plane: render, back-project, re-render from a second camera built off the same pose.
  test::SceneBuilder plane;
  plane.add(shapes::box(Vec3(-2, -2, -0.1), Vec3(2, 2, 0)));
  const auto pg = plane.geometry();
  const auto f1 = render_depth(pg, cam, k);
  const auto cloud = depth_to_pointcloud(f1).at(0);
  const Pose inv = cam.inverse();
  for (const auto& p : cloud) {
    EXPECT_NEAR(p.point.z(), 0.0, 1e-9);
    const Vec3 c = inv.apply(p.point);
    const int u = static_cast<int>(std::lround(k.fx * c.x() / c.z() + k.cx));
    const int v = static_cast<int>(std::lround(k.fy * c.y() / c.z() + k.cy));
    EXPECT_NEAR(f1.depth[f1.index(u, v)], c.z(), 1e-6);
  }
}

TEST(DepthNoise, OffByDefaultAndDeterministicWhenOn) {
  test::SceneBuilder b;
  b.add(shapes::box(Vec3(0.5, 0.5, 0.1)));
  const auto g = b.geometry();
  const Pose cam = look_at_pose({0, 0, 1}, Vec3::Zero());
  RenderOptions noisy;
  noisy.depth_noise_mm = 1.0;
  noisy.noise_seed = 4;
  const auto clean = render_depth(g, cam, small_intrinsics());
  const auto n1 = render_depth(g, cam, small_intrinsics(), noisy), n2 = render_depth(g, cam, small_intrinsics(), noisy);
  EXPECT_EQ(n1.depth, n2.depth);
  EXPECT_NE(n1.depth, clean.depth);
  EXPECT_EQ(n1.instance_ids, clean.instance_ids);
}

TEST(Png, DepthAndIdRoundTrip) {
  test::SceneBuilder b;
  b.add(shapes::box(Vec3(0.1, 0.1, 0.1)));
  const auto frame = render_depth(b.geometry(), look_at_pose({0, 0, 1}, Vec3::Zero()), small_intrinsics());
  const auto dir = std::filesystem::path(testing::TempDir());
  write_depth_png(frame, dir / "d.png");
  write_instance_png(frame, dir / "i.png");
  int w = 0, h = 0;
  const auto depth = read_png16(dir / "d.png", w, h);
  ASSERT_EQ(w, 64);
  ASSERT_EQ(h, 48);
  const auto ids = read_png16(dir / "i.png", w, h);
  for (std::size_t i = 0; i < frame.depth.size(); ++i) {
    EXPECT_NEAR(depth[i] * 1e-4, frame.depth[i], 0.5e-4 + 1e-12);
    EXPECT_EQ(static_cast<int>(ids[i]) - 1, frame.instance_ids[i]);
  }
  EXPECT_THROW(read_png16(dir / "missing.png", w, h), ValidationError);
}
