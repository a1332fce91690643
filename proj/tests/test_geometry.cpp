#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <algorithm>
#include <sstream>

#include "cluttergrasp/geometry/accel.hpp"
#include "cluttergrasp/geometry/intersect.hpp"
#include "cluttergrasp/geometry/mesh.hpp"
#include "cluttergrasp/geometry/sampling.hpp"
#include "cluttergrasp/geometry/shapes.hpp"
#include "cluttergrasp/random.hpp"
#include "test_util.hpp"

using namespace cluttergrasp;

namespace {

const char* kCubeObj = R"(# unit cube
v -0.5 -0.5 -0.5
v 0.5 -0.5 -0.5
v 0.5 0.5 -0.5
v -0.5 0.5 -0.5
v -0.5 -0.5 0.5
v 0.5 -0.5 0.5
v 0.5 0.5 0.5
v -0.5 0.5 0.5
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
)";

MeshLoadResult parse(const std::string& text) {
  std::istringstream in(text);
  return parse_obj(in, "test.obj");
}

}  // namespace

TEST(ObjLoad, UnitCubeCounts) {
  const auto r = parse(kCubeObj);
  EXPECT_EQ(r.mesh.vertices.size(), 8u);
  EXPECT_EQ(r.mesh.triangles.size(), 12u);
  EXPECT_EQ(r.dropped_degenerate, 0);
}

TEST(ObjLoad, ZeroAreaTriangleDropped) {
  const auto r = parse(std::string(kCubeObj) + "f 1 2 1\nv 2 0 0\nv 3 0 0\nv 4 0 0\nf 9 10 11\n");
  EXPECT_EQ(r.mesh.triangles.size(), 12u);
  EXPECT_EQ(r.dropped_degenerate, 2);
}

TEST(ObjLoad, IcosphereFileCountsMatchWrittenFile) {
  const auto sphere = shapes::icosphere(1.0, 3);
  ASSERT_EQ(sphere.vertices.size(), 642u);
  ASSERT_EQ(sphere.triangles.size(), 1280u);
  std::ostringstream out;
  write_obj(sphere, out);
  std::size_t v_lines = 0, f_lines = 0;
  std::istringstream lines(out.str());
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("v ", 0) == 0) ++v_lines;
    if (line.rfind("f ", 0) == 0) ++f_lines;
  }
  const auto r = parse(out.str());
  EXPECT_EQ(r.mesh.vertices.size(), v_lines);
  EXPECT_EQ(r.mesh.triangles.size(), f_lines);
  EXPECT_EQ(f_lines, 1280u);
}

TEST(ObjLoad, PolygonsAndSlashIndicesAndNegativeIndices) {
  const auto r = parse("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\nf -4/1 -3/1 -1/1\n");
  EXPECT_EQ(r.mesh.triangles.size(), 3u);
}

TEST(ObjLoad, ParseErrorNamesLine) {
  try {
    parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 x\n");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("test.obj:4"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse("v 0 0 0\nf 1 2 3\n"), ValidationError);  // index out of range
  EXPECT_THROW(parse("# nothing\n"), ValidationError);         // empty mesh
}

TEST(ObjLoad, SaveLoadRoundTripIsExact) {
  const auto mesh = transformed(shapes::icosphere(0.0371, 2), Pose(Quat(0.3, 0.1, -0.7, 0.2), Vec3(0.1, 1.0 / 3, 7)));
  const auto path = testing::TempDir() + "/roundtrip.obj";
  save_obj(mesh, path);
  const auto back = load_obj(path).mesh;
  ASSERT_EQ(back.vertices.size(), mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) EXPECT_EQ(back.vertices[i], mesh.vertices[i]);
  EXPECT_EQ(back.triangles, mesh.triangles);
  EXPECT_THROW(load_obj(testing::TempDir() + "/does_not_exist.obj"), ValidationError);
}

TEST(MeshVolume, UnitCube) {
  const auto v = mesh_volume(parse(kCubeObj).mesh);
  EXPECT_NEAR(v.volume, 1.0, 1e-12);
  EXPECT_FALSE(v.inverted);
  EXPECT_TRUE(v.watertight);
}

TEST(MeshVolume, SubdividedSphereWithinOnePercent) {
  const double r = 0.1;
  const double exact = 4.0 / 3.0 * std::numbers::pi * r * r * r;
  EXPECT_NEAR(mesh_volume(shapes::icosphere(r, 4)).volume, exact, 0.01 * exact);
}

TEST(MeshVolume, InvertedWindingSetsFlag) {
  auto cube = parse(kCubeObj).mesh;
  flip_winding(cube);
  const auto v = mesh_volume(cube);
  EXPECT_NEAR(v.volume, 1.0, 1e-12);
  EXPECT_TRUE(v.inverted);
}

TEST(MeshVolume, OpenMeshFlaggedNotWatertight) {
  auto cube = parse(kCubeObj).mesh;
  cube.triangles.pop_back();
  EXPECT_FALSE(mesh_volume(cube).watertight);
}

TEST(MeshVolume, ScalesCubically) {
  const auto mesh = shapes::torus(0.04, 0.012, 24, 12);
  const double v = mesh_volume(mesh).volume;
  for (double s : {0.5, 1.3, 2.0}) {
    const double vs = mesh_volume(transformed(mesh, Pose(Quat(1, 2, 3, 4), Vec3(1, -2, 3)), s)).volume;
    EXPECT_NEAR(vs / (s * s * s * v), 1.0, 1e-9);
  }
}

TEST(MeshCentroid, OffsetBox) {
  const auto box = shapes::box(Vec3(1, 2, 3), Vec3(2, 4, 7));
  EXPECT_LT((mesh_centroid(box) - Vec3(1.5, 3, 5)).norm(), 1e-12);
}

TEST(Shapes, ClosedAndOutwardOriented) {
  std::vector<TriangleMesh> meshes = {shapes::box(Vec3(0.1, 0.2, 0.3)), shapes::icosphere(0.05, 2),
                                      shapes::cylinder(0.03, 0.1, 24), shapes::cylinder_x(0.01, -0.02, 0.05, 16),
                                      shapes::torus(0.04, 0.01, 24, 12)};
  for (const auto& m : meshes) {
    const auto v = mesh_volume(m);
    EXPECT_TRUE(v.watertight);
    EXPECT_FALSE(v.inverted);
    EXPECT_EQ(connected_components(m), 1);
  }
}

TEST(Shapes, HeightfieldSlabWithHoleIsClosed) {
  shapes::HeightfieldSpec hf;
  hf.x0 = -0.02;
  hf.x1 = 0.02;
  hf.y0 = -0.02;
  hf.y1 = 0.02;
  hf.cell = 0.001;
  hf.bottom_z = 0.0;
  hf.height = [](double x, double) { return 0.01 + 0.002 * std::sin(300 * x); };
  hf.solid = [](double x, double y) { return std::hypot(x, y) > 0.005; };
  const auto m = shapes::heightfield_slab(hf);
  const auto v = mesh_volume(m);
  EXPECT_TRUE(v.watertight);
  EXPECT_FALSE(v.inverted);
}

TEST(RayTriangle, WatertightAgreesWithMollerAwayFromEdges) {
  Rng rng(11);
  int hits = 0;
  for (int i = 0; i < 2000; ++i) {
    const Vec3 a = test::random_unit(rng), b = test::random_unit(rng), c = test::random_unit(rng);
    Ray ray{3.0 * test::random_unit(rng), Vec3::Zero(), 10.0};
    ray.direction = (0.3 * test::random_unit(rng) - ray.origin).normalized();
    const auto w = ray_triangle(ray, a, b, c);
    const auto m = ray_triangle_moller(ray, a, b, c);
    ASSERT_EQ(w.has_value(), m.has_value());
    if (w) {
      ++hits;
      EXPECT_NEAR(*w, *m, 1e-9);
    }
  }
  EXPECT_GT(hits, 50);
}

TEST(RayTriangle, SharedEdgeDoesNotLeak) {
  // A unit square split along its diagonal; rays aimed exactly at the diagonal must hit.
  const Vec3 p0(0, 0, 0), p1(1, 0, 0), p2(1, 1, 0), p3(0, 1, 0);
  for (int i = 1; i < 100; ++i) {
    const double s = i / 100.0;
    const Ray ray{Vec3(s, s, 1.0), Vec3(0, 0, -1), 5.0};
    const bool hit = ray_triangle(ray, p0, p1, p2).has_value() || ray_triangle(ray, p0, p2, p3).has_value();
    EXPECT_TRUE(hit) << s;
  }
}

TEST(Raycast, CubeAnalyticHitAndMiss) {
  const auto cube = std::make_shared<const TriangleMesh>(parse(kCubeObj).mesh);
  std::vector<MeshInstance> inst{{cube, Pose(), 1.0, -1}};
  SceneAccel accel(inst);
  const Ray down{Vec3(0, 0, 2), Vec3(0, 0, -1)};
  const auto hit = accel.raycast(down);
  ASSERT_TRUE(hit);
  EXPECT_NEAR(hit->distance, 1.5, 1e-12);
  EXPECT_EQ(hit->instance_id, 0);
  EXPECT_LT((hit->point - Vec3(0, 0, 0.5)).norm(), 1e-7);
  EXPECT_LT((hit->face_normal - Vec3(0, 0, 1)).norm(), 1e-12);

  std::vector<MeshInstance> moved{{cube, Pose::translation_only({10, 0, 0}), 1.0, -1}};
  EXPECT_FALSE(SceneAccel(moved).raycast(down));
}

TEST(Raycast, MaxDistanceRespected) {
  const auto cube = std::make_shared<const TriangleMesh>(parse(kCubeObj).mesh);
  std::vector<MeshInstance> inst{{cube, Pose(), 1.0, -1}};
  SceneAccel accel(inst);
  EXPECT_FALSE(accel.raycast(Ray{Vec3(0, 0, 2), Vec3(0, 0, -1), 1.49}));
  EXPECT_TRUE(accel.raycast(Ray{Vec3(0, 0, 2), Vec3(0, 0, -1), 1.5}));
}

TEST(Raycast, AnalyticSphereDistance) {
  // The oracle is the exact intersection with the polyhedron's vertices' circumsphere along
  // rays through vertices, where the mesh surface and the sphere coincide.
  const double r = 0.3;
  const auto sphere = std::make_shared<const TriangleMesh>(shapes::icosphere(r, 3));
  std::vector<MeshInstance> inst{{sphere, Pose::translation_only({1, 2, 3}), 1.0, -1}};
  SceneAccel accel(inst);
  for (std::size_t i = 0; i < sphere->vertices.size(); i += 7) {
    const Vec3 dir = sphere->vertices[i].normalized();
    const double d = 2.0 + 0.01 * i;
    const Vec3 origin = Vec3(1, 2, 3) + d * dir;
    const auto hit = accel.raycast(Ray{origin, -dir});
    ASSERT_TRUE(hit);
    EXPECT_NEAR(hit->distance, d - r, 1e-6);
  }
}

TEST(Accel, EmptyInstanceListAndBadScaleThrow) {
  std::vector<MeshInstance> none;
  EXPECT_THROW(SceneAccel{none}, ValidationError);
  const auto cube = std::make_shared<const TriangleMesh>(shapes::box(Vec3(1, 1, 1)));
  std::vector<MeshInstance> bad{{cube, Pose(), 0.0, -1}};
  EXPECT_THROW(SceneAccel{bad}, ValidationError);
}

TEST(Accel, SingleCubeMatchesIndependentBruteForce) {
  const auto cube = std::make_shared<const TriangleMesh>(parse(kCubeObj).mesh);
  std::vector<MeshInstance> inst{{cube, Pose(Quat(0.9, 0.1, 0.3, -0.2), Vec3(0.1, 0, 0)), 1.2, -1}};
  SceneAccel accel(inst);
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Ray ray = test::random_ray_towards(rng, Vec3::Zero(), 3.0, 1.0);
    test::expect_same_hit(accel.raycast(ray), test::oracle_raycast(inst, ray));
  }
}

TEST(Accel, TwentyInstancesMatchBruteForce) {
  const auto inst = test::random_instances(20, 99);
  SceneAccel accel(inst);
  Rng rng(1234);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    const Ray ray = test::random_ray_towards(rng, Vec3::Zero(), 1.5, 0.4);
    const auto a = accel.raycast(ray);
    test::expect_same_hit(a, test::oracle_raycast(inst, ray));
    const auto b = accel.raycast_brute_force(ray);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) {
      ++hits;
      EXPECT_EQ(a->distance, b->distance);
      EXPECT_EQ(a->instance_id, b->instance_id);
      EXPECT_EQ(a->triangle_index, b->triangle_index);
    }
  }
  EXPECT_GT(hits, 300);
}

TEST(Accel, HitIndependentOfInsertionOrder) {
  auto inst = test::random_instances(12, 3);
  for (std::size_t i = 0; i < inst.size(); ++i) inst[i].instance_id = static_cast<int>(i);
  auto reversed = inst;
  std::reverse(reversed.begin(), reversed.end());
  SceneAccel a(inst), b(reversed);
  Rng rng(8);
  for (int i = 0; i < 300; ++i) {
    const Ray ray = test::random_ray_towards(rng, Vec3::Zero(), 1.5, 0.4);
    const auto ha = a.raycast(ray), hb = b.raycast(ray);
    ASSERT_EQ(ha.has_value(), hb.has_value());
    if (ha) {
      EXPECT_EQ(ha->distance, hb->distance);
      EXPECT_EQ(ha->instance_id, hb->instance_id);
      EXPECT_EQ(ha->triangle_index, hb->triangle_index);
    }
  }
}

TEST(Accel, HitDistanceNonIncreasingInMaxDistance) {
  const auto inst = test::random_instances(10, 4);
  SceneAccel accel(inst);
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    Ray ray = test::random_ray_towards(rng, Vec3::Zero(), 1.5, 0.4);
    std::optional<double> prev;
    for (double m : {0.5, 1.0, 1.5, 2.0, 4.0}) {
      ray.max_distance = m;
      const auto h = accel.raycast(ray);
      if (prev) {
        ASSERT_TRUE(h);
        EXPECT_LE(h->distance, *prev);
      }
      if (h) prev = h->distance;
    }
  }
}

TEST(Overlap, CubesOffsetAndDisjointAndExcluded) {
  const auto cube = std::make_shared<const TriangleMesh>(parse(kCubeObj).mesh);
  std::vector<MeshInstance> inst{{cube, Pose(), 1.0, -1}};
  SceneAccel accel(inst);
  EXPECT_TRUE(mesh_overlap(accel, *cube, Pose::translation_only({0.5, 0, 0})).overlap);
  EXPECT_FALSE(mesh_overlap(accel, *cube, Pose::translation_only({2, 0, 0})).overlap);
  EXPECT_FALSE(mesh_overlap(accel, *cube, Pose::translation_only({0.5, 0, 0}), {0}).overlap);
  const auto r = mesh_overlap(accel, *cube, Pose::translation_only({1.0, 0, 0}));
  EXPECT_TRUE(r.overlap) << "face contact counts as overlap";
  EXPECT_EQ(r.instances, std::vector<int>{0});
}

TEST(Overlap, FullyContainedProbeDetectedByContainment) {
  const auto big = std::make_shared<const TriangleMesh>(shapes::box(Vec3(1, 1, 1)));
  std::vector<MeshInstance> inst{{big, Pose(), 1.0, -1}};
  SceneAccel accel(inst);
  EXPECT_TRUE(mesh_overlap(accel, shapes::box(Vec3(0.1, 0.1, 0.1)), Pose()).overlap);
  EXPECT_TRUE(accel.contains(Vec3(0.1, 0.2, -0.3), 0));
  EXPECT_FALSE(accel.contains(Vec3(0.6, 0.2, -0.3), 0));
}

TEST(Overlap, SymmetricInRoles) {
  Rng rng(21);
  const auto a = std::make_shared<const TriangleMesh>(shapes::icosphere(0.05, 1));
  const auto b = std::make_shared<const TriangleMesh>(shapes::box(Vec3(0.06, 0.03, 0.08)));
  for (int i = 0; i < 200; ++i) {
    const Pose pa(test::random_quat(rng), 0.05 * test::random_unit(rng));
    const Pose pb(test::random_quat(rng), 0.05 * test::random_unit(rng));
    std::vector<MeshInstance> ia{{a, pa, 1.0, -1}}, ib{{b, pb, 1.0, -1}};
    const bool ab = mesh_overlap(SceneAccel(ia), *b, pb).overlap;
    const bool ba = mesh_overlap(SceneAccel(ib), *a, pa).overlap;
    EXPECT_EQ(ab, ba) << i;
  }
}

TEST(BoxTriangle, SeparatedTouchingAndCrossing) {
  const OrientedBox box{Pose(), Vec3(1, 1, 1)};
  EXPECT_TRUE(box_triangle_overlap(box, Vec3(-5, -5, 0), Vec3(5, -5, 0), Vec3(0, 5, 0)));
  EXPECT_TRUE(box_triangle_overlap(box, Vec3(1, -5, -5), Vec3(1, 5, -5), Vec3(1, 0, 5)));
  EXPECT_FALSE(box_triangle_overlap(box, Vec3(1.01, -5, -5), Vec3(1.01, 5, -5), Vec3(1.01, 0, 5)));
  // Separated only along the box diagonal (plane x + y + z = 3.5 versus corner sum 3).
  EXPECT_FALSE(box_triangle_overlap(box, Vec3(3.5, 0, 0), Vec3(0, 3.5, 0), Vec3(0, 0, 3.5)));
  EXPECT_TRUE(box_triangle_overlap(box, Vec3(2.9, 0, 0), Vec3(0, 2.9, 0), Vec3(0, 0, 2.9)));
}

TEST(SegmentTriangle, DistanceCases) {
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  EXPECT_NEAR(segment_triangle_distance(Vec3(0.2, 0.2, 1), Vec3(0.2, 0.2, 2), a, b, c), 1.0, 1e-12);
  EXPECT_NEAR(segment_triangle_distance(Vec3(0.2, 0.2, -1), Vec3(0.2, 0.2, 2), a, b, c), 0.0, 1e-12);
  EXPECT_NEAR(segment_triangle_distance(Vec3(2, 0, 0), Vec3(3, 0, 0), a, b, c), 1.0, 1e-12);
}

TEST(SurfaceSampling, CubeFaceCountsWithinTenPercent) {
  const auto cube = parse(kCubeObj).mesh;
  const auto samples = sample_surface(cube, 6000, 7);
  ASSERT_EQ(samples.size(), 6000u);
  std::map<std::tuple<int, int, int>, int> counts;
  double chi2 = 0.0;
  for (const auto& s : samples) {
    const Vec3 n = s.normal;
    ++counts[{static_cast<int>(std::lround(n.x())), static_cast<int>(std::lround(n.y())),
              static_cast<int>(std::lround(n.z()))}];
    EXPECT_NEAR(s.point.cwiseAbs().maxCoeff(), 0.5, 1e-12);
  }
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& [face, n] : counts) {
    EXPECT_NEAR(n, 1000, 100);
    chi2 += (n - 1000.0) * (n - 1000.0) / 1000.0;
  }
  EXPECT_LT(chi2, 20.5);  // 5 dof, p = 0.001
}

TEST(SurfaceSampling, DeterministicPerSeed) {
  const auto mesh = shapes::torus(0.05, 0.01);
  const auto a = sample_surface(mesh, 500, 3), b = sample_surface(mesh, 500, 3), c = sample_surface(mesh, 500, 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].point, b[i].point);
    EXPECT_EQ(a[i].normal, b[i].normal);
  }
  EXPECT_NE(a[0].point, c[0].point);
}

TEST(SurfaceSampling, SingleTriangleNormals) {
  TriangleMesh tri;
  tri.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 0, 1)};
  tri.triangles = {{0, 1, 2}};
  for (const auto& s : sample_surface(tri, 3, 1)) {
    EXPECT_LT((s.normal - Vec3(0, -1, 0)).norm(), 1e-12);
    EXPECT_NEAR(s.point.y(), 0.0, 1e-15);
  }
  EXPECT_THROW(sample_surface(tri, 0, 1), ValidationError);
}

TEST(Pose, CompositionAssociativeAndInverse) {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const Pose a(test::random_quat(rng), test::random_unit(rng)), b(test::random_quat(rng), test::random_unit(rng)),
        c(test::random_quat(rng), test::random_unit(rng));
    const Vec3 p = test::random_unit(rng);
    EXPECT_LT((((a * b) * c).apply(p) - (a * (b * c)).apply(p)).norm(), 1e-12);
    EXPECT_LT(((a * a.inverse()).apply(p) - p).norm(), 1e-12);
    EXPECT_NEAR(a.rotation.norm(), 1.0, 1e-9);
  }
}

TEST(ConvexHull, VolumeOfConvexAndConcaveShapes) {
  const auto box = shapes::box(Vec3(0.1, 0.2, 0.3));
  EXPECT_NEAR(convex_hull_volume(box), 0.006, 1e-12);
  const auto sphere = shapes::icosphere(0.05, 3);
  EXPECT_NEAR(convex_hull_volume(sphere), mesh_volume(sphere).volume, 1e-12);
  // Torus hull: the solid of revolution of the tube's outer profile, bounded by the cylinder.
  const double big = 0.04, small = 0.01;
  const auto torus = shapes::torus(big, small, 64, 32);
  const double hull = convex_hull_volume(torus);
  EXPECT_GT(hull, mesh_volume(torus).volume * 1.5);
  EXPECT_LT(hull, std::numbers::pi * (big + small) * (big + small) * 2 * small);
  // Heightfield with a hole: hull equals the full slab.
  shapes::HeightfieldSpec hf;
  hf.x0 = hf.y0 = -0.02;
  hf.x1 = hf.y1 = 0.02;
  hf.cell = 0.001;
  hf.height = [](double, double) { return 0.01; };
  hf.solid = [](double x, double y) { return std::hypot(x, y) > 0.008; };
  EXPECT_NEAR(convex_hull_volume(shapes::heightfield_slab(hf)), 0.04 * 0.04 * 0.01, 1e-12);
}
