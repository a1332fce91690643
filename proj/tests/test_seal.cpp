#include <gtest/gtest.h>

#include <numbers>

#include "cluttergrasp/grasp/seal.hpp"
#include "cluttergrasp/pipeline/corner_corpus.hpp"
#include "test_util.hpp"

using namespace cluttergrasp;

namespace {

constexpr double kTop = 0.01;

// Cup pressing straight down onto (x, y, z), optionally tilted about world y.
SuctionCandidate top_candidate(const Vec3& at, double tilt = 0.0, double spin = 0.0) {
  Mat3 r;
  r.col(0) = -Vec3::UnitZ();
  r.col(1) = Vec3::UnitX();
  r.col(2) = r.col(0).cross(r.col(1));
  SuctionCandidate c;
  c.pose = Pose(Quat(Eigen::AngleAxisd(tilt, Vec3::UnitY())), Vec3::Zero()) * Pose::from_matrix(r, Vec3::Zero()) *
           Pose(Quat(Eigen::AngleAxisd(spin, Vec3::UnitX())), Vec3::Zero());
  c.pose.translation = at;
  c.cup = suction_cup_15mm().name;
  c.target_instance = 0;
  return c;
}

TriangleMesh plate_with_hole(double hole_radius, double half = 0.03) {
  shapes::HeightfieldSpec hf;
  hf.x0 = hf.y0 = -half;
  hf.x1 = hf.y1 = half;
  hf.cell = 0.0005;
  hf.height = [](double, double) { return kTop; };
  if (hole_radius > 0) hf.solid = [hole_radius](double x, double y) { return std::hypot(x, y) > hole_radius; };
  return shapes::heightfield_slab(hf);
}

struct Fixture {
  test::SceneBuilder builder;
  std::unique_ptr<SceneGeometry> geometry;

  explicit Fixture(TriangleMesh target) {
    builder.add(std::move(target));
    geometry = std::make_unique<SceneGeometry>(builder.geometry());
  }
  SealEvaluation seal(const SuctionCandidate& c, const SuctionCupSpec& cup = suction_cup_15mm()) const {
    return evaluate_seal(*geometry, c, build_seal_model(cup));
  }
  Dexnet8Evaluation dexnet(const SuctionCandidate& c, const SuctionCupSpec& cup = suction_cup_15mm()) const {
    return evaluate_seal_dexnet8(geometry->isolated_accel(0), c, cup);
  }
};

}  // namespace

TEST(SealModelBuild, RingsAndVertices) {
  for (const auto& cup : {suction_cup_15mm(), suction_cup_25mm()}) {
    const auto m = build_seal_model(cup);
    ASSERT_EQ(m.size(), 960u);
    ASSERT_EQ(m.ring_radii.size(), 15u);
    EXPECT_DOUBLE_EQ(m.ring_radii.back(), cup.radius);
    EXPECT_DOUBLE_EQ(m.nominal_height, cup.bellows_height);
    for (std::size_t k = 1; k < m.ring_radii.size(); ++k) EXPECT_GT(m.ring_radii[k], m.ring_radii[k - 1]);
    for (int k = 0; k < 15; ++k) {
      for (int j = 0; j < 64; ++j) {
        const Vec3& v = m.vertices[static_cast<std::size_t>(k * 64 + j)];
        EXPECT_EQ(v.x(), 0.0);
        EXPECT_NEAR(std::hypot(v.y(), v.z()), m.ring_radii[static_cast<std::size_t>(k)], 1e-15);
        const double angle = std::atan2(v.z(), v.y());
        double expected = 2.0 * std::numbers::pi * j / 64.0;
        if (expected > std::numbers::pi) expected -= 2.0 * std::numbers::pi;
        EXPECT_NEAR(angle, expected, 1e-12);
      }
    }
  }
  EXPECT_DOUBLE_EQ(build_seal_model(suction_cup_15mm()).ring_radii.back(), 0.015);
  EXPECT_DOUBLE_EQ(build_seal_model(suction_cup_25mm()).ring_radii.back(), 0.025);
}

TEST(Seal, FlatPlateSeals) {
  const Fixture f(shapes::box(Vec3(-0.05, -0.05, 0), Vec3(0.05, 0.05, kTop)));
  const auto e = f.seal(top_candidate({0, 0, kTop}));
  EXPECT_TRUE(e.q_seal);
  EXPECT_EQ(e.failure, SealFailure::None);
  for (std::size_t i = 0; i < e.deformation.size(); ++i) {
    EXPECT_TRUE(e.hit[i]);
    EXPECT_EQ(e.hit_instance[i], 0);
    EXPECT_NEAR(e.deformation[i], 0.0, 1e-6);
  }
  const auto d = f.dexnet(top_candidate({0, 0, kTop}));
  EXPECT_TRUE(d.q_seal);
  EXPECT_EQ(d.strains.size(), 24u);
  EXPECT_NEAR(d.max_strain, 0.0, 1e-9);
}

TEST(Seal, CentredHoleIsRayMissButDexnetPasses) {
  const double r = suction_cup_15mm().radius;
  const Fixture f(plate_with_hole(0.5 * r));
  const auto c = top_candidate({0, 0, kTop});
  const auto e = f.seal(c);
  EXPECT_FALSE(e.q_seal);
  EXPECT_EQ(e.failure, SealFailure::RayMiss);
  EXPECT_TRUE(f.dexnet(c).q_seal) << "false positive by design";
}

TEST(Seal, LargeHoleFailsDexnet) {
  const double r = suction_cup_15mm().radius;
  const Fixture f(plate_with_hole(1.2 * r));
  const auto d = f.dexnet(top_candidate({0, 0, kTop}));
  EXPECT_FALSE(d.q_seal);
  EXPECT_FALSE(d.all_hit);
}

TEST(Seal, StepUnderHalfTheCupExceedsDeformation) {
  const auto cup = suction_cup_15mm();
  TriangleMesh m = shapes::box(Vec3(-0.05, -0.05, 0), Vec3(0.05, 0.05, kTop));
  append(m, shapes::box(Vec3(0.0, -0.05, kTop), Vec3(0.05, 0.05, kTop + 0.2 * cup.bellows_height)));
  const Fixture f(std::move(m));
  const auto e = f.seal(top_candidate({0, 0, kTop}));
  EXPECT_FALSE(e.q_seal);
  EXPECT_EQ(e.failure, SealFailure::DeformationExceeded);
  EXPECT_NEAR(e.max_deformation, 0.2 * cup.bellows_height, 1e-9);
}

TEST(Seal, NeighbourUnderFootprintIsWrongInstance) {
  test::SceneBuilder b;
  b.add(shapes::box(Vec3(-0.05, -0.05, 0), Vec3(0.005, 0.05, kTop)));
  b.add(shapes::box(Vec3(0.005, -0.05, 0), Vec3(0.05, 0.05, kTop)));
  const auto g = b.geometry();
  const auto e = evaluate_seal(g, top_candidate({0, 0, kTop}), build_seal_model(suction_cup_15mm()));
  EXPECT_FALSE(e.q_seal);
  EXPECT_EQ(e.failure, SealFailure::WrongInstance);
  EXPECT_TRUE(evaluate_seal_dexnet8(g.isolated_accel(0), top_candidate({0, 0, kTop}), suction_cup_15mm()).q_seal ==
              false)
      << "isolated target ends before the outer ring on one side";
}

TEST(Seal, OffsetPastPlateEdgeMisses) {
  const Fixture f(shapes::box(Vec3(-0.05, -0.05, 0), Vec3(0.05, 0.05, kTop)));
  EXPECT_EQ(f.seal(top_candidate({0.045, 0, kTop})).failure, SealFailure::RayMiss);
}

TEST(Seal, DominanceOverDexnet8) {
  const auto cup = suction_cup_15mm();
  std::vector<std::unique_ptr<Fixture>> fixtures;
  fixtures.push_back(std::make_unique<Fixture>(shapes::box(Vec3(-0.05, -0.05, 0), Vec3(0.05, 0.05, kTop))));
  fixtures.push_back(std::make_unique<Fixture>(plate_with_hole(0.004)));
  {
    shapes::HeightfieldSpec hf;
    hf.x0 = hf.y0 = -0.04;
    hf.x1 = hf.y1 = 0.04;
    hf.cell = 0.0005;
    hf.height = [](double x, double y) { return kTop + 0.0015 * std::sin(200 * x) * std::cos(150 * y); };
    fixtures.push_back(std::make_unique<Fixture>(shapes::heightfield_slab(hf)));
  }
  fixtures.push_back(std::make_unique<Fixture>(shapes::icosphere(0.06, 4)));
  Rng rng(10);
  int seal_pass = 0, total = 0;
  for (const auto& f : fixtures) {
    const bool sphere = f.get() == fixtures.back().get();
    for (int i = 0; i < 60; ++i) {
      SuctionCandidate c;
      if (sphere) {
        const Vec3 n = test::random_unit(rng);
        c = top_candidate(Vec3::Zero());
        const Quat align = Quat::FromTwoVectors(Vec3::UnitZ(), n);
        c.pose = Pose(align, 0.06 * n) * Pose(c.pose.rotation, Vec3::Zero());
      } else {
        c = top_candidate({rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01), kTop}, rng.uniform(-0.08, 0.08),
                          rng.uniform(0, 2 * std::numbers::pi));
      }
      const bool s = f->seal(c, cup).q_seal;
      const bool d = f->dexnet(c, cup).q_seal;
      if (s) EXPECT_TRUE(d);
      seal_pass += s;
      ++total;
    }
  }
  EXPECT_GT(seal_pass, 20);
  EXPECT_LT(seal_pass, total);
}

TEST(Seal, EnlargingHoleNeverFlipsFailToPass) {
  const double r = suction_cup_15mm().radius;
  bool failed = false;
  for (double frac : {0.0, 0.02, 0.05, 0.1, 0.3, 0.5, 0.8, 1.0, 1.2, 1.5}) {
    const Fixture f(plate_with_hole(frac * r));
    const bool pass = f.seal(top_candidate({0, 0, kTop})).q_seal;
    if (failed) EXPECT_FALSE(pass) << frac;
    failed = failed || !pass;
  }
  EXPECT_TRUE(failed);
}

TEST(Seal, DiscreteRotationSymmetry) {
  const double step = 2.0 * std::numbers::pi / 64.0;
  const double r = suction_cup_15mm().radius;
  std::vector<std::unique_ptr<Fixture>> fixtures;
  fixtures.push_back(std::make_unique<Fixture>(plate_with_hole(0.0)));
  fixtures.push_back(std::make_unique<Fixture>(plate_with_hole(0.5 * r)));
  fixtures.push_back(std::make_unique<Fixture>(transformed(shapes::cylinder(0.012, kTop, 64), Pose::translation_only({0, 0, kTop / 2}))));
  for (const auto& f : fixtures) {
    for (double spin : {0.0, 0.3}) {
      const auto a = f->seal(top_candidate({0, 0, kTop}, 0.0, spin));
      const auto b = f->seal(top_candidate({0, 0, kTop}, 0.0, spin + step));
      EXPECT_EQ(a.q_seal, b.q_seal);
      EXPECT_EQ(a.failure, b.failure);
    }
  }
}

TEST(Seal, CornerCorpusOutcomes) {
  const auto cases = build_corner_cases();
  ASSERT_EQ(cases.size(), 6u);
  for (const auto& c : cases) {
    const SceneGeometry g(c.scene, c.assets);
    const auto cup = cup_by_name(c.candidate.cup);
    const auto e = evaluate_seal(g, c.candidate, build_seal_model(cup));
    EXPECT_FALSE(e.q_seal) << c.name;
    EXPECT_EQ(e.failure, c.expected_failure) << c.name;
    EXPECT_EQ(evaluate_seal_dexnet8(g.isolated_accel(c.candidate.target_instance), c.candidate, cup).q_seal,
              c.expected_dexnet8)
        << c.name;
  }
  std::vector<bool> dexnet;
  for (const auto& c : cases) dexnet.push_back(c.expected_dexnet8);
  EXPECT_EQ(dexnet, (std::vector<bool>{true, false, true, true, false, true}));
}
