#include <gtest/gtest.h>

#include <numbers>

#include <Eigen/Eigenvalues>

#include "cluttergrasp/geometry/sampling.hpp"
#include "cluttergrasp/grasp/sampling.hpp"
#include "test_util.hpp"

using namespace cluttergrasp;

namespace {

// Recomputes every min-distance from scratch at each step.
std::vector<std::size_t> fps_oracle(const std::vector<Vec3>& pts, std::size_t k, std::size_t start) {
  std::vector<std::size_t> sel{start};
  while (sel.size() < k) {
    std::size_t best = pts.size();
    double best_d = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (std::find(sel.begin(), sel.end(), i) != sel.end()) continue;
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t s : sel) d = std::min(d, (pts[i] - pts[s]).norm());
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    sel.push_back(best);
  }
  return sel;
}

void expect_valid_frame(const DarbouxFrame& f, const Vec3& normal) {
  EXPECT_LT((f.rotation.transpose() * f.rotation - Mat3::Identity()).norm(), 1e-6);
  EXPECT_NEAR(f.rotation.determinant(), 1.0, 1e-6);
  EXPECT_GE(f.v1().dot(normal), 0.0);
}

double angle_deg(const Vec3& a, const Vec3& b) {
  return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

DarbouxFrame flat_frame() {
  std::vector<PointNormal> s;
  for (int i = 0; i < 5; ++i) s.push_back({Vec3(0.001 * i, 0, 0), Vec3::UnitZ()});
  return darboux_frame(s, s[0], 0.01);
}

}  // namespace

TEST(Fps, SquareCorners) {
  const std::vector<Vec3> sq = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  EXPECT_EQ(fps(sq, 2, 0), (std::vector<std::size_t>{0, 3}));
  // Ties after {0, 3}: both 1 and 2 sit at distance 1, the lower index wins.
  EXPECT_EQ(fps(sq, 4, 0), (std::vector<std::size_t>{0, 3, 1, 2}));
}

TEST(Fps, AllPointsIsPermutation) {
  Rng rng(1);
  std::vector<Vec3> pts;
  for (int i = 0; i < 30; ++i) pts.push_back(test::random_unit(rng));
  auto sel = fps(pts, pts.size(), 5);
  EXPECT_EQ(sel, fps_oracle(pts, pts.size(), 5));
  std::sort(sel.begin(), sel.end());
  for (std::size_t i = 0; i < sel.size(); ++i) EXPECT_EQ(sel[i], i);
}

TEST(Fps, MatchesGreedyOracle) {
  Rng rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 256));
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < n; ++i) {
      // Integer grid coordinates produce plenty of exact ties.
      pts.emplace_back(rng.uniform_int(0, 6), rng.uniform_int(0, 6), rng.uniform_int(0, 2));
    }
    const std::size_t k = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(std::min<std::size_t>(n, 16))));
    const std::size_t start = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
    EXPECT_EQ(fps(pts, k, start), fps_oracle(pts, k, start)) << trial;
  }
}

TEST(Fps, Errors) {
  EXPECT_THROW(fps({}, 1, 0), ValidationError);
  EXPECT_THROW(fps({Vec3::Zero()}, 2, 0), ValidationError);
  EXPECT_THROW(fps({Vec3::Zero()}, 1, 1), ValidationError);
}

TEST(NormalCovariance, RankOneAndAdditive) {
  std::vector<PointNormal> up;
  for (int i = 0; i < 5; ++i) up.push_back({Vec3(0.001 * i, 0, 0), Vec3::UnitZ()});
  EXPECT_LT((normal_covariance(up, Vec3::Zero(), 0.01) - Vec3(0, 0, 5).asDiagonal().toDenseMatrix()).norm(), 1e-15);

  std::vector<PointNormal> split;
  for (int i = 0; i < 4; ++i) split.push_back({Vec3(0.001 * i, 0, 0), Vec3::UnitX()});
  for (int i = 0; i < 4; ++i) split.push_back({Vec3(0, 0.001 * i, 0), Vec3::UnitY()});
  EXPECT_LT((normal_covariance(split, Vec3::Zero(), 0.01) - Vec3(4, 4, 0).asDiagonal().toDenseMatrix()).norm(), 1e-15);
}

TEST(NormalCovariance, MatchesDirectSumAndRadiusIsInclusive) {
  Rng rng(3);
  std::vector<PointNormal> s;
  Mat3 direct = Mat3::Zero();
  for (int i = 0; i < 50; ++i) {
    const Vec3 n = test::random_unit(rng);
    s.push_back({0.001 * test::random_unit(rng), n});
    direct += n * n.transpose();
  }
  s.push_back({Vec3(1, 0, 0), Vec3::UnitX()});  // outside the radius
  const Mat3 n = normal_covariance(s, Vec3::Zero(), 0.01);
  EXPECT_LT((n - direct).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((n - n.transpose()).norm(), 1e-15);

  const std::vector<PointNormal> edge = {{Vec3(0.01, 0, 0), Vec3::UnitZ()},
                                         {Vec3(0, 0.01, 0), Vec3::UnitZ()},
                                         {Vec3(0, 0, 0.01), Vec3::UnitZ()}};
  EXPECT_NEAR(normal_covariance(edge, Vec3::Zero(), 0.01)(2, 2), 3.0, 1e-15);
  EXPECT_THROW(normal_covariance(edge, Vec3::Zero(), 0.009), InsufficientSupport);
}

TEST(Darboux, FlatPlaneFrame) {
  const auto f = flat_frame();
  expect_valid_frame(f, Vec3::UnitZ());
  EXPECT_LT((f.v1() - Vec3::UnitZ()).norm(), 1e-12);
  EXPECT_NEAR(f.v2().z(), 0.0, 1e-12);
  EXPECT_TRUE(f.degenerate);
  EXPECT_LT((f.v2() - Vec3::UnitX()).norm(), 1e-12) << "tie broken toward +x";
}

TEST(Darboux, CylinderSideMajorCurvature) {
  const double r = 0.05;
  const auto mesh = shapes::cylinder(r, 0.4, 256);
  const auto samples = sample_surface(mesh, 20000, 5);
  int checked = 0;
  for (const auto& t : samples) {
    if (std::abs(t.point.z()) > 0.1 || std::abs(t.normal.z()) > 0.5) continue;
    const auto f = darboux_frame(samples, t, 0.01);
    expect_valid_frame(f, t.normal);
    const Vec3 radial = Vec3(t.point.x(), t.point.y(), 0).normalized();
    EXPECT_LT(angle_deg(f.v1(), radial), 5.0);
    EXPECT_LT(std::abs(f.v2().z()), std::sin(5.0 * std::numbers::pi / 180.0));
    if (++checked == 50) break;
  }
  EXPECT_EQ(checked, 50);
}

TEST(Darboux, InwardDominantEigenvectorIsFlipped) {
  std::vector<PointNormal> s;
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const Vec3 n = (Vec3(0, 0, -1) + 0.2 * test::random_unit(rng)).normalized();
    s.push_back({0.002 * test::random_unit(rng), n});
  }
  const PointNormal t{Vec3::Zero(), Vec3::UnitZ()};
  const auto f = darboux_frame(s, t, 0.01);
  expect_valid_frame(f, t.normal);
  EXPECT_GT(f.v1().z(), 0.9);
}

TEST(Darboux, EquivariantUnderRotation) {
  Rng rng(6);
  int tested = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PointNormal> s;
    const Vec3 axis = test::random_unit(rng);
    for (int i = 0; i < 30; ++i) {
      Vec3 jitter = test::random_unit(rng);
      jitter.x() *= 0.6;
      jitter.y() *= 0.25;
      jitter.z() *= 0.05;
      s.push_back({0.003 * test::random_unit(rng), (axis + jitter).normalized()});
    }
    const Mat3 cov = normal_covariance(s, Vec3::Zero(), 0.01);
    Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
    const auto ev = es.eigenvalues();
    if (ev(1) - ev(0) < 1e-6 || ev(2) - ev(1) < 1e-6) continue;

    const Quat q = test::random_quat(rng);
    std::vector<PointNormal> rotated;
    for (const auto& p : s) rotated.push_back({q * p.point, q * p.normal});
    const auto f = darboux_frame(s, s[0], 0.01);
    const auto g = darboux_frame(rotated, rotated[0], 0.01);
    expect_valid_frame(g, rotated[0].normal);
    EXPECT_LT((g.v1() - q * f.v1()).norm(), 1e-6);
    ++tested;
  }
  EXPECT_GT(tested, 40);
}

TEST(Darboux, SphereNormalAgreement) {
  const double r = 0.05;
  const auto samples = sample_surface(shapes::icosphere(r, 4), 10000, 8);
  int good = 0, total = 0;
  for (std::size_t i = 0; i < samples.size(); i += 10) {
    const auto f = darboux_frame(samples, samples[i], 0.1 * r);
    expect_valid_frame(f, samples[i].normal);
    good += angle_deg(f.v1(), samples[i].point) < 5.0;
    ++total;
  }
  EXPECT_GE(good, static_cast<int>(0.99 * total));
}

TEST(ParallelGrasps, GridRollsAndStandoffs) {
  const auto f = flat_frame();
  const auto g = fetch_gripper();
  const auto cands = gen_parallel_grasps(f, g, 4, 2, 3);
  ASSERT_EQ(cands.size(), 8u);
  std::vector<double> rolls, standoffs;
  for (const auto& c : cands) {
    rolls.push_back(c.roll);
    standoffs.push_back(c.standoff);
    EXPECT_EQ(c.target_instance, 3);
    EXPECT_EQ(c.gripper, g.name);
    EXPECT_LT((c.pose.apply_direction(-Vec3::UnitX()) + f.v1()).norm(), 1e-9) << "approach anti-parallel to v1";
    EXPECT_LT((c.pose.translation - (f.origin - c.standoff * f.v1())).norm(), 1e-12);
    EXPECT_NEAR(c.pose.apply_direction(Vec3::UnitY()).dot(
                    std::cos(c.roll) * f.v2() + std::sin(c.roll) * f.v3()),
                1.0, 1e-9);
  }
  const double pi = std::numbers::pi;
  EXPECT_EQ(rolls, (std::vector<double>{0, 0, pi / 2, pi / 2, pi, pi, 3 * pi / 2, 3 * pi / 2}));
  EXPECT_EQ(standoffs, (std::vector<double>{0, g.finger_depth, 0, g.finger_depth, 0, g.finger_depth, 0, g.finger_depth}));
}

TEST(ParallelGrasps, SingleCandidate) {
  const auto cands = gen_parallel_grasps(flat_frame(), fetch_gripper(), 1, 1, 0);
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_EQ(cands[0].roll, 0.0);
  EXPECT_EQ(cands[0].standoff, 0.0);
}

TEST(SuctionGrasp, FlatAndSphereAndDeterminism) {
  const auto cup = suction_cup_15mm();
  const auto flat = gen_suction_grasp(flat_frame(), cup, 1);
  EXPECT_LT((flat.pose.apply_direction(Vec3::UnitX()) - Vec3(0, 0, -1)).norm(), 1e-12);
  EXPECT_LT(flat.pose.translation.norm(), 1e-15);
  EXPECT_EQ(flat.cup, cup.name);

  const auto samples = sample_surface(shapes::icosphere(0.05, 4), 5000, 9);
  for (std::size_t i = 0; i < samples.size(); i += 250) {
    const auto f = darboux_frame(samples, samples[i], 0.005);
    const auto a = gen_suction_grasp(f, cup, 0), b = gen_suction_grasp(f, cup, 0);
    EXPECT_LT(angle_deg(a.pose.apply_direction(Vec3::UnitX()), -samples[i].point), 5.0);
    EXPECT_LT((a.pose.translation - samples[i].point).norm(), 1e-15);
    EXPECT_EQ(a.pose.rotation.coeffs(), b.pose.rotation.coeffs());
  }
}

TEST(SampleFrames, CountAndDeterminism) {
  const auto box = shapes::box(Vec3(0.1, 0.08, 0.06));
  FrameSamplingParams p;
  const auto a = sample_frames(box, p, 4), b = sample_frames(box, p, 4);
  ASSERT_EQ(a.size(), p.fps_points);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].origin, b[i].origin);
    EXPECT_EQ(a[i].rotation, b[i].rotation);
    EXPECT_NEAR(a[i].rotation.determinant(), 1.0, 1e-9);
  }
  // A tiny sliver has too few neighbours for most points.
  p.surface_samples = 10;
  p.fps_points = 10;
  p.neighbourhood_radius = 1e-6;
  EXPECT_TRUE(sample_frames(box, p, 4).empty());
}

TEST(CandidateJson, RoundTrip) {
  const auto f = flat_frame();
  const auto g = gen_parallel_grasps(f, fetch_gripper(), 3, 3, 2)[5];
  const auto line = parse_candidate_json(grasp_candidate_json(g, "scenes/a.json"));
  ASSERT_TRUE(line.grasp);
  EXPECT_FALSE(line.suction);
  EXPECT_EQ(line.scene_path, "scenes/a.json");
  EXPECT_EQ(line.grasp->pose.translation, g.pose.translation);
  EXPECT_EQ(line.grasp->pose.rotation.coeffs(), g.pose.rotation.coeffs());
  EXPECT_EQ(line.grasp->roll, g.roll);
  EXPECT_EQ(line.grasp->standoff, g.standoff);
  EXPECT_EQ(line.grasp->target_instance, 2);

  const auto s = gen_suction_grasp(f, suction_cup_25mm(), 1);
  const auto sl = parse_candidate_json(suction_candidate_json(s, "x.json"));
  ASSERT_TRUE(sl.suction);
  EXPECT_EQ(sl.suction->cup, "suction_25mm");
  EXPECT_EQ(sl.suction->pose.rotation.coeffs(), s.pose.rotation.coeffs());
  EXPECT_THROW(parse_candidate_json("{\"kind\": \"spoon\"}"), ValidationError);
  EXPECT_THROW(parse_candidate_json("not json"), ValidationError);
}
