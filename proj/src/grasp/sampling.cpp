#include "cluttergrasp/grasp/sampling.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "cluttergrasp/geometry/sampling.hpp"

namespace cluttergrasp {

using json = nlohmann::ordered_json;

std::vector<std::size_t> fps(const std::vector<Vec3>& points, std::size_t k, std::size_t start_index) {
  if (points.empty()) throw ValidationError("fps: empty point set");
  if (k > points.size()) {
    throw ValidationError("fps: k = " + std::to_string(k) + " exceeds point count " + std::to_string(points.size()));
  }
  if (start_index >= points.size()) throw ValidationError("fps: start index out of range");
  std::vector<std::size_t> out;
  if (k == 0) return out;
  out.reserve(k);
  std::vector<double> nearest(points.size(), std::numeric_limits<double>::infinity());
  std::vector<char> taken(points.size(), 0);
  std::size_t current = start_index;
  while (true) {
    out.push_back(current);
    taken[current] = 1;
    if (out.size() == k) break;
    std::size_t best = points.size();
    double best_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (taken[i]) continue;
      nearest[i] = std::min(nearest[i], (points[i] - points[current]).norm());
      if (nearest[i] > best_d) {
        best_d = nearest[i];
        best = i;
      }
    }
    current = best;
  }
  return out;
}

Mat3 normal_covariance(const std::vector<PointNormal>& samples, const Vec3& center, double radius) {
  Mat3 n = Mat3::Zero();
  int count = 0;
  for (const auto& s : samples) {
    if ((s.point - center).norm() > radius) continue;
    n += s.normal * s.normal.transpose();
    ++count;
  }
  if (count < 3) {
    throw InsufficientSupport("normal_covariance: " + std::to_string(count) + " samples within radius (need 3)");
  }
  return n;
}

namespace {

// Unit vector along the projection of `d` onto the plane orthogonal to `axis`; falls back to
// `alt` when `d` is (nearly) parallel to the axis.
Vec3 project_orthogonal(const Vec3& d, const Vec3& alt, const Vec3& axis) {
  Vec3 p = d - d.dot(axis) * axis;
  if (p.norm() < 1e-6) p = alt - alt.dot(axis) * axis;
  return p.normalized();
}

}  // namespace

DarbouxFrame darboux_frame(const std::vector<PointNormal>& samples, const PointNormal& t, double radius) {
  const Mat3 n = normal_covariance(samples, t.point, radius);
  Eigen::SelfAdjointEigenSolver<Mat3> es(n);
  const Vec3 lambda = es.eigenvalues();  // ascending
  const Mat3 e = es.eigenvectors();
  const double tol = 1e-9 * std::max(1.0, std::abs(lambda(2)));
  const bool top_tie = lambda(2) - lambda(1) <= tol;
  const bool low_tie = lambda(1) - lambda(0) <= tol;

  DarbouxFrame f;
  f.origin = t.point;
  f.degenerate = top_tie || low_tie;
  Vec3 v1, v2;
  if (!top_tie) {
    v1 = e.col(2);
  } else if (!low_tie) {
    // v1 is free within span(e1, e2): follow the query normal.
    Vec3 p = t.normal.dot(e.col(2)) * e.col(2) + t.normal.dot(e.col(1)) * e.col(1);
    v1 = p.norm() > 1e-9 ? p.normalized() : Vec3(e.col(2));
  } else {
    v1 = t.normal.normalized();
  }
  if (!low_tie) {
    v2 = top_tie ? v1.cross(e.col(0)).normalized() : Vec3(e.col(1));
  } else {
    v2 = project_orthogonal(Vec3::UnitX(), Vec3::UnitY(), v1);
  }
  v2 = (v2 - v2.dot(v1) * v1).normalized();
  if (v1.dot(t.normal) < 0.0) {
    // 180 degree turn about v3.
    v1 = -v1;
    v2 = -v2;
  }
  Vec3 v3 = v1.cross(v2);
  f.rotation.col(0) = v1;
  f.rotation.col(1) = v2;
  f.rotation.col(2) = v3;
  if (f.rotation.determinant() < 0.0) f.rotation.col(2) = -v3;
  return f;
}

std::vector<GraspCandidate> gen_parallel_grasps(const DarbouxFrame& frame, const GripperSpec& gripper, int n_roll,
                                                int n_standoff, int target) {
  if (n_roll < 1 || n_standoff < 1) throw ValidationError("gen_parallel_grasps: n_roll and n_standoff must be >= 1");
  std::vector<GraspCandidate> out;
  out.reserve(static_cast<std::size_t>(n_roll) * n_standoff);
  const Pose base = frame.pose();
  for (int j = 0; j < n_roll; ++j) {
    const double roll = 2.0 * std::numbers::pi * j / n_roll;
    const Pose rolled = base * Pose(Quat(Eigen::AngleAxisd(roll, Vec3::UnitX())), Vec3::Zero());
    for (int i = 0; i < n_standoff; ++i) {
      const double s = n_standoff == 1 ? 0.0 : gripper.finger_depth * i / (n_standoff - 1);
      GraspCandidate c;
      c.pose = rolled * Pose::translation_only(Vec3(-s, 0.0, 0.0));
      c.standoff = s;
      c.roll = roll;
      c.gripper = gripper.name;
      c.target_instance = target;
      out.push_back(std::move(c));
    }
  }
  return out;
}

SuctionCandidate gen_suction_grasp(const DarbouxFrame& frame, const SuctionCupSpec& cup, int target) {
  Mat3 r;
  r.col(0) = -frame.v1();
  r.col(1) = frame.v2();
  r.col(2) = -frame.v3();
  SuctionCandidate c;
  c.pose = Pose::from_matrix(r, frame.origin);
  c.cup = cup.name;
  c.target_instance = target;
  return c;
}

std::vector<DarbouxFrame> sample_frames(const TriangleMesh& world_mesh, const FrameSamplingParams& params,
                                        std::uint64_t seed) {
  const auto samples = sample_surface(world_mesh, params.surface_samples, seed);
  std::vector<Vec3> pts;
  pts.reserve(samples.size());
  for (const auto& s : samples) pts.push_back(s.point);
  const std::size_t k = std::min(params.fps_points, pts.size());
  std::vector<DarbouxFrame> frames;
  for (std::size_t idx : fps(pts, k, 0)) {
    try {
      frames.push_back(darboux_frame(samples, samples[idx], params.neighbourhood_radius));
    } catch (const InsufficientSupport&) {
    }
  }
  return frames;
}

namespace {

json pose_json(const Pose& p) {
  const Quat& q = p.rotation;
  const Vec3& t = p.translation;
  return {{"q", {q.w(), q.x(), q.y(), q.z()}}, {"t", {t.x(), t.y(), t.z()}}};
}

Pose pose_from(const json& j) {
  const auto q = j.at("q").get<std::vector<double>>();
  const auto t = j.at("t").get<std::vector<double>>();
  if (q.size() != 4 || t.size() != 3) throw ValidationError("candidate: pose must have q[4] and t[3]");
  Pose p;
  p.rotation = Quat(q[0], q[1], q[2], q[3]);
  p.translation = Vec3(t[0], t[1], t[2]);
  return p;
}

}  // namespace

std::string grasp_candidate_json(const GraspCandidate& c, const std::string& scene_path) {
  json j;
  j["kind"] = "jaw";
  j["scene"] = scene_path;
  j["target_instance"] = c.target_instance;
  j["gripper"] = c.gripper;
  j["pose"] = pose_json(c.pose);
  j["standoff"] = c.standoff;
  j["roll"] = c.roll;
  return j.dump();
}

std::string suction_candidate_json(const SuctionCandidate& c, const std::string& scene_path) {
  json j;
  j["kind"] = "suction";
  j["scene"] = scene_path;
  j["target_instance"] = c.target_instance;
  j["cup"] = c.cup;
  j["pose"] = pose_json(c.pose);
  return j.dump();
}

CandidateLine parse_candidate_json(const std::string& line) {
  CandidateLine out;
  try {
    const json j = json::parse(line);
    out.scene_path = j.value("scene", std::string());
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "jaw") {
      GraspCandidate c;
      c.pose = pose_from(j.at("pose"));
      c.standoff = j.at("standoff").get<double>();
      c.roll = j.at("roll").get<double>();
      c.gripper = j.at("gripper").get<std::string>();
      c.target_instance = j.at("target_instance").get<int>();
      out.grasp = c;
    } else if (kind == "suction") {
      SuctionCandidate c;
      c.pose = pose_from(j.at("pose"));
      c.cup = j.at("cup").get<std::string>();
      c.target_instance = j.at("target_instance").get<int>();
      out.suction = c;
    } else {
      throw ValidationError("candidate: unknown kind '" + kind + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("candidate: ") + e.what());
  }
  return out;
}

}  // namespace cluttergrasp
