#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cluttergrasp/grasp/grippers.hpp"

namespace cluttergrasp {

/// Fewer than three samples around a query point; callers skip the point.
class InsufficientSupport : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Greedy farthest point sampling. Each step picks the unselected point whose distance to the
/// nearest selected point is largest, lowest index first on ties.
/// Throws ValidationError if points is empty, k > |points| or start_index is out of range.
std::vector<std::size_t> fps(const std::vector<Vec3>& points, std::size_t k, std::size_t start_index = 0);

/// Sum of n n^T over the samples within `radius` of `center` (inclusive).
Mat3 normal_covariance(const std::vector<PointNormal>& samples, const Vec3& center, double radius);

struct DarbouxFrame {
  Vec3 origin = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();  // columns v1 (normal), v2 (major), v3 (minor)
  bool degenerate = false;           // repeated eigenvalue; tie resolved by the fixed rule

  Vec3 v1() const { return rotation.col(0); }
  Vec3 v2() const { return rotation.col(1); }
  Vec3 v3() const { return rotation.col(2); }
  Pose pose() const { return Pose::from_matrix(rotation, origin); }
};

/// Frame from the eigenvectors of the neighbourhood normal covariance, in decreasing
/// eigenvalue order, oriented so v1 agrees with t.normal and det = +1.
/// On repeated eigenvalues (relative gap <= 1e-9) v1 follows t.normal within the tied space
/// and v2 follows global +x (else +y) projected into the plane orthogonal to v1.
DarbouxFrame darboux_frame(const std::vector<PointNormal>& samples, const PointNormal& t, double radius);

struct GraspCandidate {
  Pose pose;  // gripper frame in world coordinates
  double standoff = 0.0;
  double roll = 0.0;
  std::string gripper;
  int target_instance = -1;
};

struct SuctionCandidate {
  Pose pose;  // cup frame in world coordinates
  std::string cup;
  int target_instance = -1;
};

/// n_roll x n_standoff candidates: pose = frame * Rx(roll) * T(-standoff X), rolls 2 pi j / n_roll,
/// standoffs d i / (n_standoff - 1) (0 when n_standoff == 1). Roll-major order.
std::vector<GraspCandidate> gen_parallel_grasps(const DarbouxFrame& frame, const GripperSpec& gripper, int n_roll,
                                                int n_standoff, int target);

/// Cup X = -v1, Y = v2, Z = -v3, rim centred on the frame origin.
SuctionCandidate gen_suction_grasp(const DarbouxFrame& frame, const SuctionCupSpec& cup, int target);

struct FrameSamplingParams {
  std::size_t surface_samples = 2000;
  std::size_t fps_points = 50;      // K
  double neighbourhood_radius = 0.01;
};

/// Surface sampling, FPS over the samples (starting at sample 0) and a Darboux frame at each
/// selected point. Points without enough support are skipped.
std::vector<DarbouxFrame> sample_frames(const TriangleMesh& world_mesh, const FrameSamplingParams& params,
                                        std::uint64_t seed);

/// NDJSON candidate lines. The scene path is stored so a candidate file is self-contained.
std::string grasp_candidate_json(const GraspCandidate& c, const std::string& scene_path);
std::string suction_candidate_json(const SuctionCandidate& c, const std::string& scene_path);

/// Either candidate kind read back from one NDJSON line.
struct CandidateLine {
  std::string scene_path;
  std::optional<GraspCandidate> grasp;
  std::optional<SuctionCandidate> suction;
};
CandidateLine parse_candidate_json(const std::string& line);

}  // namespace cluttergrasp
