#pragma once

#include <string>
#include <vector>

#include "cluttergrasp/grasp/sampling.hpp"
#include "cluttergrasp/scene/scene.hpp"

namespace cluttergrasp {

/// Concentric-ring discretization of the cup contact disc, in the cup frame (rim plane x = 0).
struct SealModel {
  int rings = 15;
  int vertices_per_ring = 64;
  std::vector<double> ring_radii;  // r_k = radius k / rings, k = 1..rings
  double radius = 0.0;
  double nominal_height = 0.0;     // bellows height h
  double deformation_limit = 0.1;  // fraction of h
  std::vector<Vec3> vertices;      // ring-major: index = (k - 1) * vertices_per_ring + j

  std::size_t size() const { return vertices.size(); }
};

SealModel build_seal_model(const SuctionCupSpec& cup, int rings = 15, int vertices_per_ring = 64);

enum class SealFailure { None, RayMiss, WrongInstance, DeformationExceeded };
std::string to_string(SealFailure f);

struct SealEvaluation {
  std::vector<char> hit;                // per vertex
  std::vector<int> hit_instance;        // -1 on miss
  std::vector<double> deformation;      // signed; + means the surface lies beyond the rim plane
  std::vector<Vec3> hit_points;         // world frame, zero on miss
  bool q_seal = false;
  SealFailure failure = SealFailure::None;
  double max_deformation = 0.0;         // largest |deformation| over target hits
};

/// One ray per vertex along the cup approach axis (+X of the cup frame). Rays start h behind the
/// rim plane so surfaces raised toward the cup are seen, and reach 2h past it. Passes iff every
/// ray first hits the target and every |deformation| <= deformation_limit * h.
/// Failure precedence: wrong instance, then miss, then deformation.
SealEvaluation evaluate_seal(const SceneAccel& accel, const SuctionCandidate& cand, const SealModel& model);
SealEvaluation evaluate_seal(const SceneGeometry& scene, const SuctionCandidate& cand, const SealModel& model);

/// Per-spring strains of the 8-vertex perimeter/flexion/cone spring model.
struct Dexnet8Evaluation {
  bool q_seal = false;
  bool all_hit = false;
  double max_strain = 0.0;
  std::vector<double> strains;  // 8 perimeter, 8 flexion, 8 cone
};

/// Eight outer-ring vertices at 2 pi j / 8 are projected onto the surface by the same ray cast;
/// passes iff all hit and every spring strain |l - l0| / l0 <= strain_limit. `target_accel` should
/// hold the isolated target only.
Dexnet8Evaluation evaluate_seal_dexnet8(const SceneAccel& target_accel, const SuctionCandidate& cand,
                                        const SuctionCupSpec& cup, double strain_limit = 0.10);

}  // namespace cluttergrasp
