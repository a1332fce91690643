#include "cluttergrasp/grasp/seal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace cluttergrasp {

SealModel build_seal_model(const SuctionCupSpec& cup, int rings, int vertices_per_ring) {
  if (!(cup.radius > 0.0) || !(cup.bellows_height > 0.0)) {
    throw ValidationError("seal model: cup radius and bellows height must be positive");
  }
  if (rings < 1 || vertices_per_ring < 3) throw ValidationError("seal model: need >= 1 ring and >= 3 vertices");
  SealModel m;
  m.rings = rings;
  m.vertices_per_ring = vertices_per_ring;
  m.radius = cup.radius;
  m.nominal_height = cup.bellows_height;
  m.vertices.reserve(static_cast<std::size_t>(rings) * vertices_per_ring);
  for (int k = 1; k <= rings; ++k) {
    const double r = cup.radius * k / rings;
    m.ring_radii.push_back(r);
    for (int j = 0; j < vertices_per_ring; ++j) {
      const double a = 2.0 * std::numbers::pi * j / vertices_per_ring;
      m.vertices.emplace_back(0.0, r * std::cos(a), r * std::sin(a));
    }
  }
  return m;
}

std::string to_string(SealFailure f) {
  switch (f) {
    case SealFailure::None: return "none";
    case SealFailure::RayMiss: return "ray_miss";
    case SealFailure::WrongInstance: return "wrong_instance";
    case SealFailure::DeformationExceeded: return "deformation_exceeded";
  }
  return "none";
}

namespace {

Ray seal_ray(const Pose& pose, const Vec3& vertex, double h) {
  const Vec3 axis = pose.apply_direction(Vec3::UnitX());
  return Ray{pose.apply(vertex) - h * axis, axis, 3.0 * h};
}

}  // namespace

SealEvaluation evaluate_seal(const SceneAccel& accel, const SuctionCandidate& cand, const SealModel& model) {
  const std::size_t n = model.size();
  const double h = model.nominal_height;
  SealEvaluation e;
  e.hit.assign(n, 0);
  e.hit_instance.assign(n, -1);
  e.deformation.assign(n, 0.0);
  e.hit_points.assign(n, Vec3::Zero());
  bool wrong = false, miss = false, deform = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto hit = accel.raycast(seal_ray(cand.pose, model.vertices[i], h));
    if (!hit) {
      miss = true;
      continue;
    }
    e.hit[i] = 1;
    e.hit_instance[i] = hit->instance_id;
    e.hit_points[i] = hit->point;
    e.deformation[i] = hit->distance - h;
    if (hit->instance_id != cand.target_instance) {
      wrong = true;
      continue;
    }
    e.max_deformation = std::max(e.max_deformation, std::abs(e.deformation[i]));
    if (std::abs(e.deformation[i]) > model.deformation_limit * h) deform = true;
  }
  e.failure = wrong    ? SealFailure::WrongInstance
              : miss   ? SealFailure::RayMiss
              : deform ? SealFailure::DeformationExceeded
                       : SealFailure::None;
  e.q_seal = e.failure == SealFailure::None;
  return e;
}

SealEvaluation evaluate_seal(const SceneGeometry& scene, const SuctionCandidate& cand, const SealModel& model) {
  if (!scene.accel()) {
    SealEvaluation e;
    e.hit.assign(model.size(), 0);
    e.hit_instance.assign(model.size(), -1);
    e.deformation.assign(model.size(), 0.0);
    e.hit_points.assign(model.size(), Vec3::Zero());
    e.failure = SealFailure::RayMiss;
    return e;
  }
  return evaluate_seal(*scene.accel(), cand, model);
}

Dexnet8Evaluation evaluate_seal_dexnet8(const SceneAccel& target_accel, const SuctionCandidate& cand,
                                        const SuctionCupSpec& cup, double strain_limit) {
  const double r = cup.radius;
  const double h = cup.bellows_height;
  Dexnet8Evaluation e;
  std::array<Vec3, 8> q;
  for (int j = 0; j < 8; ++j) {
    const double a = 2.0 * std::numbers::pi * j / 8;
    const auto hit = target_accel.raycast(seal_ray(cand.pose, Vec3(0.0, r * std::cos(a), r * std::sin(a)), h));
    if (!hit) return e;
    q[j] = hit->point;
  }
  e.all_hit = true;
  const Vec3 apex = cand.pose.apply(Vec3(-h, 0.0, 0.0));
  const double l_perimeter = 2.0 * r * std::sin(std::numbers::pi / 8);
  const double l_flexion = 2.0 * r * std::sin(std::numbers::pi / 4);
  const double l_cone = std::hypot(r, h);
  auto strain = [](double l, double l0) { return std::abs(l - l0) / l0; };
  for (int j = 0; j < 8; ++j) e.strains.push_back(strain((q[j] - q[(j + 1) % 8]).norm(), l_perimeter));
  for (int j = 0; j < 8; ++j) e.strains.push_back(strain((q[j] - q[(j + 2) % 8]).norm(), l_flexion));
  for (int j = 0; j < 8; ++j) e.strains.push_back(strain((q[j] - apex).norm(), l_cone));
  e.max_strain = *std::max_element(e.strains.begin(), e.strains.end());
  e.q_seal = e.max_strain <= strain_limit;
  return e;
}

}  // namespace cluttergrasp
