#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace cluttergrasp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

/// Thrown for malformed input (files, configs, arguments). The CLI maps it to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Returns `v` scaled to unit length; throws ValidationError on a zero vector.
Vec3 unit(const Vec3& v);

/// Rigid transform: rotation (unit quaternion) followed by translation.
struct Pose {
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();

  Pose() = default;
  Pose(const Quat& q, const Vec3& t) : rotation(q.normalized()), translation(t) {}

  static Pose identity() { return {}; }
  static Pose from_matrix(const Mat3& r, const Vec3& t) { return {Quat(r), t}; }
  static Pose translation_only(const Vec3& t) { return {Quat::Identity(), t}; }

  Mat3 matrix() const { return rotation.toRotationMatrix(); }
  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_direction(const Vec3& d) const { return rotation * d; }
  Pose inverse() const {
    const Quat inv = rotation.conjugate();
    return {inv, -(inv * translation)};
  }
  /// (a * b).apply(p) == a.apply(b.apply(p))
  Pose operator*(const Pose& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }
};

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();  // unit length
  double max_distance = std::numeric_limits<double>::infinity();

  Vec3 at(double t) const { return origin + t * direction; }
};

struct RayHit {
  double distance = 0.0;
  Vec3 point = Vec3::Zero();
  Vec3 face_normal = Vec3::UnitZ();
  int instance_id = -1;
  int triangle_index = -1;  // index within the instance mesh
};

struct PointNormal {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  int instance_id = -1;
};

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  bool empty() const { return (lo.array() > hi.array()).any(); }
  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  bool overlaps(const Aabb& b) const {
    return (lo.array() <= b.hi.array()).all() && (b.lo.array() <= hi.array()).all();
  }
  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extent() const { return hi - lo; }
};

/// Box with half extents `half` centred on `pose.translation`, axes from `pose.rotation`.
struct OrientedBox {
  Pose pose;
  Vec3 half = Vec3::Zero();

  Aabb bounds() const;
  bool contains(const Vec3& p, double tol = 0.0) const;
};

}  // namespace cluttergrasp
