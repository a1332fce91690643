#include "cluttergrasp/geometry/types.hpp"

namespace cluttergrasp {

Vec3 unit(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw ValidationError("cannot normalize a zero or non-finite vector");
  }
  return v / n;
}

Aabb OrientedBox::bounds() const {
  const Mat3 r = pose.matrix();
  const Vec3 reach = r.cwiseAbs() * half;
  return {pose.translation - reach, pose.translation + reach};
}

bool OrientedBox::contains(const Vec3& p, double tol) const {
  const Vec3 local = pose.rotation.conjugate() * (p - pose.translation);
  return (local.cwiseAbs().array() <= (half.array() + tol)).all();
}

}  // namespace cluttergrasp
