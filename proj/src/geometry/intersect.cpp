#include "cluttergrasp/geometry/intersect.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cluttergrasp {

std::optional<double> ray_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3& dir = ray.direction;
  int kz = 0;
  dir.cwiseAbs().maxCoeff(&kz);
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  if (dir[kz] < 0.0) std::swap(kx, ky);
  const double sx = dir[kx] / dir[kz];
  const double sy = dir[ky] / dir[kz];
  const double sz = 1.0 / dir[kz];

  const Vec3 pa = a - ray.origin;
  const Vec3 pb = b - ray.origin;
  const Vec3 pc = c - ray.origin;
  const double ax = pa[kx] - sx * pa[kz];
  const double ay = pa[ky] - sy * pa[kz];
  const double bx = pb[kx] - sx * pb[kz];
  const double by = pb[ky] - sy * pb[kz];
  const double cx = pc[kx] - sx * pc[kz];
  const double cy = pc[ky] - sy * pc[kz];

  double u = cx * by - cy * bx;
  double v = ax * cy - ay * cx;
  double w = bx * ay - by * ax;
  if (u == 0.0 || v == 0.0 || w == 0.0) {
    // Edge hit: re-evaluate the edge functions in extended precision.
    using ld = long double;
    u = static_cast<double>(ld(cx) * ld(by) - ld(cy) * ld(bx));
    v = static_cast<double>(ld(ax) * ld(cy) - ld(ay) * ld(cx));
    w = static_cast<double>(ld(bx) * ld(ay) - ld(by) * ld(ax));
  }
  if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return std::nullopt;
  const double det = u + v + w;
  if (det == 0.0) return std::nullopt;

  const double az = sz * pa[kz];
  const double bz = sz * pb[kz];
  const double cz = sz * pc[kz];
  const double t = (u * az + v * bz + w * cz) / det;
  if (!(t >= 0.0) || t > ray.max_distance) return std::nullopt;
  return t;
}

std::optional<double> ray_triangle_moller(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = ray.direction.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-300) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = ray.origin - a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = ray.direction.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (t < 0.0 || t > ray.max_distance) return std::nullopt;
  return t;
}

std::optional<double> ray_aabb(const Vec3& origin, const Vec3& inv_dir, const Aabb& box, double t_max) {
  double t0 = 0.0;
  double t1 = t_max;
  for (int k = 0; k < 3; ++k) {
    double near = (box.lo[k] - origin[k]) * inv_dir[k];
    double far = (box.hi[k] - origin[k]) * inv_dir[k];
    if (std::isnan(near) || std::isnan(far)) {
      // 0 * inf: ray parallel to the slab and origin on its boundary.
      if (origin[k] < box.lo[k] || origin[k] > box.hi[k]) return std::nullopt;
      continue;
    }
    if (near > far) std::swap(near, far);
    // Conservative widening keeps boundary-grazing rays inside (robust traversal).
    far *= 1.0 + 4e-16 * 2;
    t0 = std::max(t0, near);
    t1 = std::min(t1, far);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

namespace {

struct Interval {
  double lo, hi;
};

Interval project(const Vec3& axis, const Vec3& a, const Vec3& b, const Vec3& c) {
  const double pa = axis.dot(a), pb = axis.dot(b), pc = axis.dot(c);
  return {std::min({pa, pb, pc}), std::max({pa, pb, pc})};
}

bool separated_on(const Vec3& axis, const std::array<Vec3, 3>& s, const std::array<Vec3, 3>& t) {
  const Interval i = project(axis, s[0], s[1], s[2]);
  const Interval j = project(axis, t[0], t[1], t[2]);
  return i.hi < j.lo || j.hi < i.lo;
}

}  // namespace

bool triangles_overlap(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0, const Vec3& b1,
                       const Vec3& b2) {
  const std::array<Vec3, 3> s{a0, a1, a2};
  const std::array<Vec3, 3> t{b0, b1, b2};
  const std::array<Vec3, 3> es{a1 - a0, a2 - a1, a0 - a2};
  const std::array<Vec3, 3> et{b1 - b0, b2 - b1, b0 - b2};
  const Vec3 ns = es[0].cross(es[1]);
  const Vec3 nt = et[0].cross(et[1]);
  if (separated_on(ns, s, t) || separated_on(nt, s, t)) return false;

  const double len_scale = std::max({es[0].squaredNorm(), es[1].squaredNorm(), es[2].squaredNorm(),
                                     et[0].squaredNorm(), et[1].squaredNorm(), et[2].squaredNorm()});
  const double tiny = 1e-20 * len_scale * len_scale;
  bool any_cross = false;
  for (const auto& ei : es) {
    for (const auto& ej : et) {
      const Vec3 axis = ei.cross(ej);
      if (axis.squaredNorm() <= tiny) continue;
      any_cross = true;
      if (separated_on(axis, s, t)) return false;
    }
  }
  if (ns.cross(nt).squaredNorm() <= 1e-20 * ns.squaredNorm() * nt.squaredNorm() || !any_cross) {
    // Coplanar: in-plane edge normals complete the axis set.
    for (const auto& e : es) {
      if (separated_on(ns.cross(e), s, t)) return false;
    }
    for (const auto& e : et) {
      if (separated_on(ns.cross(e), s, t)) return false;
    }
  }
  return true;
}

bool box_triangle_overlap(const OrientedBox& box, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Quat inv = box.pose.rotation.conjugate();
  const std::array<Vec3, 3> v{inv * (a - box.pose.translation), inv * (b - box.pose.translation),
                              inv * (c - box.pose.translation)};
  const Vec3& h = box.half;
  auto box_radius = [&](const Vec3& axis) { return h.dot(axis.cwiseAbs()); };
  auto separated = [&](const Vec3& axis) {
    const Interval i = project(axis, v[0], v[1], v[2]);
    const double r = box_radius(axis);
    return i.lo > r || i.hi < -r;
  };
  for (int k = 0; k < 3; ++k) {
    if (separated(Vec3::Unit(k))) return false;
  }
  const std::array<Vec3, 3> e{v[1] - v[0], v[2] - v[1], v[0] - v[2]};
  const Vec3 n = e[0].cross(e[1]);
  if (separated(n)) return false;
  for (const auto& edge : e) {
    for (int k = 0; k < 3; ++k) {
      const Vec3 axis = Vec3::Unit(k).cross(edge);
      if (axis.squaredNorm() == 0.0) continue;
      if (separated(axis)) return false;
    }
  }
  return true;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

namespace {

double segment_segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2) {
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= 1e-300 && e <= 1e-300) return r.norm();
  if (a <= 1e-300) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 1e-300) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p1 + d1 * s) - (p2 + d2 * t)).norm();
}

}  // namespace

double segment_triangle_distance(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c) {
  Ray ray;
  const Vec3 d = q - p;
  const double len = d.norm();
  if (len > 0.0) {
    ray.origin = p;
    ray.direction = d / len;
    ray.max_distance = len;
    if (ray_triangle(ray, a, b, c)) return 0.0;
  }
  double best = std::min((p - closest_point_on_triangle(p, a, b, c)).norm(),
                         (q - closest_point_on_triangle(q, a, b, c)).norm());
  best = std::min(best, segment_segment_distance(p, q, a, b));
  best = std::min(best, segment_segment_distance(p, q, b, c));
  best = std::min(best, segment_segment_distance(p, q, c, a));
  return best;
}

}  // namespace cluttergrasp
