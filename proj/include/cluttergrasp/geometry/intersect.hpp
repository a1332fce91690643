#pragma once

#include <optional>

#include "cluttergrasp/geometry/types.hpp"

namespace cluttergrasp {

/// Watertight ray/triangle test (Woop, Benthin & Wald 2013). Returns the ray parameter of the
/// hit in [0, ray.max_distance], or nothing. Edges shared by two triangles are reported by
/// at least one of them, so rays cannot leak between adjacent faces.
std::optional<double> ray_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c);

/// Classic Moller-Trumbore variant, kept as an independent cross-check for tests.
std::optional<double> ray_triangle_moller(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c);

/// Slab test; returns the entry parameter when the ray meets the box within [0, t_max].
std::optional<double> ray_aabb(const Vec3& origin, const Vec3& inv_dir, const Aabb& box, double t_max);

/// Separating-axis test between two closed triangles. Touching (zero separation) counts
/// as overlap.
bool triangles_overlap(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0, const Vec3& b1,
                       const Vec3& b2);

/// Solid oriented box versus triangle; touching counts.
bool box_triangle_overlap(const OrientedBox& box, const Vec3& a, const Vec3& b, const Vec3& c);

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Minimum distance between segment [p, q] and triangle abc (0 when they intersect).
double segment_triangle_distance(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace cluttergrasp
