#pragma once

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace handover {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Pose = Eigen::Isometry3d;

/// Raised for precondition and data errors across the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Integer voxel coordinate. Ordering is lexicographic on (x, y, z), which is
/// the "lowest index" order used by every tie-break in the pipeline.
struct Index3 {
  int x = 0;
  int y = 0;
  int z = 0;

  auto operator<=>(const Index3&) const = default;
};

struct Index3Hash {
  std::size_t operator()(const Index3& i) const noexcept {
    std::size_t h = static_cast<std::size_t>(i.x) * 73856093u;
    h ^= static_cast<std::size_t>(i.y) * 19349663u;
    h ^= static_cast<std::size_t>(i.z) * 83492791u;
    return h;
  }
};

constexpr double kGravity = 9.81;

inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / M_PI; }

/// Angle between two (not necessarily unit) vectors in radians.
inline double angle_between(const Vec3& a, const Vec3& b) {
  const double denom = a.norm() * b.norm();
  if (denom == 0.0) return 0.0;
  return std::acos(std::clamp(a.dot(b) / denom, -1.0, 1.0));
}

/// Horizontal (xy) distance from p to the vertical line through axis_point.
inline double horizontal_distance(const Vec3& p, const Vec3& axis_point) {
  return (p - axis_point).head<2>().norm();
}

/// Slack for boundary tests on oriented boxes, meters.
constexpr double kContainTolerance = 1e-12;

/// Oriented box: `pose` maps box-local coordinates (box centered at the local
/// origin, axis aligned) into the parent frame.
struct OrientedBox {
  Pose pose = Pose::Identity();
  Vec3 half_extents = Vec3::Zero();

  /// Closed containment test. Points within kContainTolerance of a face count as inside.
  bool contains(const Vec3& p) const {
    const Vec3 local = pose.inverse() * p;
    return (local.array().abs() <= half_extents.array() + kContainTolerance).all();
  }

  /// Entry parameter of the ray origin + t*direction with t in [t_min, t_max],
  /// or nothing when the ray misses. An origin inside the box enters at t_min.
  /// Uses the same face slack as `contains`, so grazing a face counts as a hit.
  std::optional<double> intersect(const Vec3& origin, const Vec3& direction, double t_min,
                                  double t_max) const {
    const Pose inv = pose.inverse();
    const Vec3 o = inv * origin;
    const Vec3 d = inv.linear() * direction;
    double lo = t_min;
    double hi = t_max;
    for (int a = 0; a < 3; ++a) {
      const double h = half_extents[a] + kContainTolerance;
      if (d[a] == 0.0) {
        if (std::abs(o[a]) > h) return std::nullopt;
        continue;
      }
      double t0 = (-h - o[a]) / d[a];
      double t1 = (h - o[a]) / d[a];
      if (t0 > t1) std::swap(t0, t1);
      lo = std::max(lo, t0);
      hi = std::min(hi, t1);
      if (lo > hi) return std::nullopt;
    }
    return lo;
  }

  OrientedBox transformed(const Pose& parent) const { return {parent * pose, half_extents}; }
};

/// Points on the surface of `box` on a grid of spacing at most `pitch`,
/// including all corners and edges.
std::vector<Vec3> sample_box_surface(const OrientedBox& box, double pitch);

/// Rotation angle of R in radians, in [0, pi].
double rotation_angle(const Mat3& rotation);

/// Row-major 4x4 matrix as 16 doubles.
inline std::array<double, 16> to_row_major(const Pose& pose) {
  std::array<double, 16> out{};
  const Eigen::Matrix4d m = pose.matrix();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out[r * 4 + c] = m(r, c);
  return out;
}

inline Pose from_row_major(const std::array<double, 16>& v) {
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = v[r * 4 + c];
  Pose pose;
  pose.matrix() = m;
  return pose;
}

}  // namespace handover
