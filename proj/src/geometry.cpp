#include "handover/geometry.hpp"

namespace handover {

std::vector<Vec3> sample_box_surface(const OrientedBox& box, double pitch) {
  if (!(pitch > 0.0)) throw Error("sampling pitch must be positive");
  std::array<int, 3> steps{};
  for (int a = 0; a < 3; ++a)
    steps[a] = std::max(1, static_cast<int>(std::ceil(2.0 * box.half_extents[a] / pitch)));

  std::vector<Vec3> out;
  for (int i = 0; i <= steps[0]; ++i) {
    for (int j = 0; j <= steps[1]; ++j) {
      for (int k = 0; k <= steps[2]; ++k) {
        const bool on_face = i == 0 || i == steps[0] || j == 0 || j == steps[1] || k == 0 || k == steps[2];
        if (!on_face) continue;
        const Vec3 local(-box.half_extents.x() + 2.0 * box.half_extents.x() * i / steps[0],
                         -box.half_extents.y() + 2.0 * box.half_extents.y() * j / steps[1],
                         -box.half_extents.z() + 2.0 * box.half_extents.z() * k / steps[2]);
        out.push_back(box.pose * local);
      }
    }
  }
  return out;
}

double rotation_angle(const Mat3& rotation) {
  const Vec3 axis(rotation(2, 1) - rotation(1, 2), rotation(0, 2) - rotation(2, 0),
                  rotation(1, 0) - rotation(0, 1));
  return std::atan2(0.5 * axis.norm(), 0.5 * (rotation.trace() - 1.0));
}

}  // namespace handover
