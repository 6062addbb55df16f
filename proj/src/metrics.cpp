#include "handover/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace handover::metrics {

OrientedBox robot_body_box(const Vec3& base, const Vec3& forward, const Vec3& dims) {
  Vec3 f = forward;
  f.z() = 0.0;
  if (f.norm() < 1e-12) f = Vec3::UnitX();
  f.normalize();
  OrientedBox box;
  box.pose = Pose::Identity();
  box.pose.linear().col(0) = f;
  box.pose.linear().col(1) = Vec3::UnitZ().cross(f);
  box.pose.linear().col(2) = Vec3::UnitZ();
  box.pose.translation() = base + Vec3(0.0, 0.0, 0.5 * dims.z());
  box.half_extents = 0.5 * dims;
  return box;
}

double gripper_horizontal_distance(const HandoverScene& scene) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& box : scene.gripper.boxes_at(scene.gripper_pose, scene.gripper_width))
    for (const auto& p : sample_box_surface(box, scene.grid->voxel_size()))
      best = std::min(best, horizontal_distance(p, scene.human.base_position));
  return best;
}

std::vector<ContactVerdict> contact_verdicts(const HandoverScene& scene, const ContactMap& cm) {
  if (scene.grid == nullptr) throw Error("handover scene has no object grid");
  if (!(cm.total_weight() > 0.0)) throw Error("empty contact map");
  const VoxelGrid& grid = *scene.grid;
  const double s = grid.voxel_size();
  const Vec3 eye = scene.human.eye_position();
  const Vec3 shoulder = scene.human.shoulder_position();
  const Vec3 eye_obj = scene.object_pose.inverse() * eye;
  const auto fingers = scene.gripper.boxes_at(scene.gripper_pose, scene.gripper_width);
  const auto closing = scene.gripper.closing_region_at(scene.gripper_pose, scene.gripper_width);
  const double gripper_d2 = gripper_horizontal_distance(scene);

  std::vector<ContactVerdict> out;
  for (const auto& i : cm.contact_indices()) {
    ContactVerdict v;
    v.index = i;
    const Vec3 target_obj = grid.center(i);
    const Vec3 target = scene.object_pose * target_obj;
    const double dist = (target - eye).norm();

    // Object self-occlusion, traced in the object frame.
    if (dist > 0.0) {
      const auto ray = voxelgeom::Ray::make(eye_obj, target_obj - eye_obj, dist + kSelfTolerance * s);
      const auto hit = voxelgeom::ray_cast(grid, ray);
      v.first_hit_is_target = !hit || (grid.center(hit->index) - target_obj).norm() <= kSelfTolerance * s;
    } else {
      v.first_hit_is_target = true;
    }

    v.unobstructed = true;
    if (dist > 0.0) {
      const Vec3 dir = (target - eye) / dist;
      auto blocks = [&](const OrientedBox& b) {
        const auto t = b.intersect(eye, dir, 0.0, dist);
        return t && *t < dist;
      };
      for (const auto& b : fingers)
        if (blocks(b)) v.unobstructed = false;
      if (scene.robot_body && blocks(*scene.robot_body)) v.unobstructed = false;
    }
    v.outside_gripper = !closing.contains(target);

    v.d1 = (target - shoulder).norm();
    v.d2 = horizontal_distance(target, scene.human.base_position);
    v.within_reach = v.d1 < scene.human.arm_length();
    v.nearer_than_gripper = v.d2 < gripper_d2;
    out.push_back(v);
  }
  return out;
}

namespace {

template <typename Pred>
double weighted_share(const std::vector<ContactVerdict>& verdicts, const ContactMap& cm, Pred pred) {
  double hit = 0.0;
  for (const auto& v : verdicts)
    if (pred(v)) hit += cm.label(v.index);
  return hit / cm.total_weight();
}

}  // namespace

double visibility(const HandoverScene& scene, const ContactMap& cm) {
  return weighted_share(contact_verdicts(scene, cm), cm, [](const ContactVerdict& v) { return v.visible(); });
}

double reachability(const HandoverScene& scene, const ContactMap& cm) {
  return weighted_share(contact_verdicts(scene, cm), cm, [](const ContactVerdict& v) { return v.reachable(); });
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw Error("median of an empty list");
  const std::size_t k = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
  return values[k];
}

bool success(std::span<const double> visibility, std::span<const double> reachability, double k) {
  if (visibility.empty() || reachability.empty()) throw Error("success needs at least one score");
  if (visibility.size() != reachability.size()) throw Error("visibility and reachability lists differ in length");
  if (!(k > 0.0 && k < 1.0)) throw Error("success threshold must lie in (0, 1)");
  const double v = lower_median({visibility.begin(), visibility.end()});
  const double r = lower_median({reachability.begin(), reachability.end()});
  return v > k && r > k;
}

MetricScores evaluate(const HandoverScene& scene, std::span<const ContactMap> maps) {
  if (maps.empty()) throw Error("no contact maps to evaluate");
  MetricScores scores;
  for (const auto& cm : maps) {
    const auto verdicts = contact_verdicts(scene, cm);
    scores.visibility.push_back(weighted_share(verdicts, cm, [](const ContactVerdict& v) { return v.visible(); }));
    scores.reachability.push_back(weighted_share(verdicts, cm, [](const ContactVerdict& v) { return v.reachable(); }));
  }
  scores.visibility_median = lower_median(scores.visibility);
  scores.reachability_median = lower_median(scores.reachability);
  return scores;
}

}  // namespace handover::metrics
