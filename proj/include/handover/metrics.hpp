#pragma once

#include "handover/contacts.hpp"
#include "handover/ergonomics.hpp"
#include "handover/grasping.hpp"

#include <optional>
#include <span>
#include <vector>

namespace handover::metrics {

using contacts::ContactMap;
using ergonomics::HumanModel;
using grasping::GripperModel;
using voxelgeom::VoxelGrid;

constexpr double kDefaultSuccessThreshold = 0.5;
/// A visibility ray counts as reaching its contact when the first voxel hit
/// lies within this many voxel edges of the contact's center.
constexpr double kSelfTolerance = 1.5;

/// Object, gripper and robot as posed at the moment of handover.
struct HandoverScene {
  const VoxelGrid* grid = nullptr;
  Pose object_pose = Pose::Identity();   // object frame -> world
  Pose gripper_pose = Pose::Identity();  // world
  double gripper_width = 0.0;
  GripperModel gripper;
  std::optional<OrientedBox> robot_body;  // world
  HumanModel human;

  Vec3 contact_world(const Index3& i) const { return object_pose * grid->center(i); }
};

/// Robot body proxy: a box standing on the floor at `base`.
OrientedBox robot_body_box(const Vec3& base, const Vec3& forward, const Vec3& dims = Vec3(0.5, 0.5, 1.1));

/// Per-contact outcome of both metrics.
struct ContactVerdict {
  Index3 index;
  bool first_hit_is_target = false;  // not self-occluded
  bool unobstructed = false;         // not behind the gripper or robot body
  bool outside_gripper = false;      // not in the closing region
  double d1 = 0.0;                   // to the shoulder
  double d2 = 0.0;                   // horizontal, to the body axis
  bool within_reach = false;
  bool nearer_than_gripper = false;

  bool visible() const { return first_hit_is_target && unobstructed && outside_gripper; }
  bool reachable() const { return within_reach && nearer_than_gripper; }
};

/// Shortest horizontal distance from the body axis to the gripper surface,
/// sampled at the grid's voxel pitch.
double gripper_horizontal_distance(const HandoverScene& scene);

/// Verdicts for every voxel with CM(i) = 1, in index order.
std::vector<ContactVerdict> contact_verdicts(const HandoverScene& scene, const ContactMap& cm);

/// Weighted share of contacts visible from the eye point.
double visibility(const HandoverScene& scene, const ContactMap& cm);
/// Weighted share of contacts within arm reach and nearer to the body axis than the gripper.
double reachability(const HandoverScene& scene, const ContactMap& cm);

/// Lower median for even counts.
double lower_median(std::vector<double> values);

/// Both medians must strictly exceed k.
bool success(std::span<const double> visibility, std::span<const double> reachability, double k);

struct MetricScores {
  std::vector<double> visibility;
  std::vector<double> reachability;
  double visibility_median = 0.0;
  double reachability_median = 0.0;
};

MetricScores evaluate(const HandoverScene& scene, std::span<const ContactMap> maps);

}  // namespace handover::metrics
