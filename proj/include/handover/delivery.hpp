#pragma once

#include "handover/contacts.hpp"
#include "handover/ergonomics.hpp"
#include "handover/grasping.hpp"

#include <optional>
#include <vector>

namespace handover::delivery {

using contacts::ContactCluster;
using ergonomics::HumanModel;
using grasping::GraspCandidate;
using grasping::GripperModel;
using grasping::RankedGrasp;
using voxelgeom::VoxelGrid;

/// Sampled presentation rotation. `rotation` = Rz(azimuth) Ry(-elevation)
/// Rx(roll); it maps the delivery frame's +x onto the approach direction.
struct OrientationSample {
  Mat3 rotation = Mat3::Identity();
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  double roll_deg = 0.0;
};

/// Approach directions on an (azimuth, elevation) grid with rolls at the same
/// step. Later duplicates (the collapsed azimuths at the poles) are dropped;
/// order is azimuth, then elevation, then roll.
std::vector<OrientationSample> sample_orientations(double granularity_deg = 45.0);

struct FeasibilityLimits {
  double human_radius = 0.20;        // body capsule radius, m
  double min_object_height = 0.40;   // clearance above the floor, m
  double max_approach_angle_deg = 120.0;
};

/// Why a pose was accepted or rejected.
struct Feasibility {
  bool clear_of_human = true;
  bool above_clearance = true;
  bool approach_in_cone = true;

  bool feasible() const { return clear_of_human && above_clearance && approach_in_cone; }
};

/// Object-independent pieces of the delivery scene.
struct DeliveryContext {
  const VoxelGrid* grid = nullptr;
  std::vector<Vec3> object_points;  // surface voxel centers, object frame
  GripperModel gripper;
  Vec3 robot_to_human = -Vec3::UnitX();  // horizontal unit
  FeasibilityLimits limits;
  double granularity_deg = 45.0;

  static DeliveryContext make(const VoxelGrid& grid, const GripperModel& gripper, const Vec3& robot_to_human,
                              double granularity_deg = 45.0);
};

/// Frame with x along the robot-to-human direction and z up.
Mat3 delivery_frame(const Vec3& robot_to_human);

/// Gripper pose in the world for a sampled rotation, holding the grasp point
/// at `ee_position`.
Pose gripper_pose_for(const Mat3& sample_rotation, const Vec3& ee_position, const Vec3& robot_to_human);

/// Object-to-world transform given the gripper's world pose and the grasp.
Pose object_pose_for(const Pose& gripper_world, const GraspCandidate& grasp);

bool point_in_human(const Vec3& p, const HumanModel& human, double radius);

Feasibility check_feasibility(const Pose& gripper_world, const GraspCandidate& grasp, const HumanModel& human,
                              const DeliveryContext& context);

bool feasible(const Pose& gripper_world, const GraspCandidate& grasp, const HumanModel& human,
              const DeliveryContext& context);

/// Sum of distances from the cluster voxel centers to the eye point.
double eye_distance_objective(const Pose& object_world, const ContactCluster& c_pred, const VoxelGrid& grid,
                              const Vec3& eye);

struct OrientationCandidate {
  std::size_t sample_index = 0;
  OrientationSample sample;
  Pose gripper_pose = Pose::Identity();
  Feasibility feasibility;
  std::optional<double> objective;  // set only when feasible

  bool feasible() const { return feasibility.feasible(); }
};

struct HandoverPose {
  RankedGrasp grasp;
  std::size_t sample_index = 0;
  OrientationSample sample;
  Mat3 object_rotation = Mat3::Identity();  // about the held point
  Vec3 ee_position = Vec3::Zero();
  Pose gripper_pose = Pose::Identity();
  Pose object_pose = Pose::Identity();
  double objective = 0.0;
  std::vector<OrientationCandidate> candidates;
};

/// Feasibility and objective of every sampled rotation, in sample order.
std::vector<OrientationCandidate> evaluate_orientations(const RankedGrasp& grasp, const ContactCluster& c_pred,
                                                        const HumanModel& human, const Vec3& ee_position,
                                                        const DeliveryContext& context);

/// Index into `candidates` of the minimizing feasible rotation; objective ties
/// go to the smaller rotation angle from identity, then to sample order.
std::size_t select_orientation(const std::vector<OrientationCandidate>& candidates);

HandoverPose make_handover_pose(const RankedGrasp& grasp, const ContactCluster& c_pred, const HumanModel& human,
                                const Vec3& ee_position, const DeliveryContext& context,
                                std::vector<OrientationCandidate> candidates, std::size_t chosen);

HandoverPose plan_handover_orientation(const RankedGrasp& grasp, const ContactCluster& c_pred,
                                       const HumanModel& human, const Vec3& ee_position,
                                       const DeliveryContext& context);

}  // namespace handover::delivery
