#include "handover/delivery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace handover::delivery {

namespace {

// Relative tolerance for treating two objectives or angles as tied.
constexpr double kTieTolerance = 1e-9;

bool same_rotation(const Mat3& a, const Mat3& b) { return (a - b).cwiseAbs().maxCoeff() <= 1e-9; }

// Gripper axes expressed in the sample frame: closing axis -> +y, palm side
// (+z) -> -x, so the approach axis (-z) maps to +x.
Mat3 gripper_alignment() {
  Mat3 b;
  b.col(0) = Vec3(0.0, 1.0, 0.0);
  b.col(1) = Vec3(0.0, 0.0, -1.0);
  b.col(2) = Vec3(-1.0, 0.0, 0.0);
  return b;
}

}  // namespace

std::vector<OrientationSample> sample_orientations(double granularity_deg) {
  if (!(granularity_deg > 0.0)) throw Error("orientation granularity must be positive");
  const double steps = 360.0 / granularity_deg;
  if (std::abs(steps - std::round(steps)) > 1e-9) throw Error("orientation granularity must divide 360");
  const int n = static_cast<int>(std::lround(steps));

  std::vector<double> elevations;
  for (double e = -90.0; e <= 90.0 + 1e-9; e += granularity_deg) elevations.push_back(e);

  std::vector<OrientationSample> out;
  for (int a = 0; a < n; ++a) {
    for (double el : elevations) {
      for (int r = 0; r < n; ++r) {
        OrientationSample s;
        s.azimuth_deg = a * granularity_deg;
        s.elevation_deg = el;
        s.roll_deg = r * granularity_deg;
        s.rotation = (Eigen::AngleAxisd(deg_to_rad(s.azimuth_deg), Vec3::UnitZ()) *
                      Eigen::AngleAxisd(deg_to_rad(-s.elevation_deg), Vec3::UnitY()) *
                      Eigen::AngleAxisd(deg_to_rad(s.roll_deg), Vec3::UnitX()))
                         .toRotationMatrix();
        const bool duplicate = std::any_of(out.begin(), out.end(), [&](const OrientationSample& o) {
          return same_rotation(o.rotation, s.rotation);
        });
        if (!duplicate) out.push_back(s);
      }
    }
  }
  return out;
}

DeliveryContext DeliveryContext::make(const VoxelGrid& grid, const GripperModel& gripper, const Vec3& robot_to_human,
                                      double granularity_deg) {
  DeliveryContext ctx;
  ctx.grid = &grid;
  for (const auto& i : voxelgeom::surface_voxels(grid)) ctx.object_points.push_back(grid.center(i));
  ctx.gripper = gripper;
  ctx.robot_to_human = robot_to_human;
  ctx.granularity_deg = granularity_deg;
  return ctx;
}

Mat3 delivery_frame(const Vec3& robot_to_human) {
  Vec3 h = robot_to_human;
  h.z() = 0.0;
  if (h.norm() < 1e-12) throw Error("robot-to-human direction must have a horizontal component");
  h.normalize();
  Mat3 f;
  f.col(0) = h;
  f.col(1) = Vec3::UnitZ().cross(h);
  f.col(2) = Vec3::UnitZ();
  return f;
}

Pose gripper_pose_for(const Mat3& sample_rotation, const Vec3& ee_position, const Vec3& robot_to_human) {
  Pose pose = Pose::Identity();
  pose.linear() = delivery_frame(robot_to_human) * sample_rotation * gripper_alignment();
  pose.translation() = ee_position;
  return pose;
}

Pose object_pose_for(const Pose& gripper_world, const GraspCandidate& grasp) {
  return gripper_world * grasp.pose.inverse();
}

bool point_in_human(const Vec3& p, const HumanModel& human, double radius) {
  const Vec3 a = human.base_position;
  const Vec3 b = human.base_position + std::max(0.0, human.height - radius) * human.up();
  const Vec3 ab = b - a;
  const double t = ab.squaredNorm() > 0.0 ? std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm() < radius;
}

Feasibility check_feasibility(const Pose& gripper_world, const GraspCandidate& grasp, const HumanModel& human,
                              const DeliveryContext& context) {
  if (context.grid == nullptr) throw Error("delivery context has no object grid");
  Feasibility f;
  const Pose object_world = object_pose_for(gripper_world, grasp);
  const double r = context.limits.human_radius;
  for (const auto& p_obj : context.object_points) {
    const Vec3 p = object_world * p_obj;
    if (f.clear_of_human && point_in_human(p, human, r)) f.clear_of_human = false;
    if (f.above_clearance && p.z() < context.limits.min_object_height) f.above_clearance = false;
    if (!f.clear_of_human && !f.above_clearance) break;
  }
  if (f.clear_of_human) {
    const double pitch = context.grid->voxel_size();
    for (const auto& box : context.gripper.boxes_at(gripper_world, grasp.width)) {
      for (const auto& p : sample_box_surface(box, pitch)) {
        if (point_in_human(p, human, r)) {
          f.clear_of_human = false;
          break;
        }
      }
      if (!f.clear_of_human) break;
    }
  }
  const Vec3 approach = -gripper_world.linear().col(2);
  Vec3 h = context.robot_to_human;
  h.z() = 0.0;
  f.approach_in_cone = angle_between(approach, h) <= deg_to_rad(context.limits.max_approach_angle_deg) + 1e-12;
  return f;
}

bool feasible(const Pose& gripper_world, const GraspCandidate& grasp, const HumanModel& human,
              const DeliveryContext& context) {
  return check_feasibility(gripper_world, grasp, human, context).feasible();
}

double eye_distance_objective(const Pose& object_world, const ContactCluster& c_pred, const VoxelGrid& grid,
                              const Vec3& eye) {
  double total = 0.0;
  for (const auto& i : c_pred.members) total += (object_world * grid.center(i) - eye).norm();
  return total;
}

std::vector<OrientationCandidate> evaluate_orientations(const RankedGrasp& grasp, const ContactCluster& c_pred,
                                                        const HumanModel& human, const Vec3& ee_position,
                                                        const DeliveryContext& context) {
  if (c_pred.members.empty()) throw Error("empty contact cluster");
  if (context.grid == nullptr) throw Error("delivery context has no object grid");
  const auto samples = sample_orientations(context.granularity_deg);
  const Vec3 eye = human.eye_position();
  std::vector<OrientationCandidate> out;
  out.reserve(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    OrientationCandidate c;
    c.sample_index = k;
    c.sample = samples[k];
    c.gripper_pose = gripper_pose_for(samples[k].rotation, ee_position, context.robot_to_human);
    c.feasibility = check_feasibility(c.gripper_pose, grasp.candidate, human, context);
    if (c.feasible())
      c.objective = eye_distance_objective(object_pose_for(c.gripper_pose, grasp.candidate), c_pred, *context.grid, eye);
    out.push_back(std::move(c));
  }
  return out;
}

std::size_t select_orientation(const std::vector<OrientationCandidate>& candidates) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates)
    if (c.objective) best = std::min(best, *c.objective);
  if (!std::isfinite(best)) throw Error("no feasible handover orientation");

  const double tol = kTieTolerance * std::max(1.0, std::abs(best));
  std::size_t chosen = candidates.size();
  double chosen_angle = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto& c = candidates[k];
    if (!c.objective || *c.objective > best + tol) continue;
    const double angle = rotation_angle(c.sample.rotation);
    if (angle < chosen_angle - kTieTolerance) {
      chosen = k;
      chosen_angle = angle;
    }
  }
  return chosen;
}

HandoverPose make_handover_pose(const RankedGrasp& grasp, const ContactCluster& c_pred, const HumanModel& human,
                                const Vec3& ee_position, const DeliveryContext& context,
                                std::vector<OrientationCandidate> candidates, std::size_t chosen) {
  const auto& c = candidates.at(chosen);
  HandoverPose pose;
  pose.grasp = grasp;
  pose.sample_index = c.sample_index;
  pose.sample = c.sample;
  pose.ee_position = ee_position;
  pose.gripper_pose = c.gripper_pose;
  pose.object_pose = object_pose_for(c.gripper_pose, grasp.candidate);
  pose.object_rotation = c.gripper_pose.linear() * grasp.candidate.pose.linear().transpose();
  pose.objective = c.objective ? *c.objective
                               : eye_distance_objective(pose.object_pose, c_pred, *context.grid, human.eye_position());
  pose.candidates = std::move(candidates);
  return pose;
}

HandoverPose plan_handover_orientation(const RankedGrasp& grasp, const ContactCluster& c_pred,
                                       const HumanModel& human, const Vec3& ee_position,
                                       const DeliveryContext& context) {
  auto candidates = evaluate_orientations(grasp, c_pred, human, ee_position, context);
  const std::size_t chosen = select_orientation(candidates);
  return make_handover_pose(grasp, c_pred, human, ee_position, context, std::move(candidates), chosen);
}

}  // namespace handover::delivery
