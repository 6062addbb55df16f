#pragma once

#include "handover/geometry.hpp"

#include <vector>

namespace handover::ergonomics {

/// Standing receiver with a planar right arm. Lengths in meters, masses in kg.
struct HumanModel {
  double height = 1.7;
  Vec3 base_position = Vec3::Zero();  // ground point under the body axis
  Vec3 facing = Vec3::UnitX();        // unit, horizontal
  double shoulder_height_fraction = 0.82;
  double waist_height_fraction = 0.60;
  double upper_arm_length = 0.176 * 1.7;
  double forearm_length = 0.206 * 1.7;
  double upper_arm_mass = 2.1;
  double forearm_mass = 1.2;
  double hand_mass = 0.5;
  double head_height = 0.13 * 1.7;
  double arm_plane_offset = 0.18;  // right-arm plane, lateral from the body axis

  /// Anthropometric defaults scaled to `height`.
  static HumanModel standard(double height, const Vec3& base = Vec3::Zero(), const Vec3& facing = Vec3::UnitX());

  void validate() const;

  double arm_length() const { return upper_arm_length + forearm_length; }
  double shoulder_height() const { return shoulder_height_fraction * height; }
  double waist_height() const { return waist_height_fraction * height; }
  double eye_height() const { return height - 0.5 * head_height; }

  Vec3 up() const { return Vec3::UnitZ(); }
  Vec3 right() const { return facing.cross(up()).normalized(); }
  Vec3 shoulder_position() const;
  /// Eye point on the body axis.
  Vec3 eye_position() const;

  bool operator==(const HumanModel&) const = default;
};

/// Shoulder flexion (0 = hanging, positive = forward raise) and elbow flexion
/// (0 = straight), degrees.
struct ArmConfig {
  double shoulder_deg = 0.0;
  double elbow_deg = 0.0;

  bool operator==(const ArmConfig&) const = default;
};

constexpr double kShoulderMaxDeg = 135.0;
constexpr double kElbowMaxDeg = 140.0;
constexpr double kShoulderMidDeg = 67.5;
constexpr double kElbowMidDeg = 62.5;

struct JointTorques {
  double shoulder = 0.0;
  double elbow = 0.0;
};

struct ErgonomicCandidate {
  ArmConfig config;
  Vec3 hand_position = Vec3::Zero();
  double torque_raw = 0.0;  // sum of squared joint torques
  double disp_raw = 0.0;    // sum of squared deviations from mid-range, deg^2
  double f_torque = 0.0;
  double f_disp = 0.0;
  double f_total = 0.0;
};

struct PositionPlan {
  Vec3 position = Vec3::Zero();
  ErgonomicCandidate winner;
  std::vector<ErgonomicCandidate> candidates;  // height-feasible set, grid order
  double torque_max = 0.0;
  double disp_max = 0.0;
};

Vec3 forward_kinematics(const ArmConfig& config, const HumanModel& human);
Vec3 elbow_position(const ArmConfig& config, const HumanModel& human);

/// Static gravity torque magnitudes at shoulder and elbow.
JointTorques joint_torques(const ArmConfig& config, double object_mass, const HumanModel& human);

double displacement_cost(const ArmConfig& config);

/// Sweeps both joints on a `granularity_deg` grid, keeps hand positions
/// strictly between waist and shoulder height, normalizes both costs by their
/// maxima over the kept set and returns the minimizer of
/// (1 - alpha) * f_torque + alpha * f_disp. Ties go to lower f_torque, then
/// lower shoulder angle, then lower elbow angle.
PositionPlan plan_handover_position(const HumanModel& human, double object_mass, double alpha,
                                    double granularity_deg = 5.0);

/// Strict total order used by the argmin.
bool better_candidate(const ErgonomicCandidate& a, const ErgonomicCandidate& b);

constexpr double kDefaultAlpha = 0.5;
constexpr double kDefaultObjectMass = 0.5;

}  // namespace handover::ergonomics
