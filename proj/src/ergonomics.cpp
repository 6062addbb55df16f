#include "handover/ergonomics.hpp"

#include <algorithm>
#include <cmath>

namespace handover::ergonomics {

HumanModel HumanModel::standard(double height, const Vec3& base, const Vec3& facing) {
  HumanModel h;
  h.height = height;
  h.base_position = base;
  h.facing = facing;
  h.upper_arm_length = 0.176 * height;
  h.forearm_length = 0.206 * height;
  h.head_height = 0.13 * height;
  h.validate();
  return h;
}

void HumanModel::validate() const {
  if (!(height > 0.0)) throw Error("human height must be positive");
  if (!(0.0 < waist_height_fraction && waist_height_fraction < shoulder_height_fraction &&
        shoulder_height_fraction < 1.0))
    throw Error("need 0 < waist fraction < shoulder fraction < 1");
  if (!(upper_arm_length > 0.0 && forearm_length > 0.0 && head_height > 0.0))
    throw Error("arm segment lengths and head height must be positive");
  if (!(upper_arm_mass > 0.0 && forearm_mass > 0.0 && hand_mass > 0.0))
    throw Error("segment masses must be positive");
  if (std::abs(facing.z()) > 1e-9 || std::abs(facing.norm() - 1.0) > 1e-9)
    throw Error("facing must be a horizontal unit vector");
}

Vec3 HumanModel::shoulder_position() const {
  return base_position + shoulder_height() * up() + arm_plane_offset * right();
}

Vec3 HumanModel::eye_position() const { return base_position + eye_height() * up(); }

namespace {

// In-plane (forward, up) unit directions of the upper arm and forearm.
struct SegmentDirections {
  double upper_fwd, upper_up, fore_fwd, fore_up;
};

SegmentDirections directions(const ArmConfig& c) {
  const double s = deg_to_rad(c.shoulder_deg);
  const double f = deg_to_rad(c.shoulder_deg + c.elbow_deg);
  return {std::sin(s), -std::cos(s), std::sin(f), -std::cos(f)};
}

}  // namespace

Vec3 elbow_position(const ArmConfig& config, const HumanModel& human) {
  const auto d = directions(config);
  return human.shoulder_position() +
         human.upper_arm_length * (d.upper_fwd * human.facing + d.upper_up * human.up());
}

Vec3 forward_kinematics(const ArmConfig& config, const HumanModel& human) {
  const auto d = directions(config);
  return elbow_position(config, human) +
         human.forearm_length * (d.fore_fwd * human.facing + d.fore_up * human.up());
}

JointTorques joint_torques(const ArmConfig& config, double object_mass, const HumanModel& human) {
  if (object_mass < 0.0) throw Error("object mass must be non-negative");
  const auto d = directions(config);
  const double lu = human.upper_arm_length;
  const double lf = human.forearm_length;
  const double distal = human.hand_mass + object_mass;

  // Signed horizontal lever arms (forward positive) about each joint axis.
  const double elbow_moment = human.forearm_mass * 0.5 * lf * d.fore_fwd + distal * lf * d.fore_fwd;
  const double shoulder_moment = human.upper_arm_mass * 0.5 * lu * d.upper_fwd +
                                 human.forearm_mass * (lu * d.upper_fwd + 0.5 * lf * d.fore_fwd) +
                                 distal * (lu * d.upper_fwd + lf * d.fore_fwd);
  return {std::abs(kGravity * shoulder_moment), std::abs(kGravity * elbow_moment)};
}

double displacement_cost(const ArmConfig& config) {
  const double ds = kShoulderMidDeg - config.shoulder_deg;
  const double de = kElbowMidDeg - config.elbow_deg;
  return ds * ds + de * de;
}

bool better_candidate(const ErgonomicCandidate& a, const ErgonomicCandidate& b) {
  if (a.f_total != b.f_total) return a.f_total < b.f_total;
  if (a.f_torque != b.f_torque) return a.f_torque < b.f_torque;
  if (a.config.shoulder_deg != b.config.shoulder_deg) return a.config.shoulder_deg < b.config.shoulder_deg;
  return a.config.elbow_deg < b.config.elbow_deg;
}

PositionPlan plan_handover_position(const HumanModel& human, double object_mass, double alpha,
                                    double granularity_deg) {
  human.validate();
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("alpha must lie in [0, 1]");
  if (!(granularity_deg > 0.0)) throw Error("granularity must be positive");

  const double lo = human.base_position.z() + human.waist_height();
  const double hi = human.base_position.z() + human.shoulder_height();
  const int n_shoulder = static_cast<int>(std::floor(kShoulderMaxDeg / granularity_deg + 1e-9));
  const int n_elbow = static_cast<int>(std::floor(kElbowMaxDeg / granularity_deg + 1e-9));

  PositionPlan plan;
  for (int i = 0; i <= n_shoulder; ++i) {
    for (int j = 0; j <= n_elbow; ++j) {
      ErgonomicCandidate c;
      c.config = {i * granularity_deg, j * granularity_deg};
      c.hand_position = forward_kinematics(c.config, human);
      const double z = c.hand_position.z();
      if (!(lo < z && z < hi)) continue;
      const auto tau = joint_torques(c.config, object_mass, human);
      c.torque_raw = tau.shoulder * tau.shoulder + tau.elbow * tau.elbow;
      c.disp_raw = displacement_cost(c.config);
      plan.candidates.push_back(c);
    }
  }
  if (plan.candidates.empty()) throw Error("empty ergonomic candidate set");

  for (const auto& c : plan.candidates) {
    plan.torque_max = std::max(plan.torque_max, c.torque_raw);
    plan.disp_max = std::max(plan.disp_max, c.disp_raw);
  }
  for (auto& c : plan.candidates) {
    c.f_torque = plan.torque_max > 0.0 ? c.torque_raw / plan.torque_max : 0.0;
    c.f_disp = plan.disp_max > 0.0 ? c.disp_raw / plan.disp_max : 0.0;
    c.f_total = (1.0 - alpha) * c.f_torque + alpha * c.f_disp;
  }
  plan.winner = *std::min_element(plan.candidates.begin(), plan.candidates.end(), better_candidate);
  plan.position = plan.winner.hand_position;
  return plan;
}

}  // namespace handover::ergonomics
