#pragma once

#include "handover/contacts.hpp"
#include "handover/voxelgeom.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace handover::grasping {

using contacts::ContactCluster;
using voxelgeom::NormalMap;
using voxelgeom::VoxelGrid;

/// Parallel-jaw gripper. Gripper frame: origin at the grasp center, x is the
/// closing axis, the fingers extend along z on both sides of the origin and
/// the palm sits on +z. The gripper approaches along -z.
struct GripperModel {
  double finger_length = 0.05;
  double finger_thickness = 0.015;
  double max_width = 0.10;
  double palm_depth = 0.04;

  void validate() const;

  /// Left finger, right finger, palm bridge, in the gripper frame.
  std::array<OrientedBox, 3> boxes(double width) const;
  /// Volume between the fingers at the given opening.
  OrientedBox closing_region(double width) const;

  std::array<OrientedBox, 3> boxes_at(const Pose& pose, double width) const;
  OrientedBox closing_region_at(const Pose& pose, double width) const;

  bool operator==(const GripperModel&) const = default;
};

struct GraspCandidate {
  Pose pose = Pose::Identity();  // gripper frame in the object frame
  double width = 0.0;
  double confidence = 0.0;
  std::array<Index3, 2> contact_pair{};

  Vec3 approach() const { return -pose.linear().col(2); }
  Vec3 held_point() const { return pose.translation(); }
};

struct RankedGrasp {
  GraspCandidate candidate;
  double occlusion = 0.0;
  double score = 0.0;
  std::size_t index = 0;  // position in the candidate list that was ranked
};

struct SamplerOptions {
  std::size_t max_seed_points = 512;
  double max_normal_angle_deg = 30.0;
  double min_confidence = 0.23;
  double roll_step_deg = 45.0;
};

/// Antipodal grasp sampling. Seed surface voxels are drawn in a seeded order;
/// from each seed p the opposite surface voxel q is found by walking through
/// the solid along -n(p). Pairs with near-opposing normals that fit the
/// gripper are posed at every roll about the closing axis and kept when
/// collision free and confident enough. Returns at most max_candidates,
/// highest confidence first.
std::vector<GraspCandidate> sample_grasps(const VoxelGrid& grid, const NormalMap& normals,
                                          const GripperModel& gripper, std::size_t max_candidates,
                                          std::uint64_t seed, const SamplerOptions& options = {});

/// Mean antipodal alignment cosine of the pair, clamped to [0, 1].
double antipodal_confidence(const Vec3& p, const Vec3& n_p, const Vec3& q, const Vec3& n_q);

/// True when a finger or the palm overlaps the cube of an occupied voxel with
/// positive depth. Voxels centered in the closing region are exempt.
bool gripper_collides(const VoxelGrid& grid, const GripperModel& gripper, const Pose& pose, double width);

struct OcclusionCount {
  std::size_t blocked = 0;
  std::size_t total = 0;
  double fraction() const { return total == 0 ? 0.0 : static_cast<double>(blocked) / static_cast<double>(total); }
};

/// Contact i is blocked when its outward normal ray (offset by the
/// self-occlusion rule, range 4 finger lengths) meets the gripper, or when its
/// center lies in the closing region.
bool contact_blocked(const GraspCandidate& g, const Index3& contact, const NormalMap& normals,
                     const GripperModel& gripper, const VoxelGrid& grid);

OcclusionCount count_blocked(const GraspCandidate& g, const ContactCluster& c_pred, const NormalMap& normals,
                             const GripperModel& gripper, const VoxelGrid& grid);

double occlusion_fraction(const GraspCandidate& g, const ContactCluster& c_pred, const NormalMap& normals,
                          const GripperModel& gripper, const VoxelGrid& grid);

double contact_score(double confidence, double occlusion, double lambda);

/// Orders by score descending, then confidence descending, occlusion
/// ascending, candidate index ascending.
bool ranks_before(const RankedGrasp& a, const RankedGrasp& b);

/// Scores precomputed occlusions and sorts.
std::vector<RankedGrasp> rank_scored(std::span<const GraspCandidate> candidates,
                                     std::span<const double> occlusions, double lambda);

std::vector<RankedGrasp> rank_grasps(std::span<const GraspCandidate> candidates, const ContactCluster& c_pred,
                                     double lambda, const NormalMap& normals, const GripperModel& gripper,
                                     const VoxelGrid& grid);

constexpr double kDefaultLambda = 0.5;

}  // namespace handover::grasping
