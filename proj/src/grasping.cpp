#include "handover/grasping.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>

namespace handover::grasping {

void GripperModel::validate() const {
  if (!(finger_length > 0.0 && finger_thickness > 0.0 && max_width > 0.0 && palm_depth > 0.0))
    throw Error("gripper dimensions must be positive");
}

std::array<OrientedBox, 3> GripperModel::boxes(double width) const {
  const double half_l = 0.5 * finger_length;
  const double t = finger_thickness;
  std::array<OrientedBox, 3> out;
  out[0].pose = Pose(Eigen::Translation3d(-(0.5 * width + 0.5 * t), 0.0, 0.0));
  out[0].half_extents = Vec3(0.5 * t, t, half_l);
  out[1].pose = Pose(Eigen::Translation3d(0.5 * width + 0.5 * t, 0.0, 0.0));
  out[1].half_extents = Vec3(0.5 * t, t, half_l);
  out[2].pose = Pose(Eigen::Translation3d(0.0, 0.0, half_l + 0.5 * palm_depth));
  out[2].half_extents = Vec3(0.5 * max_width + t, t, 0.5 * palm_depth);
  return out;
}

OrientedBox GripperModel::closing_region(double width) const {
  return {Pose::Identity(), Vec3(0.5 * width, finger_thickness, 0.5 * finger_length)};
}

std::array<OrientedBox, 3> GripperModel::boxes_at(const Pose& pose, double width) const {
  auto out = boxes(width);
  for (auto& b : out) b = b.transformed(pose);
  return out;
}

OrientedBox GripperModel::closing_region_at(const Pose& pose, double width) const {
  return closing_region(width).transformed(pose);
}

double antipodal_confidence(const Vec3& p, const Vec3& n_p, const Vec3& q, const Vec3& n_q) {
  const Vec3 axis = p - q;
  const double len = axis.norm();
  if (len == 0.0) return 0.0;
  const Vec3 q_to_p = axis / len;
  const double s = 0.5 * n_p.normalized().dot(q_to_p) + 0.5 * n_q.normalized().dot(-q_to_p);
  return std::clamp(s, 0.0, 1.0);
}

namespace {

// Depth below which two boxes are considered touching rather than overlapping, meters.
constexpr double kTouchDepth = 1e-9;

// Separating-axis test between an oriented box and an axis-aligned cube.
// Boxes that only share a face, edge or corner do not overlap.
bool overlaps_cube(const OrientedBox& box, const Vec3& cube_center, double cube_half) {
  const Mat3& r = box.pose.linear();
  const Vec3 t = cube_center - box.pose.translation();
  auto separated = [&](const Vec3& axis) {
    const double len = axis.norm();
    if (len < 1e-9) return false;
    const Vec3 l = axis / len;
    const double ra = box.half_extents.x() * std::abs(r.col(0).dot(l)) +
                      box.half_extents.y() * std::abs(r.col(1).dot(l)) +
                      box.half_extents.z() * std::abs(r.col(2).dot(l));
    const double rb = cube_half * l.cwiseAbs().sum();
    return std::abs(t.dot(l)) >= ra + rb - kTouchDepth;
  };
  for (int a = 0; a < 3; ++a)
    if (separated(Vec3::Unit(a)) || separated(r.col(a))) return false;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (separated(r.col(a).cross(Vec3::Unit(b)))) return false;
  return true;
}

}  // namespace

bool gripper_collides(const VoxelGrid& grid, const GripperModel& gripper, const Pose& pose, double width) {
  const double s = grid.voxel_size();
  const Index3& d = grid.dims();
  const OrientedBox closing = gripper.closing_region_at(pose, width);
  for (const auto& box : gripper.boxes_at(pose, width)) {
    // World AABB of the box, then the voxels whose cubes can touch it.
    const Vec3 reach = box.pose.linear().cwiseAbs() * box.half_extents;
    const Vec3 lo = (box.pose.translation() - reach - grid.origin()) / s;
    const Vec3 hi = (box.pose.translation() + reach - grid.origin()) / s;
    const int x0 = std::max(0, static_cast<int>(std::floor(lo.x())));
    const int y0 = std::max(0, static_cast<int>(std::floor(lo.y())));
    const int z0 = std::max(0, static_cast<int>(std::floor(lo.z())));
    const int x1 = std::min(d.x - 1, static_cast<int>(std::floor(hi.x())));
    const int y1 = std::min(d.y - 1, static_cast<int>(std::floor(hi.y())));
    const int z1 = std::min(d.z - 1, static_cast<int>(std::floor(hi.z())));
    for (int x = x0; x <= x1; ++x)
      for (int y = y0; y <= y1; ++y)
        for (int z = z0; z <= z1; ++z) {
          if (!grid.occupied({x, y, z})) continue;
          const Vec3 c = grid.center({x, y, z});
          if (closing.contains(c)) continue;
          if (overlaps_cube(box, c, 0.5 * s)) return true;
        }
  }
  return false;
}

namespace {

// Unit vector perpendicular to `axis`, built from the world axis least aligned with it.
Vec3 perpendicular(const Vec3& axis) {
  int k = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(axis[a]) < std::abs(axis[k])) k = a;
  return axis.cross(Vec3::Unit(k)).normalized();
}

// Last occupied voxel before the walk from p along `dir` first leaves the solid.
std::optional<Index3> opposite_surface(const VoxelGrid& grid, const Index3& p, const Vec3& dir, double range) {
  const auto ray = voxelgeom::Ray::make(grid.center(p), dir, range);
  Index3 last = p;
  for (voxelgeom::GridTraversal walk(grid, ray); walk.valid(); walk.advance()) {
    const Index3 cur = walk.current();
    if (!grid.occupied(cur)) return last == p ? std::nullopt : std::optional<Index3>(last);
    last = cur;
  }
  return std::nullopt;
}

}  // namespace

std::vector<GraspCandidate> sample_grasps(const VoxelGrid& grid, const NormalMap& normals,
                                          const GripperModel& gripper, std::size_t max_candidates,
                                          std::uint64_t seed, const SamplerOptions& options) {
  gripper.validate();
  auto seeds = voxelgeom::surface_voxels(grid);
  if (seeds.size() < 2) throw Error("grasp sampling needs at least two surface voxels");

  std::mt19937_64 rng(seed);
  for (std::size_t i = seeds.size() - 1; i > 0; --i) std::swap(seeds[i], seeds[rng() % (i + 1)]);
  if (seeds.size() > options.max_seed_points) seeds.resize(options.max_seed_points);

  const double s = grid.voxel_size();
  const double max_angle = deg_to_rad(options.max_normal_angle_deg);
  const int rolls = std::max(1, static_cast<int>(std::lround(360.0 / options.roll_step_deg)));
  std::set<std::pair<Index3, Index3>> seen;
  std::vector<GraspCandidate> out;

  for (const auto& p : seeds) {
    const auto np_it = normals.find(p);
    if (np_it == normals.end()) continue;
    const Vec3& n_p = np_it->second;
    const auto q = opposite_surface(grid, p, -n_p, gripper.max_width + 2.0 * s);
    if (!q) continue;
    const auto nq_it = normals.find(*q);
    if (nq_it == normals.end()) continue;
    const Vec3& n_q = nq_it->second;
    if (angle_between(n_p, -n_q) > max_angle) continue;

    const Vec3 cp = grid.center(p);
    const Vec3 cq = grid.center(*q);
    const double dist = (cq - cp).norm();
    if (dist > gripper.max_width) continue;
    if (!seen.insert(std::minmax(p, *q)).second) continue;

    const double confidence = antipodal_confidence(cp, n_p, cq, n_q);
    if (confidence < options.min_confidence) continue;

    const Vec3 x = (cq - cp) / dist;
    const Vec3 u = perpendicular(x);
    const Vec3 w = x.cross(u);
    const double width = std::min(dist + s, gripper.max_width);
    for (int k = 0; k < rolls; ++k) {
      const double roll = deg_to_rad(k * options.roll_step_deg);
      const Vec3 z = std::cos(roll) * u + std::sin(roll) * w;
      Pose pose = Pose::Identity();
      pose.linear().col(0) = x;
      pose.linear().col(1) = z.cross(x);
      pose.linear().col(2) = z;
      pose.translation() = 0.5 * (cp + cq);
      if (gripper_collides(grid, gripper, pose, width)) continue;
      out.push_back({pose, width, confidence, {p, *q}});
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const GraspCandidate& a, const GraspCandidate& b) { return a.confidence > b.confidence; });
  if (out.size() > max_candidates) out.resize(max_candidates);
  return out;
}

bool contact_blocked(const GraspCandidate& g, const Index3& contact, const NormalMap& normals,
                     const GripperModel& gripper, const VoxelGrid& grid) {
  const Vec3 c = grid.center(contact);
  if (gripper.closing_region_at(g.pose, g.width).contains(c)) return true;
  const auto n = normals.find(contact);
  if (n == normals.end()) throw Error("contact voxel has no surface normal");
  const double range = 4.0 * gripper.finger_length;
  const auto ray = voxelgeom::surface_ray(grid, contact, n->second, range);
  for (const auto& box : gripper.boxes_at(g.pose, g.width))
    if (box.intersect(ray.origin, ray.direction, 0.0, ray.max_distance)) return true;
  return false;
}

OcclusionCount count_blocked(const GraspCandidate& g, const ContactCluster& c_pred, const NormalMap& normals,
                             const GripperModel& gripper, const VoxelGrid& grid) {
  if (c_pred.members.empty()) throw Error("empty contact cluster");
  OcclusionCount count;
  count.total = c_pred.members.size();
  for (const auto& i : c_pred.members)
    if (contact_blocked(g, i, normals, gripper, grid)) ++count.blocked;
  return count;
}

double occlusion_fraction(const GraspCandidate& g, const ContactCluster& c_pred, const NormalMap& normals,
                          const GripperModel& gripper, const VoxelGrid& grid) {
  return count_blocked(g, c_pred, normals, gripper, grid).fraction();
}

double contact_score(double confidence, double occlusion, double lambda) {
  return lambda * confidence - (1.0 - lambda) * occlusion;
}

bool ranks_before(const RankedGrasp& a, const RankedGrasp& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.candidate.confidence != b.candidate.confidence) return a.candidate.confidence > b.candidate.confidence;
  if (a.occlusion != b.occlusion) return a.occlusion < b.occlusion;
  return a.index < b.index;
}

std::vector<RankedGrasp> rank_scored(std::span<const GraspCandidate> candidates, std::span<const double> occlusions,
                                     double lambda) {
  if (candidates.empty()) throw Error("no grasp candidates");
  if (candidates.size() != occlusions.size()) throw Error("one occlusion value per candidate required");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("lambda must lie in [0, 1]");
  std::vector<RankedGrasp> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    out.push_back({candidates[i], occlusions[i], contact_score(candidates[i].confidence, occlusions[i], lambda), i});
  std::sort(out.begin(), out.end(), ranks_before);
  return out;
}

std::vector<RankedGrasp> rank_grasps(std::span<const GraspCandidate> candidates, const ContactCluster& c_pred,
                                     double lambda, const NormalMap& normals, const GripperModel& gripper,
                                     const VoxelGrid& grid) {
  if (candidates.empty()) throw Error("no grasp candidates");
  std::vector<double> occlusions;
  occlusions.reserve(candidates.size());
  for (const auto& g : candidates) occlusions.push_back(occlusion_fraction(g, c_pred, normals, gripper, grid));
  return rank_scored(candidates, occlusions, lambda);
}

}  // namespace handover::grasping
