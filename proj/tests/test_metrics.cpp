#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace handover;
using namespace handover::metrics;
using contacts::ContactMap;
using voxelgeom::VoxelGrid;

namespace {

HumanModel receiver() { return HumanModel::standard(1.7, Vec3::Zero(), Vec3::UnitX()); }

ContactMap map_of(const std::vector<Index3>& pts) {
  ContactMap cm;
  for (const auto& p : pts) cm.values[p] = 1.0;
  return cm;
}

// Scene with the object frame translated to `at` and the gripper parked far away.
HandoverScene scene_with(const VoxelGrid& g, const Vec3& at) {
  HandoverScene sc;
  sc.grid = &g;
  sc.object_pose = Pose::Identity();
  sc.object_pose.translation() = at;
  sc.gripper_pose = Pose::Identity();
  sc.gripper_pose.translation() = Vec3(20.0, 20.0, 5.0);
  sc.gripper_width = 0.03;
  sc.human = receiver();
  return sc;
}

VoxelGrid ball(int n, double radius_vox, double s = 0.01) {
  VoxelGrid g({n, n, n}, s, Vec3::Constant(-0.5 * n * s));
  const double c = 0.5 * (n - 1);
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        if (Vec3(x - c, y - c, z - c).norm() <= radius_vox) g.set({x, y, z}, true);
  return g;
}

}  // namespace

TEST_CASE("thin plate: near side visible, far side hidden") {
  // Four voxels thick along x, facing the human across 0.6 m of free space.
  const auto g = fixture::block({4, 10, 10}, {0, 0, 0}, {3, 9, 9}, 0.01, Vec3::Zero());
  const auto human = receiver();
  const Vec3 at(0.6, -0.05, human.eye_position().z() - 0.05);
  const auto sc = scene_with(g, at);
  CHECK(visibility(sc, map_of({{0, 5, 5}})) == 1.0);
  CHECK(visibility(sc, map_of({{3, 5, 5}})) == 0.0);
  CHECK(visibility(sc, map_of({{0, 5, 5}, {3, 5, 5}})) == 0.5);
}

TEST_CASE("sphere contacts: visibility matches the per-voxel oracle") {
  const auto g = ball(20, 8.5);
  const auto surf = voxelgeom::surface_voxels(g);
  const auto human = receiver();
  const Vec3 at(0.6, 0.0, human.eye_position().z());
  const auto sc = scene_with(g, at);
  const Vec3 eye = human.eye_position();

  std::vector<Index3> toward, away;
  // A voxel faces the human when its outward radial direction points at the eye.
  for (const auto& v : surf) {
    const Vec3 c = sc.contact_world(v);
    ((c - at).dot(eye - c) > 0.0 ? toward : away).push_back(v);
  }

  const auto all = map_of(surf);
  const auto counts = oracle::metrics_exhaustive(sc, all);
  CHECK(visibility(sc, all) == static_cast<double>(counts.visible) / counts.total);
  CHECK(reachability(sc, all) == static_cast<double>(counts.reachable) / counts.total);

  const double facing = static_cast<double>(toward.size()) / surf.size();
  CHECK(std::abs(visibility(sc, all) - facing) < 0.1);
  CHECK(visibility(sc, map_of(toward)) > 0.9);
  CHECK(visibility(sc, map_of(away)) < 0.1);
}

TEST_CASE("random scenes agree with the exhaustive oracle") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 8; ++t) {
    const auto g = fixture::random_blob(rng, 24, 0.006);
    const auto surf = voxelgeom::surface_voxels(g);
    auto sc = scene_with(g, Vec3(0.45 + 0.2 * u(rng), 0.2 * u(rng), 1.2 + 0.2 * u(rng)));
    sc.object_pose.linear() = oracle::random_rotation(rng);
    sc.gripper_pose = sc.object_pose;
    sc.gripper_pose.translation() += Vec3(0.05 * u(rng), 0.05 * u(rng), 0.05 * u(rng));
    sc.gripper_pose.linear() = oracle::random_rotation(rng);
    sc.gripper_width = 0.02 + 0.02 * (u(rng) + 1.0);
    if (t % 2) sc.robot_body = robot_body_box(Vec3(1.2, 0.0, 0.0), -Vec3::UnitX());
    std::vector<Index3> pts;
    for (const auto& v : surf)
      if (rng() % 3 == 0) pts.push_back(v);
    if (pts.empty()) pts.push_back(surf.front());
    const auto cm = map_of(pts);
    const auto counts = oracle::metrics_exhaustive(sc, cm);
    const auto verdicts = contact_verdicts(sc, cm);
    CHECK(verdicts.size() == counts.total);
    CHECK(visibility(sc, cm) == static_cast<double>(counts.visible) / counts.total);
    CHECK(reachability(sc, cm) == static_cast<double>(counts.reachable) / counts.total);
  }
}

TEST_CASE("reachability examples") {
  const auto g = fixture::block({4, 4, 4}, {0, 0, 0}, {3, 3, 3}, 0.01, Vec3::Zero());
  std::vector<Index3> all = g.occupied_voxels();
  const auto cm = map_of(all);

  SUBCASE("held 2 m from the body axis") {
    auto sc = scene_with(g, Vec3(2.0, 0.0, 1.2));
    CHECK(sc.human.arm_length() < 0.7);
    CHECK(reachability(sc, cm) == 0.0);
    for (const auto& v : contact_verdicts(sc, cm)) CHECK(!v.within_reach);
  }
  SUBCASE("every contact between gripper and human, 0.4 m out") {
    auto sc = scene_with(g, Vec3(0.4, 0.0, 1.25));
    // Gripper behind the object on the robot side, palm facing away from the human.
    sc.gripper_pose = Pose::Identity();
    sc.gripper_pose.linear() = Eigen::AngleAxisd(M_PI / 2, Vec3::UnitY()).toRotationMatrix();
    sc.gripper_pose.translation() = Vec3(0.5, 0.015, 1.265);
    CHECK(gripper_horizontal_distance(sc) > 0.44);
    CHECK(reachability(sc, cm) == 1.0);
  }
  SUBCASE("contacts split across the gripper plane") {
    auto sc = scene_with(g, Vec3(0.4, 0.0, 1.25));
    sc.gripper_pose = Pose::Identity();
    sc.gripper_pose.linear() = Eigen::AngleAxisd(M_PI / 2, Vec3::UnitY()).toRotationMatrix();
    // Near finger face at x = 0.42, inside the object's 0.40 to 0.44 span.
    sc.gripper_pose.translation() = Vec3(0.445, 0.015, 1.265);
    const double r = reachability(sc, cm);
    CHECK(r > 0.0);
    CHECK(r < 1.0);
    const auto counts = oracle::metrics_exhaustive(sc, cm);
    CHECK(r == static_cast<double>(counts.reachable) / counts.total);
  }
}

TEST_CASE("gripper and robot body only ever remove visibility") {
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const auto g = fixture::random_blob(rng, 20, 0.006);
    const auto cm = map_of(voxelgeom::surface_voxels(g));
    auto sc = scene_with(g, Vec3(0.5 + 0.1 * u(rng), 0.1 * u(rng), 1.3 + 0.1 * u(rng)));
    sc.gripper_pose = sc.object_pose;
    sc.gripper_pose.linear() = oracle::random_rotation(rng);
    sc.robot_body = robot_body_box(Vec3(0.9, 0.0, 0.0), -Vec3::UnitX());
    const double with = visibility(sc, cm);
    auto bare = sc;
    bare.robot_body.reset();
    bare.gripper_pose.translation() = Vec3(20.0, 20.0, 5.0);
    CHECK(visibility(bare, cm) >= with);
    CHECK(with >= 0.0);
    CHECK(with <= 1.0);
    // Read-only: repeated evaluation is identical.
    CHECK(visibility(sc, cm) == with);
    CHECK(reachability(sc, cm) == reachability(sc, cm));
  }
}

TEST_CASE("moving the handover point toward the body axis never loses arm reach") {
  std::mt19937_64 rng(63);
  const auto g = fixture::random_blob(rng, 20, 0.006);
  const auto cm = map_of(voxelgeom::surface_voxels(g));
  const Vec3 shoulder = receiver().shoulder_position();
  std::size_t previous = 0;
  for (double d = 1.2; d >= 0.25; d -= 0.05) {
    // Approach along the horizontal line through the shoulder.
    auto sc = scene_with(g, Vec3(d, shoulder.y(), shoulder.z()));
    sc.gripper_pose.translation() = sc.object_pose.translation() + Vec3(0.05, 0.0, 0.0);
    std::size_t passes = 0;
    for (const auto& v : contact_verdicts(sc, cm)) passes += v.within_reach;
    CHECK(passes >= previous);
    previous = passes;
  }
  CHECK(previous == cm.values.size());
}

TEST_CASE("medians and success") {
  CHECK(lower_median({0.3}) == 0.3);
  CHECK(lower_median({0.9, 0.1}) == 0.1);
  CHECK(lower_median({0.4, 0.1, 0.9, 0.2}) == 0.2);
  CHECK(lower_median({0.5, 0.1, 0.9}) == 0.5);
  CHECK_THROWS_AS(lower_median({}), Error);

  const std::vector<double> v1{0.7}, r1{0.9};
  CHECK(success(v1, r1, 0.5));
  const std::vector<double> v2{0.6}, r2{0.4};
  CHECK(!success(v2, r2, 0.5));
  const std::vector<double> v3{0.5}, r3{0.9};
  CHECK(!success(v3, r3, 0.5));
  const std::vector<double> v4{0.9, 0.5}, r4{0.9, 0.9};
  CHECK(!success(v4, r4, 0.5));

  const std::vector<double> empty;
  CHECK_THROWS_AS(success(empty, empty, 0.5), Error);
  CHECK_THROWS_AS(success(v1, v4, 0.5), Error);
  CHECK_THROWS_AS(success(v1, r1, 1.0), Error);
}

TEST_CASE("evaluate over several maps") {
  const auto g = fixture::block({4, 10, 10}, {0, 0, 0}, {3, 9, 9}, 0.01, Vec3::Zero());
  const auto sc = scene_with(g, Vec3(0.6, -0.05, receiver().eye_position().z() - 0.05));
  const std::vector<ContactMap> maps{map_of({{0, 5, 5}}), map_of({{3, 5, 5}}), map_of({{0, 2, 2}, {3, 2, 2}})};
  const auto scores = evaluate(sc, maps);
  CHECK(scores.visibility == std::vector<double>{1.0, 0.0, 0.5});
  CHECK(scores.visibility_median == 0.5);
  CHECK(scores.reachability.size() == 3);
  CHECK_THROWS_AS(evaluate(sc, std::span<const ContactMap>{}), Error);
  CHECK_THROWS_WITH_AS(visibility(sc, ContactMap{}), "empty contact map", Error);
  CHECK_THROWS_WITH_AS(reachability(sc, ContactMap{}), "empty contact map", Error);
}

TEST_CASE("robot body box") {
  const auto b = robot_body_box(Vec3(1.0, 2.0, 0.0), Vec3(-1.0, 0.0, 0.3));
  CHECK(b.contains(Vec3(1.0, 2.0, 0.01)));
  CHECK(b.contains(Vec3(1.24, 2.24, 1.09)));
  CHECK(!b.contains(Vec3(1.0, 2.0, 1.11)));
  CHECK(!b.contains(Vec3(1.26, 2.0, 0.5)));
}
