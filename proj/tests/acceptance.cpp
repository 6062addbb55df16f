// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "fixtures.hpp"
#include "oracles.hpp"

#include "handover/cli.hpp"
#include "handover/harness.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace handover;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using voxelgeom::VoxelGrid;

// Pinned tolerances and time limits.
constexpr double kScoreTol = 1e-12;
constexpr double kLeverRelTol = 1e-9;
constexpr double kZeroTorqueTol = 1e-9;
constexpr double kOrientationTie = 1e-9;
constexpr double kLimitScoring = 1.0;
constexpr double kLimitOcclusion = 30.0;
constexpr double kLimitDbscan = 30.0;
constexpr double kLimitErgonomics = 5.0;
constexpr double kLimitOrientation = 30.0;
constexpr double kLimitAblation = 180.0;
constexpr int kSeeds = 5;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Outcome scoring() {
  const auto t0 = Clock::now();
  Outcome o;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::array<double, 3>> triples;
  for (int t = 0; t < 1000; ++t) triples.push_back({u(rng), u(rng), u(rng)});
  // Exact lambda endpoints are part of the domain.
  triples[0][2] = 0.0;
  triples[1][2] = 1.0;

  for (const auto& [s, occ, lambda] : triples) {
    grasping::GraspCandidate c;
    c.confidence = s;
    const std::array<grasping::GraspCandidate, 1> cs{c};
    const std::array<double, 1> os{occ};
    const auto ranked = grasping::rank_scored(cs, os, lambda);
    const double expected = lambda * s - (1.0 - lambda) * occ;
    if (std::abs(ranked[0].score - expected) > kScoreTol) o.fail(fmt("score off by %.3g", ranked[0].score - expected));
  }
  // Monotonicity over pairs sharing S or sharing O.
  for (int t = 0; t < 1000; ++t) {
    const double lambda = u(rng), s1 = u(rng), s2 = u(rng), o1 = u(rng), o2 = u(rng);
    const auto sc = [&](double s, double occ) { return grasping::contact_score(s, occ, lambda); };
    if ((o1 < o2) != (sc(s1, o1) > sc(s1, o2)) && lambda < 1.0) o.fail("score not decreasing in O");
    if ((s1 < s2) != (sc(s1, o1) < sc(s2, o1)) && lambda > 0.0) o.fail("score not increasing in S");
  }
  // Ranking through rank_grasps on a real grasp set.
  auto g = fixture::random_blob(rng);
  const auto surf = voxelgeom::surface_voxels(g);
  const auto normals = voxelgeom::estimate_normals(g, surf);
  grasping::GripperModel gm;
  const auto cands = grasping::sample_grasps(g, normals, gm, 32, 3);
  contacts::ContactCluster cl;
  cl.members.assign(surf.begin(), surf.begin() + std::min<std::size_t>(surf.size(), 40));
  const auto ranked = grasping::rank_grasps(cands, cl, 0.5, normals, gm, g);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const double expected = 0.5 * ranked[i].candidate.confidence - 0.5 * ranked[i].occlusion;
    if (std::abs(ranked[i].score - expected) > kScoreTol) o.fail("rank_grasps score differs from formula");
    if (i > 0 && ranked[i].score > ranked[i - 1].score) o.fail("rank_grasps not sorted by score");
  }
  const double t = seconds_since(t0);
  if (t >= kLimitScoring) o.fail(fmt("took %.2f s", t));
  if (o.pass) o.detail = fmt("1000 triples within %.0e, %.3f s", kScoreTol, t);
  return o;
}

Outcome occlusion() {
  const auto t0 = Clock::now();
  Outcome o;
  std::mt19937_64 rng(2);
  std::size_t contacts_checked = 0, blocked_total = 0;
  for (int scene = 0; scene < 50; ++scene) {
    const auto g = fixture::random_blob(rng);
    const auto surf = voxelgeom::surface_voxels(g);
    const auto normals = voxelgeom::estimate_normals(g, surf);
    grasping::GripperModel gm;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    gm.finger_length = 0.03 + 0.04 * u(rng);
    gm.finger_thickness = 0.006 + 0.012 * u(rng);
    gm.max_width = 0.06 + 0.06 * u(rng);

    // Cluster: surface voxels inside a random ball around a surface point.
    const Vec3 seed = g.center(surf[rng() % surf.size()]);
    const double rad = 0.02 + 0.03 * u(rng);
    contacts::ContactCluster cl;
    for (const auto& v : surf)
      if ((g.center(v) - seed).norm() <= rad) cl.members.push_back(v);

    // Half the scenes use sampled grasps, the rest arbitrary poses near the object.
    std::vector<grasping::GraspCandidate> grasps;
    if (scene % 2 == 0) grasps = grasping::sample_grasps(g, normals, gm, 8, rng());
    while (grasps.size() < 8) {
      grasping::GraspCandidate c;
      c.pose.linear() = oracle::random_rotation(rng);
      c.pose.translation() = Vec3(u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5) * 0.08;
      c.width = gm.max_width * u(rng);
      grasps.push_back(c);
    }
    for (const auto& gc : grasps) {
      const auto count = grasping::count_blocked(gc, cl, normals, gm, g);
      const auto expected = oracle::blocked_count(gc, cl.members, normals, gm, g, 2e-5);
      contacts_checked += count.total;
      blocked_total += expected;
      if (count.total != cl.members.size()) o.fail("total differs from cluster size");
      if (count.blocked != expected)
        o.fail("scene " + std::to_string(scene) + ": blocked " + std::to_string(count.blocked) + " vs oracle " +
               std::to_string(expected));
    }
  }
  const double t = seconds_since(t0);
  if (t >= kLimitOcclusion) o.fail(fmt("took %.2f s", t));
  if (o.pass)
    o.detail = "50 scenes, " + std::to_string(contacts_checked) + " contacts (" + std::to_string(blocked_total) +
               " blocked) agree, " + fmt("%.2f s", t);
  return o;
}

Outcome dbscan() {
  const auto t0 = Clock::now();
  Outcome o;
  std::mt19937_64 rng(3);
  for (int set = 0; set < 100; ++set) {
    const int n = 1 + static_cast<int>(rng() % 200);
    const int side = 6 + static_cast<int>(rng() % 20);
    VoxelGrid g({side, side, side}, 0.01, Vec3(-0.1, 0.2, 0.05));
    contacts::ContactMap cm;
    // A few dense lumps plus uniform noise.
    std::uniform_int_distribution<int> any(0, side - 1);
    std::normal_distribution<double> spread(0.0, 1.0 + static_cast<double>(rng() % 3));
    std::vector<Index3> centers;
    for (int k = 0; k < 3; ++k) centers.push_back({any(rng), any(rng), any(rng)});
    while (static_cast<int>(cm.values.size()) < std::min(n, side * side * side)) {
      Index3 p;
      if (rng() % 4 == 0) {
        p = {any(rng), any(rng), any(rng)};
      } else {
        const auto& c = centers[rng() % centers.size()];
        p = {c.x + static_cast<int>(std::lround(spread(rng))), c.y + static_cast<int>(std::lround(spread(rng))),
             c.z + static_cast<int>(std::lround(spread(rng)))};
        if (!g.in_bounds(p)) continue;
      }
      cm.values[p] = 1.0;
    }
    const double eps = g.voxel_size() * std::array<double, 4>{1.0, 1.5, 2.0, 3.0}[rng() % 4];
    const int min_pts = 2 + static_cast<int>(rng() % 6);
    const auto got = contacts::cluster_contacts(cm, g, eps, min_pts);
    const auto expected = oracle::dbscan_quadratic(cm.contact_indices(), g, eps, min_pts);
    std::set<std::set<Index3>> a, b(expected.begin(), expected.end());
    for (const auto& c : got) a.insert(std::set<Index3>(c.members.begin(), c.members.end()));
    if (a != b || got.size() != expected.size())
      o.fail("set " + std::to_string(set) + ": " + std::to_string(got.size()) + " clusters vs oracle " +
             std::to_string(expected.size()));
  }
  const double t = seconds_since(t0);
  if (t >= kLimitDbscan) o.fail(fmt("took %.2f s", t));
  if (o.pass) o.detail = fmt("100 point sets agree, %.2f s", t);
  return o;
}

Outcome ergonomics_sweep() {
  const auto t0 = Clock::now();
  Outcome o;
  int runs = 0, midpoint_checks = 0;
  // The last receiver has a short forearm, which brings the mid-range pose
  // (67.5, 62.5) inside the height band so the zero-displacement check bites.
  std::vector<ergonomics::HumanModel> humans;
  for (double height : {1.5, 1.7, 1.9}) humans.push_back(ergonomics::HumanModel::standard(height));
  humans.push_back(ergonomics::HumanModel::standard(1.7));
  humans.back().forearm_length = 0.10;
  for (const auto& human : humans) {
    const double height = human.height;
    for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      for (double step : {5.0, 2.5}) {
        ++runs;
        const auto plan = ergonomics::plan_handover_position(human, 0.5, alpha, step);
        const auto ref = oracle::ergonomic_argmin(human, 0.5, alpha, step);
        const auto& w = plan.winner;
        if (w.config.shoulder_deg != ref.shoulder_deg || w.config.elbow_deg != ref.elbow_deg)
          o.fail(fmt("alpha %.2f: winner differs from exhaustive search at h=%.1f", alpha, height));
        if ((w.hand_position - ref.hand).norm() > 1e-12) o.fail("winner hand position differs from oracle");
        const double z = plan.position.z();
        if (!(z > human.waist_height() && z < human.shoulder_height())) o.fail("winner height outside band");
        for (const auto& c : plan.candidates) {
          if (c.f_torque < 0 || c.f_torque > 1 || c.f_disp < 0 || c.f_disp > 1) o.fail("normalized cost outside [0,1]");
          if (c.config.shoulder_deg == ergonomics::kShoulderMidDeg && c.config.elbow_deg == ergonomics::kElbowMidDeg) {
            ++midpoint_checks;
            if (c.f_disp != 0.0) o.fail("f_disp nonzero at the midpoint");
          }
        }
      }
    }
  }
  if (midpoint_checks == 0) o.fail("mid-range pose never kept, zero-displacement check not exercised");
  const double t = seconds_since(t0);
  if (t >= kLimitErgonomics) o.fail(fmt("took %.2f s", t));
  if (o.pass)
    o.detail = std::to_string(runs) + " plans match exhaustive search, midpoint kept in " +
               std::to_string(midpoint_checks) + fmt(", %.2f s", t);
  return o;
}

Outcome torque() {
  Outcome o;
  const auto human = ergonomics::HumanModel::standard(1.7);
  for (double mass : {0.0, 0.5, 3.0}) {
    const auto tau = ergonomics::joint_torques({0.0, 0.0}, mass, human);
    if (!(tau.shoulder < kZeroTorqueTol && tau.elbow < kZeroTorqueTol)) o.fail("hanging arm has nonzero torque");
  }
  auto point = human;
  point.upper_arm_mass = point.forearm_mass = point.hand_mass = 0.0;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ts(0.0, 135.0), te(0.0, 140.0), m(0.1, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ergonomics::ArmConfig c{ts(rng), te(rng)};
    const double mass = m(rng);
    const double a = c.shoulder_deg * M_PI / 180.0, b = (c.shoulder_deg + c.elbow_deg) * M_PI / 180.0;
    const double es = mass * 9.81 * std::abs(point.upper_arm_length * std::sin(a) + point.forearm_length * std::sin(b));
    const double ee = mass * 9.81 * point.forearm_length * std::abs(std::sin(b));
    const auto tau = ergonomics::joint_torques(c, mass, point);
    for (auto [got, want] : {std::pair{tau.shoulder, es}, std::pair{tau.elbow, ee}}) {
      const double rel = std::abs(got - want) / std::max(std::abs(want), 1e-300);
      if (want > 1e-6) worst = std::max(worst, rel);
      if (want > 1e-6 ? rel > kLeverRelTol : std::abs(got - want) > kZeroTorqueTol) o.fail("lever formula mismatch");
    }
  }
  if (o.pass) o.detail = fmt("zero case < %.0e N m, worst relative lever error %.1e", kZeroTorqueTol, worst);
  return o;
}

Outcome orientation() {
  const auto t0 = Clock::now();
  Outcome o;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto& names = harness::suite_object_names();
  int scenes = 0, ties = 0;
  for (int k = 0; k < 20; ++k) {
    const auto scene = harness::make_suite_scene(names[k % names.size()]);
    const double yaw = 2 * M_PI * u(rng);
    const Vec3 facing(std::cos(yaw), std::sin(yaw), 0.0);
    const auto human = ergonomics::HumanModel::standard(1.5 + 0.4 * u(rng), Vec3(u(rng), u(rng), 0.0), facing);
    const auto& g = scene.grid;
    const auto surf = voxelgeom::surface_voxels(g);
    const auto normals = voxelgeom::estimate_normals(g, surf);
    const auto grasps = grasping::sample_grasps(g, normals, scene.robot.gripper, 16, rng());
    if (grasps.empty()) {
      o.fail("no grasps sampled");
      continue;
    }
    const auto clusters =
        contacts::cluster_contacts(scene.contact_maps[0], g, scene.eps(), scene.params.min_pts);
    grasping::RankedGrasp rg;
    rg.candidate = grasps[rng() % grasps.size()];
    const Vec3 ee = k % 2 == 0 ? ergonomics::plan_handover_position(human, 0.5, 0.5).position
                               : human.base_position + (0.35 + 0.3 * u(rng)) * facing +
                                     Vec3(0, 0, 0.9 + 0.5 * u(rng));
    const auto ctx = delivery::DeliveryContext::make(g, scene.robot.gripper, -facing);
    const auto ref = oracle::orientation_minimum(rg.candidate, clusters.front().members, human, ee, g,
                                                 scene.robot.gripper, -facing);
    if (ref.feasible == 0) {
      bool threw = false;
      try {
        delivery::plan_handover_orientation(rg, clusters.front(), human, ee, ctx);
      } catch (const Error&) {
        threw = true;
      }
      if (!threw) o.fail("planner returned a pose where the oracle finds none feasible");
      continue;
    }
    const auto pose = delivery::plan_handover_orientation(rg, clusters.front(), human, ee, ctx);
    std::size_t feasible = 0;
    for (const auto& c : pose.candidates) feasible += c.feasible();
    ++scenes;
    if (pose.candidates.size() != ref.samples) o.fail("sample count differs from oracle");
    if (feasible != ref.feasible) o.fail("scene " + std::to_string(k) + ": feasible set size differs from oracle");
    // Rotations whose objectives agree to kOrientationTie are ties; the planner
    // breaks them by rotation angle, so the chosen value must be one of the
    // oracle's own values and no further than the tie band from the minimum.
    const bool exact = pose.objective == ref.objective;
    const bool listed = std::find(ref.feasible_objectives.begin(), ref.feasible_objectives.end(), pose.objective) !=
                        ref.feasible_objectives.end();
    const bool tied = listed && pose.objective - ref.objective <= kOrientationTie * std::max(1.0, ref.objective);
    ties += !exact && tied;
    if (!exact && !tied)
      o.fail("scene " + std::to_string(k) + fmt(": objective %.17g vs oracle %.17g", pose.objective, ref.objective));
  }
  const double t = seconds_since(t0);
  if (t >= kLimitOrientation) o.fail(fmt("took %.2f s", t));
  if (o.pass) o.detail = std::to_string(scenes) + " of 20 scenes agree (" + std::to_string(ties) + " resolved within the tie band)" +
               fmt(", %.2f s", t);
  return o;
}

Outcome metric_agreement() {
  Outcome o;
  int maps = 0;
  for (const auto& name : harness::suite_object_names()) {
    const auto scene = harness::make_suite_scene(name);
    for (auto mode : harness::all_modes()) {
      const auto result = harness::run_pipeline_detailed(scene, mode, 0);
      const auto& r = result.report;
      if (!r.failure_stage.empty()) {
        o.fail(name + " " + harness::to_string(mode) + " failed at " + r.failure_stage);
        continue;
      }
      metrics::HandoverScene hs;
      hs.grid = &scene.grid;
      hs.object_pose = r.final_object_pose;
      hs.gripper_pose = r.final_gripper_pose;
      hs.gripper_width = r.grasp->width;
      hs.gripper = scene.robot.gripper;
      hs.robot_body = metrics::robot_body_box(scene.robot_base(), scene.robot_to_human(), scene.robot.body_dims);
      hs.human = scene.human;
      for (std::size_t m = 0; m < scene.contact_maps.size(); ++m) {
        ++maps;
        const auto ref = oracle::metrics_exhaustive(hs, scene.contact_maps[m]);
        const double v = r.visibility[m], re = r.reachability[m];
        if (v < 0 || v > 1 || re < 0 || re > 1) o.fail("metric outside [0,1]");
        const double ev = static_cast<double>(ref.visible) / ref.total;
        const double er = static_cast<double>(ref.reachable) / ref.total;
        if (v != ev || re != er)
          o.fail(name + " " + harness::to_string(mode) + fmt(": vis %.6f vs %.6f", v, ev) + fmt(", reach %.6f vs %.6f", re, er));
      }
    }
  }
  const std::vector<double> at_k{0.5, 0.5, 0.5};
  const std::vector<double> high{0.9, 0.9, 0.9};
  if (metrics::success(at_k, high, 0.5) || metrics::success(high, at_k, 0.5)) o.fail("median equal to k accepted");
  if (!metrics::success(std::vector<double>{0.5, 0.6, 0.7}, high, 0.5)) o.fail("median above k rejected");
  if (o.pass) o.detail = std::to_string(maps) + " map evaluations match per-voxel recomputation, median = k rejected";
  return o;
}

Outcome ablation() {
  const auto t0 = Clock::now();
  Outcome o;
  std::map<harness::AblationMode, int> wins;
  std::map<harness::AblationMode, int> runs;
  for (const auto& name : harness::suite_object_names()) {
    const auto scene = harness::make_suite_scene(name);
    for (auto mode : harness::all_modes())
      for (int seed = 0; seed < kSeeds; ++seed) {
        const auto r = harness::run_pipeline(scene, mode, static_cast<std::uint64_t>(seed));
        ++runs[mode];
        wins[mode] += r.success;
        if (mode == harness::AblationMode::A4 && (r.success || r.reachability_median != 0.0))
          o.fail(name + " A4 seed " + std::to_string(seed) + fmt(": reachability median %.3f", r.reachability_median));
      }
  }
  auto rate = [&](harness::AblationMode m) { return static_cast<double>(wins[m]) / runs[m]; };
  using M = harness::AblationMode;
  if (rate(M::Full) < rate(M::A2)) o.fail(fmt("FULL %.2f below A2 %.2f", rate(M::Full), rate(M::A2)));
  if (rate(M::Full) < rate(M::A3)) o.fail(fmt("FULL %.2f below A3 %.2f", rate(M::Full), rate(M::A3)));
  if (wins[M::A4] != 0) o.fail("A4 succeeded");
  const double t = seconds_since(t0);
  if (t >= kLimitAblation) o.fail(fmt("took %.1f s", t));
  std::string rates;
  for (auto m : harness::all_modes()) rates += " " + harness::to_string(m) + fmt("=%.2f", rate(m));
  if (o.pass) o.detail = "success" + rates + fmt(", %.1f s", t);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const auto dir = fixture::temp_dir("determinism");
  for (const auto& name : harness::suite_object_names()) harness::save_scene(harness::make_suite_scene(name), (dir / "scenes").string());
  auto bench = [&](const std::string& out, const std::string& jobs) {
    std::ostringstream so, se;
    const int code = cli::run({"bench", "--scene", (dir / "scenes" / "*.json").string(), "--seeds", "0-2", "--out",
                               (dir / out).string(), "--jobs", jobs},
                              so, se);
    if (code != 0) o.fail("bench exited " + std::to_string(code) + ": " + se.str());
    return slurp(dir / out / "summary.csv");
  };
  const auto a = bench("a", "4");
  const auto b = bench("b", "4");
  const auto c = bench("c", "1");
  if (a.empty()) o.fail("empty summary.csv");
  if (a != b) o.fail("two concurrent runs differ");
  if (a != c) o.fail("concurrent and serial runs differ");
  if (slurp(dir / "a" / "summary.json") != slurp(dir / "b" / "summary.json")) o.fail("summary.json differs");
  fs::remove_all(dir);
  if (o.pass) o.detail = "summary.csv identical across two --jobs 4 runs and a --jobs 1 run";
  return o;
}

Outcome round_trips() {
  Outcome o;
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int files = 0;
  for (int t = 0; t < 20; ++t) {
    VoxelGrid g({1 + static_cast<int>(rng() % 9), 1 + static_cast<int>(rng() % 9), 1 + static_cast<int>(rng() % 9)},
                0.1 + 0.2 * std::abs(u(rng)), Vec3(u(rng), u(rng), u(rng)));
    for (int z = 0; z < g.dims().z; ++z)
      for (int y = 0; y < g.dims().y; ++y)
        for (int x = 0; x < g.dims().x; ++x) g.set({x, y, z}, rng() % 3 == 0);
    std::stringstream s1;
    voxelgeom::write_vgrid(s1, g);
    const auto back = voxelgeom::read_vgrid(s1);
    std::stringstream s2;
    voxelgeom::write_vgrid(s2, back);
    if (!(back == g) || s1.str() != s2.str()) o.fail("VGRID round-trip differs");

    contacts::ContactField f{g.dims(), g.voxel_size(), g.origin(), {}, t % 2 == 1};
    for (std::size_t i = 0; i < g.size(); ++i) f.values.push_back(t % 2 ? std::abs(u(rng)) : double(rng() % 2));
    std::stringstream c1;
    contacts::write_vcontact(c1, f);
    const auto fb = contacts::read_vcontact(c1);
    std::stringstream c2;
    contacts::write_vcontact(c2, fb);
    if (!(fb == f) || c1.str() != c2.str()) o.fail("VCONTACT round-trip differs");
    files += 2;
  }
  int reports = 0;
  for (const auto& name : harness::suite_object_names()) {
    const auto scene = harness::make_suite_scene(name);
    for (auto mode : harness::all_modes()) {
      auto r = harness::run_pipeline(scene, mode, 1);
      r.duration_ms = 12.5;
      const auto text = harness::report_to_json(r).dump(2);
      const auto back = harness::report_from_json(nlohmann::json::parse(text));
      if (!(back == r)) o.fail("report " + name + " " + harness::to_string(mode) + " does not round-trip");
      if (harness::report_to_json(back).dump(2) != text) o.fail("report JSON text changes on re-serialization");
      ++reports;
    }
  }
  if (o.pass) o.detail = std::to_string(files) + " grid/contact files bit-exact, " + std::to_string(reports) + " reports lossless";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"scoring exactness and monotonicity", scoring},
      {"occlusion matches brute-force oracle", occlusion},
      {"clustering matches quadratic reference", dbscan},
      {"ergonomic winner matches exhaustive search", ergonomics_sweep},
      {"torque zero case and lever formula", torque},
      {"orientation objective is the feasible minimum", orientation},
      {"metric bounds and per-voxel agreement", metric_agreement},
      {"ablation ordering on the suite", ablation},
      {"bench determinism", determinism},
      {"format round-trips", round_trips},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
