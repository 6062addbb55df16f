#include "handover/harness.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>
#include <utility>

namespace handover::harness {

using nlohmann::json;

std::string to_string(AblationMode mode) {
  switch (mode) {
    case AblationMode::Full: return "FULL";
    case AblationMode::A1: return "A1";
    case AblationMode::A2: return "A2";
    case AblationMode::A3: return "A3";
    case AblationMode::A4: return "A4";
  }
  throw Error("unknown ablation mode");
}

AblationMode parse_mode(const std::string& text) {
  std::string upper = text;
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (auto m : all_modes())
    if (to_string(m) == upper) return m;
  throw Error("unknown mode '" + text + "' (expected FULL, A1, A2, A3 or A4)");
}

const std::vector<AblationMode>& all_modes() {
  static const std::vector<AblationMode> modes{AblationMode::Full, AblationMode::A1, AblationMode::A2,
                                               AblationMode::A3, AblationMode::A4};
  return modes;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

bool confidence_only(AblationMode m) {
  return m == AblationMode::A1 || m == AblationMode::A3 || m == AblationMode::A4;
}

bool random_orientation(AblationMode m) { return m == AblationMode::A2 || m == AblationMode::A3; }

// Seeds the orientation draw on a stream separate from grasp sampling.
constexpr std::uint64_t kOrientationStream = 0x6f7269656e74ULL;

Mat3 base_frame(const Vec3& forward) {
  Vec3 f = forward;
  f.z() = 0.0;
  f.normalize();
  Mat3 r;
  r.col(0) = f;
  r.col(1) = Vec3::UnitZ().cross(f);
  r.col(2) = Vec3::UnitZ();
  return r;
}

struct StageFailure {
  std::string stage;
  std::string reason;
};

class Run {
public:
  Run(const Scene& scene, AblationMode mode, std::uint64_t seed) : scene_(scene), mode_(mode), seed_(seed) {
    auto& r = result_.report;
    r.object = scene.name;
    r.mode = mode;
    r.seed = seed;
    r.lambda = confidence_only(mode) ? 1.0 : scene.params.lambda;
    r.alpha = scene.params.alpha;
    r.k = scene.params.k;
    r.robot_base = scene.robot_base();
  }

  PipelineResult execute() {
    try {
      stage("scene", [&] { scene_.validate(); });
      stage("contacts", [&] { contacts(); });
      stage("grasping", [&] { grasping(); });
      if (mode_ == AblationMode::A4) {
        stage("placement", [&] { tucked(); });
      } else {
        stage("ergonomics", [&] { ergonomics(); });
        stage("delivery", [&] { delivery(); });
      }
      stage("metrics", [&] { metrics(); });
    } catch (const StageFailure& f) {
      auto& r = result_.report;
      r.success = false;
      r.failure_stage = f.stage;
      r.failure_reason = f.reason;
    }
    return std::move(result_);
  }

private:
  template <typename F>
  void stage(const char* name, F&& body) {
    result_.report.stages.emplace_back(name);
    try {
      body();
    } catch (const std::exception& e) {
      throw StageFailure{name, e.what()};
    }
  }

  void contacts() {
    const auto& grid = scene_.grid;
    const ContactMap planning = scene_.contact_source == ContactSource::Heuristic
                                    ? contacts::predict_contacts_heuristic(grid, scene_.name)
                                    : scene_.contact_maps.at(scene_.planning_map);
    const auto clusters = contacts::cluster_contacts(planning, grid, scene_.eps(), scene_.params.min_pts);
    c_pred_ = contacts::largest_cluster(clusters);
  }

  void grasping() {
    const auto& grid = scene_.grid;
    const auto surface = voxelgeom::surface_voxels(grid);
    normals_ = voxelgeom::estimate_normals(grid, surface);
    grasping::SamplerOptions options;
    options.max_seed_points = scene_.params.grasp_seed_points;
    const auto candidates = grasping::sample_grasps(grid, normals_, scene_.robot.gripper,
                                                    scene_.params.max_grasp_candidates, seed_, options);
    result_.ranked = grasping::rank_grasps(candidates, c_pred_, result_.report.lambda, normals_,
                                           scene_.robot.gripper, grid);
    const auto& top = result_.ranked.front();
    GraspRecord g;
    g.pose = top.candidate.pose;
    g.width = top.candidate.width;
    g.confidence = top.candidate.confidence;
    g.occlusion = top.occlusion;
    g.score = top.score;
    g.contact_pair = top.candidate.contact_pair;
    g.candidate_index = top.index;
    g.candidate_count = candidates.size();
    result_.report.grasp = g;
  }

  void tucked() {
    const auto& top = result_.ranked.front();
    Pose gripper = Pose::Identity();
    const Mat3 base = base_frame(scene_.robot_to_human());
    gripper.linear() = base * top.candidate.pose.linear();
    gripper.translation() = scene_.robot_base() + base * scene_.robot.tucked_offset;
    gripper_pose_ = gripper;
    object_pose_ = delivery::object_pose_for(gripper, top.candidate);
  }

  void ergonomics() {
    const auto& human = scene_.human;
    auto plan = ergonomics::plan_handover_position(human, scene_.params.object_mass, scene_.params.alpha,
                                                   scene_.params.position_granularity);
    PositionRecord p;
    p.position = plan.position;
    p.relative_to_shoulder = plan.position - human.shoulder_position();
    p.config = plan.winner.config;
    p.f_torque = plan.winner.f_torque;
    p.f_disp = plan.winner.f_disp;
    p.f_total = plan.winner.f_total;
    p.torque_max = plan.torque_max;
    p.disp_max = plan.disp_max;
    p.candidate_count = plan.candidates.size();
    result_.report.position = p;
    result_.position_plan = std::move(plan);
  }

  void delivery() {
    const auto& top = result_.ranked.front();
    const auto context = delivery::DeliveryContext::make(scene_.grid, scene_.robot.gripper, scene_.robot_to_human(),
                                                         scene_.params.orientation_granularity);
    const Vec3 ee = result_.position_plan->position;
    auto candidates = delivery::evaluate_orientations(top, c_pred_, scene_.human, ee, context);
    std::size_t chosen = 0;
    std::size_t feasible = 0;
    for (const auto& c : candidates) feasible += c.feasible() ? 1 : 0;
    if (random_orientation(mode_)) {
      std::vector<std::size_t> pool;
      for (std::size_t k = 0; k < candidates.size(); ++k)
        if (candidates[k].feasible()) pool.push_back(k);
      if (pool.empty()) throw Error("no feasible handover orientation");
      std::mt19937_64 rng(seed_ ^ kOrientationStream);
      chosen = pool[rng() % pool.size()];
    } else {
      chosen = delivery::select_orientation(candidates);
    }
    const std::size_t sample_count = candidates.size();
    auto pose = delivery::make_handover_pose(top, c_pred_, scene_.human, ee, context, std::move(candidates), chosen);

    OrientationRecord o;
    o.sample_index = pose.sample_index;
    o.azimuth_deg = pose.sample.azimuth_deg;
    o.elevation_deg = pose.sample.elevation_deg;
    o.roll_deg = pose.sample.roll_deg;
    o.random = random_orientation(mode_);
    o.gripper_pose = pose.gripper_pose;
    o.object_pose = pose.object_pose;
    o.objective = pose.objective;
    o.feasible_count = feasible;
    o.sample_count = sample_count;
    result_.report.orientation = o;
    gripper_pose_ = pose.gripper_pose;
    object_pose_ = pose.object_pose;
    result_.handover = std::move(pose);
  }

  void metrics() {
    auto& r = result_.report;
    r.final_gripper_pose = gripper_pose_;
    r.final_object_pose = object_pose_;
    metrics::HandoverScene hs;
    hs.grid = &scene_.grid;
    hs.object_pose = object_pose_;
    hs.gripper_pose = gripper_pose_;
    hs.gripper_width = r.grasp->width;
    hs.gripper = scene_.robot.gripper;
    hs.robot_body = metrics::robot_body_box(scene_.robot_base(), scene_.robot_to_human(), scene_.robot.body_dims);
    hs.human = scene_.human;
    const auto scores = metrics::evaluate(hs, scene_.contact_maps);
    r.visibility = scores.visibility;
    r.reachability = scores.reachability;
    r.visibility_median = scores.visibility_median;
    r.reachability_median = scores.reachability_median;
    r.success = metrics::success(r.visibility, r.reachability, r.k);
  }

  const Scene& scene_;
  AblationMode mode_;
  std::uint64_t seed_;
  PipelineResult result_;
  contacts::ContactCluster c_pred_;
  voxelgeom::NormalMap normals_;
  Pose gripper_pose_ = Pose::Identity();
  Pose object_pose_ = Pose::Identity();
};

}  // namespace

PipelineResult run_pipeline_detailed(const Scene& scene, AblationMode mode, std::uint64_t seed) {
  return Run(scene, mode, seed).execute();
}

HandoverReport run_pipeline(const Scene& scene, AblationMode mode, std::uint64_t seed) {
  return run_pipeline_detailed(scene, mode, seed).report;
}

// ---------------------------------------------------------------------------
// Aggregation

namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

Summary aggregate(std::span<const HandoverReport> reports) {
  if (reports.empty()) throw Error("no reports to aggregate");

  // object x mode groups must agree on the parameters that define success.
  std::map<std::pair<std::string, AblationMode>, const HandoverReport*> first;
  for (const auto& r : reports) {
    auto [it, inserted] = first.try_emplace({r.object, r.mode}, &r);
    if (!inserted && (it->second->k != r.k || it->second->lambda != r.lambda))
      throw Error("mixed parameters for " + r.object + "/" + to_string(r.mode) + ": k and lambda must match");
  }

  Summary summary;
  for (auto mode : all_modes()) {
    std::vector<double> vis, reach;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per_object;
    std::map<std::string, double> object_k;
    ModeSummary m;
    m.mode = mode;
    for (const auto& r : reports) {
      if (r.mode != mode) continue;
      ++m.runs;
      if (r.success) ++m.successes;
      vis.push_back(r.visibility_median);
      reach.push_back(r.reachability_median);
      auto& [ov, orr] = per_object[r.object];
      ov.push_back(r.visibility_median);
      orr.push_back(r.reachability_median);
      object_k[r.object] = r.k;
    }
    if (m.runs == 0) continue;
    m.visibility = mean(vis);
    m.reachability = mean(reach);
    m.success_rate = static_cast<double>(m.successes) / static_cast<double>(m.runs);
    m.visibility_median = metrics::lower_median(vis);
    m.reachability_median = metrics::lower_median(reach);
    m.objects = per_object.size();
    std::size_t ok = 0;
    for (const auto& [name, lists] : per_object) {
      const double k = object_k[name];
      if (mean(lists.first) > k && mean(lists.second) > k) ++ok;
    }
    m.object_success_rate = static_cast<double>(ok) / static_cast<double>(m.objects);
    summary.modes.push_back(m);
  }
  return summary;
}

void write_summary_csv(std::ostream& out, const Summary& summary) {
  out << "Mode,Visibility,Reachability,SuccessRate\n";
  char buf[128];
  for (const auto& m : summary.modes) {
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f\n", to_string(m.mode).c_str(), m.visibility, m.reachability,
                  m.success_rate);
    out << buf;
  }
}

json summary_to_json(const Summary& summary) {
  json modes = json::array();
  for (const auto& m : summary.modes) {
    modes.push_back({{"mode", to_string(m.mode)},
                     {"runs", m.runs},
                     {"successes", m.successes},
                     {"visibility_mean", m.visibility},
                     {"reachability_mean", m.reachability},
                     {"visibility_median", m.visibility_median},
                     {"reachability_median", m.reachability_median},
                     {"success_rate", m.success_rate},
                     {"objects", m.objects},
                     {"object_success_rate", m.object_success_rate}});
  }
  return json{{"modes", modes}};
}

// ---------------------------------------------------------------------------
// Report serialization

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json index_json(const Index3& i) { return json::array({i.x, i.y, i.z}); }

Index3 index_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error("expected a voxel index triple");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

bool same_pose(const Pose& a, const Pose& b) { return a.matrix() == b.matrix(); }

}  // namespace

json pose_to_json(const Pose& pose) {
  const auto m = to_row_major(pose);
  json rows = json::array();
  for (int r = 0; r < 4; ++r) rows.push_back({m[4 * r], m[4 * r + 1], m[4 * r + 2], m[4 * r + 3]});
  return rows;
}

Pose pose_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw Error("pose must be a 4x4 matrix");
  std::array<double, 16> m{};
  for (int r = 0; r < 4; ++r) {
    if (!j[r].is_array() || j[r].size() != 4) throw Error("pose must be a 4x4 matrix");
    for (int c = 0; c < 4; ++c) m[4 * r + c] = j[r][c].get<double>();
  }
  return from_row_major(m);
}

bool GraspRecord::operator==(const GraspRecord& o) const {
  return same_pose(pose, o.pose) && width == o.width && confidence == o.confidence && occlusion == o.occlusion &&
         score == o.score && contact_pair == o.contact_pair && candidate_index == o.candidate_index &&
         candidate_count == o.candidate_count;
}

bool OrientationRecord::operator==(const OrientationRecord& o) const {
  return sample_index == o.sample_index && azimuth_deg == o.azimuth_deg && elevation_deg == o.elevation_deg &&
         roll_deg == o.roll_deg && random == o.random && same_pose(gripper_pose, o.gripper_pose) &&
         same_pose(object_pose, o.object_pose) && objective == o.objective && feasible_count == o.feasible_count &&
         sample_count == o.sample_count;
}

bool HandoverReport::operator==(const HandoverReport& o) const {
  return object == o.object && mode == o.mode && seed == o.seed && lambda == o.lambda && alpha == o.alpha &&
         k == o.k && stages == o.stages && grasp == o.grasp && position == o.position &&
         orientation == o.orientation && same_pose(final_gripper_pose, o.final_gripper_pose) &&
         same_pose(final_object_pose, o.final_object_pose) && robot_base == o.robot_base &&
         visibility == o.visibility && reachability == o.reachability &&
         visibility_median == o.visibility_median && reachability_median == o.reachability_median &&
         success == o.success && failure_stage == o.failure_stage && failure_reason == o.failure_reason &&
         duration_ms == o.duration_ms;
}

json report_to_json(const HandoverReport& r) {
  json j;
  j["object"] = r.object;
  j["mode"] = to_string(r.mode);
  j["seed"] = r.seed;
  j["params"] = {{"lambda", r.lambda}, {"alpha", r.alpha}, {"k", r.k}};
  j["stages"] = r.stages;
  if (r.grasp) {
    const auto& g = *r.grasp;
    j["grasp"] = {{"pose", pose_to_json(g.pose)},
                  {"width", g.width},
                  {"confidence", g.confidence},
                  {"occlusion", g.occlusion},
                  {"score", g.score},
                  {"contact_pair", {index_json(g.contact_pair[0]), index_json(g.contact_pair[1])}},
                  {"candidate_index", g.candidate_index},
                  {"candidate_count", g.candidate_count}};
  } else {
    j["grasp"] = nullptr;
  }
  if (r.position) {
    const auto& p = *r.position;
    j["position"] = {{"point", vec_json(p.position)},
                     {"relative_to_shoulder", vec_json(p.relative_to_shoulder)},
                     {"shoulder_deg", p.config.shoulder_deg},
                     {"elbow_deg", p.config.elbow_deg},
                     {"f_torque", p.f_torque},
                     {"f_disp", p.f_disp},
                     {"f_total", p.f_total},
                     {"torque_max", p.torque_max},
                     {"disp_max", p.disp_max},
                     {"candidate_count", p.candidate_count}};
  } else {
    j["position"] = nullptr;
  }
  if (r.orientation) {
    const auto& o = *r.orientation;
    j["orientation"] = {{"sample_index", o.sample_index},
                        {"azimuth_deg", o.azimuth_deg},
                        {"elevation_deg", o.elevation_deg},
                        {"roll_deg", o.roll_deg},
                        {"random", o.random},
                        {"gripper_pose", pose_to_json(o.gripper_pose)},
                        {"object_pose", pose_to_json(o.object_pose)},
                        {"objective", o.objective},
                        {"feasible_count", o.feasible_count},
                        {"sample_count", o.sample_count}};
  } else {
    j["orientation"] = nullptr;
  }
  j["final_gripper_pose"] = pose_to_json(r.final_gripper_pose);
  j["final_object_pose"] = pose_to_json(r.final_object_pose);
  j["robot_base"] = vec_json(r.robot_base);
  j["scores"] = {{"visibility", r.visibility},
                 {"reachability", r.reachability},
                 {"visibility_median", r.visibility_median},
                 {"reachability_median", r.reachability_median}};
  j["success"] = r.success;
  if (r.failure_stage.empty())
    j["failure"] = nullptr;
  else
    j["failure"] = {{"stage", r.failure_stage}, {"reason", r.failure_reason}};
  if (r.duration_ms) j["duration_ms"] = *r.duration_ms;
  return j;
}

HandoverReport report_from_json(const json& j) {
  try {
    HandoverReport r;
    r.object = j.at("object").get<std::string>();
    r.mode = parse_mode(j.at("mode").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    const auto& p = j.at("params");
    r.lambda = p.at("lambda").get<double>();
    r.alpha = p.at("alpha").get<double>();
    r.k = p.at("k").get<double>();
    r.stages = j.at("stages").get<std::vector<std::string>>();
    if (const auto& g = j.at("grasp"); !g.is_null()) {
      GraspRecord rec;
      rec.pose = pose_from_json(g.at("pose"));
      rec.width = g.at("width").get<double>();
      rec.confidence = g.at("confidence").get<double>();
      rec.occlusion = g.at("occlusion").get<double>();
      rec.score = g.at("score").get<double>();
      rec.contact_pair = {index_from(g.at("contact_pair").at(0)), index_from(g.at("contact_pair").at(1))};
      rec.candidate_index = g.at("candidate_index").get<std::size_t>();
      rec.candidate_count = g.at("candidate_count").get<std::size_t>();
      r.grasp = rec;
    }
    if (const auto& q = j.at("position"); !q.is_null()) {
      PositionRecord rec;
      rec.position = vec_from(q.at("point"));
      rec.relative_to_shoulder = vec_from(q.at("relative_to_shoulder"));
      rec.config = {q.at("shoulder_deg").get<double>(), q.at("elbow_deg").get<double>()};
      rec.f_torque = q.at("f_torque").get<double>();
      rec.f_disp = q.at("f_disp").get<double>();
      rec.f_total = q.at("f_total").get<double>();
      rec.torque_max = q.at("torque_max").get<double>();
      rec.disp_max = q.at("disp_max").get<double>();
      rec.candidate_count = q.at("candidate_count").get<std::size_t>();
      r.position = rec;
    }
    if (const auto& o = j.at("orientation"); !o.is_null()) {
      OrientationRecord rec;
      rec.sample_index = o.at("sample_index").get<std::size_t>();
      rec.azimuth_deg = o.at("azimuth_deg").get<double>();
      rec.elevation_deg = o.at("elevation_deg").get<double>();
      rec.roll_deg = o.at("roll_deg").get<double>();
      rec.random = o.at("random").get<bool>();
      rec.gripper_pose = pose_from_json(o.at("gripper_pose"));
      rec.object_pose = pose_from_json(o.at("object_pose"));
      rec.objective = o.at("objective").get<double>();
      rec.feasible_count = o.at("feasible_count").get<std::size_t>();
      rec.sample_count = o.at("sample_count").get<std::size_t>();
      r.orientation = rec;
    }
    r.final_gripper_pose = pose_from_json(j.at("final_gripper_pose"));
    r.final_object_pose = pose_from_json(j.at("final_object_pose"));
    r.robot_base = vec_from(j.at("robot_base"));
    const auto& s = j.at("scores");
    r.visibility = s.at("visibility").get<std::vector<double>>();
    r.reachability = s.at("reachability").get<std::vector<double>>();
    r.visibility_median = s.at("visibility_median").get<double>();
    r.reachability_median = s.at("reachability_median").get<double>();
    r.success = j.at("success").get<bool>();
    if (const auto& f = j.at("failure"); !f.is_null()) {
      r.failure_stage = f.at("stage").get<std::string>();
      r.failure_reason = f.at("reason").get<std::string>();
    }
    if (j.contains("duration_ms")) r.duration_ms = j.at("duration_ms").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
}

std::string report_file_name(const HandoverReport& r) {
  return "report_" + r.object + "_" + to_string(r.mode) + "_" + std::to_string(r.seed) + ".json";
}

// ---------------------------------------------------------------------------
// Diagnostics

json grasps_to_json(std::span<const grasping::RankedGrasp> ranked) {
  json out = json::array();
  for (const auto& g : ranked) {
    out.push_back({{"index", g.index},
                   {"pose", pose_to_json(g.candidate.pose)},
                   {"width", g.candidate.width},
                   {"confidence", g.candidate.confidence},
                   {"occlusion", g.occlusion},
                   {"score", g.score}});
  }
  return out;
}

void write_ergonomics_csv(std::ostream& out, const ergonomics::PositionPlan& plan) {
  out << "shoulder_deg,elbow_deg,x,y,z,torque_raw,disp_raw,f_torque,f_disp,f_total,winner\n";
  for (const auto& c : plan.candidates) {
    const bool winner = c.config == plan.winner.config;
    out << voxelgeom::format_double(c.config.shoulder_deg) << ',' << voxelgeom::format_double(c.config.elbow_deg)
        << ',' << voxelgeom::format_double(c.hand_position.x()) << ','
        << voxelgeom::format_double(c.hand_position.y()) << ',' << voxelgeom::format_double(c.hand_position.z())
        << ',' << voxelgeom::format_double(c.torque_raw) << ',' << voxelgeom::format_double(c.disp_raw) << ','
        << voxelgeom::format_double(c.f_torque) << ',' << voxelgeom::format_double(c.f_disp) << ','
        << voxelgeom::format_double(c.f_total) << ',' << (winner ? 1 : 0) << '\n';
  }
}

json orientation_diagnostics(const delivery::HandoverPose& pose) {
  json rows = json::array();
  for (const auto& c : pose.candidates) {
    json row{{"sample_index", c.sample_index},
             {"azimuth_deg", c.sample.azimuth_deg},
             {"elevation_deg", c.sample.elevation_deg},
             {"roll_deg", c.sample.roll_deg},
             {"clear_of_human", c.feasibility.clear_of_human},
             {"above_clearance", c.feasibility.above_clearance},
             {"approach_in_cone", c.feasibility.approach_in_cone},
             {"chosen", c.sample_index == pose.sample_index}};
    row["objective"] = c.objective ? json(*c.objective) : json(nullptr);
    rows.push_back(std::move(row));
  }
  return json{{"chosen", pose.sample_index}, {"objective", pose.objective}, {"samples", rows}};
}

}  // namespace handover::harness
