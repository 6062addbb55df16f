#pragma once

#include "handover/contacts.hpp"
#include "handover/delivery.hpp"
#include "handover/ergonomics.hpp"
#include "handover/grasping.hpp"
#include "handover/metrics.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace handover::harness {

using contacts::ContactMap;
using ergonomics::HumanModel;
using grasping::GripperModel;
using voxelgeom::VoxelGrid;

enum class AblationMode { Full, A1, A2, A3, A4 };

std::string to_string(AblationMode mode);
AblationMode parse_mode(const std::string& text);
const std::vector<AblationMode>& all_modes();

/// Tunable pipeline parameters. Angles in degrees, mass in kg.
struct Params {
  double lambda = grasping::kDefaultLambda;
  double alpha = ergonomics::kDefaultAlpha;
  double k = metrics::kDefaultSuccessThreshold;
  std::optional<double> eps;  // meters; defaults to 3 voxel edges
  int min_pts = contacts::kDefaultMinPts;
  double position_granularity = 5.0;
  double orientation_granularity = 45.0;
  double object_mass = ergonomics::kDefaultObjectMass;
  std::uint64_t seed = 0;
  std::size_t max_grasp_candidates = 64;
  std::size_t grasp_seed_points = 512;

  void validate() const;
  /// Applies a `key=value` override; throws on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);

  bool operator==(const Params&) const = default;
};

struct RobotSetup {
  double stand_off = 1.2;       // robot base to human at delivery, m
  double start_distance = 2.0;  // robot start to human, m
  Vec3 body_dims = Vec3(0.5, 0.5, 1.1);
  Vec3 tucked_offset = Vec3(0.6, 0.0, 0.8);  // gripper after grasping, robot base frame
  GripperModel gripper;

  bool operator==(const RobotSetup&) const = default;
};

enum class ContactSource { Map, Heuristic };

struct Scene {
  std::string name;
  VoxelGrid grid;
  std::string grid_file;
  std::string mesh_file;
  std::vector<ContactMap> contact_maps;
  std::vector<std::string> contact_map_files;
  std::size_t planning_map = 0;
  ContactSource contact_source = ContactSource::Map;
  HumanModel human;
  RobotSetup robot;
  Params params;

  void validate() const;
  double eps() const { return params.eps.value_or(contacts::kDefaultEpsVoxels * grid.voxel_size()); }
  Vec3 robot_base() const { return human.base_position + robot.stand_off * human.facing; }
  Vec3 robot_to_human() const { return -human.facing; }
};

/// Loads a scene JSON; grid and contact map paths resolve against the file's directory.
Scene load_scene(const std::string& path);
nlohmann::json scene_to_json(const Scene& scene);
/// Writes the scene JSON plus its grid and contact map files into `dir`.
void save_scene(const Scene& scene, const std::string& dir);

struct GraspRecord {
  Pose pose = Pose::Identity();
  double width = 0.0;
  double confidence = 0.0;
  double occlusion = 0.0;
  double score = 0.0;
  std::array<Index3, 2> contact_pair{};
  std::size_t candidate_index = 0;
  std::size_t candidate_count = 0;

  bool operator==(const GraspRecord&) const;
};

struct PositionRecord {
  Vec3 position = Vec3::Zero();
  Vec3 relative_to_shoulder = Vec3::Zero();
  ergonomics::ArmConfig config;
  double f_torque = 0.0;
  double f_disp = 0.0;
  double f_total = 0.0;
  double torque_max = 0.0;
  double disp_max = 0.0;
  std::size_t candidate_count = 0;

  bool operator==(const PositionRecord&) const = default;
};

struct OrientationRecord {
  std::size_t sample_index = 0;
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  double roll_deg = 0.0;
  bool random = false;
  Pose gripper_pose = Pose::Identity();
  Pose object_pose = Pose::Identity();
  double objective = 0.0;
  std::size_t feasible_count = 0;
  std::size_t sample_count = 0;

  bool operator==(const OrientationRecord&) const;
};

struct HandoverReport {
  std::string object;
  AblationMode mode = AblationMode::Full;
  std::uint64_t seed = 0;
  double lambda = 0.0;  // effective for this mode
  double alpha = 0.0;
  double k = 0.0;
  std::vector<std::string> stages;  // in execution order
  std::optional<GraspRecord> grasp;
  std::optional<PositionRecord> position;
  std::optional<OrientationRecord> orientation;
  Pose final_gripper_pose = Pose::Identity();
  Pose final_object_pose = Pose::Identity();
  Vec3 robot_base = Vec3::Zero();
  std::vector<double> visibility;  // per contact map
  std::vector<double> reachability;
  double visibility_median = 0.0;
  double reachability_median = 0.0;
  bool success = false;
  std::string failure_stage;
  std::string failure_reason;
  std::optional<double> duration_ms;

  bool operator==(const HandoverReport&) const;
};

/// Intermediate products kept for diagnostics export.
struct PipelineResult {
  HandoverReport report;
  std::vector<grasping::RankedGrasp> ranked;
  std::optional<ergonomics::PositionPlan> position_plan;
  std::optional<delivery::HandoverPose> handover;
};

PipelineResult run_pipeline_detailed(const Scene& scene, AblationMode mode, std::uint64_t seed);
HandoverReport run_pipeline(const Scene& scene, AblationMode mode, std::uint64_t seed);

struct ModeSummary {
  AblationMode mode = AblationMode::Full;
  std::size_t runs = 0;
  std::size_t successes = 0;
  double visibility = 0.0;    // mean of per-run medians
  double reachability = 0.0;  // mean of per-run medians
  double success_rate = 0.0;  // successful runs / runs
  double visibility_median = 0.0;    // median over runs
  double reachability_median = 0.0;  // median over runs
  std::size_t objects = 0;
  double object_success_rate = 0.0;  // objects whose seed-averaged scores both exceed k
};

struct Summary {
  std::vector<ModeSummary> modes;  // in AblationMode order
};

Summary aggregate(std::span<const HandoverReport> reports);
void write_summary_csv(std::ostream& out, const Summary& summary);
nlohmann::json summary_to_json(const Summary& summary);

nlohmann::json report_to_json(const HandoverReport& report);
HandoverReport report_from_json(const nlohmann::json& j);
std::string report_file_name(const HandoverReport& report);

nlohmann::json pose_to_json(const Pose& pose);
Pose pose_from_json(const nlohmann::json& j);
/// One record per ranked grasp: pose, width, S, O, C.
nlohmann::json grasps_to_json(std::span<const grasping::RankedGrasp> ranked);
void write_ergonomics_csv(std::ostream& out, const ergonomics::PositionPlan& plan);
nlohmann::json orientation_diagnostics(const delivery::HandoverPose& pose);

// Bundled synthetic objects.

const std::vector<std::string>& suite_object_names();
/// Procedural object with three hand-authored contact maps on its handle.
Scene make_suite_scene(const std::string& name);

}  // namespace handover::harness
