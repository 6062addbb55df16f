#include "handover/harness.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace handover::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw Error("parameter " + key + ": expected a non-negative integer, got '" + value + "'");
  return out;
}

Vec3 vec_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw Error(std::string(what) + " must be a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void Params::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("lambda must lie in [0, 1]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("alpha must lie in [0, 1]");
  if (!(k > 0.0 && k < 1.0)) throw Error("k must lie in (0, 1)");
  if (eps && !(*eps > 0.0)) throw Error("eps must be positive");
  if (min_pts < 1) throw Error("min_pts must be at least 1");
  if (!(position_granularity > 0.0 && position_granularity <= 45.0))
    throw Error("position_granularity must lie in (0, 45] degrees");
  if (!(orientation_granularity > 0.0 && orientation_granularity <= 90.0))
    throw Error("orientation_granularity must lie in (0, 90] degrees");
  const double steps = 360.0 / orientation_granularity;
  if (std::abs(steps - std::round(steps)) > 1e-9) throw Error("orientation_granularity must divide 360");
  if (!(object_mass >= 0.0)) throw Error("object_mass must be non-negative");
  if (max_grasp_candidates < 1) throw Error("max_grasp_candidates must be at least 1");
  if (grasp_seed_points < 2) throw Error("grasp_seed_points must be at least 2");
}

void Params::set(const std::string& key, const std::string& value) {
  const std::string ctx = "parameter " + key;
  if (key == "lambda") lambda = voxelgeom::parse_double(value, ctx);
  else if (key == "alpha") alpha = voxelgeom::parse_double(value, ctx);
  else if (key == "k") k = voxelgeom::parse_double(value, ctx);
  else if (key == "eps") eps = voxelgeom::parse_double(value, ctx);
  else if (key == "min_pts") min_pts = static_cast<int>(parse_count(key, value));
  else if (key == "position_granularity") position_granularity = voxelgeom::parse_double(value, ctx);
  else if (key == "orientation_granularity") orientation_granularity = voxelgeom::parse_double(value, ctx);
  else if (key == "object_mass") object_mass = voxelgeom::parse_double(value, ctx);
  else if (key == "seed") seed = parse_count(key, value);
  else if (key == "max_grasp_candidates") max_grasp_candidates = parse_count(key, value);
  else if (key == "grasp_seed_points") grasp_seed_points = parse_count(key, value);
  else throw Error("unknown parameter '" + key + "'");
  validate();
}

void Scene::validate() const {
  if (name.empty()) throw Error("scene needs a name");
  if (grid.occupied_count() == 0) throw Error("scene object grid is empty");
  if (contact_maps.empty()) throw Error("scene needs at least one contact map");
  if (planning_map >= contact_maps.size()) throw Error("planning map index out of range");
  if (!(robot.stand_off > 0.0)) throw Error("stand-off must be positive");
  if (!(robot.start_distance > 0.0)) throw Error("start distance must be positive");
  if (!(robot.body_dims.minCoeff() > 0.0)) throw Error("robot body dimensions must be positive");
  robot.gripper.validate();
  human.validate();
  params.validate();
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scene file " + path);
  const fs::path dir = fs::path(path).parent_path();
  auto resolve = [&](const std::string& p) { return (dir / p).string(); };

  try {
    const json j = json::parse(in);
    Scene s;
    s.name = j.value("name", fs::path(path).stem().string());

    const auto& obj = j.at("object");
    if (obj.contains("grid")) {
      s.grid_file = obj.at("grid").get<std::string>();
      s.grid = voxelgeom::load_vgrid(resolve(s.grid_file));
    } else if (obj.contains("mesh")) {
      s.mesh_file = obj.at("mesh").get<std::string>();
      const auto dims = obj.value("dims", std::array<int, 3>{64, 64, 64});
      s.grid = voxelgeom::voxelize_mesh(voxelgeom::load_obj(resolve(s.mesh_file)), {dims[0], dims[1], dims[2]},
                                        obj.value("padding", 0.05));
    } else {
      throw Error("object needs a 'grid' or 'mesh' entry");
    }
    if (obj.contains("mesh") && s.mesh_file.empty()) s.mesh_file = obj.at("mesh").get<std::string>();

    const std::string ref = s.grid_file.empty() ? s.mesh_file : s.grid_file;
    for (const auto& f : j.at("contact_maps")) {
      s.contact_map_files.push_back(f.get<std::string>());
      s.contact_maps.push_back(contacts::load_contact_map(resolve(s.contact_map_files.back()), s.grid, ref));
    }
    s.planning_map = j.value("planning_map", std::size_t{0});
    const std::string source = j.value("contact_source", std::string("map"));
    if (source == "map") s.contact_source = ContactSource::Map;
    else if (source == "heuristic") s.contact_source = ContactSource::Heuristic;
    else throw Error("contact_source must be 'map' or 'heuristic'");

    if (j.contains("human")) {
      const auto& h = j.at("human");
      const double height = h.value("height", 1.7);
      const Vec3 base = h.contains("position") ? vec_from(h.at("position"), "human.position") : Vec3::Zero();
      const Vec3 facing = h.contains("facing") ? vec_from(h.at("facing"), "human.facing") : Vec3::UnitX();
      s.human = HumanModel::standard(height, base, facing.normalized());
      read_opt(h, "shoulder_height_fraction", s.human.shoulder_height_fraction);
      read_opt(h, "waist_height_fraction", s.human.waist_height_fraction);
      read_opt(h, "upper_arm_length", s.human.upper_arm_length);
      read_opt(h, "forearm_length", s.human.forearm_length);
      read_opt(h, "upper_arm_mass", s.human.upper_arm_mass);
      read_opt(h, "forearm_mass", s.human.forearm_mass);
      read_opt(h, "hand_mass", s.human.hand_mass);
      read_opt(h, "head_height", s.human.head_height);
      read_opt(h, "arm_plane_offset", s.human.arm_plane_offset);
    }

    if (j.contains("robot")) {
      const auto& r = j.at("robot");
      read_opt(r, "stand_off", s.robot.stand_off);
      read_opt(r, "start_distance", s.robot.start_distance);
      if (r.contains("body_dims")) s.robot.body_dims = vec_from(r.at("body_dims"), "robot.body_dims");
      if (r.contains("tucked_offset")) s.robot.tucked_offset = vec_from(r.at("tucked_offset"), "robot.tucked_offset");
      if (r.contains("gripper")) {
        const auto& g = r.at("gripper");
        read_opt(g, "finger_length", s.robot.gripper.finger_length);
        read_opt(g, "finger_thickness", s.robot.gripper.finger_thickness);
        read_opt(g, "max_width", s.robot.gripper.max_width);
        read_opt(g, "palm_depth", s.robot.gripper.palm_depth);
      }
    }

    if (j.contains("params")) {
      const auto& p = j.at("params");
      read_opt(p, "lambda", s.params.lambda);
      read_opt(p, "alpha", s.params.alpha);
      read_opt(p, "k", s.params.k);
      if (p.contains("eps") && !p.at("eps").is_null()) s.params.eps = p.at("eps").get<double>();
      read_opt(p, "min_pts", s.params.min_pts);
      read_opt(p, "position_granularity", s.params.position_granularity);
      read_opt(p, "orientation_granularity", s.params.orientation_granularity);
      read_opt(p, "object_mass", s.params.object_mass);
      read_opt(p, "seed", s.params.seed);
      read_opt(p, "max_grasp_candidates", s.params.max_grasp_candidates);
      read_opt(p, "grasp_seed_points", s.params.grasp_seed_points);
    }

    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw Error("scene " + path + ": " + e.what());
  } catch (const Error& e) {
    throw Error("scene " + path + ": " + e.what());
  }
}

json scene_to_json(const Scene& s) {
  json j;
  j["name"] = s.name;
  json obj;
  if (!s.grid_file.empty()) obj["grid"] = s.grid_file;
  if (!s.mesh_file.empty()) obj["mesh"] = s.mesh_file;
  j["object"] = obj;
  j["contact_maps"] = s.contact_map_files;
  j["planning_map"] = s.planning_map;
  j["contact_source"] = s.contact_source == ContactSource::Heuristic ? "heuristic" : "map";
  const auto& h = s.human;
  j["human"] = {{"height", h.height},
                {"position", vec_json(h.base_position)},
                {"facing", vec_json(h.facing)},
                {"shoulder_height_fraction", h.shoulder_height_fraction},
                {"waist_height_fraction", h.waist_height_fraction},
                {"upper_arm_length", h.upper_arm_length},
                {"forearm_length", h.forearm_length},
                {"upper_arm_mass", h.upper_arm_mass},
                {"forearm_mass", h.forearm_mass},
                {"hand_mass", h.hand_mass},
                {"head_height", h.head_height},
                {"arm_plane_offset", h.arm_plane_offset}};
  const auto& g = s.robot.gripper;
  j["robot"] = {{"stand_off", s.robot.stand_off},
                {"start_distance", s.robot.start_distance},
                {"body_dims", vec_json(s.robot.body_dims)},
                {"tucked_offset", vec_json(s.robot.tucked_offset)},
                {"gripper",
                 {{"finger_length", g.finger_length},
                  {"finger_thickness", g.finger_thickness},
                  {"max_width", g.max_width},
                  {"palm_depth", g.palm_depth}}}};
  const auto& p = s.params;
  j["params"] = {{"lambda", p.lambda},
                 {"alpha", p.alpha},
                 {"k", p.k},
                 {"eps", p.eps ? json(*p.eps) : json(nullptr)},
                 {"min_pts", p.min_pts},
                 {"position_granularity", p.position_granularity},
                 {"orientation_granularity", p.orientation_granularity},
                 {"object_mass", p.object_mass},
                 {"seed", p.seed},
                 {"max_grasp_candidates", p.max_grasp_candidates},
                 {"grasp_seed_points", p.grasp_seed_points}};
  return j;
}

void save_scene(const Scene& scene, const std::string& dir) {
  fs::create_directories(dir);
  Scene s = scene;
  s.grid_file = s.name + ".vgrid";
  s.mesh_file.clear();
  voxelgeom::save_vgrid((fs::path(dir) / s.grid_file).string(), s.grid);
  s.contact_map_files.clear();
  for (std::size_t k = 0; k < s.contact_maps.size(); ++k) {
    s.contact_map_files.push_back(s.name + "_cm" + std::to_string(k) + ".vcontact");
    contacts::save_vcontact((fs::path(dir) / s.contact_map_files.back()).string(),
                            contacts::to_field(s.contact_maps[k], s.grid));
  }
  const auto path = fs::path(dir) / (s.name + ".json");
  std::ofstream out(path);
  if (!out) throw Error("cannot write scene file " + path.string());
  out << scene_to_json(s).dump(2) << '\n';
}

}  // namespace handover::harness
