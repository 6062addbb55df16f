#include "handover/harness.hpp"

#include <functional>

namespace handover::harness {

namespace {

constexpr int kSuiteDims = 64;
constexpr double kSuiteVoxel = 0.005;

using Solid = std::function<bool(const Vec3&)>;

bool in_box(const Vec3& p, const Vec3& lo, const Vec3& hi) {
  return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
}

// Cylinder along x through (y0, z0).
bool in_rod(const Vec3& p, double x0, double x1, double r, double y0 = 0.0, double z0 = 0.0) {
  const double dy = p.y() - y0, dz = p.z() - z0;
  return p.x() >= x0 && p.x() <= x1 && dy * dy + dz * dz <= r * r;
}

struct ObjectSpec {
  Solid solid;
  Solid handle;
  std::array<Solid, 3> regions;  // hand bands on the handle, one per map
};

ObjectSpec hammer() {
  ObjectSpec s;
  s.handle = [](const Vec3& p) { return in_rod(p, -0.13, 0.06, 0.013); };
  s.solid = [h = s.handle](const Vec3& p) {
    return h(p) || in_box(p, {0.06, -0.016, -0.05}, {0.095, 0.016, 0.05});
  };
  s.regions = {[](const Vec3& p) { return p.x() <= -0.05; },
               [](const Vec3& p) { return p.x() >= -0.11 && p.x() <= -0.03; },
               [](const Vec3& p) { return p.x() <= -0.07; }};
  return s;
}

ObjectSpec pan() {
  ObjectSpec s;
  s.handle = [](const Vec3& p) { return in_box(p, {-0.14, -0.012, -0.008}, {-0.02, 0.012, 0.008}); };
  s.solid = [h = s.handle](const Vec3& p) {
    const double dx = p.x() - 0.06;
    const bool disk = dx * dx + p.y() * p.y() <= 0.085 * 0.085 && std::abs(p.z()) <= 0.01;
    return h(p) || disk;
  };
  s.regions = {[](const Vec3& p) { return p.x() <= -0.04; },
               [](const Vec3& p) { return p.x() <= -0.06; },
               [](const Vec3& p) { return p.x() >= -0.11 && p.x() <= -0.03; }};
  return s;
}

ObjectSpec mug() {
  ObjectSpec s;
  // Rectangular loop on the -x side of the cup.
  s.handle = [](const Vec3& p) {
    const bool bars = p.x() >= -0.04 && p.x() <= 0.012 && std::abs(p.y()) <= 0.008 &&
                      (std::abs(p.z() - 0.03) <= 0.006 || std::abs(p.z() + 0.03) <= 0.006);
    const bool grip = in_box(p, {-0.05, -0.008, -0.036}, {-0.04, 0.008, 0.036});
    return bars || grip;
  };
  s.solid = [h = s.handle](const Vec3& p) {
    const double dx = p.x() - 0.05;
    const double r2 = dx * dx + p.y() * p.y();
    const bool wall = r2 <= 0.042 * 0.042 && r2 >= 0.034 * 0.034 && std::abs(p.z()) <= 0.05;
    const bool floor = r2 <= 0.042 * 0.042 && p.z() >= -0.05 && p.z() <= -0.042;
    return h(p) || wall || floor;
  };
  s.regions = {[](const Vec3& p) { return p.x() <= -0.03; },
               [](const Vec3& p) { return p.x() <= -0.03 && p.z() >= -0.01; },
               [](const Vec3& p) { return p.x() <= -0.01 && p.z() >= 0.0; }};
  return s;
}

ObjectSpec knife() {
  ObjectSpec s;
  s.handle = [](const Vec3& p) { return in_box(p, {-0.13, -0.009, -0.012}, {-0.02, 0.009, 0.012}); };
  s.solid = [h = s.handle](const Vec3& p) {
    // Blade narrows toward the tip.
    const double t = std::clamp((p.x() + 0.02) / 0.14, 0.0, 1.0);
    const bool blade = p.x() >= -0.02 && p.x() <= 0.12 && std::abs(p.y()) <= 0.003 && p.z() >= -0.016 &&
                       p.z() <= 0.016 - 0.02 * t;
    return h(p) || blade;
  };
  s.regions = {[](const Vec3& p) { return p.x() <= -0.04; },
               [](const Vec3& p) { return p.x() <= -0.06; },
               [](const Vec3& p) { return p.x() >= -0.1 && p.x() <= -0.03; }};
  return s;
}

ObjectSpec rod_ball() {
  ObjectSpec s;
  s.handle = [](const Vec3& p) { return in_rod(p, -0.13, 0.05, 0.01); };
  s.solid = [h = s.handle](const Vec3& p) { return h(p) || (p - Vec3(0.085, 0.0, 0.0)).norm() <= 0.045; };
  s.regions = {[](const Vec3& p) { return p.x() <= -0.05; },
               [](const Vec3& p) { return p.x() <= -0.07; },
               [](const Vec3& p) { return p.x() >= -0.11 && p.x() <= -0.03; }};
  return s;
}

ObjectSpec spec_for(const std::string& name) {
  if (name == "hammer") return hammer();
  if (name == "pan") return pan();
  if (name == "mug") return mug();
  if (name == "knife") return knife();
  if (name == "rod_ball") return rod_ball();
  throw Error("unknown suite object '" + name + "'");
}

}  // namespace

const std::vector<std::string>& suite_object_names() {
  static const std::vector<std::string> names{"hammer", "pan", "mug", "knife", "rod_ball"};
  return names;
}

Scene make_suite_scene(const std::string& name) {
  const ObjectSpec spec = spec_for(name);
  const double half = 0.5 * kSuiteDims * kSuiteVoxel;
  VoxelGrid grid({kSuiteDims, kSuiteDims, kSuiteDims}, kSuiteVoxel, Vec3(-half, -half, -half));
  for (int z = 0; z < kSuiteDims; ++z)
    for (int y = 0; y < kSuiteDims; ++y)
      for (int x = 0; x < kSuiteDims; ++x)
        if (spec.solid(grid.center({x, y, z}))) grid.set({x, y, z}, true);

  Scene scene;
  scene.name = name;
  scene.grid_file = name + ".vgrid";
  const auto surface = voxelgeom::surface_voxels(grid);
  for (std::size_t k = 0; k < spec.regions.size(); ++k) {
    ContactMap cm;
    cm.grid_ref = scene.grid_file;
    for (const auto& i : surface) {
      const Vec3 c = grid.center(i);
      if (spec.handle(c) && spec.regions[k](c)) cm.values[i] = 1.0;
    }
    scene.contact_maps.push_back(std::move(cm));
    scene.contact_map_files.push_back(name + "_cm" + std::to_string(k) + ".vcontact");
  }
  scene.grid = std::move(grid);
  scene.human = HumanModel::standard(1.7);
  return scene;
}

}  // namespace handover::harness
