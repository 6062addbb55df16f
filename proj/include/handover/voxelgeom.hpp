#pragma once

#include "handover/geometry.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace handover::voxelgeom {

/// Dense boolean occupancy over dims.x * dims.y * dims.z voxels. Voxel (0,0,0)
/// has its min corner at `origin`; every voxel is a cube of edge `voxel_size`.
class VoxelGrid {
public:
  VoxelGrid() = default;
  VoxelGrid(Index3 dims, double voxel_size, Vec3 origin);

  const Index3& dims() const { return dims_; }
  double voxel_size() const { return voxel_size_; }
  const Vec3& origin() const { return origin_; }

  bool in_bounds(const Index3& i) const {
    return i.x >= 0 && i.y >= 0 && i.z >= 0 && i.x < dims_.x && i.y < dims_.y && i.z < dims_.z;
  }
  std::size_t linear(const Index3& i) const {
    return static_cast<std::size_t>(i.x) +
           static_cast<std::size_t>(dims_.x) *
               (static_cast<std::size_t>(i.y) + static_cast<std::size_t>(dims_.y) * i.z);
  }
  std::size_t size() const { return occupancy_.size(); }

  /// Out-of-bounds voxels read as unoccupied.
  bool occupied(const Index3& i) const { return in_bounds(i) && occupancy_[linear(i)] != 0; }
  void set(const Index3& i, bool value);

  Vec3 center(const Index3& i) const {
    return origin_ + voxel_size_ * Vec3(i.x + 0.5, i.y + 0.5, i.z + 0.5);
  }
  /// Voxel containing p, if p lies inside the grid.
  std::optional<Index3> locate(const Vec3& p) const;

  std::size_t occupied_count() const;
  std::vector<Index3> occupied_voxels() const;
  const std::vector<std::uint8_t>& occupancy() const { return occupancy_; }

  bool operator==(const VoxelGrid&) const = default;

private:
  Index3 dims_{};
  double voxel_size_ = 0.0;
  Vec3 origin_ = Vec3::Zero();
  std::vector<std::uint8_t> occupancy_;
};

struct SurfaceVoxel {
  Index3 index;
  Vec3 center;
  Vec3 normal;
};

using NormalMap = std::unordered_map<Index3, Vec3, Index3Hash>;

/// Ray with unit direction; hits beyond max_distance are ignored.
struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();
  double max_distance = 1.0;

  /// Normalizes `direction`; throws on a zero direction or non-positive range.
  static Ray make(const Vec3& origin, const Vec3& direction, double max_distance);
};

struct RayHit {
  Index3 index;
  double distance = 0.0;
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
};

/// Solid voxelization by crossing-parity along +z through each voxel column.
/// The grid is uniform: voxel_size is chosen so the padded bounding box fits
/// in every dimension, and the box is centered in the grid.
VoxelGrid voxelize_mesh(const TriangleMesh& mesh, Index3 dims, double padding);

/// Occupied voxels with at least one unoccupied 6-neighbor, sorted by index.
std::vector<Index3> surface_voxels(const VoxelGrid& grid);

/// Outward unit normals: the normalized sum of offsets from occupied
/// 26-neighbors toward the voxel. Falls back to the direction from the
/// occupied centroid, then to +z when both vanish.
NormalMap estimate_normals(const VoxelGrid& grid, std::span<const Index3> surface);

std::vector<SurfaceVoxel> surface_with_normals(const VoxelGrid& grid);

/// Incremental voxel traversal (Amanatides-Woo): visits every voxel the ray
/// passes through, in order, together with the ray parameter where it enters.
class GridTraversal {
public:
  GridTraversal(const VoxelGrid& grid, const Ray& ray);

  /// False once the ray has left the grid or exceeded max_distance.
  bool valid() const { return valid_; }
  Index3 current() const { return {idx_[0], idx_[1], idx_[2]}; }
  double entry_distance() const { return t_enter_; }
  void advance();

private:
  std::array<int, 3> idx_{};
  std::array<int, 3> step_{};
  std::array<int, 3> dims_{};
  std::array<double, 3> t_max_{};
  std::array<double, 3> t_delta_{};
  double t_enter_ = 0.0;
  double t_end_ = 0.0;
  bool valid_ = false;
};

/// First occupied voxel along the ray (Amanatides-Woo traversal), skipping the
/// indices in `ignore`. `distance` is the ray parameter where the voxel is entered.
std::optional<RayHit> ray_cast(const VoxelGrid& grid, const Ray& ray,
                               std::span<const Index3> ignore = {});

/// Offset applied to rays that leave a surface voxel, in voxel edge lengths.
constexpr double kSelfOcclusionOffset = 1.5;

/// Ray leaving surface voxel `from` along `direction`, offset by the
/// self-occlusion rule. Pair with `ignore = {from}` when casting.
Ray surface_ray(const VoxelGrid& grid, const Index3& from, const Vec3& direction,
                double max_distance);

// Mesh and grid files.

TriangleMesh read_obj(std::istream& in, const std::string& source = "<stream>");
TriangleMesh load_obj(const std::string& path);

void write_vgrid(std::ostream& out, const VoxelGrid& grid);
VoxelGrid read_vgrid(std::istream& in, const std::string& source = "<stream>");
void save_vgrid(const std::string& path, const VoxelGrid& grid);
VoxelGrid load_vgrid(const std::string& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& token, const std::string& context);

}  // namespace handover::voxelgeom
