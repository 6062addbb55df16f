#include "handover/voxelgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace handover::voxelgeom {

namespace {

// Largest mesh bounding-box extent accepted by the voxelizer, meters.
constexpr double kMaxMeshExtent = 1.0e4;

struct Point2 {
  double x;
  double y;
};

// Edge function of p against the directed edge a->b, evaluated with the
// endpoints in a canonical order so that e(a,b,p) == -e(b,a,p) bit for bit.
double edge_function(const Point2& a, const Point2& b, const Point2& p) {
  const bool swapped = std::tie(b.x, b.y) < std::tie(a.x, a.y);
  const Point2& lo = swapped ? b : a;
  const Point2& hi = swapped ? a : b;
  const double e = (hi.x - lo.x) * (p.y - lo.y) - (hi.y - lo.y) * (p.x - lo.x);
  return swapped ? -e : e;
}

// Ownership of points lying exactly on an edge of a counter-clockwise
// triangle. owns(d) == !owns(-d), so a shared edge belongs to one triangle.
bool owns_edge(const Point2& a, const Point2& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return dy < 0.0 || (dy == 0.0 && dx > 0.0);
}

}  // namespace

VoxelGrid::VoxelGrid(Index3 dims, double voxel_size, Vec3 origin)
    : dims_(dims), voxel_size_(voxel_size), origin_(std::move(origin)) {
  if (dims.x < 1 || dims.y < 1 || dims.z < 1) throw Error("voxel grid dims must be >= 1");
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size))
    throw Error("voxel size must be positive and finite");
  if (!origin_.allFinite()) throw Error("voxel grid origin must be finite");
  occupancy_.assign(static_cast<std::size_t>(dims.x) * dims.y * dims.z, 0);
}

void VoxelGrid::set(const Index3& i, bool value) {
  if (!in_bounds(i)) throw Error("voxel index out of bounds");
  occupancy_[linear(i)] = value ? 1 : 0;
}

std::optional<Index3> VoxelGrid::locate(const Vec3& p) const {
  const Vec3 rel = (p - origin_) / voxel_size_;
  const Index3 i{static_cast<int>(std::floor(rel.x())), static_cast<int>(std::floor(rel.y())),
                 static_cast<int>(std::floor(rel.z()))};
  if (!in_bounds(i)) return std::nullopt;
  return i;
}

std::size_t VoxelGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count(occupancy_.begin(), occupancy_.end(), 1));
}

std::vector<Index3> VoxelGrid::occupied_voxels() const {
  std::vector<Index3> out;
  for (int x = 0; x < dims_.x; ++x)
    for (int y = 0; y < dims_.y; ++y)
      for (int z = 0; z < dims_.z; ++z)
        if (occupied({x, y, z})) out.push_back({x, y, z});
  return out;
}

Ray Ray::make(const Vec3& origin, const Vec3& direction, double max_distance) {
  const double n = direction.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw Error("ray direction must be nonzero");
  if (!(max_distance > 0.0)) throw Error("ray max_distance must be positive");
  return Ray{origin, direction / n, max_distance};
}

VoxelGrid voxelize_mesh(const TriangleMesh& mesh, Index3 dims, double padding) {
  if (mesh.faces.empty()) throw Error("empty mesh");
  if (!(padding >= 0.0) || !std::isfinite(padding)) throw Error("padding must be >= 0");

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& f : mesh.faces) {
    for (int v : f) {
      if (v < 0 || static_cast<std::size_t>(v) >= mesh.vertices.size())
        throw Error("mesh face references a missing vertex");
      lo = lo.cwiseMin(mesh.vertices[v]);
      hi = hi.cwiseMax(mesh.vertices[v]);
    }
  }
  const Vec3 extent = hi - lo;
  if (!extent.allFinite() || extent.maxCoeff() > kMaxMeshExtent)
    throw Error("mesh larger than representable extent");
  if (!(extent.maxCoeff() > 0.0)) throw Error("mesh has zero extent");

  const Vec3 padded = extent * (1.0 + 2.0 * padding);
  const Vec3 cells(dims.x, dims.y, dims.z);
  const double voxel_size = padded.cwiseQuotient(cells).maxCoeff();
  const Vec3 origin = 0.5 * (lo + hi) - 0.5 * voxel_size * cells;
  VoxelGrid grid(dims, voxel_size, origin);

  // Crossing heights per (x, y) column.
  std::vector<std::vector<double>> crossings(static_cast<std::size_t>(dims.x) * dims.y);
  for (const auto& f : mesh.faces) {
    Vec3 v0 = mesh.vertices[f[0]];
    Vec3 v1 = mesh.vertices[f[1]];
    Vec3 v2 = mesh.vertices[f[2]];
    Point2 a{v0.x(), v0.y()};
    Point2 b{v1.x(), v1.y()};
    Point2 c{v2.x(), v2.y()};
    double area = edge_function(a, b, c);
    if (area == 0.0) continue;  // parallel to the sweep axis
    if (area < 0.0) {
      std::swap(b, c);
      std::swap(v1, v2);
      area = -area;
    }
    const double min_x = std::min({a.x, b.x, c.x});
    const double max_x = std::max({a.x, b.x, c.x});
    const double min_y = std::min({a.y, b.y, c.y});
    const double max_y = std::max({a.y, b.y, c.y});
    const int ix0 = std::max(0, static_cast<int>(std::floor((min_x - origin.x()) / voxel_size - 0.5)));
    const int ix1 = std::min(dims.x - 1, static_cast<int>(std::ceil((max_x - origin.x()) / voxel_size - 0.5)));
    const int iy0 = std::max(0, static_cast<int>(std::floor((min_y - origin.y()) / voxel_size - 0.5)));
    const int iy1 = std::min(dims.y - 1, static_cast<int>(std::ceil((max_y - origin.y()) / voxel_size - 0.5)));
    const bool own_ab = owns_edge(a, b);
    const bool own_bc = owns_edge(b, c);
    const bool own_ca = owns_edge(c, a);
    for (int ix = ix0; ix <= ix1; ++ix) {
      for (int iy = iy0; iy <= iy1; ++iy) {
        const Point2 p{origin.x() + (ix + 0.5) * voxel_size, origin.y() + (iy + 0.5) * voxel_size};
        const double w_c = edge_function(a, b, p);
        const double w_a = edge_function(b, c, p);
        const double w_b = edge_function(c, a, p);
        const bool inside = (w_c > 0.0 || (w_c == 0.0 && own_ab)) &&
                            (w_a > 0.0 || (w_a == 0.0 && own_bc)) &&
                            (w_b > 0.0 || (w_b == 0.0 && own_ca));
        if (!inside) continue;
        const double z = (w_a * v0.z() + w_b * v1.z() + w_c * v2.z()) / area;
        crossings[static_cast<std::size_t>(ix) + static_cast<std::size_t>(dims.x) * iy].push_back(z);
      }
    }
  }

  for (int ix = 0; ix < dims.x; ++ix) {
    for (int iy = 0; iy < dims.y; ++iy) {
      auto& column = crossings[static_cast<std::size_t>(ix) + static_cast<std::size_t>(dims.x) * iy];
      if (column.empty()) continue;
      std::sort(column.begin(), column.end());
      std::size_t below = 0;
      for (int iz = 0; iz < dims.z; ++iz) {
        const double zc = origin.z() + (iz + 0.5) * voxel_size;
        while (below < column.size() && column[below] < zc) ++below;
        if (below % 2 == 1) grid.set({ix, iy, iz}, true);
      }
    }
  }
  return grid;
}

std::vector<Index3> surface_voxels(const VoxelGrid& grid) {
  static constexpr std::array<Index3, 6> kFaces{
      {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
  std::vector<Index3> out;
  const Index3& d = grid.dims();
  for (int x = 0; x < d.x; ++x) {
    for (int y = 0; y < d.y; ++y) {
      for (int z = 0; z < d.z; ++z) {
        if (!grid.occupied({x, y, z})) continue;
        for (const auto& o : kFaces) {
          if (!grid.occupied({x + o.x, y + o.y, z + o.z})) {
            out.push_back({x, y, z});
            break;
          }
        }
      }
    }
  }
  return out;
}

NormalMap estimate_normals(const VoxelGrid& grid, std::span<const Index3> surface) {
  NormalMap normals;
  normals.reserve(surface.size());

  std::optional<Vec3> centroid;
  auto occupied_centroid = [&]() -> const Vec3& {
    if (!centroid) {
      Vec3 sum = Vec3::Zero();
      std::size_t n = 0;
      for (const auto& i : grid.occupied_voxels()) {
        sum += grid.center(i);
        ++n;
      }
      centroid = n > 0 ? Vec3(sum / static_cast<double>(n)) : grid.origin();
    }
    return *centroid;
  };

  for (const auto& v : surface) {
    if (!grid.in_bounds(v)) throw Error("surface index out of bounds");
    Vec3 sum = Vec3::Zero();
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          if (grid.occupied({v.x + dx, v.y + dy, v.z + dz})) sum -= Vec3(dx, dy, dz);
        }
    if (sum.squaredNorm() < 1e-18) {
      sum = grid.center(v) - occupied_centroid();
      if (sum.norm() < 1e-9 * grid.voxel_size()) sum = Vec3::UnitZ();
    }
    normals.emplace(v, sum.normalized());
  }
  return normals;
}

std::vector<SurfaceVoxel> surface_with_normals(const VoxelGrid& grid) {
  const auto surface = surface_voxels(grid);
  const auto normals = estimate_normals(grid, surface);
  std::vector<SurfaceVoxel> out;
  out.reserve(surface.size());
  for (const auto& i : surface) out.push_back({i, grid.center(i), normals.at(i)});
  return out;
}

GridTraversal::GridTraversal(const VoxelGrid& grid, const Ray& ray) {
  const double s = grid.voxel_size();
  const Index3& dims = grid.dims();
  dims_ = {dims.x, dims.y, dims.z};
  const Vec3 lo = grid.origin();
  const Vec3 hi = lo + s * Vec3(dims.x, dims.y, dims.z);
  const Vec3& o = ray.origin;
  const Vec3& d = ray.direction;

  double t0 = 0.0;
  double t1 = ray.max_distance;
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < lo[a] || o[a] >= hi[a]) return;
      continue;
    }
    double ta = (lo[a] - o[a]) / d[a];
    double tb = (hi[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 > t1) return;

  const Vec3 p = o + t0 * d;
  for (int a = 0; a < 3; ++a) {
    const double rel = (p[a] - lo[a]) / s;
    int i = static_cast<int>(std::floor(rel));
    // A start exactly on a boundary while moving downward belongs to the lower cell.
    if (d[a] < 0.0 && rel == std::floor(rel)) --i;
    idx_[a] = std::clamp(i, 0, dims_[a] - 1);
    if (d[a] > 0.0) {
      step_[a] = 1;
      t_max_[a] = (lo[a] + (idx_[a] + 1) * s - o[a]) / d[a];
      t_delta_[a] = s / d[a];
    } else if (d[a] < 0.0) {
      step_[a] = -1;
      t_max_[a] = (lo[a] + idx_[a] * s - o[a]) / d[a];
      t_delta_[a] = -s / d[a];
    } else {
      step_[a] = 0;
      t_max_[a] = std::numeric_limits<double>::infinity();
      t_delta_[a] = std::numeric_limits<double>::infinity();
    }
  }
  t_enter_ = t0;
  t_end_ = t1;
  valid_ = true;
}

void GridTraversal::advance() {
  if (!valid_) return;
  int axis = 0;
  if (t_max_[1] < t_max_[axis]) axis = 1;
  if (t_max_[2] < t_max_[axis]) axis = 2;
  t_enter_ = t_max_[axis];
  idx_[axis] += step_[axis];
  if (t_enter_ > t_end_ || idx_[axis] < 0 || idx_[axis] >= dims_[axis]) {
    valid_ = false;
    return;
  }
  t_max_[axis] += t_delta_[axis];
}

std::optional<RayHit> ray_cast(const VoxelGrid& grid, const Ray& ray,
                               std::span<const Index3> ignore) {
  for (GridTraversal walk(grid, ray); walk.valid(); walk.advance()) {
    const Index3 cur = walk.current();
    if (grid.occupied(cur) && std::find(ignore.begin(), ignore.end(), cur) == ignore.end())
      return RayHit{cur, walk.entry_distance()};
  }
  return std::nullopt;
}

Ray surface_ray(const VoxelGrid& grid, const Index3& from, const Vec3& direction,
                double max_distance) {
  const Vec3 dir = direction.normalized();
  return Ray::make(grid.center(from) + kSelfOcclusionOffset * grid.voxel_size() * dir, dir,
                   max_distance);
}

}  // namespace handover::voxelgeom
