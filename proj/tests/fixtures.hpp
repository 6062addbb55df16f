#pragma once

#include "handover/harness.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace fixture {

using handover::Index3;
using handover::Vec3;
using handover::voxelgeom::VoxelGrid;

/// Blob built from a few overlapping random ellipsoids, centered in a cube grid.
inline VoxelGrid random_blob(std::mt19937_64& rng, int n = 24, double s = 0.005) {
  const double half = 0.5 * n * s;
  VoxelGrid g({n, n, n}, s, Vec3(-half, -half, -half));
  std::uniform_real_distribution<double> c(-0.25 * half, 0.25 * half), r(0.2 * half, 0.55 * half);
  const int parts = 1 + static_cast<int>(rng() % 3);
  std::vector<std::pair<Vec3, Vec3>> ell;
  for (int k = 0; k < parts; ++k) ell.push_back({Vec3(c(rng), c(rng), c(rng)), Vec3(r(rng), r(rng), r(rng))});
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const Vec3 p = g.center({x, y, z});
        for (const auto& [m, rad] : ell)
          if (((p - m).array() / rad.array()).square().sum() <= 1.0) g.set({x, y, z}, true);
      }
  return g;
}

/// Solid axis-aligned block of occupied voxels from lo to hi inclusive.
inline VoxelGrid block(Index3 dims, Index3 lo, Index3 hi, double s = 0.01, Vec3 origin = Vec3::Zero()) {
  VoxelGrid g(dims, s, origin);
  for (int z = lo.z; z <= hi.z; ++z)
    for (int y = lo.y; y <= hi.y; ++y)
      for (int x = lo.x; x <= hi.x; ++x) g.set({x, y, z}, true);
  return g;
}

/// Triangulated UV sphere as OBJ text.
inline std::string sphere_obj(double radius, int stacks = 24, int slices = 48) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "v 0 0 %.17g\n", radius);
  out += buf;
  for (int i = 1; i < stacks; ++i) {
    const double th = M_PI * i / stacks;
    for (int j = 0; j < slices; ++j) {
      const double ph = 2 * M_PI * j / slices;
      std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", radius * std::sin(th) * std::cos(ph),
                    radius * std::sin(th) * std::sin(ph), radius * std::cos(th));
      out += buf;
    }
  }
  std::snprintf(buf, sizeof buf, "v 0 0 %.17g\n", -radius);
  out += buf;
  const int bottom = 2 + (stacks - 1) * slices;
  auto ring = [&](int i, int j) { return 2 + (i - 1) * slices + (j % slices); };
  for (int j = 0; j < slices; ++j) {
    std::snprintf(buf, sizeof buf, "f 1 %d %d\n", ring(1, j), ring(1, j + 1));
    out += buf;
    std::snprintf(buf, sizeof buf, "f %d %d %d\n", bottom, ring(stacks - 1, j + 1), ring(stacks - 1, j));
    out += buf;
  }
  for (int i = 1; i < stacks - 1; ++i)
    for (int j = 0; j < slices; ++j) {
      std::snprintf(buf, sizeof buf, "f %d %d %d\nf %d %d %d\n", ring(i, j), ring(i + 1, j), ring(i + 1, j + 1),
                    ring(i, j), ring(i + 1, j + 1), ring(i, j + 1));
      out += buf;
    }
  return out;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  namespace fs = std::filesystem;
  std::random_device rd;
  const fs::path p = fs::temp_directory_path() / ("handover_" + tag + "_" + std::to_string(rd()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace fixture
