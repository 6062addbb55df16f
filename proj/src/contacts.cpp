#include "handover/contacts.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace handover::contacts {

using voxelgeom::format_double;
using voxelgeom::parse_double;

std::vector<Index3> ContactMap::contact_indices() const {
  std::vector<Index3> out;
  for (const auto& [i, v] : values)
    if (v >= threshold) out.push_back(i);
  return out;
}

double ContactMap::label(const Index3& i) const {
  const auto it = values.find(i);
  return it != values.end() && it->second >= threshold ? 1.0 : 0.0;
}

double ContactMap::total_weight() const {
  double sum = 0.0;
  for (const auto& [i, v] : values) sum += v >= threshold ? 1.0 : 0.0;
  return sum;
}

// ---------------------------------------------------------------------------
// VCONTACT files

namespace {

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(source + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

int parse_int(const std::string& s, const std::string& ctx) {
  const double v = parse_double(s, ctx);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw Error(ctx + ": expected integer, got '" + s + "'");
  return static_cast<int>(v);
}

}  // namespace

void write_vcontact(std::ostream& out, const ContactField& field) {
  const Index3& d = field.dims;
  out << "VCONTACT 1\n";
  out << "dims " << d.x << ' ' << d.y << ' ' << d.z << '\n';
  out << "voxel_size " << format_double(field.voxel_size) << '\n';
  out << "origin " << format_double(field.origin.x()) << ' ' << format_double(field.origin.y()) << ' '
      << format_double(field.origin.z()) << '\n';
  std::size_t k = 0;
  for (int z = 0; z < d.z; ++z) {
    for (int y = 0; y < d.y; ++y) {
      std::string row;
      for (int x = 0; x < d.x; ++x, ++k) {
        const double v = field.values.at(k);
        if (field.probabilistic) {
          if (x > 0) row += ' ';
          row += format_double(v);
        } else {
          row += v >= 0.5 ? '1' : '0';
        }
      }
      out << row << '\n';
    }
  }
}

ContactField read_vcontact(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) parse_error(source, line_no + 1, std::string("missing ") + what);
    ++line_no;
    return split_ws(line);
  };
  auto ctx = [&] { return source + ":" + std::to_string(line_no); };

  const auto header = next("header");
  if (header.size() != 2 || header[0] != "VCONTACT" || header[1] != "1")
    parse_error(source, line_no, "expected header 'VCONTACT 1'");
  const auto dims_t = next("dims");
  if (dims_t.size() != 4 || dims_t[0] != "dims") parse_error(source, line_no, "expected 'dims dx dy dz'");
  ContactField field;
  field.dims = {parse_int(dims_t[1], ctx()), parse_int(dims_t[2], ctx()), parse_int(dims_t[3], ctx())};
  if (field.dims.x < 1 || field.dims.y < 1 || field.dims.z < 1) parse_error(source, line_no, "dims must be >= 1");
  const auto size_t_ = next("voxel_size");
  if (size_t_.size() != 2 || size_t_[0] != "voxel_size") parse_error(source, line_no, "expected 'voxel_size s'");
  field.voxel_size = parse_double(size_t_[1], ctx());
  const auto origin_t = next("origin");
  if (origin_t.size() != 4 || origin_t[0] != "origin") parse_error(source, line_no, "expected 'origin ox oy oz'");
  field.origin = Vec3(parse_double(origin_t[1], ctx()), parse_double(origin_t[2], ctx()),
                      parse_double(origin_t[3], ctx()));

  const auto nx = static_cast<std::size_t>(field.dims.x);
  field.values.reserve(nx * field.dims.y * field.dims.z);
  for (int r = 0; r < field.dims.y * field.dims.z; ++r) {
    if (!std::getline(in, line)) parse_error(source, line_no + 1, "missing contact row");
    ++line_no;
    const bool binary_row = line.size() == nx && line.find_first_not_of("01") == std::string::npos;
    if (binary_row && !field.probabilistic) {
      for (char c : line) field.values.push_back(c == '1' ? 1.0 : 0.0);
      continue;
    }
    const auto tokens = split_ws(line);
    if (tokens.size() != nx)
      parse_error(source, line_no, "contact row must have " + std::to_string(nx) + " values");
    if (!field.probabilistic && r > 0) parse_error(source, line_no, "mixed binary and numeric contact rows");
    field.probabilistic = true;
    for (const auto& t : tokens) {
      const double v = parse_double(t, ctx());
      if (!(v >= 0.0 && v <= 1.0)) parse_error(source, line_no, "contact value outside [0, 1]");
      field.values.push_back(v);
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!split_ws(line).empty()) parse_error(source, line_no, "unexpected trailing data");
  }
  return field;
}

void save_vcontact(const std::string& path, const ContactField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write contact map file: " + path);
  write_vcontact(out, field);
  if (!out) throw Error("error writing contact map file: " + path);
}

ContactField load_vcontact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open contact map file: " + path);
  return read_vcontact(in, path);
}

ContactField to_field(const ContactMap& cm, const VoxelGrid& grid) {
  ContactField field;
  field.dims = grid.dims();
  field.voxel_size = grid.voxel_size();
  field.origin = grid.origin();
  field.probabilistic = cm.probabilistic;
  field.values.assign(grid.size(), 0.0);
  for (const auto& [i, v] : cm.values) field.values.at(grid.linear(i)) = v;
  return field;
}

ContactMap load_contact_map(const ContactField& field, const VoxelGrid& grid, const std::string& grid_ref) {
  if (field.dims != grid.dims()) throw Error("contact map dims do not match the object grid");
  if (field.values.size() != grid.size()) throw Error("contact map has the wrong number of values");

  const auto surface = voxelgeom::surface_voxels(grid);
  std::unordered_map<Index3, bool, Index3Hash> on_surface;
  for (const auto& s : surface) on_surface.emplace(s, true);

  ContactMap cm;
  cm.grid_ref = grid_ref;
  cm.probabilistic = field.probabilistic;
  const Index3& d = grid.dims();
  std::size_t k = 0;
  for (int z = 0; z < d.z; ++z) {
    for (int y = 0; y < d.y; ++y) {
      for (int x = 0; x < d.x; ++x, ++k) {
        const double v = field.values[k];
        if (v == 0.0) continue;
        Index3 target{x, y, z};
        if (!on_surface.contains(target)) {
          if (surface.empty()) throw Error("object grid has no surface voxels");
          long best = std::numeric_limits<long>::max();
          for (const auto& s : surface) {
            const long dx = s.x - x, dy = s.y - y, dz = s.z - z;
            const long d2 = dx * dx + dy * dy + dz * dz;
            if (d2 < best) {  // surface is sorted, so the first minimum is the lowest index
              best = d2;
              target = s;
            }
          }
        }
        auto [it, inserted] = cm.values.emplace(target, v);
        if (!inserted) it->second = std::max(it->second, v);
      }
    }
  }
  if (cm.values.empty()) throw Error("empty contact map");
  return cm;
}

ContactMap load_contact_map(const std::string& path, const VoxelGrid& grid, const std::string& grid_ref) {
  return load_contact_map(load_vcontact(path), grid, grid_ref);
}

// ---------------------------------------------------------------------------
// Heuristic predictor

namespace {

// Occupied run length through every voxel along one axis.
std::vector<int> run_lengths(const VoxelGrid& grid, int axis) {
  const Index3& d = grid.dims();
  const std::array<int, 3> n{d.x, d.y, d.z};
  const int a1 = (axis + 1) % 3;
  const int a2 = (axis + 2) % 3;
  std::vector<int> out(grid.size(), 0);
  std::array<int, 3> c{};
  for (c[a1] = 0; c[a1] < n[a1]; ++c[a1]) {
    for (c[a2] = 0; c[a2] < n[a2]; ++c[a2]) {
      int start = -1;
      for (int t = 0; t <= n[axis]; ++t) {
        c[axis] = t;
        const bool occ = t < n[axis] && grid.occupied({c[0], c[1], c[2]});
        if (occ && start < 0) start = t;
        if (!occ && start >= 0) {
          for (int u = start; u < t; ++u) {
            c[axis] = u;
            out[grid.linear({c[0], c[1], c[2]})] = t - start;
          }
          start = -1;
        }
      }
    }
  }
  return out;
}

}  // namespace

int local_thickness(const VoxelGrid& grid, const Index3& v) {
  if (!grid.occupied(v)) return 0;
  int best = std::numeric_limits<int>::max();
  for (int axis = 0; axis < 3; ++axis) {
    Index3 lo = v, hi = v;
    auto at = [](Index3& i, int a) -> int& { return a == 0 ? i.x : a == 1 ? i.y : i.z; };
    while (true) {
      Index3 n = lo;
      --at(n, axis);
      if (!grid.occupied(n)) break;
      lo = n;
    }
    while (true) {
      Index3 n = hi;
      ++at(n, axis);
      if (!grid.occupied(n)) break;
      hi = n;
    }
    best = std::min(best, at(hi, axis) - at(lo, axis) + 1);
  }
  return best;
}

ContactMap predict_contacts_heuristic(const VoxelGrid& grid, const std::string& grid_ref) {
  const auto surface = voxelgeom::surface_voxels(grid);
  if (surface.empty()) throw Error("cannot predict contacts on an empty grid");

  const std::array<std::vector<int>, 3> runs{run_lengths(grid, 0), run_lengths(grid, 1), run_lengths(grid, 2)};
  std::vector<int> thickness;
  thickness.reserve(surface.size());
  for (const auto& s : surface) {
    const auto k = grid.linear(s);
    thickness.push_back(std::min({runs[0][k], runs[1][k], runs[2][k]}));
  }
  const auto [lo_it, hi_it] = std::minmax_element(thickness.begin(), thickness.end());
  const double t_min = *lo_it;
  const double t_max = *hi_it;

  ContactMap cm;
  cm.grid_ref = grid_ref;
  cm.probabilistic = true;
  for (std::size_t k = 0; k < surface.size(); ++k) {
    const double p = t_max == t_min ? 1.0 : std::clamp((t_max - thickness[k]) / (t_max - t_min), 0.0, 1.0);
    cm.values.emplace(surface[k], p);
  }
  return cm;
}

// ---------------------------------------------------------------------------
// Clustering

std::vector<ContactCluster> cluster_contacts(const ContactMap& cm, const VoxelGrid& grid, double eps,
                                             int min_pts) {
  if (!(eps > 0.0)) throw Error("eps must be positive");
  if (min_pts < 1) throw Error("min_pts must be >= 1");
  const auto points = cm.contact_indices();
  if (points.empty()) throw Error("empty contact map");

  const std::size_t n = points.size();
  std::vector<Vec3> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = grid.center(points[i]);

  // Spatial hash with cell edge eps: neighbors lie in the 27 surrounding cells.
  auto cell_of = [&](const Vec3& p) {
    return Index3{static_cast<int>(std::floor(p.x() / eps)), static_cast<int>(std::floor(p.y() / eps)),
                  static_cast<int>(std::floor(p.z() / eps))};
  };
  std::unordered_map<Index3, std::vector<std::size_t>, Index3Hash> cells;
  for (std::size_t i = 0; i < n; ++i) cells[cell_of(pos[i])].push_back(i);

  const double eps2 = eps * eps;
  auto region = [&](std::size_t i) {
    std::vector<std::size_t> out;
    const Index3 c = cell_of(pos[i]);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          const auto it = cells.find({c.x + dx, c.y + dy, c.z + dz});
          if (it == cells.end()) continue;
          for (std::size_t j : it->second)
            if ((pos[j] - pos[i]).squaredNorm() <= eps2) out.push_back(j);
        }
    std::sort(out.begin(), out.end());
    return out;
  };

  constexpr int kUnvisited = -2;
  constexpr int kNoise = -1;
  std::vector<int> label(n, kUnvisited);
  int next_cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    auto seeds = region(i);
    if (seeds.size() < static_cast<std::size_t>(min_pts)) {
      label[i] = kNoise;
      continue;
    }
    const int c = next_cluster++;
    label[i] = c;
    for (std::size_t q = 0; q < seeds.size(); ++q) {
      const std::size_t j = seeds[q];
      if (label[j] == kNoise) label[j] = c;
      if (label[j] != kUnvisited) continue;
      label[j] = c;
      auto more = region(j);
      if (more.size() >= static_cast<std::size_t>(min_pts)) seeds.insert(seeds.end(), more.begin(), more.end());
    }
  }

  std::vector<ContactCluster> clusters(static_cast<std::size_t>(next_cluster));
  for (std::size_t i = 0; i < n; ++i)
    if (label[i] >= 0) clusters[label[i]].members.push_back(points[i]);
  for (auto& c : clusters) {
    Vec3 sum = Vec3::Zero();
    for (const auto& m : c.members) sum += grid.center(m);
    c.centroid = sum / static_cast<double>(c.members.size());
  }
  std::sort(clusters.begin(), clusters.end(), [](const ContactCluster& a, const ContactCluster& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.lowest_index() < b.lowest_index();
  });
  return clusters;
}

const ContactCluster& largest_cluster(const std::vector<ContactCluster>& clusters) {
  if (clusters.empty()) throw Error("no contact clusters");
  const ContactCluster* best = &clusters.front();
  for (const auto& c : clusters) {
    if (c.size() > best->size() || (c.size() == best->size() && c.lowest_index() < best->lowest_index()))
      best = &c;
  }
  return *best;
}

}  // namespace handover::contacts
