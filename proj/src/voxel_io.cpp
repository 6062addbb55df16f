#include "handover/voxelgeom.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace handover::voxelgeom {

namespace {

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(source + ":" + std::to_string(line) + ": " + what);
}

int parse_int(const std::string& token, const std::string& context) {
  int v = 0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw Error(context + ": expected integer, got '" + token + "'");
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

double parse_double(const std::string& token, const std::string& context) {
  double v = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw Error(context + ": expected number, got '" + token + "'");
  return v;
}

TriangleMesh read_obj(std::istream& in, const std::string& source) {
  TriangleMesh mesh;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    const std::string ctx = source + ":" + std::to_string(line_no);
    if (tokens[0] == "v") {
      if (tokens.size() < 4) parse_error(source, line_no, "vertex needs 3 coordinates");
      mesh.vertices.emplace_back(parse_double(tokens[1], ctx), parse_double(tokens[2], ctx),
                                 parse_double(tokens[3], ctx));
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4) parse_error(source, line_no, "face needs at least 3 vertices");
      std::vector<int> ids;
      for (std::size_t k = 1; k < tokens.size(); ++k) {
        const std::string head = tokens[k].substr(0, tokens[k].find('/'));
        int id = parse_int(head, ctx);
        if (id < 0) id = static_cast<int>(mesh.vertices.size()) + id + 1;
        if (id < 1 || static_cast<std::size_t>(id) > mesh.vertices.size())
          parse_error(source, line_no, "face index " + head + " out of range");
        ids.push_back(id - 1);
      }
      for (std::size_t k = 1; k + 1 < ids.size(); ++k) mesh.faces.push_back({ids[0], ids[k], ids[k + 1]});
    }
    // other record types are not part of the accepted subset and are skipped
  }
  return mesh;
}

TriangleMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file: " + path);
  return read_obj(in, path);
}

void write_vgrid(std::ostream& out, const VoxelGrid& grid) {
  const Index3& d = grid.dims();
  out << "VGRID 1\n";
  out << "dims " << d.x << ' ' << d.y << ' ' << d.z << '\n';
  out << "voxel_size " << format_double(grid.voxel_size()) << '\n';
  out << "origin " << format_double(grid.origin().x()) << ' ' << format_double(grid.origin().y())
      << ' ' << format_double(grid.origin().z()) << '\n';
  std::string row(static_cast<std::size_t>(d.x), '0');
  for (int z = 0; z < d.z; ++z) {
    for (int y = 0; y < d.y; ++y) {
      for (int x = 0; x < d.x; ++x) row[x] = grid.occupied({x, y, z}) ? '1' : '0';
      out << row << '\n';
    }
  }
}

VoxelGrid read_vgrid(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&](const char* what) -> std::vector<std::string> {
    if (!std::getline(in, line)) parse_error(source, line_no + 1, std::string("missing ") + what);
    ++line_no;
    return split_ws(line);
  };

  auto header = next("header");
  if (header.size() != 2 || header[0] != "VGRID" || header[1] != "1")
    parse_error(source, line_no, "expected header 'VGRID 1'");
  auto dims_t = next("dims");
  if (dims_t.size() != 4 || dims_t[0] != "dims") parse_error(source, line_no, "expected 'dims dx dy dz'");
  const std::string ctx = source + ":" + std::to_string(line_no);
  const Index3 dims{parse_int(dims_t[1], ctx), parse_int(dims_t[2], ctx), parse_int(dims_t[3], ctx)};
  auto size_t_ = next("voxel_size");
  if (size_t_.size() != 2 || size_t_[0] != "voxel_size") parse_error(source, line_no, "expected 'voxel_size s'");
  const double s = parse_double(size_t_[1], source + ":" + std::to_string(line_no));
  auto origin_t = next("origin");
  if (origin_t.size() != 4 || origin_t[0] != "origin") parse_error(source, line_no, "expected 'origin ox oy oz'");
  const std::string octx = source + ":" + std::to_string(line_no);
  const Vec3 origin(parse_double(origin_t[1], octx), parse_double(origin_t[2], octx),
                    parse_double(origin_t[3], octx));

  VoxelGrid grid;
  try {
    grid = VoxelGrid(dims, s, origin);
  } catch (const Error& e) {
    parse_error(source, line_no, e.what());
  }
  for (int z = 0; z < dims.z; ++z) {
    for (int y = 0; y < dims.y; ++y) {
      if (!std::getline(in, line)) parse_error(source, line_no + 1, "missing occupancy row");
      ++line_no;
      if (line.size() != static_cast<std::size_t>(dims.x))
        parse_error(source, line_no, "occupancy row must have " + std::to_string(dims.x) + " characters");
      for (int x = 0; x < dims.x; ++x) {
        const char c = line[x];
        if (c != '0' && c != '1') parse_error(source, line_no, "occupancy characters must be 0 or 1");
        if (c == '1') grid.set({x, y, z}, true);
      }
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!split_ws(line).empty()) parse_error(source, line_no, "unexpected trailing data");
  }
  return grid;
}

void save_vgrid(const std::string& path, const VoxelGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write voxel grid file: " + path);
  write_vgrid(out, grid);
  if (!out) throw Error("error writing voxel grid file: " + path);
}

VoxelGrid load_vgrid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open voxel grid file: " + path);
  return read_vgrid(in, path);
}

}  // namespace handover::voxelgeom
