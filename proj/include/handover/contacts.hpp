#pragma once

#include "handover/voxelgeom.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace handover::contacts {

using voxelgeom::VoxelGrid;

/// Per-surface-voxel human contact labels. Ingested maps hold 0/1 labels,
/// predicted maps hold probabilities; both binarize at `threshold`.
struct ContactMap {
  std::string grid_ref;
  std::map<Index3, double> values;
  double threshold = 0.5;
  bool probabilistic = false;

  /// Indices whose value reaches the threshold, sorted.
  std::vector<Index3> contact_indices() const;
  /// Binarized label CM(i) in {0, 1}.
  double label(const Index3& i) const;
  /// Sum of binarized labels over the whole map.
  double total_weight() const;

  bool operator==(const ContactMap&) const = default;
};

struct ContactCluster {
  std::vector<Index3> members;  // sorted
  Vec3 centroid = Vec3::Zero();

  std::size_t size() const { return members.size(); }
  const Index3& lowest_index() const { return members.front(); }
};

/// Dense contents of a VCONTACT file, before alignment to an object grid.
struct ContactField {
  Index3 dims{};
  double voxel_size = 0.0;
  Vec3 origin = Vec3::Zero();
  std::vector<double> values;  // x fastest, z slowest
  bool probabilistic = false;

  bool operator==(const ContactField&) const = default;
};

void write_vcontact(std::ostream& out, const ContactField& field);
ContactField read_vcontact(std::istream& in, const std::string& source = "<stream>");
void save_vcontact(const std::string& path, const ContactField& field);
ContactField load_vcontact(const std::string& path);

/// Dense field covering `grid` with the map's values (zero elsewhere).
ContactField to_field(const ContactMap& cm, const VoxelGrid& grid);

/// Aligns a field to the object's surface. Nonzero labels off the surface are
/// moved to the nearest surface voxel (ties to the lowest index); labels that
/// land on the same voxel keep the maximum.
ContactMap load_contact_map(const ContactField& field, const VoxelGrid& grid,
                            const std::string& grid_ref = {});
ContactMap load_contact_map(const std::string& path, const VoxelGrid& grid,
                            const std::string& grid_ref = {});

/// Geometric stand-in for a learned contact model: thin parts of the object
/// (short axis-aligned occupied runs) score high.
ContactMap predict_contacts_heuristic(const VoxelGrid& grid, const std::string& grid_ref = {});

/// Axis-aligned thickness: the shortest of the three occupied runs through v.
int local_thickness(const VoxelGrid& grid, const Index3& v);

/// Density-based clustering (DBSCAN) over the world centers of the contact
/// voxels. Neighborhoods are closed balls of radius eps and include the point
/// itself. Points are visited in index order, so a border point joins the
/// earliest-created cluster that reaches it. Result is sorted by size
/// descending, then by lowest member index.
std::vector<ContactCluster> cluster_contacts(const ContactMap& cm, const VoxelGrid& grid,
                                             double eps, int min_pts);

const ContactCluster& largest_cluster(const std::vector<ContactCluster>& clusters);

/// Defaults for clustering: eps in voxel edge lengths and min_pts.
constexpr double kDefaultEpsVoxels = 3.0;
constexpr int kDefaultMinPts = 4;

}  // namespace handover::contacts
