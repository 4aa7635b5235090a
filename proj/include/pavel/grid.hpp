#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pavel/math.hpp"

namespace pavel {

// Dense scalar field sampled at voxel centers. origin is the corner of voxel
// (0,0,0); sample (i,j,k) sits at origin + (i+1/2, j+1/2, k+1/2) * voxel_edge.
struct ScalarGrid {
  Vec3 origin;
  double voxel_edge = 0;
  std::array<int, 3> dims = {0, 0, 0};
  std::vector<double> values;

  size_t size() const {
    return static_cast<size_t>(dims[0]) * dims[1] * dims[2];
  }
  size_t index(int i, int j, int k) const {
    return (static_cast<size_t>(k) * dims[1] + j) * dims[0] + i;
  }
  Vec3 sample_position(int i, int j, int k) const {
    return {origin.x + (i + 0.5) * voxel_edge, origin.y + (j + 0.5) * voxel_edge,
            origin.z + (k + 0.5) * voxel_edge};
  }
  double& at(int i, int j, int k) { return values[index(i, j, k)]; }
  double at(int i, int j, int k) const { return values[index(i, j, k)]; }
};

// Dense occupancy grid snapped to the global lattice: all grids in a run share
// voxel_edge and axis orientation, and origins are integer lattice multiples,
// so voxel identity across grids is pure integer arithmetic.
struct VoxelGrid {
  IVec3 lattice_min = {0, 0, 0};  // global lattice coordinate of voxel (0,0,0)
  double voxel_edge = 0;
  std::array<int, 3> dims = {0, 0, 0};
  std::vector<uint8_t> occupancy;

  Vec3 origin() const {
    return {lattice_min[0] * voxel_edge, lattice_min[1] * voxel_edge,
            lattice_min[2] * voxel_edge};
  }
  size_t size() const {
    return static_cast<size_t>(dims[0]) * dims[1] * dims[2];
  }
  size_t index(int i, int j, int k) const {
    return (static_cast<size_t>(k) * dims[1] + j) * dims[0] + i;
  }
  bool in_bounds(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < dims[0] && j < dims[1] && k < dims[2];
  }
  bool in_bounds_global(const IVec3& g) const {
    return in_bounds(static_cast<int>(g[0] - lattice_min[0]),
                     static_cast<int>(g[1] - lattice_min[1]),
                     static_cast<int>(g[2] - lattice_min[2]));
  }
  bool occupied(int i, int j, int k) const { return occupancy[index(i, j, k)] != 0; }
  bool occupied_global(const IVec3& g) const {
    int i = static_cast<int>(g[0] - lattice_min[0]);
    int j = static_cast<int>(g[1] - lattice_min[1]);
    int k = static_cast<int>(g[2] - lattice_min[2]);
    return in_bounds(i, j, k) && occupied(i, j, k);
  }
  IVec3 to_global(int i, int j, int k) const {
    return {lattice_min[0] + i, lattice_min[1] + j, lattice_min[2] + k};
  }
  Vec3 voxel_center(int i, int j, int k) const {
    auto o = origin();
    return {o.x + (i + 0.5) * voxel_edge, o.y + (j + 0.5) * voxel_edge,
            o.z + (k + 0.5) * voxel_edge};
  }
  Vec3 voxel_center_global(const IVec3& g) const {
    return {(g[0] + 0.5) * voxel_edge, (g[1] + 0.5) * voxel_edge, (g[2] + 0.5) * voxel_edge};
  }
  int64_t occupied_count() const;
  Bbox3 world_bbox() const {
    Bbox3 b;
    b.expand(origin());
    b.expand(origin() + Vec3{dims[0] * voxel_edge, dims[1] * voxel_edge, dims[2] * voxel_edge});
    return b;
  }
};

// Packs a global lattice coordinate into one key (21 bits per axis, signed).
int64_t pack_lattice(const IVec3& g);
IVec3 unpack_lattice(int64_t key);

// Exact squared Euclidean distance transform (Felzenszwalb/Huttenlocher).
// seeds marks source voxels; output is squared distance in voxel units,
// or a large sentinel when no seed exists.
std::vector<double> distance_transform_squared(const std::array<int, 3>& dims,
                                               const std::vector<uint8_t>& seeds);

// Debug dump as ascii VTK ImageData (.vti-style legacy format).
void write_vtk(const VoxelGrid& grid, const std::string& path);
void write_vtk(const ScalarGrid& grid, const std::string& path);

}  // namespace pavel
