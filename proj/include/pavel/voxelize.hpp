#pragma once

#include <atomic>
#include <functional>
#include <vector>

#include "pavel/bvh.hpp"
#include "pavel/grid.hpp"
#include "pavel/mesh.hpp"
#include "pavel/seeding.hpp"

namespace pavel {

// One placed decoration: occupancy grid plus volume bookkeeping for the
// deformation stage.
struct DecorationInstance {
  VoxelGrid grid;
  Vec3 centroid;          // centroid of the initially occupied voxels
  double bbox_diagonal = 0;  // diagonal of the placed decoration's bbox
  int64_t original_volume = 0;
  int64_t lost_volume = 0;
  int64_t recovered_volume = 0;
  SeedPlacement seed;
};

// Answers "is this global lattice voxel inside the base solid". Center-based
// test against the base SDF sign.
using OccupancyOracle = std::function<bool(const IVec3&)>;

// voxel_edge = smallest decoration bbox diagonal / resolution.
double choose_voxel_edge(const std::vector<TriangleMesh>& decorations, int resolution);

// Rasterizes the decoration transformed by the seed (scale, normal/tangent
// frame, translation) on its own lattice-snapped grid, grid_factor times the
// transformed bbox per axis (default 50% larger) so later growth fits.
// Inside test is the winding sign at voxel centers.
DecorationInstance voxelize_instance(const TriangleMesh& decoration, const SeedPlacement& seed,
                                     double voxel_edge, double grid_factor = 1.5);

// Same, against a prebuilt tree of the decoration (local frame).
DecorationInstance voxelize_instance(const TriangleBvh& decoration_bvh, const SeedPlacement& seed,
                                     double voxel_edge, double grid_factor = 1.5);

// Global lattice coordinates occupied by both instances.
std::vector<IVec3> overlap_voxels(const DecorationInstance& a, const DecorationInstance& b);

// Base-solid occupancy restricted to a world-space region, lattice-aligned.
VoxelGrid voxelize_base(const TriangleMesh& base, const Bbox3& region, double voxel_edge);
VoxelGrid voxelize_base(const TriangleBvh& base_bvh, const Bbox3& region, double voxel_edge);

// Base-occupancy oracle evaluated lazily per instance slab with caching.
// Thread-safe only for lookups after warm-up; the pipeline warms the cache
// per instance region before concurrent use.
class BaseOracle {
 public:
  BaseOracle(const TriangleMesh& base, double voxel_edge);

  bool operator()(const IVec3& g) const;

  // Precomputes occupancy over a region so later lookups are hits.
  void warm(const Bbox3& region);

 private:
  const TriangleBvh bvh_;
  double voxel_edge_;
  std::vector<VoxelGrid> slabs_;
  mutable std::atomic<size_t> hint_{0};  // last slab hit; queries cluster spatially
};

}  // namespace pavel
