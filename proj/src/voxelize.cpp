#include "pavel/voxelize.hpp"

#include <cmath>

#include "pavel/errors.hpp"
#include "pavel/threading.hpp"

namespace pavel {

namespace {

// Lattice-snapped grid covering `box` (plus a safety margin of one voxel).
VoxelGrid snapped_grid(const Bbox3& box, double voxel_edge) {
  VoxelGrid grid;
  grid.voxel_edge = voxel_edge;
  for (int a = 0; a < 3; ++a) {
    grid.lattice_min[a] = static_cast<int64_t>(std::floor(box.lo[a] / voxel_edge)) - 1;
    auto hi = static_cast<int64_t>(std::ceil(box.hi[a] / voxel_edge)) + 1;
    grid.dims[a] = static_cast<int>(hi - grid.lattice_min[a]);
  }
  grid.occupancy.assign(grid.size(), 0);
  return grid;
}

}  // namespace

double choose_voxel_edge(const std::vector<TriangleMesh>& decorations, int resolution) {
  if (resolution < 16) throw ConfigError("voxel resolution must be at least 16");
  if (decorations.empty()) throw ConfigError("no decorations given");
  double smallest = std::numeric_limits<double>::max();
  for (auto& d : decorations) smallest = std::min(smallest, d.bbox().diagonal());
  return smallest / resolution;
}

DecorationInstance voxelize_instance(const TriangleBvh& decoration_bvh, const SeedPlacement& seed,
                                     double voxel_edge, double grid_factor) {
  if (voxel_edge <= 0) throw ConfigError("voxel_edge must be positive");
  if (grid_factor < 1.0) throw ConfigError("grid_factor must be at least 1");
  auto rotation = frame_from_normal_tangent(seed.normal, seed.tangent);
  auto inv_rotation = transpose(rotation);

  Bbox3 world_box;
  for (auto& v : decoration_bvh.mesh().vertices)
    world_box.expand(rotation * (v * seed.scale) + seed.position);

  Bbox3 grid_box;
  auto center = world_box.center();
  grid_box.expand(center + (world_box.lo - center) * grid_factor);
  grid_box.expand(center + (world_box.hi - center) * grid_factor);

  DecorationInstance inst;
  inst.seed = seed;
  inst.bbox_diagonal = world_box.diagonal();
  inst.grid = snapped_grid(grid_box, voxel_edge);
  auto& grid = inst.grid;

  int nx = grid.dims[0], ny = grid.dims[1];
  parallel_for(0, static_cast<int64_t>(grid.size()), [&](int64_t idx) {
    int i = static_cast<int>(idx % nx);
    int j = static_cast<int>((idx / nx) % ny);
    int k = static_cast<int>(idx / (static_cast<int64_t>(nx) * ny));
    auto p = grid.voxel_center(i, j, k);
    if (!world_box.contains(p)) return;
    auto local = inv_rotation * (p - seed.position) / seed.scale;
    if (decoration_bvh.inside(local)) grid.occupancy[idx] = 1;
  });

  Vec3 centroid_sum{};
  for (int k = 0; k < grid.dims[2]; ++k)
    for (int j = 0; j < grid.dims[1]; ++j)
      for (int i = 0; i < grid.dims[0]; ++i)
        if (grid.occupied(i, j, k)) {
          centroid_sum += grid.voxel_center(i, j, k);
          ++inst.original_volume;
        }
  if (inst.original_volume == 0)
    throw StageError("decoration smaller than a voxel at this resolution");
  inst.centroid = centroid_sum / static_cast<double>(inst.original_volume);
  return inst;
}

DecorationInstance voxelize_instance(const TriangleMesh& decoration, const SeedPlacement& seed,
                                     double voxel_edge, double grid_factor) {
  TriangleBvh bvh(decoration);
  return voxelize_instance(bvh, seed, voxel_edge, grid_factor);
}

std::vector<IVec3> overlap_voxels(const DecorationInstance& a, const DecorationInstance& b) {
  if (a.grid.voxel_edge != b.grid.voxel_edge)
    throw StageError("overlap query between grids with different voxel edges");
  std::vector<IVec3> shared;
  IVec3 lo, hi;
  for (int ax = 0; ax < 3; ++ax) {
    lo[ax] = std::max(a.grid.lattice_min[ax], b.grid.lattice_min[ax]);
    hi[ax] = std::min(a.grid.lattice_min[ax] + a.grid.dims[ax],
                      b.grid.lattice_min[ax] + b.grid.dims[ax]);
    if (lo[ax] >= hi[ax]) return shared;  // disjoint boxes
  }
  for (int64_t z = lo[2]; z < hi[2]; ++z)
    for (int64_t y = lo[1]; y < hi[1]; ++y)
      for (int64_t x = lo[0]; x < hi[0]; ++x) {
        IVec3 g = {x, y, z};
        if (a.grid.occupied_global(g) && b.grid.occupied_global(g)) shared.push_back(g);
      }
  return shared;
}

VoxelGrid voxelize_base(const TriangleBvh& base_bvh, const Bbox3& region, double voxel_edge) {
  auto grid = snapped_grid(region, voxel_edge);
  int nx = grid.dims[0], ny = grid.dims[1];
  parallel_for(0, static_cast<int64_t>(grid.size()), [&](int64_t idx) {
    int i = static_cast<int>(idx % nx);
    int j = static_cast<int>((idx / nx) % ny);
    int k = static_cast<int>(idx / (static_cast<int64_t>(nx) * ny));
    if (base_bvh.inside(grid.voxel_center(i, j, k))) grid.occupancy[idx] = 1;
  });
  return grid;
}

VoxelGrid voxelize_base(const TriangleMesh& base, const Bbox3& region, double voxel_edge) {
  auto audit = audit_edges(base);
  if (audit.open_edges > 0)
    throw StageError("base is not watertight: " + std::to_string(audit.open_edges) +
                     " open edges");
  TriangleBvh bvh(base);
  return voxelize_base(bvh, region, voxel_edge);
}

BaseOracle::BaseOracle(const TriangleMesh& base, double voxel_edge)
    : bvh_(base), voxel_edge_(voxel_edge) {
  auto audit = audit_edges(base);
  if (audit.open_edges > 0)
    throw StageError("base is not watertight: " + std::to_string(audit.open_edges) +
                     " open edges");
}

bool BaseOracle::operator()(const IVec3& g) const {
  size_t h = hint_.load(std::memory_order_relaxed);
  if (h < slabs_.size() && slabs_[h].in_bounds_global(g)) return slabs_[h].occupied_global(g);
  for (size_t s = 0; s < slabs_.size(); ++s)
    if (slabs_[s].in_bounds_global(g)) {
      hint_.store(s, std::memory_order_relaxed);
      return slabs_[s].occupied_global(g);
    }
  Vec3 p = {(g[0] + 0.5) * voxel_edge_, (g[1] + 0.5) * voxel_edge_, (g[2] + 0.5) * voxel_edge_};
  return bvh_.inside(p);
}

void BaseOracle::warm(const Bbox3& region) {
  slabs_.push_back(voxelize_base(bvh_, region, voxel_edge_));
}

}  // namespace pavel
