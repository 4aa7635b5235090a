#pragma once

// Shared scene builders used by the unit and acceptance tests.

#include <utility>
#include <vector>

#include "pavel/deform.hpp"
#include "pavel/shapes.hpp"
#include "pavel/voxelize.hpp"

namespace pavel::testing {

inline OccupancyOracle no_base() {
  return [](const IVec3&) { return false; };
}

// Oracle that reports every other instance's occupancy.
inline OccupancyOracle others_of(const std::vector<DecorationInstance>& instances, size_t self) {
  return [&instances, self](const IVec3& g) {
    for (size_t o = 0; o < instances.size(); ++o)
      if (o != self && instances[o].grid.occupied_global(g)) return true;
    return false;
  };
}

// Full resolve + velocity + recover cycle for a small set of instances.
inline std::vector<DecorationInstance> deform_all(std::vector<DecorationInstance> instances,
                                                  const OccupancyOracle& base,
                                                  const RecoveryParams& params,
                                                  DeformStats* stats = nullptr,
                                                  bool global_min = false) {
  instances = resolve_overlaps(std::move(instances), base);
  std::vector<int64_t> losses;
  for (auto& inst : instances) losses.push_back(inst.lost_volume);
  std::vector<ScalarGrid> velocities;
  for (size_t i = 0; i < instances.size(); ++i) {
    auto distances = contact_distance_field(instances[i], others_of(instances, i), base);
    velocities.push_back(build_velocity_field(instances[i], distances, params, losses));
  }
  return fast_march_recover(std::move(instances), velocities, base, global_min, stats);
}

// Two spheres of radius r whose centers sit `separation` apart along x, both
// attached at z = 0 with slight embedding (sphere center at 0.9 r up).
struct TwoSpheres {
  TriangleMesh decoration;
  SeedPlacement left, right;
  double voxel_edge = 0;
};

inline TwoSpheres two_spheres(double r, double separation, int resolution) {
  TwoSpheres s;
  s.decoration = make_icosphere(r, 3, {0, 0, 0.9 * r});
  s.voxel_edge = s.decoration.bbox().diagonal() / resolution;
  s.left.position = {-separation / 2, 0, 0};
  s.left.normal = {0, 0, 1};
  s.left.tangent = {1, 0, 0};
  s.right = s.left;
  s.right.position.x = separation / 2;
  return s;
}

inline int64_t mutual_overlap(const std::vector<DecorationInstance>& instances) {
  int64_t total = 0;
  for (size_t i = 0; i < instances.size(); ++i)
    for (size_t j = i + 1; j < instances.size(); ++j)
      total += static_cast<int64_t>(overlap_voxels(instances[i], instances[j]).size());
  return total;
}

inline int64_t base_overlap(const std::vector<DecorationInstance>& instances,
                            const OccupancyOracle& base) {
  int64_t total = 0;
  for (auto& inst : instances) {
    auto& g = inst.grid;
    for (int k = 0; k < g.dims[2]; ++k)
      for (int j = 0; j < g.dims[1]; ++j)
        for (int i = 0; i < g.dims[0]; ++i)
          if (g.occupied(i, j, k) && base(g.to_global(i, j, k))) ++total;
  }
  return total;
}

}  // namespace pavel::testing
