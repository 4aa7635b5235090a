#pragma once

#include <vector>

#include "pavel/grid.hpp"
#include "pavel/voxelize.hpp"

namespace pavel {

// Growth-speed profile controls, as fractions of the placed decoration's
// bbox diagonal: speed peaks at contact distance `a` and dies out at `b`.
struct RecoveryParams {
  double a = 0.1;
  double b = 0.3;
  double ambient_speed = 1.0;  // speed used when an instance has no contact at all
};

// Contact-distance to growth-speed map: a C1 bump of three quadratics, zero at
// x <= 0 (contact points stay put), peak 1 at x = a, zero again for x >= b.
// x = +infinity (no contact anywhere) returns ambient_speed.
double recovery_velocity(double x, const RecoveryParams& params);

// Removes base-interior voxels from every instance, then assigns each voxel
// shared by several instances to the one with the nearest centroid (ties to
// the lower instance id). Fills lost_volume with the per-instance removal
// counts. Errors if an instance loses every voxel.
std::vector<DecorationInstance> resolve_overlaps(std::vector<DecorationInstance> instances,
                                                 const OccupancyOracle& base);

// Euclidean distance (model units) from every voxel of the instance's grid to
// its nearest contact voxel: an occupied voxel 6-adjacent to the base or to
// another instance. All +infinity when the instance touches nothing.
ScalarGrid contact_distance_field(const DecorationInstance& instance,
                                  const OccupancyOracle& others, const OccupancyOracle& base);

// Per-voxel growth speed: w * recovery_velocity(distance / bbox_diagonal),
// where w = lost_volume / mean of the positive entries of `losses`
// (zero-loss instances get w = 0).
ScalarGrid build_velocity_field(const DecorationInstance& instance, const ScalarGrid& distances,
                                const RecoveryParams& params,
                                const std::vector<int64_t>& losses);

struct DeformStats {
  struct PerInstance {
    int64_t original = 0;
    int64_t lost = 0;
    int64_t recovered = 0;
    int64_t rounds = 0;
    std::vector<double> claim_times;  // arrival time of each claimed voxel, in claim order
    std::vector<IVec3> claim_voxels;  // global lattice coordinates, same order
  };
  std::vector<PerInstance> instances;
  double overlap_percent = 0;  // total lost voxels / total decoration voxels
};

// Grows every volume-deficient instance by competing fast-marching fronts on
// the shared lattice until each recovers exactly its lost voxel count.
// Claimed voxels are always empty (not base, not any instance) at claim time.
// Default scheduling is round-robin: one claim per deficient instance per
// round; global_min_scheduling instead always claims the globally earliest
// arrival. Deterministic either way.
std::vector<DecorationInstance> fast_march_recover(std::vector<DecorationInstance> instances,
                                                   const std::vector<ScalarGrid>& velocities,
                                                   const OccupancyOracle& base,
                                                   bool global_min_scheduling = false,
                                                   DeformStats* stats = nullptr);

}  // namespace pavel
