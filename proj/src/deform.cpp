#include "pavel/deform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "pavel/errors.hpp"
#include "pavel/threading.hpp"

namespace pavel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const int kFace[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};

ScalarGrid coregistered(const VoxelGrid& grid, double fill) {
  ScalarGrid f;
  f.origin = grid.origin();
  f.voxel_edge = grid.voxel_edge;
  f.dims = grid.dims;
  f.values.assign(f.size(), fill);
  return f;
}

}  // namespace

double recovery_velocity(double x, const RecoveryParams& params) {
  const double a = params.a, b = params.b;
  if (!(a > 0 && b > a)) throw ConfigError("recovery params must satisfy 0 < a < b");
  if (std::isinf(x)) return params.ambient_speed;
  if (x <= 0 || x > b) return 0;
  if (x <= a) return -x * x / (a * a) + 2 * x / a;
  double w = b - a;
  if (x <= 0.5 * (a + b)) return 1 - 2 * (x - a) * (x - a) / (w * w);
  return 2 * (x - b) * (x - b) / (w * w);
}

std::vector<DecorationInstance> resolve_overlaps(std::vector<DecorationInstance> instances,
                                                 const OccupancyOracle& base) {
  int n = static_cast<int>(instances.size());

  parallel_for(0, n, [&](int idx) {
    auto& inst = instances[idx];
    inst.lost_volume = 0;
    auto& g = inst.grid;
    for (int k = 0; k < g.dims[2]; ++k)
      for (int j = 0; j < g.dims[1]; ++j)
        for (int i = 0; i < g.dims[0]; ++i)
          if (g.occupied(i, j, k) && base(g.to_global(i, j, k))) {
            g.occupancy[g.index(i, j, k)] = 0;
            ++inst.lost_volume;
          }
  });

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (!instances[i].grid.world_bbox().overlaps(instances[j].grid.world_bbox())) continue;
      for (auto& g : overlap_voxels(instances[i], instances[j])) {
        auto p = instances[i].grid.voxel_center_global(g);
        double di = distance_squared(p, instances[i].centroid);
        double dj = distance_squared(p, instances[j].centroid);
        auto& loser = dj < di ? instances[i] : instances[j];  // ties keep the lower id
        auto& lg = loser.grid;
        lg.occupancy[lg.index(static_cast<int>(g[0] - lg.lattice_min[0]),
                              static_cast<int>(g[1] - lg.lattice_min[1]),
                              static_cast<int>(g[2] - lg.lattice_min[2]))] = 0;
        ++loser.lost_volume;
      }
    }

  for (int i = 0; i < n; ++i)
    if (instances[i].grid.occupied_count() == 0)
      throw StageError("instance " + std::to_string(i) +
                       " lost every voxel during overlap resolution (fully submerged)");
  return instances;
}

ScalarGrid contact_distance_field(const DecorationInstance& instance,
                                  const OccupancyOracle& others, const OccupancyOracle& base) {
  auto& g = instance.grid;
  std::vector<uint8_t> contact(g.size(), 0);
  bool any = false;
  for (int k = 0; k < g.dims[2]; ++k)
    for (int j = 0; j < g.dims[1]; ++j)
      for (int i = 0; i < g.dims[0]; ++i) {
        if (!g.occupied(i, j, k)) continue;
        for (auto& f : kFace) {
          IVec3 nb = {g.lattice_min[0] + i + f[0], g.lattice_min[1] + j + f[1],
                      g.lattice_min[2] + k + f[2]};
          if (base(nb) || others(nb)) {
            contact[g.index(i, j, k)] = 1;
            any = true;
            break;
          }
        }
      }

  auto field = coregistered(g, kInf);
  if (!any) return field;
  auto sq = distance_transform_squared(g.dims, contact);
  for (size_t v = 0; v < sq.size(); ++v) field.values[v] = std::sqrt(sq[v]) * g.voxel_edge;
  return field;
}

ScalarGrid build_velocity_field(const DecorationInstance& instance, const ScalarGrid& distances,
                                const RecoveryParams& params,
                                const std::vector<int64_t>& losses) {
  double mean = 0;
  int positive = 0;
  for (auto l : losses)
    if (l > 0) {
      mean += static_cast<double>(l);
      ++positive;
    }
  double w = 0;
  if (instance.lost_volume > 0 && positive > 0)
    w = static_cast<double>(instance.lost_volume) / (mean / positive);

  auto field = coregistered(instance.grid, 0.0);
  if (w == 0) return field;
  double diag = instance.bbox_diagonal > 0 ? instance.bbox_diagonal
                                           : instance.grid.world_bbox().diagonal();
  for (size_t v = 0; v < field.values.size(); ++v)
    field.values[v] = w * recovery_velocity(distances.values[v] / diag, params);
  return field;
}

namespace {

struct FrontEntry {
  double t;
  int inst;  // only meaningful under global-min scheduling
  int i, j, k;
  bool operator>(const FrontEntry& o) const {
    if (t != o.t) return t > o.t;
    if (inst != o.inst) return inst > o.inst;
    if (i != o.i) return i > o.i;
    if (j != o.j) return j > o.j;
    return k > o.k;
  }
};

using FrontHeap = std::priority_queue<FrontEntry, std::vector<FrontEntry>, std::greater<>>;

}  // namespace

std::vector<DecorationInstance> fast_march_recover(std::vector<DecorationInstance> instances,
                                                   const std::vector<ScalarGrid>& velocities,
                                                   const OccupancyOracle& base,
                                                   bool global_min_scheduling,
                                                   DeformStats* stats) {
  int n = static_cast<int>(instances.size());
  if (static_cast<int>(velocities.size()) != n)
    throw ConfigError("one velocity field per instance required");
  for (int i = 0; i < n; ++i)
    if (velocities[i].dims != instances[i].grid.dims)
      throw ConfigError("velocity field not co-registered with instance grid");

  // grids whose boxes overlap are the only candidates for claim conflicts
  std::vector<std::vector<int>> neighbors(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (instances[i].grid.world_bbox().overlaps(instances[j].grid.world_bbox())) {
        neighbors[i].push_back(j);
        neighbors[j].push_back(i);
      }

  auto blocked = [&](int self, const IVec3& g) {
    if (base(g)) return true;
    for (int o : neighbors[self])
      if (instances[o].grid.occupied_global(g)) return true;
    return false;
  };

  std::vector<std::vector<double>> times(n);
  std::vector<FrontHeap> heaps(n);
  std::vector<int64_t> deficit(n);
  DeformStats local_stats;
  auto& st = stats ? *stats : local_stats;
  st.instances.assign(n, {});

  // First-order upwind arrival time for the empty voxel (i,j,k) of `self`,
  // from its already-accepted 6-neighbors; pushes an improved trial time.
  auto relax = [&](int self, int i, int j, int k) {
    auto& grid = instances[self].grid;
    size_t idx = grid.index(i, j, k);
    double F = velocities[self].values[idx];
    if (F <= 0) return;
    double axis_t[3] = {kInf, kInf, kInf};
    for (int f = 0; f < 6; ++f) {
      int ni = i + kFace[f][0], nj = j + kFace[f][1], nk = k + kFace[f][2];
      if (!grid.in_bounds(ni, nj, nk) || !grid.occupied(ni, nj, nk)) continue;
      axis_t[f / 2] = std::min(axis_t[f / 2], times[self][grid.index(ni, nj, nk)]);
    }
    std::sort(axis_t, axis_t + 3);
    if (std::isinf(axis_t[0])) return;
    double hf = grid.voxel_edge / F;
    double t = axis_t[0] + hf;
    if (!std::isinf(axis_t[1]) && t > axis_t[1]) {
      double d = axis_t[0] - axis_t[1];
      double disc = 2 * hf * hf - d * d;
      if (disc >= 0) {
        t = 0.5 * (axis_t[0] + axis_t[1] + std::sqrt(disc));
        if (!std::isinf(axis_t[2]) && t > axis_t[2]) {
          double s = axis_t[0] + axis_t[1] + axis_t[2];
          double q = axis_t[0] * axis_t[0] + axis_t[1] * axis_t[1] + axis_t[2] * axis_t[2];
          double disc3 = s * s - 3 * (q - hf * hf);
          if (disc3 >= 0) t = (s + std::sqrt(disc3)) / 3.0;
        }
      }
    }
    if (t < times[self][idx]) {
      times[self][idx] = t;
      heaps[self].push({t, self, i, j, k});
    }
  };

  for (int s = 0; s < n; ++s) {
    auto& grid = instances[s].grid;
    times[s].assign(grid.size(), kInf);
    deficit[s] = instances[s].lost_volume;
    st.instances[s].original = instances[s].original_volume;
    st.instances[s].lost = instances[s].lost_volume;
    if (deficit[s] == 0) continue;
    for (int k = 0; k < grid.dims[2]; ++k)
      for (int j = 0; j < grid.dims[1]; ++j)
        for (int i = 0; i < grid.dims[0]; ++i)
          if (grid.occupied(i, j, k)) times[s][grid.index(i, j, k)] = 0;
    for (int k = 0; k < grid.dims[2]; ++k)
      for (int j = 0; j < grid.dims[1]; ++j)
        for (int i = 0; i < grid.dims[0]; ++i) {
          if (grid.occupied(i, j, k)) continue;
          bool front = false;
          for (auto& f : kFace) {
            int ni = i + f[0], nj = j + f[1], nk = k + f[2];
            if (grid.in_bounds(ni, nj, nk) && grid.occupied(ni, nj, nk)) {
              front = true;
              break;
            }
          }
          if (front && !blocked(s, grid.to_global(i, j, k))) relax(s, i, j, k);
        }
  }

  // Pops the earliest still-valid front voxel of `self` and claims it.
  auto claim_one = [&](int self) {
    auto& inst = instances[self];
    auto& grid = inst.grid;
    while (!heaps[self].empty()) {
      auto e = heaps[self].top();
      heaps[self].pop();
      size_t idx = grid.index(e.i, e.j, e.k);
      if (e.t != times[self][idx]) continue;       // superseded by a better trial time
      if (grid.occupancy[idx]) continue;           // already accepted
      if (blocked(self, grid.to_global(e.i, e.j, e.k))) {
        times[self][idx] = kInf;  // permanently lost to a competitor; allow re-relaxation
        continue;
      }
      if (e.i == 0 || e.j == 0 || e.k == 0 || e.i == grid.dims[0] - 1 ||
          e.j == grid.dims[1] - 1 || e.k == grid.dims[2] - 1)
        throw StageError("instance " + std::to_string(self) +
                         " grew to its grid boundary; increase the grid size factor");
      grid.occupancy[idx] = 1;
      ++inst.recovered_volume;
      --deficit[self];
      st.instances[self].claim_times.push_back(e.t);
      st.instances[self].claim_voxels.push_back(grid.to_global(e.i, e.j, e.k));
      for (auto& f : kFace) {
        int ni = e.i + f[0], nj = e.j + f[1], nk = e.k + f[2];
        if (grid.in_bounds(ni, nj, nk) && !grid.occupied(ni, nj, nk)) relax(self, ni, nj, nk);
      }
      return;
    }
    throw StageError("instance " + std::to_string(self) +
                     " exhausted its growth front with a deficit of " +
                     std::to_string(deficit[self]) + " voxels");
  };

  if (global_min_scheduling) {
    FrontHeap all;
    for (int s = 0; s < n; ++s)
      while (!heaps[s].empty()) {
        all.push(heaps[s].top());
        heaps[s].pop();
      }
    int64_t remaining = 0;
    for (auto d : deficit) remaining += d;
    while (remaining > 0) {
      if (all.empty()) throw StageError("all growth fronts exhausted with unmet deficits");
      auto e = all.top();
      all.pop();
      int s = e.inst;
      if (deficit[s] == 0) continue;
      auto& grid = instances[s].grid;
      size_t idx = grid.index(e.i, e.j, e.k);
      if (e.t != times[s][idx] || grid.occupancy[idx]) continue;
      if (blocked(s, grid.to_global(e.i, e.j, e.k))) {
        times[s][idx] = kInf;
        continue;
      }
      heaps[s].push(e);  // hand the validated entry to the shared claim path
      claim_one(s);
      ++st.instances[s].rounds;
      --remaining;
      while (!heaps[s].empty()) {
        all.push(heaps[s].top());
        heaps[s].pop();
      }
    }
  } else {
    bool pending = true;
    while (pending) {
      pending = false;
      for (int s = 0; s < n; ++s) {
        if (deficit[s] == 0) continue;
        claim_one(s);
        ++st.instances[s].rounds;
        if (deficit[s] > 0) pending = true;
      }
    }
  }

  int64_t total_lost = 0, total_voxels = 0;
  for (int s = 0; s < n; ++s) {
    st.instances[s].recovered = instances[s].recovered_volume;
    total_lost += instances[s].lost_volume;
    total_voxels += instances[s].original_volume;
  }
  st.overlap_percent = total_voxels > 0 ? 100.0 * total_lost / total_voxels : 0.0;
  return instances;
}

}  // namespace pavel
