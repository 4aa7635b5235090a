#include "pavel/marching_cubes.hpp"

#include <algorithm>
#include <unordered_map>

#include "pavel/errors.hpp"

namespace pavel {

namespace {

#include "mc_tables.inc"

// cube corners: 0..3 cycle the k face, 4..7 the k+1 face directly above
const int kCornerOffset[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                 {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
const int kEdgeCorner[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

struct EdgeKeyHash {
  size_t operator()(const std::pair<int64_t, int64_t>& k) const {
    return std::hash<int64_t>()(k.first) * 0x9e3779b97f4a7c15ull + std::hash<int64_t>()(k.second);
  }
};

}  // namespace

TriangleMesh extract_isosurface(const ScalarGrid& grid, double level) {
  if (grid.values.empty()) throw StageError("empty grid");
  auto [lo, hi] = std::minmax_element(grid.values.begin(), grid.values.end());
  if (level <= *lo || level >= *hi)
    throw StageError("iso level outside grid value range, surface is empty");

  TriangleMesh mesh;
  std::unordered_map<std::pair<int64_t, int64_t>, int, EdgeKeyHash> edge_vertex;

  auto sample_id = [&](int i, int j, int k) {
    return static_cast<int64_t>(grid.index(i, j, k));
  };
  auto vertex_on_edge = [&](int ai, int aj, int ak, int bi, int bj, int bk) {
    int64_t ida = sample_id(ai, aj, ak), idb = sample_id(bi, bj, bk);
    bool swap = ida > idb;
    if (swap) {
      std::swap(ida, idb);
      std::swap(ai, bi);
      std::swap(aj, bj);
      std::swap(ak, bk);
    }
    auto it = edge_vertex.find({ida, idb});
    if (it != edge_vertex.end()) return it->second;
    double va = grid.values[ida], vb = grid.values[idb];
    double t = (level - va) / (vb - va);
    t = std::clamp(t, 0.0, 1.0);
    auto pa = grid.sample_position(ai, aj, ak);
    auto pb = grid.sample_position(bi, bj, bk);
    int idx = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(pa + (pb - pa) * t);
    edge_vertex.emplace(std::make_pair(ida, idb), idx);
    return idx;
  };

  for (int k = 0; k + 1 < grid.dims[2]; ++k)
    for (int j = 0; j + 1 < grid.dims[1]; ++j)
      for (int i = 0; i + 1 < grid.dims[0]; ++i) {
        int cube = 0;
        double vals[8];
        for (int c = 0; c < 8; ++c) {
          vals[c] = grid.at(i + kCornerOffset[c][0], j + kCornerOffset[c][1],
                            k + kCornerOffset[c][2]);
          if (vals[c] < level) cube |= 1 << c;
        }
        if (kEdgeTable[cube] == 0) continue;
        int everts[12];
        for (int e = 0; e < 12; ++e) {
          if (!(kEdgeTable[cube] & (1 << e))) continue;
          auto* ca = kCornerOffset[kEdgeCorner[e][0]];
          auto* cb = kCornerOffset[kEdgeCorner[e][1]];
          everts[e] = vertex_on_edge(i + ca[0], j + ca[1], k + ca[2],
                                     i + cb[0], j + cb[1], k + cb[2]);
        }
        for (int t = 0; kTriTable[cube][t] != -1; t += 3) {
          int a = everts[kTriTable[cube][t]];
          int b = everts[kTriTable[cube][t + 1]];
          int c = everts[kTriTable[cube][t + 2]];
          if (a == b || b == c || a == c) continue;
          mesh.triangles.push_back({a, b, c});
        }
      }

  remove_degenerate_triangles(mesh);
  if (mesh.triangles.empty()) throw StageError("iso surface extraction produced no triangles");
  // orient outward: the table convention leaves lower values inside
  if (mesh_volume(mesh) < 0)
    for (auto& t : mesh.triangles) std::swap(t[1], t[2]);
  compute_vertex_normals(mesh);
  return mesh;
}

TriangleMesh extract_occupancy_surface(const VoxelGrid& grid) {
  if (grid.occupied_count() == 0) throw StageError("empty occupancy grid");
  ScalarGrid field;
  field.voxel_edge = grid.voxel_edge;
  auto o = grid.origin();
  field.origin = {o.x - grid.voxel_edge, o.y - grid.voxel_edge, o.z - grid.voxel_edge};
  field.dims = {grid.dims[0] + 2, grid.dims[1] + 2, grid.dims[2] + 2};
  field.values.assign(field.size(), 0.0);
  for (int k = 0; k < grid.dims[2]; ++k)
    for (int j = 0; j < grid.dims[1]; ++j)
      for (int i = 0; i < grid.dims[0]; ++i)
        if (grid.occupied(i, j, k)) field.at(i + 1, j + 1, k + 1) = 1.0;
  return extract_isosurface(field, 0.5);
}

}  // namespace pavel
