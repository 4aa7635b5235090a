#include "pavel/sdf.hpp"

#include <cmath>

#include "pavel/errors.hpp"
#include "pavel/threading.hpp"

namespace pavel {

ScalarGrid compute_sdf_grid(const TriangleBvh& bvh, double voxel_edge, double padding) {
  if (voxel_edge <= 0) throw ConfigError("voxel_edge must be positive");
  auto box = bvh.mesh().bbox();
  box.lo -= Vec3{padding, padding, padding};
  box.hi += Vec3{padding, padding, padding};

  ScalarGrid grid;
  grid.voxel_edge = voxel_edge;
  grid.origin = box.lo;
  for (int a = 0; a < 3; ++a)
    grid.dims[a] = std::max(1, static_cast<int>(std::ceil((box.hi[a] - box.lo[a]) / voxel_edge)));
  grid.values.resize(grid.size());

  int nx = grid.dims[0], ny = grid.dims[1];
  parallel_for(0, static_cast<int64_t>(grid.size()), [&](int64_t idx) {
    int i = static_cast<int>(idx % nx);
    int j = static_cast<int>((idx / nx) % ny);
    int k = static_cast<int>(idx / (static_cast<int64_t>(nx) * ny));
    grid.values[idx] = bvh.signed_distance(grid.sample_position(i, j, k));
  });
  return grid;
}

ScalarGrid compute_sdf_grid(const TriangleMesh& mesh, double voxel_edge, double padding) {
  auto audit = audit_edges(mesh);
  if (audit.open_edges > 0)
    throw StageError("mesh is not watertight: " + std::to_string(audit.open_edges) +
                     " open edges, sign of distance undefined");
  TriangleBvh bvh(mesh);
  return compute_sdf_grid(bvh, voxel_edge, padding);
}

SurfaceProjection project_to_surface(const Vec3& point, const TriangleBvh& bvh) {
  auto cp = bvh.closest_point(point);
  auto& mesh = bvh.mesh();
  auto& t = mesh.triangles[cp.triangle];
  auto &a = mesh.vertices[t[0]], &b = mesh.vertices[t[1]], &c = mesh.vertices[t[2]];

  // barycentric coordinates of the closest point
  auto v0 = b - a, v1 = c - a, v2 = cp.point - a;
  double d00 = dot(v0, v0), d01 = dot(v0, v1), d11 = dot(v1, v1);
  double d20 = dot(v2, v0), d21 = dot(v2, v1);
  double denom = d00 * d11 - d01 * d01;
  double v = denom != 0 ? (d11 * d20 - d01 * d21) / denom : 0;
  double w = denom != 0 ? (d00 * d21 - d01 * d20) / denom : 0;
  double u = 1.0 - v - w;

  auto n = normalize(mesh.normals[t[0]] * u + mesh.normals[t[1]] * v + mesh.normals[t[2]] * w);
  return {cp.point, n};
}

SurfaceProjection project_to_surface(const Vec3& point, const TriangleMesh& mesh) {
  TriangleBvh bvh(mesh);
  return project_to_surface(point, bvh);
}

}  // namespace pavel
