#pragma once

#include "pavel/bvh.hpp"
#include "pavel/grid.hpp"
#include "pavel/mesh.hpp"

namespace pavel {

// Signed Euclidean distance sampled on a grid covering the mesh bbox expanded
// by padding. Negative inside; sign from the generalized winding number with
// threshold 0.5. Throws StageError for non-watertight meshes (open-edge count
// in the message). Parallel over voxels.
ScalarGrid compute_sdf_grid(const TriangleMesh& mesh, double voxel_edge, double padding);

// Same field evaluated against a prebuilt tree (watertightness already
// checked by the caller).
ScalarGrid compute_sdf_grid(const TriangleBvh& bvh, double voxel_edge, double padding);

struct SurfaceProjection {
  Vec3 point;
  Vec3 normal;  // interpolated vertex normal at the closest point
};

SurfaceProjection project_to_surface(const Vec3& point, const TriangleBvh& bvh);
SurfaceProjection project_to_surface(const Vec3& point, const TriangleMesh& mesh);

}  // namespace pavel
