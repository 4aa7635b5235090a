#pragma once

#include <string>
#include <vector>

#include "pavel/mesh.hpp"
#include "pavel/voxelize.hpp"

namespace pavel {

// Oriented cut plane; points with dot(normal, p - point) >= 0 are "above".
struct CutPlane {
  Vec3 normal;
  Vec3 point;
};

// Whole deformed elements clustered into one separately printable piece.
struct ShellPatch {
  int patch_id = 0;
  std::vector<int> element_ids;
  TriangleMesh mesh;
};

// Watertight boundary mesh of the instance occupancy (iso 0.5 on the binary
// field). Errors on empty occupancy.
TriangleMesh extract_element_mesh(const DecorationInstance& instance);

// Taubin lambda/mu smoothing: lambda = 0.5, mu = 1 / (pass_band - 2).
// Volume-preserving in contrast to plain Laplacian shrinkage.
TriangleMesh smooth_mesh(const TriangleMesh& mesh, int iterations, double pass_band = 0.1);

// Quadric edge-collapse decimation down to at most target_triangles.
// Collapses that would break local manifoldness or flip faces are skipped.
// Errors if the result would degenerate.
TriangleMesh decimate_mesh(const TriangleMesh& mesh, int target_triangles);

// Base plus elements as one mesh: concatenation with coincident vertices
// welded. Interiors are disjoint by construction, so no boolean union needed.
TriangleMesh merge_scene(const TriangleMesh& base, const std::vector<TriangleMesh>& elements);

// Assigns each whole element to the space cell (sign pattern over the cut
// planes) containing its seed position; empty cells are omitted. Errors if a
// seed position lies on a plane within 1e-6.
std::vector<ShellPatch> decompose_shell(const std::vector<TriangleMesh>& elements,
                                        const std::vector<DecorationInstance>& instances,
                                        const std::vector<CutPlane>& cut_planes);

// JSON mapping patch id -> element instance ids.
void write_shell_manifest(const std::vector<ShellPatch>& patches, const std::string& path);

}  // namespace pavel
