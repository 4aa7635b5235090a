#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pavel/math.hpp"

namespace pavel {

// Indexed triangle surface with per-vertex normals. Normals are area-weighted
// and recomputed whenever the geometry changes.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Vec3> normals;  // unit, one per vertex

  Bbox3 bbox() const;
};

void compute_vertex_normals(TriangleMesh& mesh);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
double surface_area(const TriangleMesh& mesh);

// Signed volume by the divergence theorem; meaningful for closed meshes.
double mesh_volume(const TriangleMesh& mesh);

// Drops triangles with squared-area ~ 0 (tolerance 1e-12 in squared model
// units) and prunes unreferenced vertices. Returns the number dropped.
int remove_degenerate_triangles(TriangleMesh& mesh);

// Merges vertices closer than tol and drops triangles that collapse.
void weld_vertices(TriangleMesh& mesh, double tol);

struct EdgeAudit {
  int open_edges = 0;         // edges with exactly 1 incident triangle
  int nonmanifold_edges = 0;  // edges with 3+ incident triangles
  bool watertight() const { return open_edges == 0 && nonmanifold_edges == 0; }
};
EdgeAudit audit_edges(const TriangleMesh& mesh);

TriangleMesh transformed(const TriangleMesh& mesh, const Mat3& rotation, const Vec3& translation,
                         double scale);

// Appends all meshes into one, welding coincident vertices exactly.
TriangleMesh concatenate_meshes(const std::vector<TriangleMesh>& meshes);

}  // namespace pavel
