#include "pavel/mesh.hpp"

#include <cmath>
#include <map>
#include <unordered_map>

namespace pavel {

Bbox3 TriangleMesh::bbox() const {
  Bbox3 box;
  for (auto& v : vertices) box.expand(v);
  return box;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * length(cross(b - a, c - a));
}

double surface_area(const TriangleMesh& mesh) {
  double area = 0;
  for (auto& t : mesh.triangles)
    area += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
  return area;
}

double mesh_volume(const TriangleMesh& mesh) {
  double vol = 0;
  for (auto& t : mesh.triangles) {
    auto& a = mesh.vertices[t[0]];
    auto& b = mesh.vertices[t[1]];
    auto& c = mesh.vertices[t[2]];
    vol += dot(a, cross(b, c)) / 6.0;
  }
  return vol;
}

void compute_vertex_normals(TriangleMesh& mesh) {
  mesh.normals.assign(mesh.vertices.size(), Vec3{});
  for (auto& t : mesh.triangles) {
    auto n = cross(mesh.vertices[t[1]] - mesh.vertices[t[0]],
                   mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    mesh.normals[t[0]] += n;
    mesh.normals[t[1]] += n;
    mesh.normals[t[2]] += n;
  }
  for (auto& n : mesh.normals) {
    auto l = length(n);
    n = l > 0 ? n / l : Vec3{0, 0, 1};
  }
}

int remove_degenerate_triangles(TriangleMesh& mesh) {
  const double kAreaTol = 1e-12;  // squared model units
  std::vector<std::array<int, 3>> kept;
  kept.reserve(mesh.triangles.size());
  for (auto& t : mesh.triangles) {
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
    auto a = triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    if (a > kAreaTol) kept.push_back(t);
  }
  int dropped = static_cast<int>(mesh.triangles.size() - kept.size());
  mesh.triangles = std::move(kept);

  // prune unreferenced vertices
  std::vector<int> remap(mesh.vertices.size(), -1);
  std::vector<Vec3> verts;
  for (auto& t : mesh.triangles)
    for (int i : {0, 1, 2})
      if (remap[t[i]] < 0) {
        remap[t[i]] = static_cast<int>(verts.size());
        verts.push_back(mesh.vertices[t[i]]);
      }
  for (auto& t : mesh.triangles)
    for (auto& i : t) i = remap[i];
  mesh.vertices = std::move(verts);
  compute_vertex_normals(mesh);
  return dropped;
}

void weld_vertices(TriangleMesh& mesh, double tol) {
  if (mesh.vertices.empty()) return;
  // snap to a grid of cell size tol; coincident STL facet vertices land in the
  // same cell for any tol below half the smallest feature size
  double cell = tol > 0 ? tol : 1e-30;
  std::map<std::array<int64_t, 3>, int> lookup;
  std::vector<int> remap(mesh.vertices.size());
  std::vector<Vec3> verts;
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    auto& v = mesh.vertices[i];
    std::array<int64_t, 3> key = {static_cast<int64_t>(std::floor(v.x / cell)),
                                  static_cast<int64_t>(std::floor(v.y / cell)),
                                  static_cast<int64_t>(std::floor(v.z / cell))};
    auto it = lookup.find(key);
    if (it == lookup.end()) {
      lookup.emplace(key, static_cast<int>(verts.size()));
      remap[i] = static_cast<int>(verts.size());
      verts.push_back(v);
    } else {
      remap[i] = it->second;
    }
  }
  std::vector<std::array<int, 3>> tris;
  tris.reserve(mesh.triangles.size());
  for (auto& t : mesh.triangles) {
    std::array<int, 3> m = {remap[t[0]], remap[t[1]], remap[t[2]]};
    if (m[0] != m[1] && m[1] != m[2] && m[0] != m[2]) tris.push_back(m);
  }
  mesh.vertices = std::move(verts);
  mesh.triangles = std::move(tris);
  compute_vertex_normals(mesh);
}

EdgeAudit audit_edges(const TriangleMesh& mesh) {
  std::map<std::pair<int, int>, int> count;
  for (auto& t : mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      int a = t[i], b = t[(i + 1) % 3];
      if (a > b) std::swap(a, b);
      ++count[{a, b}];
    }
  }
  EdgeAudit audit;
  for (auto& [e, c] : count) {
    if (c == 1) ++audit.open_edges;
    if (c > 2) ++audit.nonmanifold_edges;
  }
  return audit;
}

TriangleMesh transformed(const TriangleMesh& mesh, const Mat3& rotation, const Vec3& translation,
                         double scale) {
  TriangleMesh out;
  out.vertices.reserve(mesh.vertices.size());
  for (auto& v : mesh.vertices) out.vertices.push_back(rotation * (v * scale) + translation);
  out.triangles = mesh.triangles;
  compute_vertex_normals(out);
  return out;
}

TriangleMesh concatenate_meshes(const std::vector<TriangleMesh>& meshes) {
  TriangleMesh out;
  std::map<std::array<double, 3>, int> lookup;
  for (auto& m : meshes) {
    std::vector<int> remap(m.vertices.size());
    for (size_t i = 0; i < m.vertices.size(); ++i) {
      auto& v = m.vertices[i];
      std::array<double, 3> key = {v.x, v.y, v.z};
      auto it = lookup.find(key);
      if (it == lookup.end()) {
        lookup.emplace(key, static_cast<int>(out.vertices.size()));
        remap[i] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(v);
      } else {
        remap[i] = it->second;
      }
    }
    for (auto& t : m.triangles)
      out.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
  }
  compute_vertex_normals(out);
  return out;
}

}  // namespace pavel
