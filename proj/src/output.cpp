#include "pavel/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <set>

#include <json.hpp>

#include "pavel/errors.hpp"
#include "pavel/marching_cubes.hpp"

namespace pavel {

TriangleMesh extract_element_mesh(const DecorationInstance& instance) {
  return extract_occupancy_surface(instance.grid);
}

namespace {

std::vector<std::vector<int>> vertex_neighbors(const TriangleMesh& mesh) {
  std::vector<std::set<int>> adj(mesh.vertices.size());
  for (auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      adj[t[e]].insert(t[(e + 1) % 3]);
      adj[t[e]].insert(t[(e + 2) % 3]);
    }
  std::vector<std::vector<int>> out(adj.size());
  for (size_t v = 0; v < adj.size(); ++v) out[v].assign(adj[v].begin(), adj[v].end());
  return out;
}

void laplacian_step(std::vector<Vec3>& pos, const std::vector<std::vector<int>>& adj,
                    double factor) {
  std::vector<Vec3> next(pos.size());
  for (size_t v = 0; v < pos.size(); ++v) {
    if (adj[v].empty()) {
      next[v] = pos[v];
      continue;
    }
    Vec3 mean{};
    for (int u : adj[v]) mean += pos[u];
    mean /= static_cast<double>(adj[v].size());
    next[v] = pos[v] + (mean - pos[v]) * factor;
  }
  pos.swap(next);
}

}  // namespace

TriangleMesh smooth_mesh(const TriangleMesh& mesh, int iterations, double pass_band) {
  if (iterations < 0) throw ConfigError("smoothing iterations must be non-negative");
  TriangleMesh out = mesh;
  if (iterations == 0) return out;
  const double lambda = 0.5;
  const double mu = 1.0 / (pass_band - 2.0);  // negative inflation step undoes shrinkage
  auto adj = vertex_neighbors(mesh);
  for (int it = 0; it < iterations; ++it) {
    laplacian_step(out.vertices, adj, lambda);
    laplacian_step(out.vertices, adj, mu);
  }
  compute_vertex_normals(out);
  return out;
}

namespace {

// Symmetric 4x4 error quadric, upper triangle.
struct Quadric {
  double m[10] = {};

  void add_plane(const Vec3& n, double d, double w) {
    double p[4] = {n.x, n.y, n.z, d};
    int k = 0;
    for (int r = 0; r < 4; ++r)
      for (int c = r; c < 4; ++c) m[k++] += w * p[r] * p[c];
  }
  Quadric& operator+=(const Quadric& o) {
    for (int k = 0; k < 10; ++k) m[k] += o.m[k];
    return *this;
  }
  double eval(const Vec3& v) const {
    double p[4] = {v.x, v.y, v.z, 1};
    // indices: 0:xx 1:xy 2:xz 3:xw 4:yy 5:yz 6:yw 7:zz 8:zw 9:ww
    double r = m[0] * p[0] * p[0] + m[4] * p[1] * p[1] + m[7] * p[2] * p[2] + m[9];
    r += 2 * (m[1] * p[0] * p[1] + m[2] * p[0] * p[2] + m[3] * p[0] + m[5] * p[1] * p[2] +
              m[6] * p[1] + m[8] * p[2]);
    return r;
  }
  // Minimizer of the quadric if the 3x3 block is invertible.
  bool minimize(Vec3& v) const {
    double a00 = m[0], a01 = m[1], a02 = m[2];
    double a11 = m[4], a12 = m[5], a22 = m[7];
    double b0 = -m[3], b1 = -m[6], b2 = -m[8];
    double det = a00 * (a11 * a22 - a12 * a12) - a01 * (a01 * a22 - a12 * a02) +
                 a02 * (a01 * a12 - a11 * a02);
    if (std::abs(det) < 1e-12) return false;
    v.x = (b0 * (a11 * a22 - a12 * a12) - a01 * (b1 * a22 - a12 * b2) +
           a02 * (b1 * a12 - a11 * b2)) / det;
    v.y = (a00 * (b1 * a22 - a12 * b2) - b0 * (a01 * a22 - a12 * a02) +
           a02 * (a01 * b2 - b1 * a02)) / det;
    v.z = (a00 * (a11 * b2 - b1 * a12) - a01 * (a01 * b2 - b1 * a02) +
           b0 * (a01 * a12 - a11 * a02)) / det;
    return true;
  }
};

struct Collapse {
  double cost;
  int a, b;          // b merges into a
  uint64_t va, vb;   // vertex versions at push time
  Vec3 target;
  bool operator>(const Collapse& o) const {
    if (cost != o.cost) return cost > o.cost;
    if (a != o.a) return a > o.a;
    return b > o.b;
  }
};

}  // namespace

TriangleMesh decimate_mesh(const TriangleMesh& mesh, int target_triangles) {
  if (target_triangles < 4) throw ConfigError("triangle budget must be at least 4");
  if (static_cast<int>(mesh.triangles.size()) <= target_triangles) return mesh;

  auto pos = mesh.vertices;
  auto faces = mesh.triangles;
  std::vector<uint8_t> face_alive(faces.size(), 1);
  std::vector<std::set<int>> vfaces(pos.size());
  std::vector<Quadric> quadric(pos.size());
  for (size_t f = 0; f < faces.size(); ++f) {
    auto& t = faces[f];
    for (int e = 0; e < 3; ++e) vfaces[t[e]].insert(static_cast<int>(f));
    auto n = cross(pos[t[1]] - pos[t[0]], pos[t[2]] - pos[t[0]]);
    double area2 = length(n);
    if (area2 <= 0) continue;
    auto un = n / area2;
    for (int e = 0; e < 3; ++e)
      quadric[t[e]].add_plane(un, -dot(un, pos[t[0]]), area2 * 0.5);
  }

  std::vector<uint64_t> version(pos.size(), 0);
  std::priority_queue<Collapse, std::vector<Collapse>, std::greater<>> heap;

  auto push_edge = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    Quadric q = quadric[a];
    q += quadric[b];
    Vec3 v;
    if (!q.minimize(v)) {
      Vec3 mid = (pos[a] + pos[b]) * 0.5;
      v = mid;
      double best = q.eval(mid);
      for (auto& c : {pos[a], pos[b]})
        if (q.eval(c) < best) {
          best = q.eval(c);
          v = c;
        }
    }
    heap.push({q.eval(v), a, b, version[a], version[b], v});
  };

  for (size_t f = 0; f < faces.size(); ++f)
    for (int e = 0; e < 3; ++e) {
      int a = faces[f][e], b = faces[f][(e + 1) % 3];
      if (a < b) push_edge(a, b);
    }

  auto vertex_ring = [&](int v) {
    std::set<int> ring;
    for (int f : vfaces[v])
      if (face_alive[f])
        for (int c : faces[f])
          if (c != v) ring.insert(c);
    return ring;
  };

  int alive = static_cast<int>(faces.size());
  while (alive > target_triangles && !heap.empty()) {
    auto c = heap.top();
    heap.pop();
    if (c.va != version[c.a] || c.vb != version[c.b]) continue;
    int a = c.a, b = c.b;

    // the edge must still exist
    std::vector<int> shared;
    for (int f : vfaces[a])
      if (face_alive[f] && vfaces[b].count(f)) shared.push_back(f);
    if (shared.empty()) continue;

    // link condition: common ring vertices must all come from the shared faces
    auto ra = vertex_ring(a), rb = vertex_ring(b);
    std::vector<int> common;
    std::set_intersection(ra.begin(), ra.end(), rb.begin(), rb.end(), std::back_inserter(common));
    if (common.size() != shared.size()) continue;

    // reject collapses that flip surviving faces
    bool flips = false;
    for (int v : {a, b}) {
      for (int f : vfaces[v]) {
        if (!face_alive[f]) continue;
        if (std::find(shared.begin(), shared.end(), f) != shared.end()) continue;
        Vec3 p[3], q[3];
        for (int e = 0; e < 3; ++e) {
          p[e] = pos[faces[f][e]];
          q[e] = (faces[f][e] == a || faces[f][e] == b) ? c.target : p[e];
        }
        auto n0 = cross(p[1] - p[0], p[2] - p[0]);
        auto n1 = cross(q[1] - q[0], q[2] - q[0]);
        if (dot(n0, n1) <= 0 || length_squared(n1) < 1e-24) {
          flips = true;
          break;
        }
      }
      if (flips) break;
    }
    if (flips) continue;

    pos[a] = c.target;
    quadric[a] += quadric[b];
    for (int f : shared) {
      if (face_alive[f]) {
        face_alive[f] = 0;
        --alive;
      }
    }
    for (int f : vfaces[b]) {
      if (!face_alive[f]) continue;
      for (auto& idx : faces[f])
        if (idx == b) idx = a;
      vfaces[a].insert(f);
    }
    vfaces[b].clear();
    ++version[a];
    ++version[b];
    for (int u : vertex_ring(a)) push_edge(a, u);
  }

  TriangleMesh out;
  std::vector<int> remap(pos.size(), -1);
  for (size_t f = 0; f < faces.size(); ++f) {
    if (!face_alive[f]) continue;
    std::array<int, 3> t;
    for (int e = 0; e < 3; ++e) {
      int v = faces[f][e];
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(pos[v]);
      }
      t[e] = remap[v];
    }
    out.triangles.push_back(t);
  }
  remove_degenerate_triangles(out);
  if (out.triangles.size() < 4 || mesh_volume(out) <= 0)
    throw StageError("decimation collapsed the mesh; raise the triangle budget");
  compute_vertex_normals(out);
  return out;
}

TriangleMesh merge_scene(const TriangleMesh& base, const std::vector<TriangleMesh>& elements) {
  std::vector<TriangleMesh> all;
  all.reserve(elements.size() + 1);
  all.push_back(base);
  for (auto& e : elements) all.push_back(e);
  return concatenate_meshes(all);
}

std::vector<ShellPatch> decompose_shell(const std::vector<TriangleMesh>& elements,
                                        const std::vector<DecorationInstance>& instances,
                                        const std::vector<CutPlane>& cut_planes) {
  if (elements.size() != instances.size())
    throw ConfigError("one mesh per instance required for shell decomposition");

  std::vector<int> on_plane;
  std::vector<uint64_t> cell(instances.size(), 0);
  for (size_t i = 0; i < instances.size(); ++i) {
    for (size_t p = 0; p < cut_planes.size(); ++p) {
      auto& pl = cut_planes[p];
      double s = dot(normalize(pl.normal), instances[i].seed.position - pl.point);
      if (std::abs(s) < 1e-6) {
        on_plane.push_back(static_cast<int>(i));
        break;
      }
      if (s > 0) cell[i] |= uint64_t{1} << p;
    }
  }
  if (!on_plane.empty()) {
    std::string msg = "seed positions on a cut plane (nudge the planes): instances";
    for (int i : on_plane) msg += " " + std::to_string(i);
    throw StageError(msg);
  }

  std::map<uint64_t, std::vector<int>> cells;
  for (size_t i = 0; i < instances.size(); ++i) cells[cell[i]].push_back(static_cast<int>(i));

  std::vector<ShellPatch> patches;
  int next_id = 0;
  for (auto& [key, ids] : cells) {
    ShellPatch patch;
    patch.patch_id = next_id++;
    patch.element_ids = ids;
    std::vector<TriangleMesh> members;
    for (int i : ids) members.push_back(elements[i]);
    patch.mesh = concatenate_meshes(members);
    patches.push_back(std::move(patch));
  }
  return patches;
}

void write_shell_manifest(const std::vector<ShellPatch>& patches, const std::string& path) {
  nlohmann::json j = nlohmann::json::array();
  for (auto& p : patches) {
    j.push_back({{"patch_id", p.patch_id},
                 {"element_ids", p.element_ids},
                 {"triangles", p.mesh.triangles.size()}});
  }
  std::ofstream out(path);
  if (!out) throw StageError("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace pavel
