#include "pavel/shapes.hpp"

#include <cmath>
#include <map>

namespace pavel {

TriangleMesh make_cube(const Vec3& lo, const Vec3& hi) {
  TriangleMesh mesh;
  mesh.vertices = {
      {lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
      {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z}};
  mesh.triangles = {{0, 2, 1}, {0, 3, 2},   // bottom
                    {4, 5, 6}, {4, 6, 7},   // top
                    {0, 1, 5}, {0, 5, 4},   // front
                    {2, 3, 7}, {2, 7, 6},   // back
                    {1, 2, 6}, {1, 6, 5},   // right
                    {3, 0, 4}, {3, 4, 7}};  // left
  compute_vertex_normals(mesh);
  return mesh;
}

TriangleMesh make_icosphere(double radius, int subdivisions, const Vec3& center) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh mesh;
  mesh.vertices = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
                   {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  mesh.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                    {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                    {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                    {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& v : mesh.vertices) v = normalize(v);

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      int idx = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(normalize((mesh.vertices[a] + mesh.vertices[b]) * 0.5));
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.triangles.size() * 4);
    for (auto& tr : mesh.triangles) {
      int ab = mid(tr[0], tr[1]), bc = mid(tr[1], tr[2]), ca = mid(tr[2], tr[0]);
      next.push_back({tr[0], ab, ca});
      next.push_back({tr[1], bc, ab});
      next.push_back({tr[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.triangles = std::move(next);
  }
  for (auto& v : mesh.vertices) v = v * radius + center;
  compute_vertex_normals(mesh);
  return mesh;
}

TriangleMesh make_capsule(double radius, double half_length, int segments, int rings) {
  // rings latitudinal steps per hemisphere; seam rings shared with the tube
  TriangleMesh mesh;
  std::vector<std::vector<int>> ring_idx;
  auto add_ring = [&](double r, double z) {
    std::vector<int> idx;
    for (int s = 0; s < segments; ++s) {
      double phi = 2.0 * kPi * s / segments;
      idx.push_back(static_cast<int>(mesh.vertices.size()));
      mesh.vertices.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    ring_idx.push_back(idx);
  };

  int bottom_pole = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back({0, 0, -half_length - radius});
  for (int i = 1; i <= rings; ++i) {
    double theta = kPi / 2.0 * i / rings;  // from pole to equator
    add_ring(radius * std::sin(theta), -half_length - radius * std::cos(theta));
  }
  add_ring(radius, half_length);  // tube top seam
  for (int i = rings - 1; i >= 1; --i) {
    double theta = kPi / 2.0 * i / rings;
    add_ring(radius * std::sin(theta), half_length + radius * std::cos(theta));
  }
  int top_pole = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back({0, 0, half_length + radius});

  auto& first = ring_idx.front();
  for (int s = 0; s < segments; ++s)
    mesh.triangles.push_back({bottom_pole, first[(s + 1) % segments], first[s]});
  for (size_t r = 0; r + 1 < ring_idx.size(); ++r) {
    auto& a = ring_idx[r];
    auto& b = ring_idx[r + 1];
    for (int s = 0; s < segments; ++s) {
      int sn = (s + 1) % segments;
      mesh.triangles.push_back({a[s], a[sn], b[sn]});
      mesh.triangles.push_back({a[s], b[sn], b[s]});
    }
  }
  auto& last = ring_idx.back();
  for (int s = 0; s < segments; ++s)
    mesh.triangles.push_back({top_pole, last[s], last[(s + 1) % segments]});
  compute_vertex_normals(mesh);
  return mesh;
}

TriangleMesh make_lathe(const std::vector<std::pair<double, double>>& profile, int segments) {
  TriangleMesh mesh;
  std::vector<std::vector<int>> rings;
  for (auto& [r, z] : profile) {
    std::vector<int> idx;
    for (int s = 0; s < segments; ++s) {
      double phi = 2.0 * kPi * s / segments;
      idx.push_back(static_cast<int>(mesh.vertices.size()));
      mesh.vertices.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    rings.push_back(idx);
  }
  for (size_t r = 0; r + 1 < rings.size(); ++r) {
    for (int s = 0; s < segments; ++s) {
      int sn = (s + 1) % segments;
      mesh.triangles.push_back({rings[r][s], rings[r][sn], rings[r + 1][sn]});
      mesh.triangles.push_back({rings[r][s], rings[r + 1][sn], rings[r + 1][s]});
    }
  }
  // cap both ends with fans
  int bottom = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back({0, 0, profile.front().second});
  for (int s = 0; s < segments; ++s)
    mesh.triangles.push_back({bottom, rings.front()[(s + 1) % segments], rings.front()[s]});
  int top = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back({0, 0, profile.back().second});
  for (int s = 0; s < segments; ++s)
    mesh.triangles.push_back({top, rings.back()[s], rings.back()[(s + 1) % segments]});
  compute_vertex_normals(mesh);
  return mesh;
}

TriangleMesh make_vase(double height, double base_radius, int segments) {
  std::vector<std::pair<double, double>> profile;
  int steps = 24;
  for (int i = 0; i <= steps; ++i) {
    double u = static_cast<double>(i) / steps;
    // belly around u=0.35, narrow neck near u=0.85, flared lip at the top
    double r = base_radius * (0.8 + 0.5 * std::sin(kPi * std::pow(u, 0.8)) - 0.25 * u +
                              0.25 * std::max(0.0, u - 0.85) / 0.15);
    profile.emplace_back(std::max(r, 0.15 * base_radius), u * height);
  }
  return make_lathe(profile, segments);
}

TriangleMesh make_plane_patch(double width, double height, int nx, int ny) {
  TriangleMesh mesh;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.vertices.push_back(
          {-width / 2 + width * i / nx, -height / 2 + height * j / ny, 0.0});
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  compute_vertex_normals(mesh);
  return mesh;
}

}  // namespace pavel
