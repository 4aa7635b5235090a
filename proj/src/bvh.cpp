#include "pavel/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pavel {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  auto ab = b - a, ac = c - a, ap = p - a;
  double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0 && d2 <= 0) return a;

  auto bp = p - b;
  double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0 && d4 <= d3) return b;

  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));

  auto cp = p - c;
  double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0 && d5 <= d6) return c;

  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));

  double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));

  double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

double triangle_winding(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // van Oosterom & Strackee signed solid angle
  auto va = a - p, vb = b - p, vc = c - p;
  double la = length(va), lb = length(vb), lc = length(vc);
  double num = dot(va, cross(vb, vc));
  double den = la * lb * lc + dot(va, vb) * lc + dot(vb, vc) * la + dot(vc, va) * lb;
  return 2.0 * std::atan2(num, den) / (4.0 * kPi);
}

TriangleBvh::TriangleBvh(const TriangleMesh& mesh) : mesh_(&mesh) {
  tri_order_.resize(mesh.triangles.size());
  std::iota(tri_order_.begin(), tri_order_.end(), 0);
  nodes_.reserve(mesh.triangles.size() * 2);
  if (!mesh.triangles.empty()) build(0, static_cast<int>(tri_order_.size()), 0);
}

int TriangleBvh::build(int first, int count, int depth) {
  int idx = static_cast<int>(nodes_.size());
  nodes_.emplace_back();

  Bbox3 box;
  Vec3 normal_sum{}, centroid_sum{};
  double area_sum = 0;
  for (int i = first; i < first + count; ++i) {
    auto& t = mesh_->triangles[tri_order_[i]];
    auto &a = mesh_->vertices[t[0]], &b = mesh_->vertices[t[1]], &c = mesh_->vertices[t[2]];
    box.expand(a);
    box.expand(b);
    box.expand(c);
    auto n = cross(b - a, c - a);  // 2 * area * unit normal
    normal_sum += n * 0.5;
    double area = 0.5 * length(n);
    area_sum += area;
    centroid_sum += (a + b + c) / 3.0 * area;
  }
  auto centroid = area_sum > 0 ? centroid_sum / area_sum : box.center();
  double radius = 0;
  for (auto corner :
       {Vec3{box.lo.x, box.lo.y, box.lo.z}, Vec3{box.hi.x, box.lo.y, box.lo.z},
        Vec3{box.lo.x, box.hi.y, box.lo.z}, Vec3{box.hi.x, box.hi.y, box.lo.z},
        Vec3{box.lo.x, box.lo.y, box.hi.z}, Vec3{box.hi.x, box.lo.y, box.hi.z},
        Vec3{box.lo.x, box.hi.y, box.hi.z}, Vec3{box.hi.x, box.hi.y, box.hi.z}})
    radius = std::max(radius, distance(centroid, corner));

  const int kLeafSize = 4;
  if (count <= kLeafSize || depth > 48) {
    std::sort(tri_order_.begin() + first, tri_order_.begin() + first + count);
    nodes_[idx] = {box, normal_sum, centroid, radius, -1, -1, first, count};
    return idx;
  }

  auto ext = box.extent();
  int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
  int mid = first + count / 2;
  std::nth_element(tri_order_.begin() + first, tri_order_.begin() + mid,
                   tri_order_.begin() + first + count, [&](int ta, int tb) {
                     auto center = [&](int ti) {
                       auto& t = mesh_->triangles[ti];
                       return (mesh_->vertices[t[0]][axis] + mesh_->vertices[t[1]][axis] +
                               mesh_->vertices[t[2]][axis]);
                     };
                     double ca = center(ta), cb = center(tb);
                     return ca < cb || (ca == cb && ta < tb);
                   });
  int left = build(first, mid - first, depth + 1);
  int right = build(mid, first + count - mid, depth + 1);
  nodes_[idx] = {box, normal_sum, centroid, radius, left, right, first, count};
  return idx;
}

void TriangleBvh::closest_recurse(int node, const Vec3& p, ClosestPoint& best) const {
  auto& n = nodes_[node];
  double best_d2 = best.distance * best.distance;
  if (n.box.distance_squared_to(p) > best_d2) return;
  if (n.left < 0) {
    for (int i = n.first; i < n.first + n.count; ++i) {
      int ti = tri_order_[i];
      auto& t = mesh_->triangles[ti];
      auto q = closest_point_on_triangle(p, mesh_->vertices[t[0]], mesh_->vertices[t[1]],
                                         mesh_->vertices[t[2]]);
      double d = distance(p, q);
      if (d < best.distance || (d == best.distance && ti < best.triangle)) {
        best = {q, d, ti};
      }
    }
    return;
  }
  double dl = nodes_[n.left].box.distance_squared_to(p);
  double dr = nodes_[n.right].box.distance_squared_to(p);
  // nearer child first; non-strict pruning keeps equal-distance candidates so
  // the lowest-index tie rule stays exact
  if (dl <= dr) {
    closest_recurse(n.left, p, best);
    closest_recurse(n.right, p, best);
  } else {
    closest_recurse(n.right, p, best);
    closest_recurse(n.left, p, best);
  }
}

ClosestPoint TriangleBvh::closest_point(const Vec3& p) const {
  ClosestPoint best;
  best.distance = std::numeric_limits<double>::max();
  best.triangle = std::numeric_limits<int>::max();
  if (!nodes_.empty()) closest_recurse(0, p, best);
  return best;
}

double TriangleBvh::winding_recurse(int node, const Vec3& p) const {
  auto& n = nodes_[node];
  const double kBeta = 2.0;
  double d = distance(p, n.centroid);
  if (d > kBeta * n.radius) {
    // far field: dipole approximation of the subtree
    return dot(n.normal_sum, n.centroid - p) / (4.0 * kPi * d * d * d);
  }
  if (n.left < 0) {
    double w = 0;
    for (int i = n.first; i < n.first + n.count; ++i) {
      auto& t = mesh_->triangles[tri_order_[i]];
      w += triangle_winding(p, mesh_->vertices[t[0]], mesh_->vertices[t[1]],
                            mesh_->vertices[t[2]]);
    }
    return w;
  }
  return winding_recurse(n.left, p) + winding_recurse(n.right, p);
}

double TriangleBvh::winding_number(const Vec3& p) const {
  if (nodes_.empty()) return 0;
  return winding_recurse(0, p);
}

double TriangleBvh::signed_distance(const Vec3& p) const {
  auto cp = closest_point(p);
  return inside(p) ? -cp.distance : cp.distance;
}

}  // namespace pavel
