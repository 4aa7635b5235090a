#pragma once

#include <vector>

#include "pavel/mesh.hpp"

namespace pavel {

struct ClosestPoint {
  Vec3 point;
  double distance = 0;
  int triangle = -1;
};

// Closest point on a single triangle (Ericson-style region walk).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Exact signed solid angle of triangle abc seen from p, divided by 4*pi.
double triangle_winding(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Static AABB tree over a triangle mesh. Supports closest-point queries and
// generalized winding numbers; far subtrees use the first-order dipole
// approximation, so winding cost is logarithmic away from the surface.
class TriangleBvh {
 public:
  explicit TriangleBvh(const TriangleMesh& mesh);

  // Ties between equidistant triangles break toward the lowest triangle index.
  ClosestPoint closest_point(const Vec3& p) const;

  double winding_number(const Vec3& p) const;

  // Distance signed by winding (inside if winding > 0.5), negative inside.
  double signed_distance(const Vec3& p) const;

  bool inside(const Vec3& p) const { return winding_number(p) > 0.5; }

  const TriangleMesh& mesh() const { return *mesh_; }

 private:
  struct Node {
    Bbox3 box;
    // dipole data for the subtree: area-weighted normal and area centroid
    Vec3 normal_sum;
    Vec3 centroid;
    double radius = 0;  // max distance from centroid to subtree box corners
    int left = -1;      // internal: children; leaf: triangle range
    int right = -1;
    int first = 0, count = 0;
  };

  int build(int first, int count, int depth);
  void closest_recurse(int node, const Vec3& p, ClosestPoint& best) const;
  double winding_recurse(int node, const Vec3& p) const;

  const TriangleMesh* mesh_;
  std::vector<int> tri_order_;  // sorted within leaves for deterministic ties
  std::vector<Node> nodes_;
};

}  // namespace pavel
