#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace pavel {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  double& operator[](int i) { return (&x)[i]; }
  double operator[](int i) const { return (&x)[i]; }
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(const Vec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
inline Vec3 operator*(double s, const Vec3& a) { return a * s; }
inline Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) { a = a + b; return a; }
inline Vec3& operator-=(Vec3& a, const Vec3& b) { a = a - b; return a; }
inline Vec3& operator*=(Vec3& a, double s) { a = a * s; return a; }
inline Vec3& operator/=(Vec3& a, double s) { a = a / s; return a; }
inline bool operator==(const Vec3& a, const Vec3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length_squared(const Vec3& a) { return dot(a, a); }
inline double length(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalize(const Vec3& a) {
  auto l = length(a);
  return l > 0 ? a / l : a;
}
inline double distance(const Vec3& a, const Vec3& b) { return length(a - b); }
inline double distance_squared(const Vec3& a, const Vec3& b) { return length_squared(a - b); }
inline Vec3 min(const Vec3& a, const Vec3& b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline Vec3 max(const Vec3& a, const Vec3& b) {
  return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

// Column-major 3x3 matrix; columns are the images of the basis vectors.
struct Mat3 {
  Vec3 c0, c1, c2;

  static Mat3 identity() { return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}; }
};

inline Vec3 operator*(const Mat3& m, const Vec3& v) {
  return m.c0 * v.x + m.c1 * v.y + m.c2 * v.z;
}
inline Mat3 transpose(const Mat3& m) {
  return {{m.c0.x, m.c1.x, m.c2.x}, {m.c0.y, m.c1.y, m.c2.y}, {m.c0.z, m.c1.z, m.c2.z}};
}

// Orthonormal frame with local z mapped to `normal` and local x to `tangent`.
inline Mat3 frame_from_normal_tangent(const Vec3& normal, const Vec3& tangent) {
  auto n = normalize(normal);
  auto t = normalize(tangent - n * dot(n, tangent));
  auto b = cross(n, t);
  return {t, b, n};
}

// Arbitrary unit tangent orthogonal to n, stable under small changes of n.
inline Vec3 any_tangent(const Vec3& n) {
  auto ref = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  return normalize(cross(n, ref));
}

struct Bbox3 {
  Vec3 lo = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
             std::numeric_limits<double>::max()};
  Vec3 hi = {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
             std::numeric_limits<double>::lowest()};

  bool empty() const { return lo.x > hi.x; }
  void expand(const Vec3& p) { lo = min(lo, p); hi = max(hi, p); }
  void expand(const Bbox3& b) { lo = min(lo, b.lo); hi = max(hi, b.hi); }
  Vec3 center() const { return (lo + hi) * 0.5; }
  Vec3 extent() const { return hi - lo; }
  double diagonal() const { return empty() ? 0.0 : length(hi - lo); }
  bool contains(const Vec3& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
  }
  bool overlaps(const Bbox3& b) const {
    return lo.x <= b.hi.x && hi.x >= b.lo.x && lo.y <= b.hi.y && hi.y >= b.lo.y &&
           lo.z <= b.hi.z && hi.z >= b.lo.z;
  }
  double distance_squared_to(const Vec3& p) const {
    auto q = min(max(p, lo), hi);
    return length_squared(p - q);
  }
};

using IVec3 = std::array<int64_t, 3>;

constexpr double kPi = 3.14159265358979323846;

}  // namespace pavel
