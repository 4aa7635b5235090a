#pragma once

#include <vector>

#include "pavel/mesh.hpp"

namespace pavel {

// Procedural test shapes. All are closed and consistently oriented except the
// plane patch.

TriangleMesh make_cube(const Vec3& lo, const Vec3& hi);

// Subdivided icosahedron projected on a sphere. subdivisions=0 gives 20 faces,
// each level quadruples the count.
TriangleMesh make_icosphere(double radius, int subdivisions, const Vec3& center = {});

// Capsule along z: cylinder of half-length plus hemispherical caps.
TriangleMesh make_capsule(double radius, double half_length, int segments = 32, int rings = 16);

// Closed surface of revolution around z. profile is (radius, z) pairs from
// bottom to top; end radii are capped with triangle fans.
TriangleMesh make_lathe(const std::vector<std::pair<double, double>>& profile, int segments);

// A vase-like closed lathe body, handy for stripe-seeding scenes.
TriangleMesh make_vase(double height, double base_radius, int segments = 48);

// Open rectangular patch in the xy plane at z=0, (nx x ny) quads.
TriangleMesh make_plane_patch(double width, double height, int nx, int ny);

}  // namespace pavel
