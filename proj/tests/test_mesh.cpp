#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "pavel/errors.hpp"
#include "pavel/mesh.hpp"
#include "pavel/mesh_io.hpp"
#include "pavel/shapes.hpp"

using namespace pavel;

namespace {
std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("cube area and volume match analytic values") {
  auto cube = make_cube({0, 0, 0}, {2, 3, 4});
  CHECK(surface_area(cube) == doctest::Approx(2 * (2 * 3 + 3 * 4 + 2 * 4)));
  CHECK(mesh_volume(cube) == doctest::Approx(24.0));
  CHECK(audit_edges(cube).watertight());
}

TEST_CASE("icosphere volume converges to analytic sphere volume") {
  double r = 0.7;
  auto coarse = make_icosphere(r, 2);
  auto fine = make_icosphere(r, 4);
  double exact = 4.0 / 3.0 * kPi * r * r * r;
  double err_coarse = std::abs(mesh_volume(coarse) - exact);
  double err_fine = std::abs(mesh_volume(fine) - exact);
  CHECK(err_fine < err_coarse);
  CHECK(mesh_volume(fine) == doctest::Approx(exact).epsilon(0.01));
  CHECK(audit_edges(fine).watertight());
}

TEST_CASE("capsule, lathe and vase are watertight") {
  CHECK(audit_edges(make_capsule(0.5, 1.0)).watertight());
  CHECK(audit_edges(make_vase(2.0, 0.6, 32)).watertight());
  std::vector<std::pair<double, double>> profile = {{0.5, 0.0}, {0.7, 0.5}, {0.4, 1.0}};
  CHECK(audit_edges(make_lathe(profile, 24)).watertight());
}

TEST_CASE("open plane patch is detected by the edge audit") {
  auto patch = make_plane_patch(1.0, 1.0, 4, 4);
  auto audit = audit_edges(patch);
  CHECK(audit.open_edges > 0);
  CHECK_FALSE(audit.watertight());
}

TEST_CASE("degenerate triangles are dropped and vertices pruned") {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0.5, 0, 0}, {7, 7, 7}};
  m.triangles = {{0, 1, 2}, {0, 1, 3}, {1, 1, 2}};  // collinear + repeated index
  int dropped = remove_degenerate_triangles(m);
  CHECK(dropped == 2);
  CHECK(m.triangles.size() == 1);
  CHECK(m.vertices.size() == 3);  // 3 and 4 unreferenced
}

TEST_CASE("weld merges coincident vertices") {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {1.0002, 0, 0}, {0, 1, 0}, {1.00021, 0, 0}, {1.0002, 1, 0}};
  m.triangles = {{0, 1, 2}, {3, 4, 2}};
  weld_vertices(m, 1e-3);
  CHECK(m.vertices.size() == 4);
  auto audit = audit_edges(m);
  CHECK(audit.nonmanifold_edges == 0);
}

TEST_CASE("transformed applies scale, rotation, translation in order") {
  auto cube = make_cube({0, 0, 0}, {1, 1, 1});
  auto rot = frame_from_normal_tangent({1, 0, 0}, {0, 1, 0});  // local z -> +x
  auto t = transformed(cube, rot, {10, 0, 0}, 2.0);
  CHECK(mesh_volume(t) == doctest::Approx(8.0));
  auto bb = t.bbox();
  // local +z (height 2 after scale) now spans x in [10, 12]
  CHECK(bb.lo.x == doctest::Approx(10.0));
  CHECK(bb.hi.x == doctest::Approx(12.0));
}

TEST_CASE("concatenate welds exactly coincident vertices") {
  auto a = make_cube({0, 0, 0}, {1, 1, 1});
  auto b = make_cube({1, 0, 0}, {2, 1, 1});  // shares the x=1 face corners
  auto m = concatenate_meshes({a, b});
  CHECK(m.triangles.size() == a.triangles.size() + b.triangles.size());
  CHECK(m.vertices.size() == 12);  // 8 + 8 - 4 shared
}

TEST_CASE("obj round trip preserves geometry") {
  auto sphere = make_icosphere(0.4, 2, {1, 2, 3});
  auto path = temp_path("pavel_test_roundtrip.obj");
  save_obj(sphere, path);
  auto back = load_mesh(path);
  CHECK(back.vertices.size() == sphere.vertices.size());
  CHECK(back.triangles.size() == sphere.triangles.size());
  CHECK(mesh_volume(back) == doctest::Approx(mesh_volume(sphere)));
  std::filesystem::remove(path);
}

TEST_CASE("ply ascii and binary round trips agree") {
  auto sphere = make_icosphere(0.4, 2);
  auto pa = temp_path("pavel_test_a.ply");
  auto pb = temp_path("pavel_test_b.ply");
  save_ply(sphere, pa, false);
  save_ply(sphere, pb, true);
  auto a = load_mesh(pa);
  auto b = load_mesh(pb);
  CHECK(mesh_volume(a) == doctest::Approx(mesh_volume(sphere)));
  CHECK(mesh_volume(b) == doctest::Approx(mesh_volume(sphere)));
  std::filesystem::remove(pa);
  std::filesystem::remove(pb);
}

TEST_CASE("loading a missing file is a config error") {
  CHECK_THROWS_AS(load_mesh("/nonexistent/mesh.obj"), ConfigError);
}

TEST_CASE("vertex normals of a sphere point radially outward") {
  auto sphere = make_icosphere(1.0, 3);
  for (size_t i = 0; i < sphere.vertices.size(); i += 17)
    CHECK(dot(sphere.normals[i], normalize(sphere.vertices[i])) > 0.99);
}
