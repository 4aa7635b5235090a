#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "pavel/errors.hpp"
#include "pavel/output.hpp"
#include "pavel/shapes.hpp"

using namespace pavel;

namespace {

SeedPlacement seed_at(double x, double y = 0, double z = 0) {
  SeedPlacement s;
  s.position = {x, y, z};
  s.normal = {0, 0, 1};
  s.tangent = {1, 0, 0};
  return s;
}

DecorationInstance cube_instance(double x) {
  auto cube = make_cube({0, 0, 0}, {1, 1, 1});
  return voxelize_instance(cube, seed_at(x), 0.25);
}

}  // namespace

TEST_CASE("element mesh bounds the voxel volume and is watertight") {
  auto inst = cube_instance(0);
  auto mesh = extract_element_mesh(inst);
  CHECK(audit_edges(mesh).watertight());
  // the iso 0.5 surface runs half a voxel outside the centers but chamfers
  // edges, landing just under the voxel-count volume
  double vox = inst.original_volume * std::pow(0.25, 3);
  CHECK(mesh_volume(mesh) > 0.8 * vox);
  CHECK(mesh_volume(mesh) < vox);
}

TEST_CASE("a single voxel extracts to a small closed solid") {
  DecorationInstance inst;
  inst.grid.voxel_edge = 0.5;
  inst.grid.dims = {3, 3, 3};
  inst.grid.occupancy.assign(27, 0);
  inst.grid.occupancy[inst.grid.index(1, 1, 1)] = 1;
  auto mesh = extract_element_mesh(inst);
  CHECK(audit_edges(mesh).watertight());
  CHECK(mesh_volume(mesh) > 0);

  DecorationInstance empty;
  empty.grid.voxel_edge = 0.5;
  empty.grid.dims = {3, 3, 3};
  empty.grid.occupancy.assign(27, 0);
  CHECK_THROWS_AS(extract_element_mesh(empty), StageError);
}

TEST_CASE("zero smoothing iterations return the mesh unchanged") {
  auto mesh = extract_element_mesh(cube_instance(0));
  auto same = smooth_mesh(mesh, 0);
  REQUIRE(same.vertices.size() == mesh.vertices.size());
  for (size_t v = 0; v < mesh.vertices.size(); ++v)
    CHECK(distance(same.vertices[v], mesh.vertices[v]) == 0.0);
  CHECK_THROWS_AS(smooth_mesh(mesh, -1), ConfigError);
}

TEST_CASE("smoothing nearly preserves volume while rounding the staircase") {
  auto sphere = make_icosphere(0.5, 3);
  auto inst = voxelize_instance(sphere, seed_at(0), 0.05);
  auto rough = extract_element_mesh(inst);
  auto smooth = smooth_mesh(rough, 20, 0.1);
  CHECK(audit_edges(smooth).watertight());
  double dv = std::abs(mesh_volume(smooth) - mesh_volume(rough)) / mesh_volume(rough);
  CHECK(dv < 0.02);
  // staircase normals flip voxel-to-voxel; smoothing must shrink the spread
  // of vertex distances from the sphere center
  auto spread = [](const TriangleMesh& m) {
    double lo = 1e30, hi = 0;
    for (auto& v : m.vertices) {
      lo = std::min(lo, length(v));
      hi = std::max(hi, length(v));
    }
    return hi - lo;
  };
  CHECK(spread(smooth) < spread(rough));
}

TEST_CASE("decimation respects the budget and keeps the mesh closed") {
  auto sphere = make_icosphere(1.0, 4);  // 5120 triangles
  auto small = decimate_mesh(sphere, 800);
  CHECK(static_cast<int>(small.triangles.size()) <= 800);
  CHECK(audit_edges(small).watertight());
  CHECK(mesh_volume(small) == doctest::Approx(mesh_volume(sphere)).epsilon(0.05));

  auto untouched = decimate_mesh(sphere, 6000);
  CHECK(untouched.triangles.size() == sphere.triangles.size());
  CHECK_THROWS_AS(decimate_mesh(sphere, 2), ConfigError);
}

TEST_CASE("scene merge concatenates base and elements") {
  auto base = make_cube({-2, -2, -1}, {2, 2, 0});
  std::vector<TriangleMesh> elements = {extract_element_mesh(cube_instance(0)),
                                        extract_element_mesh(cube_instance(5))};
  auto scene = merge_scene(base, elements);
  size_t expected = base.triangles.size() + elements[0].triangles.size() +
                    elements[1].triangles.size();
  CHECK(scene.triangles.size() == expected);
  CHECK(std::abs(mesh_volume(scene) - (mesh_volume(base) + mesh_volume(elements[0]) +
                                       mesh_volume(elements[1]))) < 1e-9);
}

TEST_CASE("shell decomposition groups elements by cut-plane side") {
  std::vector<DecorationInstance> instances;
  std::vector<TriangleMesh> elements;
  for (double x : {-1.0, 1.0})
    for (double y : {-1.0, 1.0}) {
      auto inst = cube_instance(0);
      inst.seed.position = {x, y, 0};
      instances.push_back(inst);
      elements.push_back(extract_element_mesh(inst));
    }
  std::vector<CutPlane> planes = {{{1, 0, 0}, {0, 0, 0}}, {{0, 1, 0}, {0, 0, 0}}};
  auto patches = decompose_shell(elements, instances, planes);
  REQUIRE(patches.size() == 4);
  for (size_t p = 0; p < patches.size(); ++p) {
    CHECK(patches[p].element_ids.size() == 1);
    if (p > 0) CHECK(patches[p].patch_id > patches[p - 1].patch_id);
  }
  // element 3 (x=1, y=1) is above both planes: highest bitmask, last patch
  CHECK(patches.back().element_ids == std::vector<int>{3});
  // element 0 (x=-1, y=-1) below both: first patch
  CHECK(patches.front().element_ids == std::vector<int>{0});
}

TEST_CASE("empty cells are omitted and zero planes give one patch") {
  std::vector<DecorationInstance> instances(2, cube_instance(0));
  instances[0].seed.position = {5, 0, 0};
  instances[1].seed.position = {6, 0, 0};
  std::vector<TriangleMesh> elements = {extract_element_mesh(instances[0]),
                                        extract_element_mesh(instances[1])};
  std::vector<CutPlane> planes = {{{1, 0, 0}, {0, 0, 0}}};
  auto patches = decompose_shell(elements, instances, planes);
  REQUIRE(patches.size() == 1);  // nobody below the plane
  CHECK(patches[0].element_ids == std::vector<int>({0, 1}));

  auto whole = decompose_shell(elements, instances, {});
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].element_ids.size() == 2);
}

TEST_CASE("seeds on a cut plane are rejected") {
  std::vector<DecorationInstance> instances = {cube_instance(0)};
  instances[0].seed.position = {0, 3, 0};
  std::vector<TriangleMesh> elements = {extract_element_mesh(instances[0])};
  std::vector<CutPlane> planes = {{{1, 0, 0}, {0, 0, 0}}};  // seed x is exactly 0
  CHECK_THROWS_AS(decompose_shell(elements, instances, planes), StageError);
}

TEST_CASE("shell manifest lists every patch with its elements") {
  std::vector<DecorationInstance> instances;
  std::vector<TriangleMesh> elements;
  for (double x : {-1.0, 1.0}) {
    auto inst = cube_instance(0);
    inst.seed.position = {x, 0, 0};
    instances.push_back(inst);
    elements.push_back(extract_element_mesh(inst));
  }
  std::vector<CutPlane> planes = {{{1, 0, 0}, {0, 0, 0}}};
  auto patches = decompose_shell(elements, instances, planes);
  auto path = (std::filesystem::temp_directory_path() / "pavel_manifest_test.json").string();
  write_shell_manifest(patches, path);
  std::ifstream in(path);
  auto j = nlohmann::json::parse(in);
  REQUIRE(j.size() == patches.size());
  for (size_t p = 0; p < patches.size(); ++p) {
    CHECK(j[p]["patch_id"] == patches[p].patch_id);
    CHECK(j[p]["element_ids"].get<std::vector<int>>() == patches[p].element_ids);
    CHECK(j[p]["triangles"] == patches[p].mesh.triangles.size());
  }
  std::filesystem::remove(path);
}
