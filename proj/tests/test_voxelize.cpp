#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pavel/errors.hpp"
#include "pavel/shapes.hpp"
#include "pavel/voxelize.hpp"

using namespace pavel;

namespace {

SeedPlacement identity_seed() {
  SeedPlacement s;
  s.position = {0, 0, 0};
  s.normal = {0, 0, 1};
  s.tangent = {1, 0, 0};
  return s;
}

}  // namespace

TEST_CASE("voxel edge comes from the smallest decoration diagonal") {
  auto small = make_cube({0, 0, 0}, {1, 1, 1});
  auto big = make_cube({0, 0, 0}, {3, 3, 3});
  double edge = choose_voxel_edge({big, small}, 32);
  CHECK(edge == doctest::Approx(std::sqrt(3.0) / 32));
  CHECK_THROWS_AS(choose_voxel_edge({small}, 8), ConfigError);
  CHECK_THROWS_AS(choose_voxel_edge({}, 32), ConfigError);
}

TEST_CASE("unit cube voxelizes to the exact voxel count and centroid") {
  auto cube = make_cube({0, 0, 0}, {1, 1, 1});
  auto inst = voxelize_instance(cube, identity_seed(), 0.25);
  CHECK(inst.original_volume == 64);
  CHECK(distance(inst.centroid, {0.5, 0.5, 0.5}) < 1e-12);
  CHECK(inst.bbox_diagonal == doctest::Approx(std::sqrt(3.0)));
  CHECK(inst.grid.occupied_count() == 64);
}

TEST_CASE("instance grid leaves growth margin around the decoration") {
  auto cube = make_cube({0, 0, 0}, {1, 1, 1});
  auto inst = voxelize_instance(cube, identity_seed(), 0.25, 2.0);
  // grid spans 2x the bbox per axis: at least 8 voxels across plus margin
  for (int ax = 0; ax < 3; ++ax) CHECK(inst.grid.dims[ax] >= 8);
  // occupied voxels sit strictly inside the grid bounds
  for (int k = 0; k < inst.grid.dims[2]; ++k)
    for (int j = 0; j < inst.grid.dims[1]; ++j)
      for (int i = 0; i < inst.grid.dims[0]; ++i)
        if (inst.grid.occupied(i, j, k)) {
          CHECK(i > 0);
          CHECK(j > 0);
          CHECK(k > 0);
          CHECK(i < inst.grid.dims[0] - 1);
          CHECK(j < inst.grid.dims[1] - 1);
          CHECK(k < inst.grid.dims[2] - 1);
        }
}

TEST_CASE("grids are snapped to one global lattice") {
  auto cube = make_cube({0, 0, 0}, {1, 1, 1});
  auto a = voxelize_instance(cube, identity_seed(), 0.25);
  auto shifted = identity_seed();
  shifted.position = {10.37, -2.9, 4.1};
  auto b = voxelize_instance(cube, shifted, 0.25);
  // origins are integer multiples of the voxel edge
  for (auto& inst : {a, b}) {
    auto o = inst.grid.origin();
    for (int ax = 0; ax < 3; ++ax) {
      double cells = o[ax] / 0.25;
      CHECK(cells == doctest::Approx(std::round(cells)));
    }
  }
}

TEST_CASE("seed transform rotates and scales the decoration") {
  auto cube = make_cube({0, 0, 0}, {1, 1, 1});
  SeedPlacement s;
  s.position = {5, 0, 0};
  s.normal = {1, 0, 0};  // local z now points along world x
  s.tangent = {0, 1, 0};
  s.scale = 2.0;
  auto inst = voxelize_instance(cube, s, 0.25);
  CHECK(inst.original_volume == doctest::Approx(8.0 / std::pow(0.25, 3)).epsilon(0.05));
  auto box = inst.grid.world_bbox();
  // cube extends 2 units along +x from the seed position
  CHECK(box.lo.x <= 5.01);
  CHECK(box.hi.x >= 6.99);
  // centroid of the rotated cube sits at (6, y, z) with |y|,|z| <= 1
  CHECK(inst.centroid.x == doctest::Approx(6.0).epsilon(0.01));
}

TEST_CASE("sphere voxel volume approaches the analytic volume") {
  auto sphere = make_icosphere(0.5, 3);
  auto inst = voxelize_instance(sphere, identity_seed(), 0.02);
  double vol = inst.original_volume * std::pow(0.02, 3);
  CHECK(vol == doctest::Approx(mesh_volume(sphere)).epsilon(0.01));
  CHECK(vol == doctest::Approx(4.0 / 3.0 * kPi * 0.125).epsilon(0.02));
}

TEST_CASE("overlap of half-shifted cubes is exactly half the voxels") {
  auto cube = make_cube({0, 0, 0}, {1, 1, 1});
  auto a = voxelize_instance(cube, identity_seed(), 0.25);
  auto shifted = identity_seed();
  shifted.position = {0.5, 0, 0};
  auto b = voxelize_instance(cube, shifted, 0.25);
  auto shared = overlap_voxels(a, b);
  CHECK(shared.size() == 32);
  for (auto& g : shared) {
    CHECK(a.grid.occupied_global(g));
    CHECK(b.grid.occupied_global(g));
  }
  CHECK(overlap_voxels(a, a).size() == 64);
}

TEST_CASE("disjoint instances share no voxels and mismatched edges are an error") {
  auto cube = make_cube({0, 0, 0}, {1, 1, 1});
  auto a = voxelize_instance(cube, identity_seed(), 0.25);
  auto far = identity_seed();
  far.position = {20, 0, 0};
  auto b = voxelize_instance(cube, far, 0.25);
  CHECK(overlap_voxels(a, b).empty());
  auto c = voxelize_instance(cube, identity_seed(), 0.125);
  CHECK_THROWS_AS(overlap_voxels(a, c), StageError);
}

TEST_CASE("voxelizing below resolution is an error") {
  auto tiny = make_cube({0, 0, 0}, {0.01, 0.01, 0.01});
  CHECK_THROWS_AS(voxelize_instance(tiny, identity_seed(), 0.25), StageError);
  auto cube = make_cube({0, 0, 0}, {1, 1, 1});
  CHECK_THROWS_AS(voxelize_instance(cube, identity_seed(), -1.0), ConfigError);
  CHECK_THROWS_AS(voxelize_instance(cube, identity_seed(), 0.25, 0.5), ConfigError);
}

TEST_CASE("base voxelization counts interior voxel centers") {
  auto box = make_cube({0, 0, 0}, {1, 1, 0.5});
  Bbox3 region;
  region.expand(Vec3{-0.2, -0.2, -0.2});
  region.expand(Vec3{1.2, 1.2, 0.7});
  auto grid = voxelize_base(box, region, 0.25);
  CHECK(grid.occupied_count() == 4 * 4 * 2);
  CHECK_THROWS_AS(voxelize_base(make_plane_patch(1, 1, 3, 3), region, 0.25), StageError);
}

TEST_CASE("base oracle agrees with direct winding queries, warm or cold") {
  auto base = make_icosphere(1.0, 3);
  TriangleBvh bvh(base);
  BaseOracle oracle(base, 0.1);
  Bbox3 warm_region;
  warm_region.expand(Vec3{-0.5, -0.5, -0.5});
  warm_region.expand(Vec3{0.5, 0.5, 0.5});
  oracle.warm(warm_region);
  for (int64_t k = -13; k <= 13; k += 2)
    for (int64_t j = -13; j <= 13; j += 3)
      for (int64_t i = -13; i <= 13; i += 3) {
        IVec3 g = {i, j, k};
        Vec3 center = {(i + 0.5) * 0.1, (j + 0.5) * 0.1, (k + 0.5) * 0.1};
        CHECK(oracle(g) == bvh.inside(center));
      }
  CHECK_THROWS_AS(BaseOracle(make_plane_patch(1, 1, 3, 3), 0.1), StageError);
}
