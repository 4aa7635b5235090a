#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "pavel/deform.hpp"
#include "pavel/errors.hpp"
#include "pavel/shapes.hpp"
#include "scenario.hpp"

using namespace pavel;
using namespace pavel::testing;

namespace {

SeedPlacement seed_at(double x, double y = 0, double z = 0) {
  SeedPlacement s;
  s.position = {x, y, z};
  s.normal = {0, 0, 1};
  s.tangent = {1, 0, 0};
  return s;
}

// Hand-built instance: solid box [lo, hi) occupied inside a dims-sized grid.
DecorationInstance boxed_instance(const IVec3& lattice_min, const std::array<int, 3>& dims,
                                  const std::array<int, 3>& lo, const std::array<int, 3>& hi,
                                  double edge) {
  DecorationInstance inst;
  inst.grid.lattice_min = lattice_min;
  inst.grid.voxel_edge = edge;
  inst.grid.dims = dims;
  inst.grid.occupancy.assign(inst.grid.size(), 0);
  Vec3 sum{};
  for (int k = lo[2]; k < hi[2]; ++k)
    for (int j = lo[1]; j < hi[1]; ++j)
      for (int i = lo[0]; i < hi[0]; ++i) {
        inst.grid.occupancy[inst.grid.index(i, j, k)] = 1;
        sum += inst.grid.voxel_center(i, j, k);
        ++inst.original_volume;
      }
  inst.centroid = sum / static_cast<double>(inst.original_volume);
  Vec3 ext = {(hi[0] - lo[0]) * edge, (hi[1] - lo[1]) * edge, (hi[2] - lo[2]) * edge};
  inst.bbox_diagonal = length(ext);
  return inst;
}

ScalarGrid uniform_velocity(const DecorationInstance& inst, double v) {
  ScalarGrid f;
  f.origin = inst.grid.origin();
  f.voxel_edge = inst.grid.voxel_edge;
  f.dims = inst.grid.dims;
  f.values.assign(f.size(), v);
  return f;
}

}  // namespace

TEST_CASE("growth speed profile hits its analytic control values") {
  RecoveryParams p;  // a = 0.1, b = 0.3
  CHECK(recovery_velocity(0.0, p) == 0.0);
  CHECK(recovery_velocity(-0.5, p) == 0.0);
  CHECK(recovery_velocity(0.05, p) == doctest::Approx(0.75));
  CHECK(recovery_velocity(0.1, p) == doctest::Approx(1.0));
  CHECK(recovery_velocity(0.2, p) == doctest::Approx(0.5));  // midpoint of the fall-off
  CHECK(recovery_velocity(0.3, p) == doctest::Approx(0.0));
  CHECK(recovery_velocity(0.4, p) == 0.0);
  CHECK(recovery_velocity(std::numeric_limits<double>::infinity(), p) == p.ambient_speed);
  RecoveryParams bad;
  bad.a = 0.3;
  bad.b = 0.1;
  CHECK_THROWS_AS(recovery_velocity(0.1, bad), ConfigError);
}

TEST_CASE("growth speed profile is C1 across its breakpoints") {
  RecoveryParams p;
  double eps = 1e-7;
  // x = 0 is a deliberate kink (contact voxels must not move); the profile is
  // C1 at every interior breakpoint
  for (double x0 : {p.a, 0.5 * (p.a + p.b), p.b}) {
    double left = (recovery_velocity(x0, p) - recovery_velocity(x0 - eps, p)) / eps;
    double right = (recovery_velocity(x0 + eps, p) - recovery_velocity(x0, p)) / eps;
    CHECK(left == doctest::Approx(right).epsilon(1e-4).scale(1.0));
  }
}

TEST_CASE("resolution without contact changes nothing") {
  auto cube = make_cube({0, 0, 0}, {1, 1, 1});
  std::vector<DecorationInstance> insts = {voxelize_instance(cube, seed_at(0), 0.25),
                                           voxelize_instance(cube, seed_at(10), 0.25)};
  auto out = resolve_overlaps(insts, no_base());
  for (auto& inst : out) {
    CHECK(inst.lost_volume == 0);
    CHECK(inst.grid.occupied_count() == 64);
  }
}

TEST_CASE("shared voxels split by nearest centroid") {
  auto cube = make_cube({0, 0, 0}, {1, 1, 1});
  std::vector<DecorationInstance> insts = {voxelize_instance(cube, seed_at(0), 0.25),
                                           voxelize_instance(cube, seed_at(0.5), 0.25)};
  auto out = resolve_overlaps(insts, no_base());
  // overlap x in [0.5, 1]: column at 0.625 goes to the left cube, 0.875 right
  CHECK(out[0].lost_volume == 16);
  CHECK(out[1].lost_volume == 16);
  CHECK(mutual_overlap(out) == 0);
  CHECK(out[0].grid.occupied_count() + out[1].grid.occupied_count() == 128 - 32);
}

TEST_CASE("equidistant shared voxels stay with the lower instance id") {
  auto cube = make_cube({0, 0, 0}, {1, 1, 1});
  std::vector<DecorationInstance> insts = {voxelize_instance(cube, seed_at(0), 0.25),
                                           voxelize_instance(cube, seed_at(0.25), 0.25)};
  // centroids 0.5 and 0.75: the x = 0.625 column is an exact tie
  auto out = resolve_overlaps(insts, no_base());
  CHECK(out[0].lost_volume == 16);  // only the column at 0.875
  CHECK(out[1].lost_volume == 32);  // columns at 0.375 and the tied 0.625
  IVec3 tied = {2, 1, 1};           // global voxel with center x = 0.625
  CHECK(out[0].grid.occupied_global(tied));
  CHECK_FALSE(out[1].grid.occupied_global(tied));
}

TEST_CASE("base subtraction removes the embedded half") {
  auto cube = make_cube({0, 0, 0}, {1, 1, 1});
  std::vector<DecorationInstance> insts = {voxelize_instance(cube, seed_at(0), 0.25)};
  auto below_half = [](const IVec3& g) { return g[2] < 2; };  // z < 0.5
  auto out = resolve_overlaps(insts, below_half);
  CHECK(out[0].lost_volume == 32);
  CHECK(out[0].grid.occupied_count() == 32);
}

TEST_CASE("losing every voxel is an error") {
  auto cube = make_cube({0, 0, 0}, {1, 1, 1});
  std::vector<DecorationInstance> insts = {voxelize_instance(cube, seed_at(0), 0.25)};
  auto everywhere = [](const IVec3&) { return true; };
  CHECK_THROWS_AS(resolve_overlaps(insts, everywhere), StageError);
}

TEST_CASE("contact distance is infinite without any contact") {
  auto inst = boxed_instance({0, 0, 0}, {8, 8, 8}, {2, 2, 2}, {6, 6, 6}, 0.1);
  auto field = contact_distance_field(inst, no_base(), no_base());
  for (auto v : field.values) CHECK(std::isinf(v));
}

TEST_CASE("contact distance to a base plane grows layer by layer") {
  auto inst = boxed_instance({0, 0, 0}, {6, 6, 8}, {0, 0, 0}, {6, 6, 6}, 0.25);
  auto below = [](const IVec3& g) { return g[2] < 0; };
  auto field = contact_distance_field(inst, no_base(), below);
  // whole bottom layer touches the base, so distance is just the height
  for (int k = 0; k < 8; ++k)
    for (int j = 0; j < 6; ++j)
      for (int i = 0; i < 6; ++i)
        CHECK(field.at(i, j, k) == doctest::Approx(k * 0.25));
}

TEST_CASE("contact distance matches a brute-force sweep over contact voxels") {
  auto cube = make_cube({0, 0, 0}, {1, 1, 1});
  std::vector<DecorationInstance> insts = {voxelize_instance(cube, seed_at(0), 0.25),
                                           voxelize_instance(cube, seed_at(0.5), 0.25)};
  insts = resolve_overlaps(insts, no_base());
  auto field = contact_distance_field(insts[0], others_of(insts, 0), no_base());

  // collect contact voxels of instance 0 by direct definition
  auto& g = insts[0].grid;
  std::vector<IVec3> contacts;
  for (int k = 0; k < g.dims[2]; ++k)
    for (int j = 0; j < g.dims[1]; ++j)
      for (int i = 0; i < g.dims[0]; ++i) {
        if (!g.occupied(i, j, k)) continue;
        auto c = g.to_global(i, j, k);
        for (auto d : {IVec3{1, 0, 0}, IVec3{-1, 0, 0}, IVec3{0, 1, 0}, IVec3{0, -1, 0},
                       IVec3{0, 0, 1}, IVec3{0, 0, -1}}) {
          IVec3 nb = {c[0] + d[0], c[1] + d[1], c[2] + d[2]};
          if (insts[1].grid.occupied_global(nb)) {
            contacts.push_back({int64_t(i), int64_t(j), int64_t(k)});
            break;
          }
        }
      }
  REQUIRE_FALSE(contacts.empty());
  for (int k = 0; k < g.dims[2]; ++k)
    for (int j = 0; j < g.dims[1]; ++j)
      for (int i = 0; i < g.dims[0]; ++i) {
        double best = std::numeric_limits<double>::max();
        for (auto& c : contacts) {
          double d2 = double(i - c[0]) * (i - c[0]) + double(j - c[1]) * (j - c[1]) +
                      double(k - c[2]) * (k - c[2]);
          best = std::min(best, d2);
        }
        CHECK(field.at(i, j, k) == doctest::Approx(std::sqrt(best) * 0.25).epsilon(1e-9));
      }
}

TEST_CASE("velocity weights scale with relative volume loss") {
  auto inst_small = boxed_instance({0, 0, 0}, {6, 6, 6}, {1, 1, 1}, {5, 5, 5}, 0.25);
  inst_small.lost_volume = 10;
  auto inst_big = inst_small;
  inst_big.lost_volume = 30;
  std::vector<int64_t> losses = {10, 30};

  ScalarGrid distances = uniform_velocity(inst_small, 0.0);
  distances.values.assign(distances.size(), 0.1 * inst_small.bbox_diagonal);  // peak of the bump

  RecoveryParams p;
  auto f_small = build_velocity_field(inst_small, distances, p, losses);
  auto f_big = build_velocity_field(inst_big, distances, p, losses);
  CHECK(f_small.values[0] == doctest::Approx(0.5));  // 10 / mean(10,30)
  CHECK(f_big.values[0] == doctest::Approx(1.5));

  auto inst_zero = inst_small;
  inst_zero.lost_volume = 0;
  auto f_zero = build_velocity_field(inst_zero, distances, p, {0, 30});
  for (auto v : f_zero.values) CHECK(v == 0.0);
}

TEST_CASE("no-contact instances grow at the ambient speed") {
  auto inst = boxed_instance({0, 0, 0}, {6, 6, 6}, {1, 1, 1}, {5, 5, 5}, 0.25);
  inst.lost_volume = 8;
  ScalarGrid distances = uniform_velocity(inst, 0.0);
  distances.values.assign(distances.size(), std::numeric_limits<double>::infinity());
  RecoveryParams p;
  p.ambient_speed = 0.7;
  auto f = build_velocity_field(inst, distances, p, {8});
  for (auto v : f.values) CHECK(v == doctest::Approx(0.7));  // w = 1 here
}

TEST_CASE("zero deficit leaves instances untouched") {
  auto inst = boxed_instance({0, 0, 0}, {8, 8, 8}, {2, 2, 2}, {6, 6, 6}, 0.25);
  DeformStats stats;
  auto out = fast_march_recover({inst}, {uniform_velocity(inst, 1.0)}, no_base(), false, &stats);
  CHECK(out[0].recovered_volume == 0);
  CHECK(out[0].grid.occupied_count() == inst.original_volume);
  CHECK(stats.instances[0].claim_times.empty());
}

TEST_CASE("arrival times from a point source approximate euclidean distance") {
  double edge = 0.5;
  auto inst = boxed_instance({0, 0, 0}, {24, 24, 24}, {11, 11, 11}, {12, 12, 12}, edge);
  inst.lost_volume = 1500;
  DeformStats stats;
  auto out = fast_march_recover({inst}, {uniform_velocity(inst, 1.0)}, no_base(), false, &stats);
  CHECK(out[0].recovered_volume == 1500);
  auto src = inst.grid.voxel_center(11, 11, 11);
  auto& per = stats.instances[0];
  REQUIRE(per.claim_times.size() == 1500);
  double worst = 0;
  for (size_t c = 0; c < per.claim_times.size(); ++c) {
    double d = distance(inst.grid.voxel_center_global(per.claim_voxels[c]), src);
    worst = std::max(worst, std::abs(per.claim_times[c] - d));
  }
  CHECK(worst <= std::sqrt(3.0) * edge);
  // claim times are produced in non-decreasing order
  for (size_t c = 1; c < per.claim_times.size(); ++c)
    CHECK(per.claim_times[c] >= per.claim_times[c - 1]);
}

TEST_CASE("recovery conserves volume and keeps instances disjoint") {
  auto s = two_spheres(0.3, 0.35, 24);
  auto dec = TriangleBvh(s.decoration);
  std::vector<DecorationInstance> insts = {voxelize_instance(dec, s.left, s.voxel_edge, 2.0),
                                           voxelize_instance(dec, s.right, s.voxel_edge, 2.0)};
  REQUIRE(mutual_overlap(insts) > 0);
  DeformStats stats;
  auto out = deform_all(insts, no_base(), RecoveryParams{}, &stats);
  for (size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].recovered_volume == out[i].lost_volume);
    CHECK(out[i].grid.occupied_count() == out[i].original_volume);
  }
  CHECK(mutual_overlap(out) == 0);
  CHECK(stats.overlap_percent > 0);
}

TEST_CASE("claimed voxels never land inside the base") {
  auto s = two_spheres(0.3, 0.35, 24);
  auto dec = TriangleBvh(s.decoration);
  std::vector<DecorationInstance> insts = {voxelize_instance(dec, s.left, s.voxel_edge, 2.0),
                                           voxelize_instance(dec, s.right, s.voxel_edge, 2.0)};
  auto below = [](const IVec3& g) { return g[2] < 0; };
  auto out = deform_all(insts, below, RecoveryParams{}, nullptr);
  CHECK(base_overlap(out, below) == 0);
  CHECK(mutual_overlap(out) == 0);
  for (auto& inst : out) CHECK(inst.grid.occupied_count() == inst.original_volume);
}

TEST_CASE("round-robin scheduling claims once per deficient instance per round") {
  auto s = two_spheres(0.3, 0.35, 24);
  auto dec = TriangleBvh(s.decoration);
  std::vector<DecorationInstance> insts = {voxelize_instance(dec, s.left, s.voxel_edge, 2.0),
                                           voxelize_instance(dec, s.right, s.voxel_edge, 2.0)};
  DeformStats stats;
  deform_all(insts, no_base(), RecoveryParams{}, &stats);
  for (auto& per : stats.instances) CHECK(per.rounds == per.lost);
}

TEST_CASE("scaling every velocity rescales times but not the claimed set") {
  auto inst = boxed_instance({0, 0, 0}, {16, 16, 16}, {7, 7, 7}, {9, 9, 9}, 0.5);
  inst.lost_volume = 200;
  DeformStats s1, s3;
  fast_march_recover({inst}, {uniform_velocity(inst, 1.0)}, no_base(), false, &s1);
  fast_march_recover({inst}, {uniform_velocity(inst, 3.0)}, no_base(), false, &s3);
  REQUIRE(s1.instances[0].claim_voxels.size() == s3.instances[0].claim_voxels.size());
  for (size_t c = 0; c < s1.instances[0].claim_voxels.size(); ++c) {
    CHECK(s1.instances[0].claim_voxels[c] == s3.instances[0].claim_voxels[c]);
    CHECK(s1.instances[0].claim_times[c] ==
          doctest::Approx(3.0 * s3.instances[0].claim_times[c]));
  }
}

TEST_CASE("global-min scheduling also conserves volume and stays disjoint") {
  auto s = two_spheres(0.3, 0.35, 24);
  auto dec = TriangleBvh(s.decoration);
  std::vector<DecorationInstance> insts = {voxelize_instance(dec, s.left, s.voxel_edge, 2.0),
                                           voxelize_instance(dec, s.right, s.voxel_edge, 2.0)};
  auto out = deform_all(insts, no_base(), RecoveryParams{}, nullptr, true);
  for (auto& inst : out) CHECK(inst.grid.occupied_count() == inst.original_volume);
  CHECK(mutual_overlap(out) == 0);
}

TEST_CASE("zero velocity support exhausts the front") {
  auto inst = boxed_instance({0, 0, 0}, {8, 8, 8}, {3, 3, 3}, {5, 5, 5}, 0.5);
  inst.lost_volume = 4;
  CHECK_THROWS_AS(
      fast_march_recover({inst}, {uniform_velocity(inst, 0.0)}, no_base(), false, nullptr),
      StageError);
}

TEST_CASE("growing past the grid boundary is an error") {
  auto inst = boxed_instance({0, 0, 0}, {8, 8, 8}, {3, 3, 3}, {5, 5, 5}, 0.5);
  inst.lost_volume = 400;  // more than the grid can hold
  CHECK_THROWS_AS(
      fast_march_recover({inst}, {uniform_velocity(inst, 1.0)}, no_base(), false, nullptr),
      StageError);
}

TEST_CASE("equal-time claims follow the lexicographic tie-break") {
  // two 1x3x1 bars with equal speeds: every first-ring voxel arrives at the
  // same time, so claims must pick the lexicographically smallest local index
  auto a = boxed_instance({0, 0, 0}, {10, 7, 5}, {2, 2, 2}, {3, 5, 3}, 0.5);
  auto b = boxed_instance({0, 0, 0}, {10, 7, 5}, {7, 2, 2}, {8, 5, 3}, 0.5);
  a.lost_volume = 3;
  b.lost_volume = 3;
  DeformStats stats;
  auto out = fast_march_recover({a, b}, {uniform_velocity(a, 1.0), uniform_velocity(b, 1.0)},
                                no_base(), false, &stats);
  std::vector<IVec3> want_a = {{1, 2, 2}, {1, 3, 2}, {1, 4, 2}};
  std::vector<IVec3> want_b = {{6, 2, 2}, {6, 3, 2}, {6, 4, 2}};
  CHECK(stats.instances[0].claim_voxels == want_a);
  CHECK(stats.instances[1].claim_voxels == want_b);
  CHECK(mutual_overlap(out) == 0);
}
