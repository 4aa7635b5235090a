#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pavel/mesh.hpp"

namespace pavel {

// One decoration instance descriptor on the base surface.
struct SeedPlacement {
  Vec3 position;
  Vec3 normal;   // unit
  Vec3 tangent;  // unit, orthogonal to normal; rotation reference
  double scale = 1.0;
  int decoration_index = 0;
  std::optional<std::array<int, 2>> stripe_uv;  // lattice coordinates for stripe seeds
};

enum class RotationPolicy { none, random, alternate_180, field_aligned };

enum class GuidanceAxis { x, y, z };

struct SeedingConfig {
  double coverage = 1.4;         // target surface-coverage ratio
  double offset_distance = 0;    // 0 disables offset-surface sampling; <0 = auto (d*)
  int cvt_iterations = 100;
  double stripe_spacing_u = 0;
  double stripe_spacing_v = 0;
  double stripe_angle = 90.0;    // degrees, in (0, 180)
  GuidanceAxis stripe_axis = GuidanceAxis::z;
  RotationPolicy rotation_policy = RotationPolicy::none;
  double size_jitter = 0;        // in [0, 0.1]
  uint64_t rng_seed = 0;
};

struct Footprint {
  double area = 0;    // maximal z-section area
  double height = 0;  // height of that section above the decoration bottom (d*)
};

// Footprint of a decoration: the planar z-cross-section of maximal area,
// measured by voxel counting on the decoration's own grid. The height doubles
// as the offset distance for offset-surface sampling.
Footprint footprint_area(const TriangleMesh& decoration);

// n = round(coverage * base_area / footprint), at least 1.
int seed_count_for_coverage(double base_area, double footprint, double coverage);

// Uniform-area random sample followed by surface-restricted Lloyd relaxation.
// Deterministic for a given rng_seed. lloyd_energy, when given, receives the
// mean squared sample-to-nearest-seed distance before each iteration's move.
std::vector<SeedPlacement> sample_isotropic(const TriangleMesh& base, int n, int iterations,
                                            uint64_t rng_seed,
                                            std::vector<double>* lloyd_energy = nullptr);

// Samples an isosurface of the base SDF at distance d (default: the
// footprint height of the decoration) and projects seeds back to the base.
// Seed count follows the offset surface's area.
std::vector<SeedPlacement> sample_offset(const TriangleMesh& base, const TriangleMesh& decoration,
                                         double coverage, int cvt_iterations, uint64_t rng_seed,
                                         double offset_override = -1.0);

// Seeds at the crossings of two stripe families: a lattice in a surface chart
// (cylindrical around the guidance axis when the mesh closes around it,
// planar otherwise) with basis (spacing_u, 0) and spacing_v*(cos A, sin A).
std::vector<SeedPlacement> sample_stripes(const TriangleMesh& base, double spacing_u,
                                          double spacing_v, double angle_degrees,
                                          GuidanceAxis guidance, uint64_t rng_seed);

// Size jitter, rotation policy and multi-decoration selection, all driven by
// config.rng_seed.
std::vector<SeedPlacement> perturb_seeds(const std::vector<SeedPlacement>& seeds,
                                         const SeedingConfig& config, int decoration_count);

// Seeds JSON: array of {position, normal, tangent, scale, decoration_index}.
void save_seeds_json(const std::vector<SeedPlacement>& seeds, const std::string& path);
std::vector<SeedPlacement> load_seeds_json(const std::string& path);

}  // namespace pavel
