#include "pavel/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "pavel/bvh.hpp"
#include "pavel/errors.hpp"
#include "pavel/marching_cubes.hpp"
#include "pavel/rng.hpp"
#include "pavel/sdf.hpp"
#include "pavel/threading.hpp"

namespace pavel {

namespace {

// Area-weighted uniform sampling over the surface.
class SurfaceSampler {
 public:
  explicit SurfaceSampler(const TriangleMesh& mesh) : mesh_(&mesh) {
    cdf_.reserve(mesh.triangles.size());
    double acc = 0;
    for (auto& t : mesh.triangles) {
      acc += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
      cdf_.push_back(acc);
    }
  }

  Vec3 sample(Rng& rng) const {
    double r = rng.uniform() * cdf_.back();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), r);
    auto& t = (*mesh_).triangles[it - cdf_.begin()];
    double r1 = std::sqrt(rng.uniform());
    double r2 = rng.uniform();
    double u = 1.0 - r1, v = r2 * r1;
    return mesh_->vertices[t[0]] * u + mesh_->vertices[t[1]] * v +
           mesh_->vertices[t[2]] * (1.0 - u - v);
  }

 private:
  const TriangleMesh* mesh_;
  std::vector<double> cdf_;
};

SeedPlacement placement_at(const Vec3& p, const TriangleBvh& bvh) {
  auto proj = project_to_surface(p, bvh);
  SeedPlacement s;
  s.position = proj.point;
  s.normal = proj.normal;
  s.tangent = any_tangent(proj.normal);
  return s;
}

}  // namespace

Footprint footprint_area(const TriangleMesh& decoration) {
  auto audit = audit_edges(decoration);
  if (audit.open_edges > 0)
    throw StageError("decoration is not watertight: " + std::to_string(audit.open_edges) +
                     " open edges");
  auto box = decoration.bbox();
  double edge = box.diagonal() / 96.0;
  TriangleBvh bvh(decoration);

  std::array<int, 3> dims;
  for (int a = 0; a < 3; ++a)
    dims[a] = std::max(1, static_cast<int>(std::ceil((box.hi[a] - box.lo[a]) / edge)) + 2);
  Vec3 origin = box.lo - Vec3{edge, edge, edge};

  std::vector<int64_t> layer_counts(dims[2], 0);
  parallel_for(0, dims[2], [&](int64_t k) {
    int64_t count = 0;
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i) {
        Vec3 p = {origin.x + (i + 0.5) * edge, origin.y + (j + 0.5) * edge,
                  origin.z + (k + 0.5) * edge};
        if (bvh.inside(p)) ++count;
      }
    layer_counts[k] = count;
  });

  auto it = std::max_element(layer_counts.begin(), layer_counts.end());
  if (*it == 0) throw StageError("decoration footprint empty at sampling resolution");
  int k = static_cast<int>(it - layer_counts.begin());  // lowest maximal layer
  Footprint fp;
  fp.area = *it * edge * edge;
  fp.height = (origin.z + (k + 0.5) * edge) - box.lo.z;
  return fp;
}

int seed_count_for_coverage(double base_area, double footprint, double coverage) {
  if (base_area <= 0 || footprint <= 0 || coverage <= 0)
    throw ConfigError("seed count inputs must be positive");
  auto n = static_cast<int>(std::llround(coverage * base_area / footprint));
  return std::max(n, 1);
}

std::vector<SeedPlacement> sample_isotropic(const TriangleMesh& base, int n, int iterations,
                                            uint64_t rng_seed,
                                            std::vector<double>* lloyd_energy) {
  if (n < 1) throw ConfigError("seed count must be at least 1");
  if (n > 10 * static_cast<int>(base.triangles.size()))
    throw StageError("base resolution insufficient for " + std::to_string(n) +
                     " seeds (more than 10 per triangle)");

  Rng rng(rng_seed);
  SurfaceSampler sampler(base);
  TriangleBvh bvh(base);

  std::vector<Vec3> seeds(n);
  for (auto& s : seeds) s = sampler.sample(rng);

  if (iterations > 0) {
    // dense reference samples, fixed across iterations
    int m = std::max(50 * n, 2000);
    std::vector<Vec3> dense(m);
    for (auto& p : dense) p = sampler.sample(rng);

    std::vector<int> owner(m);
    std::vector<double> best_d2(m);
    if (lloyd_energy) lloyd_energy->clear();
    for (int it = 0; it < iterations; ++it) {
      parallel_for(0, m, [&](int64_t si) {
        double best = std::numeric_limits<double>::max();
        int arg = 0;
        for (int k = 0; k < n; ++k) {
          double d = distance_squared(dense[si], seeds[k]);
          if (d < best) {
            best = d;
            arg = k;
          }
        }
        owner[si] = arg;
        best_d2[si] = best;
      });
      if (lloyd_energy) {
        double e = 0;
        for (int si = 0; si < m; ++si) e += best_d2[si];
        lloyd_energy->push_back(e / m);
      }
      // centroid accumulation in sample index order keeps runs bit-identical
      std::vector<Vec3> sum(n, Vec3{});
      std::vector<int> cnt(n, 0);
      for (int si = 0; si < m; ++si) {
        sum[owner[si]] += dense[si];
        ++cnt[owner[si]];
      }
      for (int k = 0; k < n; ++k) {
        if (cnt[k] == 0) continue;  // empty cell keeps its seed
        seeds[k] = bvh.closest_point(sum[k] / cnt[k]).point;
      }
    }
  }

  std::vector<SeedPlacement> out;
  out.reserve(n);
  for (auto& p : seeds) out.push_back(placement_at(p, bvh));
  return out;
}

std::vector<SeedPlacement> sample_offset(const TriangleMesh& base, const TriangleMesh& decoration,
                                         double coverage, int cvt_iterations, uint64_t rng_seed,
                                         double offset_override) {
  auto fp = footprint_area(decoration);
  double d = offset_override >= 0 ? offset_override : fp.height;
  if (d < 1e-12) {
    int n = seed_count_for_coverage(surface_area(base), fp.area, coverage);
    return sample_isotropic(base, n, cvt_iterations, rng_seed);
  }

  double edge = base.bbox().diagonal() / 96.0;
  auto sdf = compute_sdf_grid(base, edge, d + 4 * edge);
  auto offset_surface = extract_isosurface(sdf, d);

  int n = seed_count_for_coverage(surface_area(offset_surface), fp.area, coverage);
  auto offset_seeds = sample_isotropic(offset_surface, n, cvt_iterations, rng_seed);

  // map back to the base along closest-point projection
  TriangleBvh bvh(base);
  std::vector<SeedPlacement> out;
  out.reserve(offset_seeds.size());
  for (auto& s : offset_seeds) out.push_back(placement_at(s.position, bvh));
  return out;
}

std::vector<SeedPlacement> sample_stripes(const TriangleMesh& base, double spacing_u,
                                          double spacing_v, double angle_degrees,
                                          GuidanceAxis guidance, uint64_t /*rng_seed*/) {
  if (spacing_u <= 0 || spacing_v <= 0) throw ConfigError("stripe spacings must be positive");
  if (angle_degrees <= 0 || angle_degrees >= 180)
    throw ConfigError("stripe angle must lie in (0, 180) degrees");

  int ax = static_cast<int>(guidance);
  int e1 = (ax + 1) % 3, e2 = (ax + 2) % 3;

  Vec3 centroid{};
  for (auto& v : base.vertices) centroid += v;
  centroid /= static_cast<double>(base.vertices.size());

  double vmin = std::numeric_limits<double>::max(), vmax = std::numeric_limits<double>::lowest();
  double radius_sum = 0;
  std::array<bool, 32> bins{};
  for (auto& p : base.vertices) {
    vmin = std::min(vmin, p[ax]);
    vmax = std::max(vmax, p[ax]);
    double x = p[e1] - centroid[e1], y = p[e2] - centroid[e2];
    radius_sum += std::hypot(x, y);
    double theta = std::atan2(y, x);
    int bin = static_cast<int>((theta + kPi) / (2 * kPi) * 32);
    bins[std::clamp(bin, 0, 31)] = true;
  }
  if (vmax - vmin < 1e-12)
    throw StageError("guidance axis degenerate for this mesh (zero extent)");

  double mean_radius = radius_sum / base.vertices.size();
  int occupied_bins = static_cast<int>(std::count(bins.begin(), bins.end(), true));
  bool cylindrical = occupied_bins >= 24 && mean_radius > 1e-9;

  double u_extent, v_extent;
  Bbox3 box = base.bbox();
  if (cylindrical) {
    u_extent = 2 * kPi * mean_radius;
    v_extent = vmax - vmin;
  } else {
    u_extent = box.hi[e1] - box.lo[e1];
    v_extent = box.hi[e2] - box.lo[e2];
  }

  double angle = angle_degrees * kPi / 180.0;
  // lattice basis: a1 along the u stripes, a2 crossing at the given angle
  double a2u = spacing_v * std::cos(angle), a2v = spacing_v * std::sin(angle);

  TriangleBvh bvh(base);
  std::vector<SeedPlacement> out;
  int jmax = static_cast<int>(std::floor(v_extent / a2v));
  for (int j = 0; j <= jmax; ++j) {
    double v = (j + 0.5) * a2v;
    if (v >= v_extent) break;
    double off = (j + 0.5) * a2u;
    int i0 = static_cast<int>(std::ceil((0.0 - off) / spacing_u - 0.5));
    for (int i = i0;; ++i) {
      double u = (i + 0.5) * spacing_u + off;
      if (u >= u_extent) break;
      if (u < 0) continue;

      Vec3 probe, stripe_dir;
      if (cylindrical) {
        double theta = u / mean_radius;
        probe = centroid;
        probe[ax] = vmin + v;
        probe[e1] += mean_radius * std::cos(theta);
        probe[e2] += mean_radius * std::sin(theta);
        stripe_dir = {};
        stripe_dir[e1] = -std::sin(theta);
        stripe_dir[e2] = std::cos(theta);
      } else {
        probe = {};
        probe[ax] = box.lo[ax] + 0.5 * (vmax - vmin);
        probe[e1] = box.lo[e1] + u;
        probe[e2] = box.lo[e2] + v;
        stripe_dir = {};
        stripe_dir[e1] = 1;
      }

      auto s = placement_at(probe, bvh);
      auto t = stripe_dir - s.normal * dot(s.normal, stripe_dir);
      if (length(t) > 1e-9) s.tangent = normalize(t);
      s.stripe_uv = {{i, j}};
      out.push_back(s);
    }
  }
  if (out.empty()) throw StageError("stripe lattice produced no seeds; check spacings");
  return out;
}

std::vector<SeedPlacement> perturb_seeds(const std::vector<SeedPlacement>& seeds,
                                         const SeedingConfig& config, int decoration_count) {
  if (decoration_count < 1) throw ConfigError("need at least one decoration");
  if (config.size_jitter < 0 || config.size_jitter > 0.1)
    throw ConfigError("size_jitter must lie in [0, 0.1]");
  if (config.rotation_policy == RotationPolicy::alternate_180)
    for (auto& s : seeds)
      if (!s.stripe_uv)
        throw StageError("alternate_180 rotation needs stripe lattice coordinates");

  Rng rng(config.rng_seed);
  auto out = seeds;
  for (auto& s : out) {
    double j = config.size_jitter;
    double factor = rng.uniform(1.0 - j, 1.0 + j);
    if (j > 0) s.scale *= factor;

    switch (config.rotation_policy) {
      case RotationPolicy::none:
      case RotationPolicy::field_aligned:
        break;
      case RotationPolicy::random: {
        double phi = rng.uniform(0.0, 2 * kPi);
        auto b = cross(s.normal, s.tangent);
        s.tangent = normalize(s.tangent * std::cos(phi) + b * std::sin(phi));
        break;
      }
      case RotationPolicy::alternate_180: {
        auto [u, v] = *s.stripe_uv;
        if ((u + v) % 2 != 0) s.tangent = -s.tangent;
        break;
      }
    }
    if (decoration_count > 1)
      s.decoration_index = static_cast<int>(rng.uniform_index(decoration_count));
  }
  return out;
}

void save_seeds_json(const std::vector<SeedPlacement>& seeds, const std::string& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (auto& s : seeds) {
    nlohmann::json j = {{"position", {s.position.x, s.position.y, s.position.z}},
                        {"normal", {s.normal.x, s.normal.y, s.normal.z}},
                        {"tangent", {s.tangent.x, s.tangent.y, s.tangent.z}},
                        {"scale", s.scale},
                        {"decoration_index", s.decoration_index}};
    if (s.stripe_uv) j["stripe_uv"] = {(*s.stripe_uv)[0], (*s.stripe_uv)[1]};
    arr.push_back(std::move(j));
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << arr.dump(2) << "\n";
}

std::vector<SeedPlacement> load_seeds_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  nlohmann::json arr = nlohmann::json::parse(in);
  std::vector<SeedPlacement> seeds;
  for (auto& j : arr) {
    SeedPlacement s;
    s.position = {j["position"][0], j["position"][1], j["position"][2]};
    s.normal = normalize(Vec3{j["normal"][0], j["normal"][1], j["normal"][2]});
    s.tangent = {j["tangent"][0], j["tangent"][1], j["tangent"][2]};
    s.tangent = normalize(s.tangent - s.normal * dot(s.normal, s.tangent));
    s.scale = j.value("scale", 1.0);
    s.decoration_index = j.value("decoration_index", 0);
    if (j.contains("stripe_uv")) s.stripe_uv = {{j["stripe_uv"][0], j["stripe_uv"][1]}};
    seeds.push_back(s);
  }
  return seeds;
}

}  // namespace pavel
