#include "pavel/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pavel/errors.hpp"
#include "pavel/mesh_io.hpp"
#include "pavel/toml.hpp"

namespace fs = std::filesystem;

namespace pavel {

namespace {

double expect_number(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key + " must be a number");
  return j.get<double>();
}

void check_keys(const nlohmann::json& j, const std::string& section,
                std::initializer_list<const char*> allowed) {
  for (auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  }
}

GuidanceAxis axis_from_string(const std::string& s) {
  if (s == "x") return GuidanceAxis::x;
  if (s == "y") return GuidanceAxis::y;
  if (s == "z") return GuidanceAxis::z;
  throw ConfigError("stripe_axis must be x, y or z");
}

RotationPolicy rotation_from_string(const std::string& s) {
  if (s == "none") return RotationPolicy::none;
  if (s == "random") return RotationPolicy::random;
  if (s == "alternate_180") return RotationPolicy::alternate_180;
  if (s == "field_aligned") return RotationPolicy::field_aligned;
  throw ConfigError("unknown rotation_policy '" + s + "'");
}

}  // namespace

PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig c;
  check_keys(j, "", {"input", "seeding", "recovery", "voxel", "output", "shell"});

  if (!j.contains("input")) throw ConfigError("missing [input] section");
  auto& in = j.at("input");
  check_keys(in, "input", {"base", "decorations", "seeds"});
  if (!in.contains("base")) throw ConfigError("input.base is required");
  c.base_mesh_path = in.at("base").get<std::string>();
  if (!in.contains("decorations") || !in.at("decorations").is_array() ||
      in.at("decorations").empty())
    throw ConfigError("input.decorations must list at least one mesh");
  for (auto& d : in.at("decorations")) c.decoration_mesh_paths.push_back(d.get<std::string>());
  if (in.contains("seeds")) c.manual_seeds_path = in.at("seeds").get<std::string>();

  if (j.contains("seeding")) {
    if (c.manual_seeds_path)
      throw ConfigError("provide either a [seeding] section or input.seeds, not both");
    auto& s = j.at("seeding");
    check_keys(s, "seeding",
               {"mode", "coverage", "cvt_iterations", "offset_distance", "stripe_spacing_u",
                "stripe_spacing_v", "stripe_angle", "stripe_axis", "rotation_policy",
                "size_jitter", "rng_seed"});
    SeedingConfig sc;
    if (s.contains("mode")) c.seeding_mode = s.at("mode").get<std::string>();
    if (c.seeding_mode != "isotropic" && c.seeding_mode != "offset" &&
        c.seeding_mode != "stripes")
      throw ConfigError("seeding.mode must be isotropic, offset or stripes");
    if (s.contains("coverage")) sc.coverage = expect_number(s.at("coverage"), "seeding.coverage");
    if (s.contains("cvt_iterations")) sc.cvt_iterations = s.at("cvt_iterations").get<int>();
    if (s.contains("offset_distance"))
      sc.offset_distance = expect_number(s.at("offset_distance"), "seeding.offset_distance");
    if (s.contains("stripe_spacing_u"))
      sc.stripe_spacing_u = expect_number(s.at("stripe_spacing_u"), "seeding.stripe_spacing_u");
    if (s.contains("stripe_spacing_v"))
      sc.stripe_spacing_v = expect_number(s.at("stripe_spacing_v"), "seeding.stripe_spacing_v");
    if (s.contains("stripe_angle"))
      sc.stripe_angle = expect_number(s.at("stripe_angle"), "seeding.stripe_angle");
    if (s.contains("stripe_axis"))
      sc.stripe_axis = axis_from_string(s.at("stripe_axis").get<std::string>());
    if (s.contains("rotation_policy"))
      sc.rotation_policy = rotation_from_string(s.at("rotation_policy").get<std::string>());
    if (s.contains("size_jitter"))
      sc.size_jitter = expect_number(s.at("size_jitter"), "seeding.size_jitter");
    if (s.contains("rng_seed")) sc.rng_seed = s.at("rng_seed").get<uint64_t>();
    c.seeding = sc;
  } else if (!c.manual_seeds_path) {
    throw ConfigError("either a [seeding] section or input.seeds is required");
  }

  if (j.contains("recovery")) {
    auto& r = j.at("recovery");
    check_keys(r, "recovery", {"a", "b", "ambient_speed", "scheduling"});
    if (r.contains("a")) c.recovery.a = expect_number(r.at("a"), "recovery.a");
    if (r.contains("b")) c.recovery.b = expect_number(r.at("b"), "recovery.b");
    if (r.contains("ambient_speed"))
      c.recovery.ambient_speed = expect_number(r.at("ambient_speed"), "recovery.ambient_speed");
    if (r.contains("scheduling")) {
      auto s = r.at("scheduling").get<std::string>();
      if (s == "round_robin")
        c.scheduling = Scheduling::round_robin;
      else if (s == "global_min")
        c.scheduling = Scheduling::global_min;
      else
        throw ConfigError("recovery.scheduling must be round_robin or global_min");
    }
  }
  if (!(c.recovery.a > 0 && c.recovery.b > c.recovery.a))
    throw ConfigError("recovery params must satisfy 0 < a < b");

  if (j.contains("voxel")) {
    auto& v = j.at("voxel");
    check_keys(v, "voxel", {"resolution", "grid_factor"});
    if (v.contains("resolution")) c.resolution = v.at("resolution").get<int>();
    if (v.contains("grid_factor"))
      c.grid_factor = expect_number(v.at("grid_factor"), "voxel.grid_factor");
  }
  if (c.resolution < 16) throw ConfigError("voxel.resolution must be at least 16");
  if (c.grid_factor < 1.0) throw ConfigError("voxel.grid_factor must be at least 1");

  if (j.contains("output")) {
    auto& o = j.at("output");
    check_keys(o, "output",
               {"directory", "smoothing_iterations", "pass_band", "triangle_budget",
                "binary_ply"});
    if (o.contains("directory")) c.output_directory = o.at("directory").get<std::string>();
    if (o.contains("smoothing_iterations"))
      c.smoothing_iterations = o.at("smoothing_iterations").get<int>();
    if (o.contains("pass_band")) c.pass_band = expect_number(o.at("pass_band"), "output.pass_band");
    if (o.contains("triangle_budget")) c.triangle_budget = o.at("triangle_budget").get<int>();
    if (o.contains("binary_ply")) c.binary_ply = o.at("binary_ply").get<bool>();
  }

  if (j.contains("shell")) {
    auto& s = j.at("shell");
    check_keys(s, "shell", {"enabled", "planes"});
    if (s.contains("enabled")) c.shell_enabled = s.at("enabled").get<bool>();
    if (s.contains("planes")) {
      for (auto& p : s.at("planes")) {
        if (!p.is_array() || p.size() != 6)
          throw ConfigError("each shell plane is [nx, ny, nz, px, py, pz]");
        CutPlane plane;
        plane.normal = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
        plane.point = {p[3].get<double>(), p[4].get<double>(), p[5].get<double>()};
        if (length(plane.normal) == 0) throw ConfigError("shell plane normal must be non-zero");
        c.cut_planes.push_back(plane);
      }
    }
  }

  if (!fs::exists(c.base_mesh_path))
    throw ConfigError("base mesh not found: " + c.base_mesh_path);
  for (auto& d : c.decoration_mesh_paths)
    if (!fs::exists(d)) throw ConfigError("decoration mesh not found: " + d);
  if (c.manual_seeds_path && !fs::exists(*c.manual_seeds_path))
    throw ConfigError("seeds file not found: " + *c.manual_seeds_path);
  return c;
}

std::string default_config_toml() {
  return R"([input]
base = "base.obj"
decorations = ["decoration.obj"]
# seeds = "seeds.json"        # manual placements instead of [seeding]

[seeding]
mode = "isotropic"            # isotropic | offset | stripes
coverage = 1.4
cvt_iterations = 100
offset_distance = -1.0        # offset mode: -1 derives it from the decoration footprint
stripe_spacing_u = 0.0
stripe_spacing_v = 0.0
stripe_angle = 90.0
stripe_axis = "z"
rotation_policy = "none"      # none | random | alternate_180 | field_aligned
size_jitter = 0.0
rng_seed = 0

[recovery]
a = 0.1
b = 0.3
ambient_speed = 1.0
scheduling = "round_robin"    # round_robin | global_min

[voxel]
resolution = 64
grid_factor = 1.5             # instance grid size vs placed decoration bbox

[output]
directory = "out"
smoothing_iterations = 20
pass_band = 0.1
triangle_budget = 0           # per element; 0 keeps full marching-cubes meshes
binary_ply = false

[shell]
enabled = false
planes = []                   # each entry: [nx, ny, nz, px, py, pz]
)";
}

namespace {

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void read_pod(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void save_instances(const std::vector<DecorationInstance>& instances, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StageError("cannot write " + path);
  const char magic[4] = {'P', 'A', 'V', '1'};
  out.write(magic, 4);
  write_pod(out, static_cast<uint32_t>(instances.size()));
  for (auto& inst : instances) {
    write_pod(out, inst.seed.position);
    write_pod(out, inst.seed.normal);
    write_pod(out, inst.seed.tangent);
    write_pod(out, inst.seed.scale);
    write_pod(out, static_cast<int32_t>(inst.seed.decoration_index));
    uint8_t has_uv = inst.seed.stripe_uv.has_value();
    write_pod(out, has_uv);
    if (has_uv) {
      write_pod(out, (*inst.seed.stripe_uv)[0]);
      write_pod(out, (*inst.seed.stripe_uv)[1]);
    }
    write_pod(out, inst.centroid);
    write_pod(out, inst.bbox_diagonal);
    write_pod(out, inst.original_volume);
    write_pod(out, inst.lost_volume);
    write_pod(out, inst.recovered_volume);
    write_pod(out, inst.grid.lattice_min);
    write_pod(out, inst.grid.voxel_edge);
    write_pod(out, inst.grid.dims);
    out.write(reinterpret_cast<const char*>(inst.grid.occupancy.data()),
              static_cast<std::streamsize>(inst.grid.occupancy.size()));
  }
}

std::vector<DecorationInstance> load_instances(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StageError("cannot read " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, "PAV1", 4) != 0) throw StageError("not an instance cache: " + path);
  uint32_t count = 0;
  read_pod(in, count);
  std::vector<DecorationInstance> instances(count);
  for (auto& inst : instances) {
    read_pod(in, inst.seed.position);
    read_pod(in, inst.seed.normal);
    read_pod(in, inst.seed.tangent);
    read_pod(in, inst.seed.scale);
    int32_t di = 0;
    read_pod(in, di);
    inst.seed.decoration_index = di;
    uint8_t has_uv = 0;
    read_pod(in, has_uv);
    if (has_uv) {
      std::array<int, 2> uv;
      read_pod(in, uv[0]);
      read_pod(in, uv[1]);
      inst.seed.stripe_uv = uv;
    }
    read_pod(in, inst.centroid);
    read_pod(in, inst.bbox_diagonal);
    read_pod(in, inst.original_volume);
    read_pod(in, inst.lost_volume);
    read_pod(in, inst.recovered_volume);
    read_pod(in, inst.grid.lattice_min);
    read_pod(in, inst.grid.voxel_edge);
    read_pod(in, inst.grid.dims);
    inst.grid.occupancy.resize(inst.grid.size());
    in.read(reinterpret_cast<char*>(inst.grid.occupancy.data()),
            static_cast<std::streamsize>(inst.grid.occupancy.size()));
    if (!in) throw StageError("truncated instance cache: " + path);
  }
  return instances;
}

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::vector<SeedPlacement> compute_seeds(const PipelineConfig& config, const TriangleMesh& base,
                                         const std::vector<TriangleMesh>& decorations) {
  if (config.manual_seeds_path) return load_seeds_json(*config.manual_seeds_path);
  const auto& sc = *config.seeding;
  std::vector<SeedPlacement> seeds;
  if (config.seeding_mode == "isotropic") {
    auto fp = footprint_area(decorations[0]);
    int n = seed_count_for_coverage(surface_area(base), fp.area, sc.coverage);
    seeds = sample_isotropic(base, n, sc.cvt_iterations, sc.rng_seed);
  } else if (config.seeding_mode == "offset") {
    double override_d = sc.offset_distance > 0 ? sc.offset_distance : -1.0;
    seeds = sample_offset(base, decorations[0], sc.coverage, sc.cvt_iterations, sc.rng_seed,
                          override_d);
  } else {
    seeds = sample_stripes(base, sc.stripe_spacing_u, sc.stripe_spacing_v, sc.stripe_angle,
                           sc.stripe_axis, sc.rng_seed);
  }
  return perturb_seeds(seeds, sc, static_cast<int>(decorations.size()));
}

std::vector<DecorationInstance> deform_from_seeds(const PipelineConfig& config,
                                                  const TriangleMesh& base,
                                                  const std::vector<TriangleMesh>& decorations,
                                                  const std::vector<SeedPlacement>& seeds,
                                                  RunReport* report) {
  double edge = choose_voxel_edge(decorations, config.resolution);
  std::vector<TriangleBvh> trees;
  trees.reserve(decorations.size());
  for (auto& d : decorations) trees.emplace_back(d);

  std::vector<DecorationInstance> instances;
  instances.reserve(seeds.size());
  for (auto& s : seeds) {
    if (s.decoration_index < 0 || s.decoration_index >= static_cast<int>(decorations.size()))
      throw StageError("seed references decoration " + std::to_string(s.decoration_index) +
                       " but only " + std::to_string(decorations.size()) + " are loaded");
    instances.push_back(voxelize_instance(trees[s.decoration_index], s, edge, config.grid_factor));
  }

  BaseOracle oracle(base, edge);
  int64_t base_voxels = 0;
  for (auto& inst : instances) {
    oracle.warm(inst.grid.world_bbox());
    base_voxels += static_cast<int64_t>(inst.grid.size());
  }
  OccupancyOracle base_fn = [&oracle](const IVec3& g) { return oracle(g); };

  instances = resolve_overlaps(std::move(instances), base_fn);

  int n = static_cast<int>(instances.size());
  std::vector<std::vector<int>> neighbors(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (instances[i].grid.world_bbox().overlaps(instances[j].grid.world_bbox())) {
        neighbors[i].push_back(j);
        neighbors[j].push_back(i);
      }

  std::vector<int64_t> losses;
  for (auto& inst : instances) losses.push_back(inst.lost_volume);

  std::vector<ScalarGrid> velocities(n);
  for (int i = 0; i < n; ++i) {
    OccupancyOracle others = [&instances, &neighbors, i](const IVec3& g) {
      for (int o : neighbors[i])
        if (instances[o].grid.occupied_global(g)) return true;
      return false;
    };
    auto distances = contact_distance_field(instances[i], others, base_fn);
    velocities[i] = build_velocity_field(instances[i], distances, config.recovery, losses);
  }

  DeformStats stats;
  instances = fast_march_recover(std::move(instances), velocities, base_fn,
                                 config.scheduling == Scheduling::global_min, &stats);
  if (report) {
    report->deform = std::move(stats);
    report->overlap_percent = report->deform.overlap_percent;
    report->base_region_voxels = base_voxels;
  }
  return instances;
}

std::vector<TriangleMesh> mesh_elements(const PipelineConfig& config,
                                        const std::vector<DecorationInstance>& instances) {
  std::vector<TriangleMesh> elements;
  elements.reserve(instances.size());
  for (auto& inst : instances) {
    auto m = extract_element_mesh(inst);
    if (config.smoothing_iterations > 0)
      m = smooth_mesh(m, config.smoothing_iterations, config.pass_band);
    if (config.triangle_budget > 0) m = decimate_mesh(m, config.triangle_budget);
    elements.push_back(std::move(m));
  }
  return elements;
}

void save_mesh_auto(const TriangleMesh& mesh, const std::string& path, bool binary_ply) {
  if (binary_ply)
    save_ply(mesh, path + ".ply", true);
  else
    save_obj(mesh, path + ".obj");
}

const std::vector<std::string> kStageOrder = {"seed", "deform", "mesh", "shell"};

void remove_artifacts(const fs::path& dir, const std::string& stage) {
  std::vector<std::string> victims;
  if (stage == "seed") victims = {"seeds.json"};
  if (stage == "deform") victims = {"instances.bin", "deform_report.json"};
  if (stage == "mesh") victims = {"scene.obj", "scene.ply", "decorations.obj", "decorations.ply"};
  if (stage == "shell") victims = {"shell_manifest.json"};
  for (auto& v : victims) fs::remove(dir / v);
  if (stage == "mesh" || stage == "shell") {
    if (fs::exists(dir)) {
      std::string prefix = stage == "mesh" ? "element_" : "patch_";
      for (auto& e : fs::directory_iterator(dir))
        if (e.path().filename().string().rfind(prefix, 0) == 0) fs::remove(e.path());
    }
  }
  fs::remove(dir / "report.json");
}

}  // namespace

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["seed_count"] = seed_count;
  j["realized_coverage"] = realized_coverage;
  j["overlap_percent"] = overlap_percent;
  j["overlap_outside_envelope"] = overlap_outside_envelope;
  j["total_voxels"] = total_voxels;
  j["base_region_voxels"] = base_region_voxels;
  j["scene_triangles"] = scene_triangles;
  auto timings_json = nlohmann::json::array();
  for (auto& t : timings) timings_json.push_back({{"stage", t.name}, {"seconds", t.seconds}});
  j["timings"] = timings_json;
  auto inst_json = nlohmann::json::array();
  for (auto& i : deform.instances)
    inst_json.push_back({{"original", i.original},
                         {"lost", i.lost},
                         {"recovered", i.recovered},
                         {"rounds", i.rounds}});
  j["instances"] = inst_json;
  return j;
}

RunReport run_pipeline(const PipelineConfig& config) {
  RunReport report;
  fs::create_directories(config.output_directory);
  fs::path dir = config.output_directory;

  auto base = load_mesh(config.base_mesh_path);
  std::vector<TriangleMesh> decorations;
  for (auto& p : config.decoration_mesh_paths) decorations.push_back(load_mesh(p));

  Timer t_seed;
  auto seeds = compute_seeds(config, base, decorations);
  save_seeds_json(seeds, (dir / "seeds.json").string());
  report.timings.push_back({"seed", t_seed.seconds()});
  report.seed_count = static_cast<int>(seeds.size());

  double footprint_sum = 0;
  std::vector<double> footprints(decorations.size(), -1);
  for (auto& s : seeds) {
    auto& fp = footprints[s.decoration_index];
    if (fp < 0) fp = footprint_area(decorations[s.decoration_index]).area;
    footprint_sum += fp * s.scale * s.scale;
  }
  report.realized_coverage = footprint_sum / surface_area(base);

  Timer t_deform;
  auto instances = deform_from_seeds(config, base, decorations, seeds, &report);
  save_instances(instances, (dir / "instances.bin").string());
  report.timings.push_back({"deform", t_deform.seconds()});
  for (auto& inst : instances) report.total_voxels += inst.grid.occupied_count();

  if (config.seeding && config.seeding_mode != "stripes" && config.seeding->coverage >= 1.2 &&
      config.seeding->coverage <= 1.6 &&
      (report.overlap_percent < 12.0 || report.overlap_percent > 33.0)) {
    report.overlap_outside_envelope = true;
    std::cerr << "warning: overlap " << report.overlap_percent
              << "% is outside the usual 12-33% operating envelope\n";
  }
  {
    std::ofstream out(dir / "deform_report.json");
    out << report.to_json().dump(2) << "\n";
  }

  Timer t_mesh;
  auto elements = mesh_elements(config, instances);
  for (size_t i = 0; i < elements.size(); ++i)
    save_mesh_auto(elements[i], (dir / ("element_" + std::to_string(i))).string(),
                   config.binary_ply);
  auto decorations_only = concatenate_meshes(elements);
  save_mesh_auto(decorations_only, (dir / "decorations").string(), config.binary_ply);
  auto scene = merge_scene(base, elements);
  save_mesh_auto(scene, (dir / "scene").string(), config.binary_ply);
  report.scene_triangles = static_cast<int>(scene.triangles.size());
  report.timings.push_back({"mesh", t_mesh.seconds()});

  if (config.shell_enabled) {
    Timer t_shell;
    auto patches = decompose_shell(elements, instances, config.cut_planes);
    for (auto& p : patches)
      save_mesh_auto(p.mesh, (dir / ("patch_" + std::to_string(p.patch_id))).string(),
                     config.binary_ply);
    write_shell_manifest(patches, (dir / "shell_manifest.json").string());
    report.timings.push_back({"shell", t_shell.seconds()});
  }

  std::ofstream out(dir / "report.json");
  out << report.to_json().dump(2) << "\n";
  return report;
}

void run_stage(const PipelineConfig& config, const std::string& stage_name,
               const std::string& resume_dir) {
  auto it = std::find(kStageOrder.begin(), kStageOrder.end(), stage_name);
  if (it == kStageOrder.end())
    throw ConfigError("unknown stage '" + stage_name + "' (expected seed, deform, mesh, shell)");
  fs::path dir = resume_dir;
  fs::create_directories(dir);

  // invalidate this stage and everything after it
  for (auto d = it; d != kStageOrder.end(); ++d) remove_artifacts(dir, *d);

  auto base = load_mesh(config.base_mesh_path);
  std::vector<TriangleMesh> decorations;
  for (auto& p : config.decoration_mesh_paths) decorations.push_back(load_mesh(p));

  if (stage_name == "seed") {
    auto seeds = compute_seeds(config, base, decorations);
    save_seeds_json(seeds, (dir / "seeds.json").string());
    return;
  }
  if (stage_name == "deform") {
    if (!fs::exists(dir / "seeds.json"))
      throw StageError("deform stage needs seeds.json (run the seed stage first)");
    auto seeds = load_seeds_json((dir / "seeds.json").string());
    RunReport report;
    report.seed_count = static_cast<int>(seeds.size());
    auto instances = deform_from_seeds(config, base, decorations, seeds, &report);
    save_instances(instances, (dir / "instances.bin").string());
    std::ofstream out(dir / "deform_report.json");
    out << report.to_json().dump(2) << "\n";
    return;
  }
  if (!fs::exists(dir / "instances.bin"))
    throw StageError(stage_name + " stage needs instances.bin (run the deform stage first)");
  auto instances = load_instances((dir / "instances.bin").string());
  auto elements = mesh_elements(config, instances);
  if (stage_name == "mesh") {
    for (size_t i = 0; i < elements.size(); ++i)
      save_mesh_auto(elements[i], (dir / ("element_" + std::to_string(i))).string(),
                     config.binary_ply);
    save_mesh_auto(concatenate_meshes(elements), (dir / "decorations").string(),
                   config.binary_ply);
    save_mesh_auto(merge_scene(base, elements), (dir / "scene").string(), config.binary_ply);
    return;
  }
  // shell
  auto patches = decompose_shell(elements, instances, config.cut_planes);
  for (auto& p : patches)
    save_mesh_auto(p.mesh, (dir / ("patch_" + std::to_string(p.patch_id))).string(),
                   config.binary_ply);
  write_shell_manifest(patches, (dir / "shell_manifest.json").string());
}

}  // namespace pavel
