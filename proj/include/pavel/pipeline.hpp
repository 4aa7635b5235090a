#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pavel/deform.hpp"
#include "pavel/output.hpp"
#include "pavel/seeding.hpp"

namespace pavel {

enum class Scheduling { round_robin, global_min };

struct PipelineConfig {
  std::string base_mesh_path;
  std::vector<std::string> decoration_mesh_paths;

  // exactly one of the two drives placement
  std::optional<SeedingConfig> seeding;
  std::optional<std::string> manual_seeds_path;
  std::string seeding_mode = "isotropic";  // isotropic | offset | stripes

  RecoveryParams recovery;
  Scheduling scheduling = Scheduling::round_robin;
  int resolution = 64;
  double grid_factor = 1.5;  // instance grid size relative to the placed decoration bbox

  int smoothing_iterations = 20;
  double pass_band = 0.1;
  int triangle_budget = 0;  // per element; 0 disables decimation
  bool binary_ply = false;

  bool shell_enabled = false;
  std::vector<CutPlane> cut_planes;

  std::string output_directory = "out";
};

// Fills a config from parsed TOML/JSON; unknown keys are errors so typos
// surface immediately. Validates invariants (files exist, 0 < a < b, exactly
// one seeding source).
PipelineConfig config_from_json(const nlohmann::json& j);

// The built-in defaults, as a TOML document.
std::string default_config_toml();

struct StageTiming {
  std::string name;
  double seconds = 0;
};

struct RunReport {
  int seed_count = 0;
  double realized_coverage = 0;
  double overlap_percent = 0;
  bool overlap_outside_envelope = false;  // outside ~12-33%: warning, not error
  int64_t total_voxels = 0;
  int64_t base_region_voxels = 0;
  int scene_triangles = 0;
  std::vector<StageTiming> timings;
  DeformStats deform;
  nlohmann::json to_json() const;
};

// Full pipeline: seed -> voxelize -> resolve -> deform -> extract ->
// optional shells. All artifacts plus report.json land in output_directory.
RunReport run_pipeline(const PipelineConfig& config);

// Recomputes one stage ("seed", "deform", "mesh", "shell") from cached
// artifacts in resume_dir, deleting downstream artifacts first so stale
// outputs can never be mistaken for current ones.
void run_stage(const PipelineConfig& config, const std::string& stage_name,
               const std::string& resume_dir);

// Instance-set binary cache used for stage resumption.
void save_instances(const std::vector<DecorationInstance>& instances, const std::string& path);
std::vector<DecorationInstance> load_instances(const std::string& path);

}  // namespace pavel
