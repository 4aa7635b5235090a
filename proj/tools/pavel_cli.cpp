#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pavel/errors.hpp"
#include "pavel/pipeline.hpp"
#include "pavel/threading.hpp"
#include "pavel/toml.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string output_dir;
  std::string resume_dir;
  int threads = 0;
  uint64_t rng_seed = 0;
  bool rng_seed_set = false;
};

pavel::PipelineConfig load_config(const CommonOpts& opts) {
  if (opts.config_path.empty()) throw pavel::ConfigError("--config is required");
  auto cfg = pavel::config_from_json(pavel::load_config_file(opts.config_path));
  if (!opts.output_dir.empty()) cfg.output_directory = opts.output_dir;
  if (opts.rng_seed_set) {
    if (!cfg.seeding) throw pavel::ConfigError("--seed has no effect with manual seed files");
    cfg.seeding->rng_seed = opts.rng_seed;
  }
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_resume) {
  cmd->add_option("--config", opts.config_path, "pipeline config (TOML or JSON)");
  cmd->add_option("--output", opts.output_dir, "output directory (overrides config)");
  if (with_resume)
    cmd->add_option("--resume", opts.resume_dir, "directory holding earlier stage artifacts");
  cmd->add_option("--threads", opts.threads, "worker threads (0 = hardware)");
  cmd->add_option("--seed", opts.rng_seed, "RNG seed (overrides config)")
      ->each([&opts](const std::string&) { opts.rng_seed_set = true; });
}

int run_one_stage(const CommonOpts& opts, const std::string& stage) {
  auto cfg = load_config(opts);
  std::string dir = !opts.resume_dir.empty() ? opts.resume_dir : cfg.output_directory;
  pavel::run_stage(cfg, stage, dir);
  std::cout << stage << " stage written to " << dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surface decoration with packed, volume-preserving elements"};
  app.require_subcommand(1);
  CommonOpts opts;

  auto* cmd_pipeline = app.add_subcommand("pipeline", "run every stage end to end");
  add_common(cmd_pipeline, opts, false);
  auto* cmd_seed = app.add_subcommand("seed", "compute seed placements only");
  add_common(cmd_seed, opts, true);
  auto* cmd_deform = app.add_subcommand("deform", "voxelize, resolve overlaps and deform");
  add_common(cmd_deform, opts, true);
  auto* cmd_mesh = app.add_subcommand("mesh", "extract and smooth element meshes");
  add_common(cmd_mesh, opts, true);
  auto* cmd_shell = app.add_subcommand("shell", "decompose elements into printable patches");
  add_common(cmd_shell, opts, true);
  auto* cmd_report = app.add_subcommand("report", "print the run report of an output directory");
  add_common(cmd_report, opts, true);
  auto* cmd_defaults = app.add_subcommand("defaults", "print the default config as TOML");

  CLI11_PARSE(app, argc, argv);

  try {
    pavel::set_thread_count(opts.threads);
    if (cmd_defaults->parsed()) {
      std::cout << pavel::default_config_toml();
      return 0;
    }
    if (cmd_report->parsed()) {
      std::string dir = !opts.resume_dir.empty()
                            ? opts.resume_dir
                            : (!opts.output_dir.empty() ? opts.output_dir : "out");
      std::ifstream in(std::filesystem::path(dir) / "report.json");
      if (!in) throw pavel::StageError("no report.json in " + dir);
      std::cout << in.rdbuf();
      return 0;
    }
    if (cmd_pipeline->parsed()) {
      auto cfg = load_config(opts);
      auto report = pavel::run_pipeline(cfg);
      std::cout << report.to_json().dump(2) << "\n";
      return 0;
    }
    for (auto& [cmd, stage] : {std::pair{cmd_seed, "seed"}, {cmd_deform, "deform"},
                               {cmd_mesh, "mesh"}, {cmd_shell, "shell"}})
      if (cmd->parsed()) return run_one_stage(opts, stage);
    return 0;
  } catch (const pavel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const pavel::StageError& e) {
    std::cerr << "stage error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
