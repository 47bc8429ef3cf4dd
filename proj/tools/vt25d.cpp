// vt25d: command-line front end for the 2.5D FDTD tube solver.
//
//   vt25d run      --area-function tube.txt [--config run.cfg] [overrides]
//   vt25d oracle   --area-function tube.txt
//   vt25d compare  --area-function tube.txt
//   vt25d bench    --area-function tube.txt --bench-workers 1,2,4
//   vt25d depthmap --area-function tube.txt --out depth.csv
//
// Exit status: 0 success, 1 validation error, 2 runtime/divergence error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "vt25d/error.hpp"
#include "vt25d/oracle.hpp"
#include "vt25d/pipeline.hpp"

namespace {

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key = value run configuration file");
    for (const auto& key : vt25::config_keys()) {
      app->add_option(flag_name(key), values[key], "override config key '" + key + "'");
    }
  }

  vt25::RunConfig resolve(const CLI::App* app) const {
    vt25::RunConfig config;
    if (!config_path.empty()) config = vt25::load_config(config_path);
    for (const auto& [key, value] : values) {
      if (app->count(flag_name(key)) > 0) config.set(key, value);
    }
    if (config.area_function.empty()) {
      throw vt25::ValidationError("no area function given (--area-function or config file)");
    }
    config.validate();
    return config;
  }
};

int cmd_run(const vt25::RunConfig& config) {
  const auto result = vt25::run_pipeline(config);
  std::cout << "simulated " << result.records.steps << " steps in " << result.records.wall_seconds
            << " s; artifacts in " << config.output_dir.string() << "\n";
  for (std::size_t k = 0; k < result.formants.size(); ++k) {
    std::cout << "  F" << k + 1 << " = " << result.formants.frequencies[k] << " Hz\n";
  }
  if (result.formants.shortfall) std::cout << "  (fewer formants found than requested)\n";
  for (const auto& w : result.domain.warnings()) std::cerr << "warning: " << w << "\n";
  return 0;
}

int cmd_oracle(const vt25::RunConfig& config) {
  const auto af = vt25::load_area_function(config.area_function);
  const auto formants = vt25::run_oracle(config, af);
  std::filesystem::create_directories(config.output_dir);
  {
    std::ofstream out(config.output_dir / "oracle_tf.csv");
    vt25::OracleOptions opts;
    opts.termination.mic_offset = config.mic_offset;
    vt25::write_oracle_csv(
        out, vt25::chain_from_area_function(af, config.oracle_segment, config.c, config.rho),
        config.f_max, opts);
  }
  std::ofstream(config.output_dir / "oracle_formants.json") << vt25::formants_json(formants);
  for (std::size_t k = 0; k < formants.size(); ++k) {
    std::cout << "  F" << k + 1 << " = " << formants.frequencies[k] << " Hz\n";
  }
  return 0;
}

int cmd_compare(const vt25::RunConfig& config) {
  const auto cmp = vt25::run_oracle_comparison(config);
  std::cout << vt25::format_comparison_table(cmp.table, "2.5D FDTD vs 1D chain-matrix oracle");
  return 0;
}

int cmd_depthmap(const vt25::RunConfig& config, const std::string& out_path) {
  const auto af = vt25::load_area_function(config.area_function);
  const auto domain = vt25::build_domain(config, af);
  const std::filesystem::path path =
      out_path.empty() ? config.output_dir / "depth_map.csv" : std::filesystem::path(out_path);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw vt25::RuntimeError("cannot write " + path.string());
  vt25::write_depth_csv(out, domain.grid(), domain.depth());
  std::cout << "depth map (" << domain.grid().nx << "x" << domain.grid().ny << ", min depth "
            << domain.depth().min_depth << " m) written to " << path.string() << "\n";
  for (const auto& w : domain.warnings()) std::cerr << "warning: " << w << "\n";
  return 0;
}

int cmd_bench(const vt25::RunConfig& config, const std::vector<int>& workers, int reps,
              std::int64_t steps, const std::string& json_path) {
  const auto report = vt25::run_benchmark(config, workers, reps, steps);
  std::cout << report.to_text();
  if (!json_path.empty()) std::ofstream(json_path) << report.to_json() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2.5D FDTD acoustic simulation of depth-symmetric tubes"};
  app.require_subcommand(1);

  ConfigFlags run_flags, oracle_flags, compare_flags, bench_flags, depth_flags;
  auto* run = app.add_subcommand("run", "simulate, write probe/TF/formant artifacts");
  run_flags.attach(run);
  auto* oracle = app.add_subcommand("oracle", "1D chain-matrix reference formants");
  oracle_flags.attach(oracle);
  auto* compare = app.add_subcommand("compare", "2.5D formants against the 1D oracle");
  compare_flags.attach(compare);
  auto* bench = app.add_subcommand("bench", "time 2D vs 2.5D stepping and parallel speedup");
  bench_flags.attach(bench);
  std::vector<int> bench_workers{1, 2, 4};
  int bench_reps = 3;
  std::int64_t bench_steps = 0;
  std::string bench_json;
  bench->add_option("--bench-workers", bench_workers, "worker counts for the parallel variant")
      ->delimiter(',');
  bench->add_option("--repetitions", bench_reps, "timed repetitions, best is reported");
  bench->add_option("--steps", bench_steps, "step count override (default: duration / dt)");
  bench->add_option("--json", bench_json, "also write the report as JSON");
  auto* depth = app.add_subcommand("depthmap", "export the depth map as CSV");
  depth_flags.attach(depth);
  std::string depth_out;
  depth->add_option("--out", depth_out, "CSV path (default: <output-dir>/depth_map.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(run_flags.resolve(run));
    if (*oracle) return cmd_oracle(oracle_flags.resolve(oracle));
    if (*compare) return cmd_compare(compare_flags.resolve(compare));
    if (*bench) {
      return cmd_bench(bench_flags.resolve(bench), bench_workers, bench_reps, bench_steps,
                       bench_json);
    }
    if (*depth) return cmd_depthmap(depth_flags.resolve(depth), depth_out);
  } catch (const vt25::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
