#pragma once

#include <string>
#include <vector>

#include "vt25d/analysis.hpp"
#include "vt25d/config.hpp"
#include "vt25d/domain.hpp"
#include "vt25d/oracle.hpp"
#include "vt25d/solver.hpp"

namespace vt25 {

/// Microphone cell: on the tube axis, round(mic_offset / ds) cells inside
/// the mouth column.
Probe microphone_probe(const SimDomain& domain, double mic_offset);

SimDomain build_domain(const RunConfig& config, const AreaFunction& af);

struct PipelineResult {
  SimDomain domain;
  Probe microphone;
  ProbeRecords records;
  TransferFunction transfer;
  FormantSet formants;
  std::string metadata_json;
};

/// Geometry, simulation and analysis for one area function. With `write`
/// set, the artifacts go to config.output_dir: probe.csv, probe.wav,
/// probe_44k1.wav, transfer_function.csv, formants.json, run.json.
PipelineResult run_pipeline(const RunConfig& config, bool write = true);

FormantSet run_oracle(const RunConfig& config, const AreaFunction& af);

struct OracleComparison {
  FormantSet simulated;
  FormantSet oracle;
  FormantComparison table;
};

/// Both paths on the same area function; when one finds fewer formants the
/// table covers the common prefix and is flagged as a shortfall.
OracleComparison run_oracle_comparison(const RunConfig& config, bool write = true);

struct BenchVariant {
  std::string name;
  int workers = 1;
  double seconds = 0.0;
  double steps_per_second = 0.0;
  double speedup = 1.0;  // vs 2.5D serial
};

struct BenchReport {
  int nx = 0;
  int ny = 0;
  std::int64_t steps = 0;
  int repetitions = 1;
  double plain_2d_seconds = 0.0;
  double depth_serial_seconds = 0.0;
  double overhead_percent = 0.0;  // 100 (t_2.5D - t_2D) / t_2D
  std::vector<BenchVariant> variants;

  std::string to_json() const;
  std::string to_text() const;
};

/// Times only the stepping loop (best of `repetitions`) for the plain 2D
/// kernel, the 2.5D kernel, and the 2.5D kernel at each worker count. No
/// artifacts are written.
BenchReport run_benchmark(const RunConfig& config, const std::vector<int>& worker_counts,
                          int repetitions = 3, std::int64_t steps_override = 0);

}  // namespace vt25
