#include "vt25d/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "vt25d/error.hpp"
#include "vt25d/io.hpp"

namespace vt25 {

Probe microphone_probe(const SimDomain& domain, double mic_offset) {
  if (!domain.layout()) throw ValidationError("domain has no tube layout for the microphone");
  const TubeLayout& layout = *domain.layout();
  const auto inset = static_cast<int>(std::lround(mic_offset / domain.grid().ds));
  const Probe probe{layout.open_column - inset, layout.axis_row()};
  if (!domain.cells().contains(probe.i, probe.j) ||
      domain.cells()(probe.i, probe.j) != CellType::Air) {
    throw ValidationError("microphone " + std::to_string(inset) +
                          " cells inside the mouth is not on an Air cell");
  }
  return probe;
}

SimDomain build_domain(const RunConfig& config, const AreaFunction& af) {
  DomainOptions opts;
  opts.constants = config.constants();
  opts.min_depth = config.min_depth;
  opts.open_space_depth = config.open_space_depth;
  opts.match_circular_modes = config.scaling;
  return assemble_domain(af, config.grid(), opts);
}

namespace {

std::size_t fft_length(const RunConfig& config, std::size_t record) {
  std::size_t n = config.fft_size;
  while (n < record) n <<= 1;
  return n;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot write " + path.string());
  out << text;
}

nlohmann::json config_json(const RunConfig& c) {
  std::ostringstream os;
  save_config(os, c);
  nlohmann::json j = nlohmann::json::object();
  std::istringstream is(os.str());
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find(" = ");
    if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
    j[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config, bool write) {
  config.validate();
  const AreaFunction af = load_area_function(config.area_function);
  SimDomain domain = build_domain(config, af);
  const Probe mic = microphone_probe(domain, config.mic_offset);

  SimParams params{config.time_step(), config.duration, config.diagnostics_interval};
  params.validate(domain.grid(), domain.constants());
  const auto steps = params.steps();
  const ExcitationSignal pulse = make_pulse(params.dt, config.pulse);
  const ExcitationSignal excitation = pulse.resized(static_cast<std::size_t>(steps));

  RunOptions options;
  options.wall_form = config.wall_form;
  const Probe probes[] = {mic};
  ProbeRecords records = run_parallel(domain, params, excitation, probes, config.workers, options);

  const std::size_t pad = fft_length(config, records.series[0].size());
  std::optional<std::span<const double>> deconv;
  if (config.deconvolve) deconv = std::span<const double>(pulse.samples);
  TransferFunction tf = transfer_function(records.series[0], records.rate(), pad, deconv);
  const double f_max = std::min(config.f_max, tf.freqs.back());
  FormantSet formants = find_formants(tf, config.formant_count, config.f_min, f_max);

  nlohmann::json meta;
  meta["config"] = config_json(config);
  meta["area_function"] = {{"name", af.name()},
                           {"samples", af.samples().size()},
                           {"length_m", af.length()}};
  meta["grid"] = {{"nx", domain.grid().nx}, {"ny", domain.grid().ny}, {"ds_m", domain.grid().ds}};
  meta["layout"] = {{"excitation_column", domain.layout()->excitation_column},
                    {"open_column", domain.layout()->open_column},
                    {"air_columns", domain.layout()->air_columns},
                    {"axis_row", domain.layout()->axis_row()},
                    {"acoustic_length_m", domain.layout()->acoustic_length(domain.grid().ds)}};
  meta["dt_s"] = params.dt;
  meta["rate_hz"] = records.rate();
  meta["cfl_dt_s"] = max_stable_dt(domain.grid().ds, domain.constants().c);
  meta["steps"] = records.steps;
  meta["workers"] = records.workers;
  meta["wall_seconds"] = records.wall_seconds;
  meta["steps_per_second"] =
      records.wall_seconds > 0.0 ? static_cast<double>(records.steps) / records.wall_seconds : 0.0;
  meta["microphone"] = {{"i", mic.i}, {"j", mic.j}};
  meta["min_depth_m"] = domain.depth().min_depth;
  meta["pulse"] = pulse.description;
  meta["fft_size"] = pad;
  meta["resolution_hz"] = tf.resolution;
  meta["formants_hz"] = formants.frequencies;
  meta["warnings"] = domain.warnings();

  PipelineResult result{std::move(domain), mic,       std::move(records), std::move(tf),
                        std::move(formants), meta.dump(2)};

  if (write) {
    const auto& dir = config.output_dir;
    std::filesystem::create_directories(dir);
    {
      std::ofstream out(dir / "probe.csv");
      write_probe_csv(out, result.records);
    }
    const auto& series = result.records.series[0];
    write_wav_float(dir / "probe.wav", series,
                    static_cast<std::uint32_t>(std::lround(result.records.rate())));
    const auto listen = resample(series, result.records.rate(), config.wav_rate);
    write_wav_float(dir / "probe_44k1.wav", listen,
                    static_cast<std::uint32_t>(std::lround(config.wav_rate)));
    {
      std::ofstream out(dir / "transfer_function.csv");
      write_transfer_csv(out, result.transfer.freqs, result.transfer.magnitude_db);
    }
    write_text(dir / "formants.json", formants_json(result.formants));
    write_text(dir / "run.json", result.metadata_json);
  }
  return result;
}

FormantSet run_oracle(const RunConfig& config, const AreaFunction& af) {
  const SegmentChain chain =
      chain_from_area_function(af, config.oracle_segment, config.c, config.rho);
  OracleOptions opts;
  opts.f_min = config.f_min;
  opts.termination.mic_offset = config.mic_offset;
  return oracle_formants(chain, config.f_max, config.formant_count, opts);
}

OracleComparison run_oracle_comparison(const RunConfig& config, bool write) {
  PipelineResult sim = run_pipeline(config, write);
  const AreaFunction af = load_area_function(config.area_function);
  FormantSet oracle = run_oracle(config, af);

  FormantSet measured = sim.formants;
  const std::size_t common = std::min(measured.size(), oracle.size());
  const bool shortfall = measured.size() != oracle.size() || measured.shortfall || oracle.shortfall;
  measured.frequencies.resize(common);
  measured.magnitudes_db.resize(common);
  FormantSet reference = oracle;
  reference.frequencies.resize(common);
  reference.magnitudes_db.resize(common);

  FormantComparison table = compare_formants(measured, reference);
  table.shortfall = shortfall;
  if (write) {
    write_text(config.output_dir / "comparison.txt",
               format_comparison_table(table, "2.5D FDTD vs 1D chain-matrix oracle"));
    write_text(config.output_dir / "comparison.json", comparison_json(table));
    std::ofstream out(config.output_dir / "oracle_tf.csv");
    OracleOptions opts;
    opts.termination.mic_offset = config.mic_offset;
    write_oracle_csv(out, chain_from_area_function(af, config.oracle_segment, config.c, config.rho),
                     config.f_max, opts);
  }
  return {std::move(sim.formants), std::move(oracle), std::move(table)};
}

BenchReport run_benchmark(const RunConfig& config, const std::vector<int>& worker_counts,
                          int repetitions, std::int64_t steps_override) {
  config.validate();
  if (repetitions < 1) throw ValidationError("repetitions must be >= 1");
  for (int w : worker_counts) {
    if (w < 1) throw ValidationError("worker counts must be >= 1");
  }
  const AreaFunction af = load_area_function(config.area_function);
  const SimDomain domain = build_domain(config, af);
  const Probe mic = microphone_probe(domain, config.mic_offset);
  SimParams params{config.time_step(), config.duration, config.diagnostics_interval};
  params.validate(domain.grid(), domain.constants());
  const std::int64_t steps = steps_override > 0 ? steps_override : params.steps();
  const ExcitationSignal excitation =
      make_pulse(params.dt, config.pulse).resized(static_cast<std::size_t>(steps));

  const BoundaryField boundary = make_boundary(domain, config.wall_form);
  const Stepper plain(domain, boundary, params.dt, Kernel::Plain2D);
  const Stepper full(domain, boundary, params.dt, Kernel::Depth25D);
  const Probe probes[] = {mic};

  struct Job {
    std::string name;
    const Stepper* stepper;
    int workers;
    double best = std::numeric_limits<double>::infinity();
  };
  std::vector<Job> jobs = {{"2d-serial", &plain, 1}, {"2.5d-serial", &full, 1}};
  for (int w : worker_counts) jobs.push_back({"2.5d-parallel", &full, w});

  for (int r = 0; r < repetitions; ++r) {
    for (auto& job : jobs) {
      FieldState state = FieldState::zeros(domain.grid());
      const ProbeRecords rec = advance(*job.stepper, state, steps, excitation.samples, probes,
                                       job.workers, params.diagnostics_interval);
      job.best = std::min(job.best, rec.wall_seconds);
    }
  }

  BenchReport report;
  report.nx = domain.grid().nx;
  report.ny = domain.grid().ny;
  report.steps = steps;
  report.repetitions = repetitions;
  report.plain_2d_seconds = jobs[0].best;
  report.depth_serial_seconds = jobs[1].best;
  report.overhead_percent =
      100.0 * (report.depth_serial_seconds - report.plain_2d_seconds) / report.plain_2d_seconds;
  for (const auto& job : jobs) {
    report.variants.push_back({job.name, job.workers, job.best,
                               static_cast<double>(steps) / job.best,
                               report.depth_serial_seconds / job.best});
  }
  return report;
}

std::string BenchReport::to_json() const {
  nlohmann::json j;
  j["grid"] = {{"nx", nx}, {"ny", ny}};
  j["steps"] = steps;
  j["repetitions"] = repetitions;
  j["plain_2d_seconds"] = plain_2d_seconds;
  j["depth_serial_seconds"] = depth_serial_seconds;
  j["overhead_percent"] = overhead_percent;
  j["variants"] = nlohmann::json::array();
  for (const auto& v : variants) {
    j["variants"].push_back({{"name", v.name},
                             {"workers", v.workers},
                             {"seconds", v.seconds},
                             {"steps_per_second", v.steps_per_second},
                             {"speedup_vs_2.5d_serial", v.speedup}});
  }
  return j.dump(2);
}

std::string BenchReport::to_text() const {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "grid %dx%d, %lld steps, best of %d\n", nx, ny,
                static_cast<long long>(steps), repetitions);
  os << line;
  for (const auto& v : variants) {
    std::snprintf(line, sizeof line, "  %-14s workers=%-2d %9.3f s  %12.0f steps/s  x%.2f\n",
                  v.name.c_str(), v.workers, v.seconds, v.steps_per_second, v.speedup);
    os << line;
  }
  std::snprintf(line, sizeof line, "depth-term overhead vs plain 2D: %+.2f %%\n", overhead_percent);
  os << line;
  return os.str();
}

}  // namespace vt25
