#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vt25d/domain.hpp"
#include "vt25d/solver.hpp"

namespace vt25 {

/// Everything a pipeline run needs. Defaults reproduce the reference vowel
/// setup: 0.74 mm cells on a 270x45 grid, c = 350 m/s, rho = 1.14 kg/m^3,
/// mu = 0.005, 50 ms, microphone 3 mm inside the mouth.
struct RunConfig {
  std::filesystem::path area_function;
  double ds = 0.74e-3;
  int nx = 270;
  int ny = 45;
  std::optional<double> dt;  // empty = CFL bound
  double duration = 0.05;
  double c = 350.0;
  double rho = 1.14;
  double mu = 0.005;
  double mic_offset = 0.003;
  PulseSpec pulse{};
  WallForm wall_form = WallForm::Admittance;
  bool scaling = true;
  int workers = 1;
  std::filesystem::path output_dir = "out";

  std::optional<double> min_depth;
  double open_space_depth = kDefaultOpenSpaceDepth;
  std::int64_t diagnostics_interval = 1000;
  std::size_t fft_size = std::size_t{1} << 21;
  bool deconvolve = false;
  std::size_t formant_count = 8;
  double f_min = 50.0;
  double f_max = 10000.0;
  double oracle_segment = 0.5e-3;
  double wav_rate = 44100.0;

  GridSpec grid() const { return {ds, nx, ny, 0.0, 0.0}; }
  PhysicalConstants constants() const { return {c, rho, mu}; }
  double time_step() const { return dt.value_or(max_stable_dt(ds, c)); }

  /// Throws ValidationError for non-positive physical fields, mic_offset <
  /// ds, workers < 1 and similar.
  void validate() const;

  /// Sets one field from its config-file key. Throws ValidationError for an
  /// unknown key or malformed value.
  void set(const std::string& key, const std::string& value);

  bool operator==(const RunConfig&) const = default;
};

/// `key = value` lines, '#' starts a comment.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);
/// Writes every field, so parse_config(save_config(c)) == c.
void save_config(std::ostream& out, const RunConfig& config);

/// Names of all keys accepted by RunConfig::set.
std::vector<std::string> config_keys();

}  // namespace vt25
