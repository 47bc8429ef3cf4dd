#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "vt25d/solver.hpp"

namespace vt25 {

/// CSV `step,time_s,probe0,...`. Values are written with round-trip
/// precision so identical runs give identical files.
void write_probe_csv(std::ostream& out, const ProbeRecords& rec);

/// Mono 32-bit IEEE float WAV.
void write_wav_float(const std::filesystem::path& path, std::span<const double> samples,
                     std::uint32_t rate);

/// Band-limited resampling by windowed-sinc interpolation, cutoff at
/// 0.45 of the lower of the two rates.
std::vector<double> resample(std::span<const double> x, double in_rate, double out_rate,
                             int half_width = 32);

}  // namespace vt25
