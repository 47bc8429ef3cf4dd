#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vt25 {

inline constexpr double kDbFloor = -300.0;

struct TransferFunction {
  std::vector<double> freqs;         // Hz, 0 .. Nyquist
  std::vector<double> magnitude_db;  // 20 log10 |X|, floored at kDbFloor
  double resolution = 0.0;           // Hz per bin
  double source_rate = 0.0;          // Hz
};

struct FormantSet {
  std::vector<double> frequencies;   // Hz, ascending
  std::vector<double> magnitudes_db;
  bool shortfall = false;            // fewer peaks found than requested

  std::size_t size() const noexcept { return frequencies.size(); }
};

/// |X_k|^2 for k = 0 .. pad_to/2 of the zero-padded record.
std::vector<double> power_spectrum(std::span<const double> record, std::size_t pad_to);

inline bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

/// Magnitude spectrum (dB) of the zero-padded record, no window. When
/// `excitation` is given the magnitude is divided by the excitation's
/// spectrum (bins where it is below 1e-12 of its peak are floored).
/// Throws ValidationError for an empty record or a pad length that is not a
/// power of two at least as long as the record.
TransferFunction transfer_function(std::span<const double> record, double rate,
                                   std::size_t pad_to,
                                   std::optional<std::span<const double>> excitation = {});

struct PeakOptions {
  double prominence_db = 3.0;
  // A peak must also be the maximum within +/- this many Hz.
  double neighborhood_hz = 100.0;
};

/// The `count` lowest-frequency peaks inside [f_min, f_max], each refined by
/// a parabola through the three dB samples around it.
FormantSet find_formants(const TransferFunction& tf, std::size_t count, double f_min,
                         double f_max, const PeakOptions& options = {});

/// Peak picking on an arbitrary sampled curve (uniform frequency spacing).
FormantSet find_peaks(std::span<const double> freqs, std::span<const double> db,
                      std::size_t count, double f_min, double f_max,
                      const PeakOptions& options = {});

struct FormantDelta {
  double measured_hz;
  double reference_hz;
  double delta_hz;
  double delta_percent;  // relative to the reference
};

struct FormantComparison {
  std::vector<FormantDelta> rows;
  bool shortfall = false;
};

/// Signed per-formant differences. Throws ValidationError on count mismatch.
FormantComparison compare_formants(const FormantSet& measured, const FormantSet& reference);

/// Two lines per formant, Hz then percent, as in a formant error table.
std::string format_comparison_table(const FormantComparison& cmp,
                                    const std::string& title = "2.5D vs reference");
std::string comparison_json(const FormantComparison& cmp);
std::string formants_json(const FormantSet& f);

/// CSV `freq_hz,magnitude_db`.
void write_transfer_csv(std::ostream& out, std::span<const double> freqs,
                        std::span<const double> magnitude_db);

}  // namespace vt25
