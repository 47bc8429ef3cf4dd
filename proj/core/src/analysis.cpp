#include "vt25d/analysis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "vt25d/error.hpp"

namespace vt25 {

namespace {

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double to_db(double magnitude) {
  if (!(magnitude > 0.0)) return kDbFloor;
  return std::max(kDbFloor, 20.0 * std::log10(magnitude));
}

}  // namespace

std::vector<double> power_spectrum(std::span<const double> record, std::size_t pad_to) {
  if (record.empty()) throw ValidationError("empty record");
  if (!is_power_of_two(pad_to)) throw ValidationError("pad length must be a power of two");
  if (pad_to < record.size()) throw ValidationError("pad length shorter than the record");

  const std::size_t bins = pad_to / 2 + 1;
  std::unique_ptr<double, FftwFree> in(fftw_alloc_real(pad_to));
  std::unique_ptr<fftw_complex, FftwFree> out(fftw_alloc_complex(bins));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(pad_to), in.get(), out.get(), FFTW_ESTIMATE);
  }
  std::fill(in.get(), in.get() + pad_to, 0.0);
  std::copy(record.begin(), record.end(), in.get());
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  std::vector<double> power(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const double re = out.get()[k][0];
    const double im = out.get()[k][1];
    power[k] = re * re + im * im;
  }
  return power;
}

TransferFunction transfer_function(std::span<const double> record, double rate,
                                   std::size_t pad_to,
                                   std::optional<std::span<const double>> excitation) {
  if (!(rate > 0.0)) throw ValidationError("sample rate must be > 0");
  const std::vector<double> power = power_spectrum(record, pad_to);
  std::vector<double> reference;
  double reference_peak = 0.0;
  if (excitation) {
    if (excitation->size() > pad_to) throw ValidationError("excitation longer than pad length");
    reference = power_spectrum(*excitation, pad_to);
    reference_peak = *std::max_element(reference.begin(), reference.end());
  }

  TransferFunction tf;
  tf.source_rate = rate;
  tf.resolution = rate / static_cast<double>(pad_to);
  tf.freqs.resize(power.size());
  tf.magnitude_db.resize(power.size());
  for (std::size_t k = 0; k < power.size(); ++k) {
    tf.freqs[k] = static_cast<double>(k) * tf.resolution;
    double mag = std::sqrt(power[k]);
    if (excitation) {
      const double ref = reference[k];
      mag = ref > 1e-24 * reference_peak && ref > 0.0 ? mag / std::sqrt(ref) : 0.0;
    }
    tf.magnitude_db[k] = to_db(mag);
  }
  return tf;
}

FormantSet find_peaks(std::span<const double> freqs, std::span<const double> db,
                      std::size_t count, double f_min, double f_max, const PeakOptions& options) {
  if (count < 1) throw ValidationError("formant count must be >= 1");
  if (freqs.size() != db.size() || freqs.size() < 3) {
    throw ValidationError("spectrum needs at least 3 equally long samples");
  }
  if (!(f_min < f_max)) throw ValidationError("f_min must be below f_max");
  const auto lo_it = std::lower_bound(freqs.begin(), freqs.end(), f_min);
  const auto hi_it = std::upper_bound(freqs.begin(), freqs.end(), f_max);
  if (lo_it >= hi_it) throw ValidationError("frequency band contains no samples");
  const std::ptrdiff_t lo = lo_it - freqs.begin();
  const std::ptrdiff_t hi = (hi_it - freqs.begin()) - 1;
  const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(db.size()) - 1;
  const double df = freqs[1] - freqs[0];
  const auto reach = static_cast<std::ptrdiff_t>(std::lround(options.neighborhood_hz / df));

  FormantSet out;
  for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(lo, 1); k <= std::min(hi, last - 1); ++k) {
    const double v = db[k];
    if (!(v > db[k - 1] && v >= db[k + 1])) continue;

    bool dominant = true;
    for (std::ptrdiff_t m = std::max<std::ptrdiff_t>(0, k - reach);
         m <= std::min(last, k + reach) && dominant; ++m) {
      if (db[m] > v) dominant = false;
    }
    if (!dominant) continue;

    double left_min = v;
    for (std::ptrdiff_t m = k - 1; m >= lo && db[m] <= v; --m) left_min = std::min(left_min, db[m]);
    double right_min = v;
    for (std::ptrdiff_t m = k + 1; m <= hi && db[m] <= v; ++m) {
      right_min = std::min(right_min, db[m]);
    }
    if (v - std::max(left_min, right_min) < options.prominence_db) continue;

    const double a = db[k - 1];
    const double c = db[k + 1];
    const double curvature = a - 2.0 * v + c;
    double offset = curvature < 0.0 ? 0.5 * (a - c) / curvature : 0.0;
    offset = std::clamp(offset, -0.5, 0.5);
    out.frequencies.push_back(freqs[k] + offset * df);
    out.magnitudes_db.push_back(v - 0.25 * (a - c) * offset);
    if (out.frequencies.size() == count) break;
  }
  out.shortfall = out.frequencies.size() < count;
  return out;
}

FormantSet find_formants(const TransferFunction& tf, std::size_t count, double f_min,
                         double f_max, const PeakOptions& options) {
  if (!tf.freqs.empty() && f_max > tf.freqs.back() + 0.5 * tf.resolution) {
    throw ValidationError("f_max above the Nyquist frequency");
  }
  return find_peaks(tf.freqs, tf.magnitude_db, count, f_min, f_max, options);
}

FormantComparison compare_formants(const FormantSet& measured, const FormantSet& reference) {
  if (measured.size() != reference.size()) {
    throw ValidationError("formant count mismatch: " + std::to_string(measured.size()) +
                          " measured vs " + std::to_string(reference.size()) + " reference");
  }
  FormantComparison cmp;
  cmp.shortfall = measured.shortfall || reference.shortfall;
  for (std::size_t k = 0; k < measured.size(); ++k) {
    const double m = measured.frequencies[k];
    const double r = reference.frequencies[k];
    const double d = m - r;
    cmp.rows.push_back({m, r, d, 100.0 * d / r});
  }
  return cmp;
}

std::string format_comparison_table(const FormantComparison& cmp, const std::string& title) {
  std::ostringstream os;
  char line[128];
  os << title << (cmp.shortfall ? "  [shortfall: fewer formants than requested]" : "") << "\n";
  os << "+----------+------------+------------+------------+\n";
  os << "| Formants |   measured |  reference |      error |\n";
  os << "+----------+------------+------------+------------+\n";
  for (std::size_t k = 0; k < cmp.rows.size(); ++k) {
    const auto& r = cmp.rows[k];
    std::snprintf(line, sizeof line, "| F%-7zu | %7.1f Hz | %7.1f Hz | %+7.1f Hz |\n", k + 1,
                  r.measured_hz, r.reference_hz, r.delta_hz);
    os << line;
    std::snprintf(line, sizeof line, "| %-8s | %10s | %10s | %+8.2f %% |\n", "", "", "",
                  r.delta_percent);
    os << line;
    os << "+----------+------------+------------+------------+\n";
  }
  return os.str();
}

std::string comparison_json(const FormantComparison& cmp) {
  nlohmann::json j;
  j["shortfall"] = cmp.shortfall;
  j["formants"] = nlohmann::json::array();
  for (std::size_t k = 0; k < cmp.rows.size(); ++k) {
    const auto& r = cmp.rows[k];
    j["formants"].push_back({{"index", k + 1},
                             {"measured_hz", r.measured_hz},
                             {"reference_hz", r.reference_hz},
                             {"delta_hz", r.delta_hz},
                             {"delta_percent", r.delta_percent}});
  }
  return j.dump(2);
}

std::string formants_json(const FormantSet& f) {
  nlohmann::json j;
  j["frequencies_hz"] = f.frequencies;
  j["magnitudes_db"] = f.magnitudes_db;
  j["shortfall"] = f.shortfall;
  return j.dump(2);
}

void write_transfer_csv(std::ostream& out, std::span<const double> freqs,
                        std::span<const double> magnitude_db) {
  out << "freq_hz,magnitude_db\n";
  char buf[80];
  for (std::size_t k = 0; k < freqs.size() && k < magnitude_db.size(); ++k) {
    const int n = std::snprintf(buf, sizeof buf, "%.6f,%.9g\n", freqs[k], magnitude_db[k]);
    out.write(buf, n);
  }
}

}  // namespace vt25
