#include <cmath>
#include <numbers>
#include <sstream>

#include "vt25d/error.hpp"
#include "vt25d/solver.hpp"

namespace vt25 {

namespace {

// Ideal low-pass impulse response at normalised cutoff f (cycles/sample).
double lowpass_tap(double f, double n) {
  if (f <= 0.0) return 0.0;
  if (n == 0.0) return 2.0 * f;
  return std::sin(2.0 * std::numbers::pi * f * n) / (std::numbers::pi * n);
}

}  // namespace

ExcitationSignal make_pulse(double dt, std::int64_t length, double low_cut, double high_cut,
                            double amplitude) {
  if (!(dt > 0.0)) throw ValidationError("pulse needs dt > 0");
  if (length < 1) throw ValidationError("pulse length must be >= 1");
  const double nyquist = 0.5 / dt;
  if (!(low_cut >= 0.0 && low_cut < high_cut && high_cut < nyquist)) {
    throw ValidationError("pulse band must satisfy 0 <= low_cut < high_cut < Nyquist (" +
                          std::to_string(nyquist) + " Hz)");
  }
  if (!std::isfinite(amplitude)) throw ValidationError("pulse amplitude must be finite");

  const double rate = 1.0 / dt;
  const double transition = 6.0 / static_cast<double>(length);  // Blackman, normalised
  const double f_lo = std::max(0.0, low_cut / rate - 0.5 * transition);
  const double f_hi = std::min(0.5, high_cut / rate + 0.5 * transition);

  ExcitationSignal sig;
  sig.samples.resize(static_cast<std::size_t>(length));
  const double centre = 0.5 * static_cast<double>(length - 1);
  const double span = std::max<double>(1.0, static_cast<double>(length - 1));
  for (std::int64_t k = 0; k < length; ++k) {
    const double x = static_cast<double>(k) / span;
    const double w = length == 1 ? 1.0
                                 : 0.42 - 0.5 * std::cos(2.0 * std::numbers::pi * x) +
                                       0.08 * std::cos(4.0 * std::numbers::pi * x);
    const double n = static_cast<double>(k) - centre;
    sig.samples[static_cast<std::size_t>(k)] =
        amplitude * w * (lowpass_tap(f_hi, n) - lowpass_tap(f_lo, n));
  }

  std::ostringstream d;
  d << "blackman-windowed sinc band-pass, " << length << " taps, band " << low_cut << "-"
    << high_cut << " Hz (sinc edges " << f_lo * rate << "-" << f_hi * rate << " Hz), amplitude "
    << amplitude << " m/s";
  sig.description = d.str();
  return sig;
}

}  // namespace vt25
