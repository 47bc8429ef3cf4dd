#include "vt25d/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "vt25d/error.hpp"

namespace vt25 {

double SegmentChain::length() const noexcept {
  double l = 0.0;
  for (const auto& s : segments) l += s.length;
  return l;
}

void SegmentChain::validate() const {
  if (segments.empty()) throw ValidationError("segment chain is empty");
  if (!(c > 0.0) || !(rho > 0.0)) throw ValidationError("chain needs c > 0 and rho > 0");
  for (const auto& s : segments) {
    if (!(s.length > 0.0) || !(s.area > 0.0)) {
      throw ValidationError("segment lengths and areas must be > 0");
    }
  }
}

SegmentChain chain_from_area_function(const AreaFunction& af, double segment_length, double c,
                                      double rho) {
  if (!(segment_length > 0.0)) throw ValidationError("segment length must be > 0");
  const double total = af.length();
  if (segment_length > total) {
    throw ValidationError("segment length exceeds the tube length");
  }
  const auto n = std::max<long>(1, std::lround(total / segment_length));
  const double l = total / static_cast<double>(n);
  SegmentChain chain;
  chain.c = c;
  chain.rho = rho;
  chain.segments.reserve(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) {
    chain.segments.push_back({l, af.area_at((static_cast<double>(k) + 0.5) * l)});
  }
  chain.validate();
  return chain;
}

ChainMatrix segment_matrix(const Segment& s, double freq, double c, double rho) {
  const double kl = 2.0 * std::numbers::pi * freq / c * s.length;
  const double z = rho * c / s.area;
  const double cs = std::cos(kl);
  const double sn = std::sin(kl);
  using cd = std::complex<double>;
  return {cd(cs, 0.0), cd(0.0, z * sn), cd(0.0, sn / z), cd(cs, 0.0)};
}

ChainMatrix multiply(const ChainMatrix& x, const ChainMatrix& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}

ChainMatrix chain_matrix(const SegmentChain& chain, double freq, double from, double to) {
  ChainMatrix m{1.0, 0.0, 0.0, 1.0};
  double start = 0.0;
  for (const auto& s : chain.segments) {
    const double end = start + s.length;
    const double a = std::max(start, from);
    const double b = std::min(end, to);
    if (b > a) m = multiply(m, segment_matrix({b - a, s.area}, freq, chain.c, chain.rho));
    start = end;
  }
  return m;
}

ChainMatrix chain_matrix(const SegmentChain& chain, double freq) {
  ChainMatrix m{1.0, 0.0, 0.0, 1.0};
  for (const auto& s : chain.segments) m = multiply(m, segment_matrix(s, freq, chain.c, chain.rho));
  return m;
}

namespace {

double response_at(const SegmentChain& chain, double f, const Termination& t) {
  const double total = chain.length();
  if (t.mic_offset <= 0.0) return 1.0 / std::abs(chain_matrix(chain, f)[3]);
  const double split = std::max(0.0, total - t.mic_offset);
  const ChainMatrix front = chain_matrix(chain, f, 0.0, split);
  const ChainMatrix tail = chain_matrix(chain, f, split, total);
  const ChainMatrix whole = multiply(front, tail);
  const double scale = chain.segments.front().area / (chain.rho * chain.c);
  return scale * std::abs(tail[1] / whole[3]);
}

double d_element(const SegmentChain& chain, double f) { return chain_matrix(chain, f)[3].real(); }

}  // namespace

std::vector<double> input_output_response(const SegmentChain& chain, std::span<const double> freqs,
                                          const Termination& termination) {
  chain.validate();
  std::vector<double> out(freqs.size());
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    if (!(freqs[k] > 0.0)) throw ValidationError("oracle frequencies must be > 0");
    out[k] = response_at(chain, freqs[k], termination);
  }
  return out;
}

namespace {

void sweep(const SegmentChain& chain, double f_max, const OracleOptions& options,
           std::vector<double>& freqs, std::vector<double>& db) {
  if (!(options.sweep_step_hz > 0.0)) throw ValidationError("sweep step must be > 0");
  if (!(f_max > options.sweep_step_hz)) throw ValidationError("f_max must exceed the sweep step");
  const auto n = static_cast<std::size_t>(std::floor(f_max / options.sweep_step_hz));
  freqs.resize(n);
  for (std::size_t k = 0; k < n; ++k) freqs[k] = static_cast<double>(k + 1) * options.sweep_step_hz;
  const std::vector<double> mag = input_output_response(chain, freqs, options.termination);
  db.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    db[k] = mag[k] > 0.0 && std::isfinite(mag[k]) ? std::max(kDbFloor, 20.0 * std::log10(mag[k]))
            : mag[k] > 0.0                       ? 600.0
                                                 : kDbFloor;
  }
}

}  // namespace

FormantSet oracle_formants(const SegmentChain& chain, double f_max, std::size_t count,
                           const OracleOptions& options) {
  if (count < 1) throw ValidationError("formant count must be >= 1");
  chain.validate();
  std::vector<double> freqs, db;
  sweep(chain, f_max, options, freqs, db);
  FormantSet peaks = find_peaks(freqs, db, count, options.f_min, f_max, options.peaks);

  const double h = options.sweep_step_hz;
  for (double& f : peaks.frequencies) {
    double a = std::max(0.5 * h, f - 1.5 * h);
    double b = f + 1.5 * h;
    double da = d_element(chain, a);
    if (da * d_element(chain, b) > 0.0) continue;
    for (int it = 0; it < 200 && b - a > 1e-9; ++it) {
      const double m = 0.5 * (a + b);
      const double dm = d_element(chain, m);
      if ((dm < 0.0) == (da < 0.0)) {
        a = m;
        da = dm;
      } else {
        b = m;
      }
    }
    f = 0.5 * (a + b);
  }
  return peaks;
}

void write_oracle_csv(std::ostream& out, const SegmentChain& chain, double f_max,
                      const OracleOptions& options) {
  std::vector<double> freqs, db;
  sweep(chain, f_max, options, freqs, db);
  write_transfer_csv(out, freqs, db);
}

}  // namespace vt25
