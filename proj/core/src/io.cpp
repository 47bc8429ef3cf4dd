#include "vt25d/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <ostream>

#include "vt25d/error.hpp"

namespace vt25 {

void write_probe_csv(std::ostream& out, const ProbeRecords& rec) {
  out << "step,time_s";
  for (std::size_t k = 0; k < rec.series.size(); ++k) out << ",probe" << k;
  out << '\n';
  char buf[64];
  auto put = [&](double v) {
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, r.ptr - buf);
  };
  for (std::int64_t n = 0; n < rec.steps; ++n) {
    out << (n + 1) << ',';
    put(static_cast<double>(n + 1) * rec.dt);
    for (const auto& s : rec.series) {
      out << ',';
      put(s[static_cast<std::size_t>(n)]);
    }
    out << '\n';
  }
}

namespace {

template <typename T>
void put_le(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

}  // namespace

void write_wav_float(const std::filesystem::path& path, std::span<const double> samples,
                     std::uint32_t rate) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write " + path.string());
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 4);
  out.write("RIFF", 4);
  put_le<std::uint32_t>(out, 4 + (8 + 18) + (8 + 4) + (8 + data_bytes));
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_le<std::uint32_t>(out, 18);
  put_le<std::uint16_t>(out, 3);  // IEEE float
  put_le<std::uint16_t>(out, 1);
  put_le<std::uint32_t>(out, rate);
  put_le<std::uint32_t>(out, rate * 4);
  put_le<std::uint16_t>(out, 4);
  put_le<std::uint16_t>(out, 32);
  put_le<std::uint16_t>(out, 0);
  out.write("fact", 4);
  put_le<std::uint32_t>(out, 4);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(samples.size()));
  out.write("data", 4);
  put_le<std::uint32_t>(out, data_bytes);
  for (double s : samples) put_le<float>(out, static_cast<float>(s));
  if (!out) throw RuntimeError("failed writing " + path.string());
}

std::vector<double> resample(std::span<const double> x, double in_rate, double out_rate,
                             int half_width) {
  if (!(in_rate > 0.0) || !(out_rate > 0.0)) throw ValidationError("rates must be > 0");
  if (half_width < 1) throw ValidationError("resampler half width must be >= 1");
  const double cutoff = 0.45 * std::min(in_rate, out_rate);
  const double step = 2.0 * cutoff / in_rate;  // kernel zero-crossing rate in input samples
  const double support = half_width / step;    // kernel half length in input samples
  const auto n_out = static_cast<std::size_t>(std::floor(x.size() * out_rate / in_rate));
  std::vector<double> y(n_out, 0.0);
  const auto n_in = static_cast<long>(x.size());
  for (std::size_t m = 0; m < n_out; ++m) {
    const double t = static_cast<double>(m) * in_rate / out_rate;
    const long first = std::max(0L, static_cast<long>(std::ceil(t - support)));
    const long last = std::min(n_in - 1, static_cast<long>(std::floor(t + support)));
    double acc = 0.0;
    for (long n = first; n <= last; ++n) {
      const double tau = static_cast<double>(n) - t;
      const double arg = step * tau;
      const double sinc = arg == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
      const double u = 0.5 + 0.5 * tau / support;  // window position in [0, 1]
      const double w = 0.42 - 0.5 * std::cos(2.0 * std::numbers::pi * u) +
                       0.08 * std::cos(4.0 * std::numbers::pi * u);
      acc += x[static_cast<std::size_t>(n)] * step * sinc * w;
    }
    y[m] = acc;
  }
  return y;
}

}  // namespace vt25
