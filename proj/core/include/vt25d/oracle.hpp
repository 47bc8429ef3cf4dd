#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "vt25d/analysis.hpp"
#include "vt25d/area_function.hpp"

namespace vt25 {

/// Plane-wave (Webster) idealisation of a tube as a cascade of uniform,
/// lossless cylindrical segments.
struct Segment {
  double length;  // m
  double area;    // m^2
};

struct SegmentChain {
  std::vector<Segment> segments;  // glottis first
  double c = 350.0;
  double rho = 1.14;

  double length() const noexcept;
  void validate() const;
};

/// Equal-length segments covering the tube; each takes the area at its
/// midpoint. The count is length / segment_length rounded to the nearest
/// integer (at least 1). Throws ValidationError when segment_length <= 0 or
/// exceeds the tube length.
SegmentChain chain_from_area_function(const AreaFunction& af, double segment_length,
                                      double c = 350.0, double rho = 1.14);

/// Acoustic ABCD matrix mapping (P, U) at a segment's output to its input:
///   [cos kl, j Z sin kl; j sin kl / Z, cos kl], Z = rho c / A.
using ChainMatrix = std::array<std::complex<double>, 4>;  // a, b, c, d

ChainMatrix segment_matrix(const Segment& s, double freq, double c, double rho);
ChainMatrix multiply(const ChainMatrix& x, const ChainMatrix& y);
inline std::complex<double> determinant(const ChainMatrix& m) { return m[0] * m[3] - m[1] * m[2]; }

/// Product of the segment matrices from `from` (m from the glottis) to `to`.
ChainMatrix chain_matrix(const SegmentChain& chain, double freq, double from, double to);
ChainMatrix chain_matrix(const SegmentChain& chain, double freq);

/// Glottal volume-velocity source, zero-pressure mouth. The response is the
/// pressure at a listening point `mic_offset` metres inside the mouth per
/// unit source volume velocity, times A_glottis / (rho c) to make it
/// dimensionless. A zero offset reads the mouth volume velocity per unit
/// source volume velocity instead.
struct Termination {
  double mic_offset = 0.003;
};

std::vector<double> input_output_response(const SegmentChain& chain, std::span<const double> freqs,
                                          const Termination& termination = {});

struct OracleOptions {
  double sweep_step_hz = 1.0;
  double f_min = 50.0;
  Termination termination{};
  PeakOptions peaks{};
};

/// Resonances below f_max: peaks of the swept response, each refined to the
/// zero of the chain's D element (real for a lossless chain) by bisection.
FormantSet oracle_formants(const SegmentChain& chain, double f_max, std::size_t count,
                           const OracleOptions& options = {});

/// Swept response in the CSV layout of the analysis module.
void write_oracle_csv(std::ostream& out, const SegmentChain& chain, double f_max,
                      const OracleOptions& options = {});

}  // namespace vt25
