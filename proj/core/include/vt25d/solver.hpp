#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vt25d/domain.hpp"
#include "vt25d/grid.hpp"

namespace vt25 {

/// Pressure at cell centres, vx on the right edge and vy on the top edge
/// of each cell.
struct FieldState {
  Grid2<double> p;
  Grid2<double> vx;
  Grid2<double> vy;
  std::int64_t step_index = 0;

  static FieldState zeros(const GridSpec& grid) {
    return {Grid2<double>(grid.nx, grid.ny), Grid2<double>(grid.nx, grid.ny),
            Grid2<double>(grid.nx, grid.ny), 0};
  }
};

/// How wall velocity follows the pressure in front of the wall.
enum class WallForm {
  Admittance,    // v_b = mu * p_w / (rho c)
  RhoCMu,        // v_b = rho c * mu * p_w
};

WallForm parse_wall_form(const std::string& s);
std::string to_string(WallForm form);

/// Gain g in v_b = g * p_w for the given wall form.
double wall_gain(const PhysicalConstants& k, WallForm form) noexcept;

/// Per velocity sample blend between the momentum equation (beta = 1) and
/// a prescribed velocity (beta = 0). The prescribed velocity is
///   v_b = vb + gain_lo * p(lower cell) + gain_hi * p(upper cell) + drive * u(n)
/// where "lower" is the cell at (i, j) and "upper" the one at (i+1, j) for
/// x edges, (i, j+1) for y edges, and u(n) the excitation sample.
struct BoundaryField {
  Grid2<double> beta_x, beta_y;
  Grid2<double> vb_x, vb_y;
  Grid2<double> gain_lo_x, gain_hi_x, gain_lo_y, gain_hi_y;
  Grid2<double> drive_x, drive_y;

  /// beta in [0, 1]; prescribed-velocity terms only where beta < 1.
  void validate() const;
};

/// Static-geometry boundary: beta = 1 between two fluid (Air/Open) cells;
/// beta = 0 with admittance gains on fluid/Wall edges and with unit drive
/// on Excitation/Air edges (positive into the tube); every other sample is
/// inactive (beta = 0, v_b = 0).
BoundaryField make_boundary(const SimDomain& domain, WallForm form = WallForm::Admittance);

/// Largest stable step for the 2D leapfrog scheme, ds / (sqrt(2) c).
double max_stable_dt(double ds, double c);

struct SimParams {
  double dt = 0.0;
  double duration = 0.05;
  std::int64_t diagnostics_interval = 1000;

  /// ceil(duration / dt), tolerant of representation error in the ratio.
  std::int64_t steps() const;
  /// Throws ValidationError for dt above the CFL bound, non-positive dt or
  /// duration, or a diagnostics interval < 1.
  void validate(const GridSpec& grid, const PhysicalConstants& k) const;
};

/// Velocity (m/s) prescribed on the excitation plane, one sample per step.
struct ExcitationSignal {
  std::vector<double> samples;
  std::string description;

  /// Zero-padded (or truncated) copy with exactly n samples.
  ExcitationSignal resized(std::size_t n) const;
};

struct PulseSpec {
  std::int64_t length = 2048;
  double low_cut = 20.0;
  double high_cut = 20000.0;
  double amplitude = 1.0;

  bool operator==(const PulseSpec&) const = default;
};

/// Blackman-windowed sinc band-pass of `length` taps. The sinc cut-offs are
/// pushed half a transition width (6/length of the rate) outside the
/// requested band so the band itself sits in the passband; a low cut below
/// that resolution degenerates to a low-pass. Passband gain equals
/// `amplitude`. Throws ValidationError unless 0 <= low < high < 1/(2 dt).
ExcitationSignal make_pulse(double dt, std::int64_t length, double low_cut, double high_cut,
                            double amplitude);
inline ExcitationSignal make_pulse(double dt, const PulseSpec& spec) {
  return make_pulse(dt, spec.length, spec.low_cut, spec.high_cut, spec.amplitude);
}

enum class Kernel {
  Depth25D,  // full update with depth-weighted fluxes
  Plain2D,   // depth terms removed, for timing comparisons
};

struct Probe;
struct ProbeRecords;

/// Precomputed update coefficients for one domain, boundary and time step.
/// Immutable after construction; the row-range methods may be called from
/// several threads on disjoint row ranges.
class Stepper {
 public:
  Stepper(const SimDomain& domain, const BoundaryField& boundary, double dt,
          Kernel kernel = Kernel::Depth25D);

  const GridSpec& grid() const noexcept { return grid_; }
  double dt() const noexcept { return dt_; }
  Kernel kernel() const noexcept { return kernel_; }

  /// p(n+1) from p(n) and the velocities, rows [j0, j1).
  void pressure_rows(FieldState& s, int j0, int j1) const;
  /// v(n+1) from v(n) and p(n+1), edges owned by rows [j0, j1).
  void velocity_rows(FieldState& s, int j0, int j1, double excitation) const;

  /// One full step: pressure, then velocity. Increments step_index.
  void step(FieldState& s, double excitation) const;

 private:
  struct BoundaryEdge {
    std::uint32_t index;
    int row;
    double a, k_lo, k_hi, k_drive, k_static;
  };

  friend ProbeRecords advance(const Stepper&, FieldState&, std::int64_t,
                              std::span<const double>, std::span<const Probe>, int,
                              std::int64_t);

  GridSpec grid_;
  double dt_;
  Kernel kernel_;
  std::vector<double> kp_;       // pressure coefficient per cell, 0 off Air
  std::vector<double> dx_, dy_;  // edge depths
  std::vector<double> gx_, gy_;  // dt/(rho ds) on beta = 1 edges, else 0
  std::vector<BoundaryEdge> bx_, by_;
  std::vector<std::size_t> open_;  // Dirichlet cells, ascending

  // Same update with the depth folded into the state (q = d v). Used by
  // advance() for the depth kernel. Active edges of zero depth carry no flux
  // and are stepped in velocity form through shadow_x_/shadow_y_.
  std::vector<double> qgx_, qgy_;
  std::vector<BoundaryEdge> qbx_, qby_;
  std::vector<BoundaryEdge> shadow_x_, shadow_y_;
};

/// Single-call wrappers over Stepper for isolated updates.
void step_pressure(FieldState& s, const SimDomain& domain, double dt);
void step_velocity(FieldState& s, const SimDomain& domain, const BoundaryField& boundary,
                   double dt, double excitation = 0.0);

struct Probe {
  int i;
  int j;
};

struct ProbeRecords {
  std::vector<std::vector<double>> series;  // one per probe, p after each step
  double dt = 0.0;
  std::int64_t steps = 0;
  int workers = 1;
  double wall_seconds = 0.0;

  double rate() const noexcept { return 1.0 / dt; }
};

struct RunOptions {
  WallForm wall_form = WallForm::Admittance;
  Kernel kernel = Kernel::Depth25D;
};

/// Advances `state` by `steps`, recording p at each probe after every
/// pressure update. Rows are split into `workers` contiguous bands with a
/// barrier between the pressure and velocity phases, so the result does not
/// depend on the worker count. Throws DivergenceError when the periodic
/// scan finds a non-finite pressure.
ProbeRecords advance(const Stepper& stepper, FieldState& state, std::int64_t steps,
                     std::span<const double> excitation, std::span<const Probe> probes,
                     int workers = 1, std::int64_t diagnostics_interval = 1000);

ProbeRecords run(const SimDomain& domain, const SimParams& params,
                 const ExcitationSignal& excitation, std::span<const Probe> probes,
                 const RunOptions& options = {});

ProbeRecords run_parallel(const SimDomain& domain, const SimParams& params,
                          const ExcitationSignal& excitation, std::span<const Probe> probes,
                          int workers, const RunOptions& options = {});

}  // namespace vt25
