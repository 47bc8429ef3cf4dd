#include "vt25d/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "vt25d/error.hpp"

namespace vt25 {

WallForm parse_wall_form(const std::string& s) {
  if (s == "admittance") return WallForm::Admittance;
  if (s == "rho-c-mu") return WallForm::RhoCMu;
  throw ValidationError("unknown wall form '" + s + "' (expected admittance or rho-c-mu)");
}

std::string to_string(WallForm form) {
  return form == WallForm::Admittance ? "admittance" : "rho-c-mu";
}

double wall_gain(const PhysicalConstants& k, WallForm form) noexcept {
  const double z = k.rho * k.c;
  return form == WallForm::Admittance ? k.mu / z : z * k.mu;
}

double max_stable_dt(double ds, double c) {
  if (!(ds > 0.0) || !(c > 0.0)) throw ValidationError("max_stable_dt needs ds > 0 and c > 0");
  return ds / (std::sqrt(2.0) * c);
}

std::int64_t SimParams::steps() const {
  const double ratio = duration / dt;
  return static_cast<std::int64_t>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio)));
}

void SimParams::validate(const GridSpec& grid, const PhysicalConstants& k) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be > 0");
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw ValidationError("duration must be > 0");
  }
  if (diagnostics_interval < 1) throw ValidationError("diagnostics interval must be >= 1");
  const double bound = max_stable_dt(grid.ds, k.c);
  if (dt > bound) {
    throw ValidationError("dt = " + std::to_string(dt) + " s violates the CFL bound " +
                          std::to_string(bound) + " s");
  }
}

ExcitationSignal ExcitationSignal::resized(std::size_t n) const {
  ExcitationSignal out{samples, description};
  out.samples.resize(n, 0.0);
  return out;
}

// ---------------------------------------------------------------------------
// Boundary field

void BoundaryField::validate() const {
  auto check = [](const Grid2<double>& beta, std::initializer_list<const Grid2<double>*> terms,
                  const char* axis) {
    for (std::size_t e = 0; e < beta.size(); ++e) {
      const double b = beta.data()[e];
      if (!(b >= 0.0 && b <= 1.0)) {
        throw ValidationError(std::string("beta_") + axis + " outside [0, 1]");
      }
      if (b == 1.0) {
        for (const auto* t : terms) {
          if (t->data()[e] != 0.0) {
            throw ValidationError(std::string("prescribed velocity on a beta = 1 ") + axis +
                                  " sample");
          }
        }
      }
    }
  };
  check(beta_x, {&vb_x, &gain_lo_x, &gain_hi_x, &drive_x}, "x");
  check(beta_y, {&vb_y, &gain_lo_y, &gain_hi_y, &drive_y}, "y");
}

namespace {

bool is_fluid(CellType t) noexcept { return t == CellType::Air || t == CellType::Open; }

}  // namespace

BoundaryField make_boundary(const SimDomain& domain, WallForm form) {
  const GridSpec& g = domain.grid();
  const CellRaster& cells = domain.cells();
  const double gain = wall_gain(domain.constants(), form);
  auto blank = [&] { return Grid2<double>(g.nx, g.ny); };
  BoundaryField b{blank(), blank(), blank(), blank(), blank(), blank(),
                  blank(), blank(), blank(), blank()};

  auto classify = [&](CellType lo, CellType hi, double& beta, double& gain_lo, double& gain_hi,
                      double& drive) {
    if (is_fluid(lo) && is_fluid(hi)) {
      beta = 1.0;
    } else if (is_fluid(lo) && hi == CellType::Wall) {
      gain_lo = gain;  // normal points from lo into the wall: +axis
    } else if (lo == CellType::Wall && is_fluid(hi)) {
      gain_hi = -gain;
    } else if (lo == CellType::Excitation && is_fluid(hi)) {
      drive = 1.0;
    } else if (is_fluid(lo) && hi == CellType::Excitation) {
      drive = -1.0;
    }
  };

  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i + 1 < g.nx) {
        classify(cells(i, j), cells(i + 1, j), b.beta_x(i, j), b.gain_lo_x(i, j),
                 b.gain_hi_x(i, j), b.drive_x(i, j));
      }
      if (j + 1 < g.ny) {
        classify(cells(i, j), cells(i, j + 1), b.beta_y(i, j), b.gain_lo_y(i, j),
                 b.gain_hi_y(i, j), b.drive_y(i, j));
      }
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Stepper

Stepper::Stepper(const SimDomain& domain, const BoundaryField& boundary, double dt, Kernel kernel)
    : grid_(domain.grid()), dt_(dt), kernel_(kernel) {
  const auto& k = domain.constants();
  SimParams{dt, 1.0, 1}.validate(grid_, k);
  boundary.validate();
  const int nx = grid_.nx;
  const int ny = grid_.ny;
  const std::size_t n = grid_.cells();
  auto same = [&](const Grid2<double>& a) { return a.nx() == nx && a.ny() == ny; };
  for (const auto* f : {&boundary.beta_x, &boundary.beta_y, &boundary.vb_x, &boundary.vb_y,
                        &boundary.gain_lo_x, &boundary.gain_hi_x, &boundary.gain_lo_y,
                        &boundary.gain_hi_y, &boundary.drive_x, &boundary.drive_y}) {
    if (!same(*f)) throw ValidationError("boundary field does not match the grid");
  }

  const double ds = grid_.ds;
  const auto& depth = domain.depth();
  const auto& cells = domain.cells();

  kp_.assign(n, 0.0);
  const double bulk = k.rho * k.c * k.c * dt / ds;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (cells(i, j) == CellType::Open) open_.push_back(cells.index(i, j));
      if (cells(i, j) != CellType::Air) continue;
      const double d = depth.d_bar(i, j);
      if (!(d > 0.0)) throw ValidationError("zero d_bar in an Air cell");
      kp_[cells.index(i, j)] = kernel == Kernel::Depth25D ? bulk / d : bulk;
    }
  }
  dx_.assign(depth.d_x.values().begin(), depth.d_x.values().end());
  dy_.assign(depth.d_y.values().begin(), depth.d_y.values().end());

  const double momentum = dt / (k.rho * ds);
  auto build = [&](const Grid2<double>& beta, const Grid2<double>& vb, const Grid2<double>& glo,
                   const Grid2<double>& ghi, const Grid2<double>& drive,
                   std::vector<double>& dense, std::vector<BoundaryEdge>& sparse) {
    dense.assign(n, 0.0);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::size_t e = beta.index(i, j);
        const double b = beta(i, j);
        if (b == 1.0) {
          dense[e] = momentum;
          continue;
        }
        if (b == 0.0 && vb(i, j) == 0.0 && glo(i, j) == 0.0 && ghi(i, j) == 0.0 &&
            drive(i, j) == 0.0) {
          continue;  // inactive
        }
        const double denom = b + dt * (1.0 - b);
        const double g = b * b * dt / (k.rho * ds * denom);
        const double cb = dt * (1.0 - b) / denom;
        sparse.push_back({static_cast<std::uint32_t>(e), j, b / denom, g + cb * glo(i, j),
                          -g + cb * ghi(i, j), cb * drive(i, j), cb * vb(i, j)});
      }
    }
  };
  build(boundary.beta_x, boundary.vb_x, boundary.gain_lo_x, boundary.gain_hi_x, boundary.drive_x,
        gx_, bx_);
  build(boundary.beta_y, boundary.vb_y, boundary.gain_lo_y, boundary.gain_hi_y, boundary.drive_y,
        gy_, by_);

  if (kernel != Kernel::Depth25D) return;
  auto fold = [&](const std::vector<double>& g, const std::vector<BoundaryEdge>& edges,
                  const std::vector<double>& d, std::vector<double>& qg,
                  std::vector<BoundaryEdge>& qb, std::vector<BoundaryEdge>& shadow) {
    qg.resize(n);
    for (std::size_t e = 0; e < n; ++e) qg[e] = g[e] * d[e];
    // shadow list must stay row-sorted, so merge dense and sparse edges by index
    auto sp = edges.begin();
    for (std::size_t e = 0; e < n; ++e) {
      const bool sparse_here = sp != edges.end() && sp->index == e;
      if (d[e] == 0.0) {
        if (sparse_here) {
          shadow.push_back(*sp);
        } else if (g[e] != 0.0) {
          shadow.push_back({static_cast<std::uint32_t>(e), static_cast<int>(e / nx), 1.0, g[e],
                            -g[e], 0.0, 0.0});
        }
      }
      if (sparse_here) {
        BoundaryEdge q = *sp;
        q.k_lo *= d[e];
        q.k_hi *= d[e];
        q.k_drive *= d[e];
        q.k_static *= d[e];
        qb.push_back(q);
        ++sp;
      }
    }
  };
  fold(gx_, bx_, dx_, qgx_, qbx_, shadow_x_);
  fold(gy_, by_, dy_, qgy_, qby_, shadow_y_);
}

namespace {

template <bool Weighted>
void pressure_loop(int nx, int j0, int j1, double* __restrict p, const double* __restrict vx,
                   const double* __restrict vy, const double* __restrict kp,
                   const double* __restrict dx, const double* __restrict dy) {
  for (int j = j0; j < j1; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    for (std::size_t c = row + 1; c < row + nx - 1; ++c) {
      double div;
      if constexpr (Weighted) {
        div = dx[c] * vx[c] - dx[c - 1] * vx[c - 1] + dy[c] * vy[c] - dy[c - nx] * vy[c - nx];
      } else {
        div = vx[c] - vx[c - 1] + vy[c] - vy[c - nx];
      }
      p[c] -= kp[c] * div;
    }
  }
}

void zero_cells(const std::vector<std::size_t>& cells, int nx, int j0, int j1, double* p) {
  const std::size_t lo = static_cast<std::size_t>(j0) * nx;
  const std::size_t hi = static_cast<std::size_t>(j1) * nx;
  for (auto it = std::lower_bound(cells.begin(), cells.end(), lo); it != cells.end() && *it < hi;
       ++it) {
    p[*it] = 0.0;
  }
}

template <class Edge>
void sparse_loop(const std::vector<Edge>& edges, int j0, int j1, const double* p, double* v,
                 std::size_t stride, double excitation) {
  auto first = std::lower_bound(edges.begin(), edges.end(), j0,
                                [](const Edge& b, int row) { return b.row < row; });
  for (auto it = first; it != edges.end() && it->row < j1; ++it) {
    const std::size_t e = it->index;
    v[e] = it->a * v[e] + it->k_lo * p[e] + it->k_hi * p[e + stride] +
           it->k_drive * excitation + it->k_static;
  }
}

template <class Edge>
void velocity_loop(int nx, int ny, int j0, int j1, const double* __restrict p,
                   double* __restrict vx, double* __restrict vy, const double* __restrict gx,
                   const double* __restrict gy, const std::vector<Edge>& bx,
                   const std::vector<Edge>& by, double excitation) {
  for (int j = j0; j < j1; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    for (std::size_t e = row; e < row + nx - 1; ++e) vx[e] -= gx[e] * (p[e + 1] - p[e]);
  }
  for (int j = j0; j < std::min(j1, ny - 1); ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    for (std::size_t e = row; e < row + nx; ++e) vy[e] -= gy[e] * (p[e + nx] - p[e]);
  }
  sparse_loop(bx, j0, j1, p, vx, 1, excitation);
  sparse_loop(by, j0, j1, p, vy, static_cast<std::size_t>(nx), excitation);
}

}  // namespace

void Stepper::pressure_rows(FieldState& s, int j0, int j1) const {
  j0 = std::max(j0, 1);
  j1 = std::min(j1, grid_.ny - 1);
  if (kernel_ == Kernel::Depth25D) {
    pressure_loop<true>(grid_.nx, j0, j1, s.p.data(), s.vx.data(), s.vy.data(), kp_.data(),
                        dx_.data(), dy_.data());
  } else {
    pressure_loop<false>(grid_.nx, j0, j1, s.p.data(), s.vx.data(), s.vy.data(), kp_.data(),
                         nullptr, nullptr);
  }  zero_cells(open_, grid_.nx, j0, j1, s.p.data());
}

void Stepper::velocity_rows(FieldState& s, int j0, int j1, double excitation) const {
  velocity_loop(grid_.nx, grid_.ny, std::max(j0, 0), std::min(j1, grid_.ny), s.p.data(),
                s.vx.data(), s.vy.data(), gx_.data(), gy_.data(), bx_, by_, excitation);
}

void Stepper::step(FieldState& s, double excitation) const {
  pressure_rows(s, 0, grid_.ny);
  velocity_rows(s, 0, grid_.ny, excitation);
  ++s.step_index;
}

void step_pressure(FieldState& s, const SimDomain& domain, double dt) {
  const BoundaryField boundary = make_boundary(domain);
  Stepper(domain, boundary, dt).pressure_rows(s, 0, domain.grid().ny);
}

void step_velocity(FieldState& s, const SimDomain& domain, const BoundaryField& boundary,
                   double dt, double excitation) {
  Stepper(domain, boundary, dt).velocity_rows(s, 0, domain.grid().ny, excitation);
}

// ---------------------------------------------------------------------------
// Stepping loop

namespace {

inline void cpu_relax() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_ia32_pause();
#endif
}

// Sense-counting barrier: spins briefly when every worker has its own core,
// otherwise parks on the generation counter.
class PhaseBarrier {
 public:
  PhaseBarrier(int count, int spins) : count_(count), remaining_(count), spins_(spins) {}

  void arrive_and_wait() noexcept {
    const std::uint32_t gen = generation_.load(std::memory_order_acquire);
    if (remaining_.fetch_sub(1, std::memory_order_acq_rel) == 1) {
      remaining_.store(count_, std::memory_order_relaxed);
      generation_.fetch_add(1, std::memory_order_release);
      generation_.notify_all();
      return;
    }
    for (int k = 0; k < spins_; ++k) {
      if (generation_.load(std::memory_order_acquire) != gen) return;
      cpu_relax();
    }
    while (generation_.load(std::memory_order_acquire) == gen) {
      generation_.wait(gen, std::memory_order_acquire);
    }
  }

 private:
  const int count_;
  std::atomic<int> remaining_;
  std::atomic<std::uint32_t> generation_{0};
  const int spins_;
};

bool all_finite(std::span<const double> v) noexcept {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

ProbeRecords advance(const Stepper& stepper, FieldState& state, std::int64_t steps,
                     std::span<const double> excitation, std::span<const Probe> probes,
                     int workers, std::int64_t diagnostics_interval) {
  const GridSpec& g = stepper.grid();
  if (workers < 1) throw ValidationError("worker count must be >= 1");
  if (steps < 0) throw ValidationError("step count must be >= 0");
  if (diagnostics_interval < 1) throw ValidationError("diagnostics interval must be >= 1");
  if (static_cast<std::int64_t>(excitation.size()) < steps) {
    throw ValidationError("excitation has " + std::to_string(excitation.size()) +
                          " samples, run needs " + std::to_string(steps));
  }
  for (const auto& pr : probes) {
    if (!state.p.contains(pr.i, pr.j)) throw ValidationError("probe outside the grid");
  }
  if (state.p.nx() != g.nx || state.p.ny() != g.ny || state.vx.nx() != g.nx ||
      state.vy.ny() != g.ny) {
    throw ValidationError("field state does not match the grid");
  }

  ProbeRecords rec;
  rec.dt = stepper.dt();
  rec.steps = steps;
  rec.workers = workers;
  rec.series.assign(probes.size(), std::vector<double>(static_cast<std::size_t>(steps)));

  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  PhaseBarrier barrier(workers, static_cast<unsigned>(workers) <= cores ? 4000 : 0);
  std::atomic<bool> stop{false};
  std::int64_t failed_at = -1;
  const std::int64_t start_index = state.step_index;

  // The depth kernel runs on fluxes q = d v so both kernels share one loop.
  const bool flux = stepper.kernel_ == Kernel::Depth25D;
  std::vector<double> qx, qy;
  if (flux) {
    qx.resize(state.vx.values().size());
    qy.resize(state.vy.values().size());
    for (std::size_t e = 0; e < qx.size(); ++e) qx[e] = stepper.dx_[e] * state.vx.data()[e];
    for (std::size_t e = 0; e < qy.size(); ++e) qy[e] = stepper.dy_[e] * state.vy.data()[e];
  }
  double* const fx = flux ? qx.data() : state.vx.data();
  double* const fy = flux ? qy.data() : state.vy.data();
  const double* const gx = flux ? stepper.qgx_.data() : stepper.gx_.data();
  const double* const gy = flux ? stepper.qgy_.data() : stepper.gy_.data();
  const auto& bx = flux ? stepper.qbx_ : stepper.bx_;
  const auto& by = flux ? stepper.qby_ : stepper.by_;

  auto worker = [&](int w) {
    const int j0 = static_cast<int>(static_cast<long>(g.ny) * w / workers);
    const int j1 = static_cast<int>(static_cast<long>(g.ny) * (w + 1) / workers);
    const int pj0 = std::max(j0, 1);
    const int pj1 = std::min(j1, g.ny - 1);
    for (std::int64_t n = 0; n < steps; ++n) {
      pressure_loop<false>(g.nx, pj0, pj1, state.p.data(), fx, fy, stepper.kp_.data(), nullptr,
                           nullptr);
      zero_cells(stepper.open_, g.nx, pj0, pj1, state.p.data());
      if (workers > 1) barrier.arrive_and_wait();
      if (w == 0) {
        // p is read-only during the velocity phase.
        for (std::size_t k = 0; k < probes.size(); ++k) {
          rec.series[k][static_cast<std::size_t>(n)] = state.p(probes[k].i, probes[k].j);
        }
        if ((n + 1) % diagnostics_interval == 0 || n + 1 == steps) {
          if (!all_finite(state.p.values())) {
            failed_at = start_index + n + 1;
            stop.store(true, std::memory_order_relaxed);
          }
        }
      }
      const double u = excitation[static_cast<std::size_t>(n)];
      velocity_loop(g.nx, g.ny, j0, j1, state.p.data(), fx, fy, gx, gy, bx, by, u);
      if (flux) {
        sparse_loop(stepper.shadow_x_, j0, j1, state.p.data(), state.vx.data(), 1, u);
        sparse_loop(stepper.shadow_y_, j0, j1, state.p.data(), state.vy.data(),
                    static_cast<std::size_t>(g.nx), u);
      }
      if (workers > 1) barrier.arrive_and_wait();
      if (stop.load(std::memory_order_relaxed)) return;
    }
  };

  const auto t0 = std::chrono::steady_clock::now();
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker, w);
    worker(0);
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (flux) {
    for (std::size_t e = 0; e < qx.size(); ++e) {
      if (stepper.dx_[e] != 0.0) state.vx.data()[e] = qx[e] / stepper.dx_[e];
    }
    for (std::size_t e = 0; e < qy.size(); ++e) {
      if (stepper.dy_[e] != 0.0) state.vy.data()[e] = qy[e] / stepper.dy_[e];
    }
  }

  if (failed_at >= 0) throw DivergenceError(failed_at);
  state.step_index = start_index + steps;
  return rec;
}

namespace {

ProbeRecords run_impl(const SimDomain& domain, const SimParams& params,
                      const ExcitationSignal& excitation, std::span<const Probe> probes,
                      int workers, const RunOptions& options) {
  params.validate(domain.grid(), domain.constants());
  for (const auto& pr : probes) {
    if (!domain.cells().contains(pr.i, pr.j) || domain.cells()(pr.i, pr.j) != CellType::Air) {
      throw ValidationError("probe (" + std::to_string(pr.i) + ", " + std::to_string(pr.j) +
                            ") is not on an Air cell");
    }
  }
  for (double u : excitation.samples) {
    if (!std::isfinite(u)) throw ValidationError("excitation contains non-finite samples");
  }
  const BoundaryField boundary = make_boundary(domain, options.wall_form);
  const Stepper stepper(domain, boundary, params.dt, options.kernel);
  FieldState state = FieldState::zeros(domain.grid());
  return advance(stepper, state, params.steps(), excitation.samples, probes, workers,
                 params.diagnostics_interval);
}

}  // namespace

ProbeRecords run(const SimDomain& domain, const SimParams& params,
                 const ExcitationSignal& excitation, std::span<const Probe> probes,
                 const RunOptions& options) {
  return run_impl(domain, params, excitation, probes, 1, options);
}

ProbeRecords run_parallel(const SimDomain& domain, const SimParams& params,
                          const ExcitationSignal& excitation, std::span<const Probe> probes,
                          int workers, const RunOptions& options) {
  if (workers < 1) throw ValidationError("worker count must be >= 1");
  return run_impl(domain, params, excitation, probes, workers, options);
}

}  // namespace vt25
