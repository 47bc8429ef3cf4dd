#include "vt25d/domain.hpp"

#include <cmath>
#include <queue>

#include "vt25d/error.hpp"

namespace vt25 {

void PhysicalConstants::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("speed of sound c must be > 0");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ValidationError("air density rho must be > 0");
  if (!(mu >= 0.0 && mu <= 1.0)) throw ValidationError("wall admittance mu must be in [0, 1]");
}

namespace {

std::string at(int i, int j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

}  // namespace

SimDomain::SimDomain(GridSpec grid, CellRaster cells, DepthMap depth, PhysicalConstants constants)
    : grid_(grid), cells_(std::move(cells)), depth_(std::move(depth)), constants_(constants) {
  grid_.validate();
  constants_.validate();
  const int nx = grid_.nx;
  const int ny = grid_.ny;
  auto same = [&](const auto& g) { return g.nx() == nx && g.ny() == ny; };
  if (!same(cells_) || !same(depth_.d_bar) || !same(depth_.d_x) || !same(depth_.d_y)) {
    throw ValidationError("cell raster and depth map must match the grid dimensions");
  }

  bool has_excitation = false;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const CellType t = cells_(i, j);
      if (depth_.d_bar(i, j) < 0.0 || depth_.d_x(i, j) < 0.0 || depth_.d_y(i, j) < 0.0) {
        throw ValidationError("negative depth at " + at(i, j));
      }
      if (t == CellType::Excitation) has_excitation = true;
      if (!is_inside(t)) continue;
      if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) {
        throw ValidationError("tube cell on the grid border at " + at(i, j));
      }
      for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        if (cells_(i + di, j + dj) == CellType::Outside) {
          throw ValidationError("tube cell " + at(i, j) + " touches an Outside cell");
        }
      }
      if (t == CellType::Air && !(depth_.d_bar(i, j) > 0.0)) {
        throw ValidationError("zero d_bar in Air cell " + at(i, j));
      }
    }
  }

  if (!has_excitation) return;
  Grid2<char> seen(nx, ny, 0);
  std::queue<std::pair<int, int>> todo;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (cells_(i, j) == CellType::Excitation) {
        seen(i, j) = 1;
        todo.emplace(i, j);
      }
    }
  }
  while (!todo.empty()) {
    auto [i, j] = todo.front();
    todo.pop();
    for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      const int a = i + di;
      const int b = j + dj;
      if (!cells_.contains(a, b) || seen(a, b) || !is_inside(cells_(a, b))) continue;
      seen(a, b) = 1;
      todo.emplace(a, b);
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (cells_(i, j) == CellType::Air && !seen(i, j)) {
        throw ValidationError("Air cell " + at(i, j) + " is sealed off from the excitation");
      }
    }
  }
}

SimDomain assemble_domain(const AreaFunction& af, const GridSpec& grid,
                          const DomainOptions& options) {
  options.constants.validate();
  const AreaFunction tube = options.match_circular_modes ? scale_radii(af) : af;
  CellRaster cells = build_contour(tube, grid);
  DepthStages stages =
      build_depth_stages(tube, cells, grid, options.min_depth, options.open_space_depth);
  SimDomain domain(grid, std::move(cells), std::move(stages.map), options.constants);
  domain.set_layout(TubeLayout::for_tube(tube, grid));
  for (auto& w : stages.warnings) domain.add_warning(std::move(w));
  return domain;
}

}  // namespace vt25
