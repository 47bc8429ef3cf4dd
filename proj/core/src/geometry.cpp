#include "vt25d/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "vt25d/error.hpp"

namespace vt25 {

std::string_view to_string(CellType type) noexcept {
  switch (type) {
    case CellType::Air: return "air";
    case CellType::Wall: return "wall";
    case CellType::Excitation: return "excitation";
    case CellType::Open: return "open";
    case CellType::Outside: return "outside";
  }
  return "?";
}

void GridSpec::validate() const {
  if (!(ds > 0.0) || !std::isfinite(ds)) throw ValidationError("grid spacing ds must be > 0");
  if (nx < 3 || ny < 3) {
    throw ValidationError("grid must be at least 3x3, got " + std::to_string(nx) + "x" +
                          std::to_string(ny));
  }
}

TubeLayout TubeLayout::for_tube(const AreaFunction& af, const GridSpec& grid) {
  TubeLayout layout;
  layout.excitation_column = 1;
  // Acoustic length runs from the excitation edge to the Open cell centre:
  // (air_columns + 1/2) * ds.
  const double cells = af.length() / grid.ds - 0.5;
  layout.air_columns = std::max(1, static_cast<int>(std::lround(cells)));
  layout.open_column = layout.excitation_column + layout.air_columns + 1;
  layout.axis_y = grid.ny / 2.0;
  return layout;
}

namespace {

// Rows of a grid with `ny` rows that fall inside a section of radius r.
template <typename F>
void for_rows_inside(const TubeLayout& layout, int ny, double ds, double r, F&& f) {
  for (int j = 0; j < ny; ++j) {
    const double y = layout.axis_offset(j, ds);
    if (std::abs(y) < r || std::abs(y) <= 0.5 * ds) f(j);
  }
}

int required_rows(double r, double ds) {
  for (int n = 3;; ++n) {
    TubeLayout probe;
    probe.axis_y = n / 2.0;
    bool fits = true;
    for_rows_inside(probe, n, ds, r, [&](int j) {
      if (j == 0 || j == n - 1) fits = false;
    });
    if (fits) return n;
  }
}

}  // namespace

CellRaster build_contour(const AreaFunction& af, const GridSpec& grid) {
  grid.validate();
  const TubeLayout layout = TubeLayout::for_tube(af, grid);
  const int required_nx = layout.open_column + 2;
  const int required_ny = required_rows(af.max_radius(), grid.ds);
  if (grid.nx < required_nx || grid.ny < required_ny) {
    throw DomainTooSmallError(std::max(required_nx, 3), required_ny, grid.nx, grid.ny);
  }

  CellRaster cells(grid.nx, grid.ny, CellType::Outside);
  for (int i = layout.excitation_column; i <= layout.open_column; ++i) {
    const double s = std::clamp(layout.axial_position(i, grid.ds), 0.0, af.length());
    const double r = af.radius_at(s);
    const CellType type = i == layout.excitation_column ? CellType::Excitation
                          : i == layout.open_column     ? CellType::Open
                                                        : CellType::Air;
    for_rows_inside(layout, grid.ny, grid.ds, r, [&](int j) { cells(i, j) = type; });
  }

  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (cells(i, j) != CellType::Outside) continue;
      const bool touches = (i > 0 && is_inside(cells(i - 1, j))) ||
                           (i + 1 < grid.nx && is_inside(cells(i + 1, j))) ||
                           (j > 0 && is_inside(cells(i, j - 1))) ||
                           (j + 1 < grid.ny && is_inside(cells(i, j + 1)));
      if (touches) cells(i, j) = CellType::Wall;
    }
  }
  return cells;
}

double chord_depth(double radius, double y) noexcept {
  return 2.0 * std::sqrt(std::max(0.0, radius * radius - y * y));
}

DepthStages build_depth_stages(const AreaFunction& af, const CellRaster& cells,
                               const GridSpec& grid, std::optional<double> min_depth,
                               double open_space_depth) {
  grid.validate();
  if (cells.nx() != grid.nx || cells.ny() != grid.ny) {
    throw ValidationError("cell raster does not match grid dimensions");
  }
  if (!(open_space_depth > 0.0)) throw ValidationError("open_space_depth must be > 0");
  if (min_depth && !(*min_depth > 0.0)) throw ValidationError("min_depth must be > 0");

  const TubeLayout layout = TubeLayout::for_tube(af, grid);
  const int nx = grid.nx;
  const int ny = grid.ny;
  const double ds = grid.ds;
  const double length = af.length();
  auto radius = [&](double column) {
    return af.radius_at(std::clamp(layout.axial_position(column, ds), 0.0, length));
  };

  DepthStages st;
  st.raw_x = Grid2<double>(nx, ny);
  st.raw_y = Grid2<double>(nx, ny);

  double smallest = 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const CellType t = cells(i, j);
      if (t == CellType::Wall) continue;  // zero
      if (t == CellType::Outside) {
        st.raw_x(i, j) = st.raw_y(i, j) = open_space_depth;
        continue;
      }
      if ((i == 0 || j == 0 || i == nx - 1 || j == ny - 1)) {
        throw ValidationError("tube cell on the grid border at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
      }
      const double dx = chord_depth(radius(i + 0.5), layout.axis_offset(j, ds));
      const double dy = chord_depth(radius(i), layout.axis_offset(j + 0.5, ds));
      st.raw_x(i, j) = dx;
      st.raw_y(i, j) = dy;
      for (double d : {dx, dy}) {
        if (d > 0.0 && (smallest == 0.0 || d < smallest)) smallest = d;
      }
    }
  }
  if (smallest == 0.0) throw ValidationError("depth map has no nonzero depth inside the tube");
  st.smallest_raw_depth = smallest;

  st.smooth_x = st.raw_x;
  st.smooth_y = st.raw_y;
  for (int j = 1; j < ny - 1; ++j) {
    for (int i = 1; i < nx - 1; ++i) {
      if (!is_inside(cells(i, j))) continue;
      st.smooth_x(i, j) = (st.raw_x(i, j) + st.raw_x(i + 1, j)) / 2.0;
      st.smooth_y(i, j) = (st.raw_y(i, j) + st.raw_y(i, j + 1)) / 2.0;
    }
  }

  st.bar_unclamped = Grid2<double>(nx, ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const CellType t = cells(i, j);
      if (t == CellType::Outside) {
        st.bar_unclamped(i, j) = open_space_depth;
      } else if (is_inside(t)) {
        st.bar_unclamped(i, j) = (st.smooth_x(i, j) + st.smooth_x(i - 1, j) +
                                  st.smooth_y(i, j) + st.smooth_y(i, j - 1)) /
                                 4.0;
      }
    }
  }

  const double floor = min_depth.value_or(kDefaultMinDepthFraction * smallest);
  if (floor >= smallest) {
    st.warnings.push_back("min_depth " + std::to_string(floor) +
                          " m is not below the smallest nonzero depth " +
                          std::to_string(smallest) + " m; use at least 10x smaller");
  }

  DepthMap& map = st.map;
  map.d_bar = st.bar_unclamped;
  map.d_x = st.smooth_x;
  map.d_y = st.smooth_y;
  map.min_depth = floor;
  map.open_space_depth = open_space_depth;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!is_inside(cells(i, j))) continue;
      map.d_bar(i, j) = std::max(map.d_bar(i, j), floor);
      map.d_x(i, j) = std::max(map.d_x(i, j), floor);
      map.d_y(i, j) = std::max(map.d_y(i, j), floor);
    }
  }
  return st;
}

DepthMap build_depth_map_from_mesh(const TriangleMesh&, const CellRaster&, const GridSpec&) {
  throw NotImplementedError(
      "depth extraction from 3D meshes is not implemented; use an area function");
}

void write_depth_csv(std::ostream& out, const GridSpec& grid, const DepthMap& depth) {
  out << "x,y,d_bar,d_x,d_y\n";
  char buf[160];
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      char* p = buf;
      char* end = buf + sizeof buf;
      for (double v : {grid.x_of(i), grid.y_of(j), depth.d_bar(i, j), depth.d_x(i, j),
                       depth.d_y(i, j)}) {
        if (p != buf) *p++ = ',';
        p = std::to_chars(p, end, v).ptr;
      }
      *p++ = '\n';
      out.write(buf, p - buf);
    }
  }
}

}  // namespace vt25
