#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vt25d/area_function.hpp"
#include "vt25d/grid.hpp"

namespace vt25 {

enum class CellType : std::uint8_t { Air, Wall, Excitation, Open, Outside };

std::string_view to_string(CellType type) noexcept;

/// Cells whose pressure is part of the acoustic field (tube interior
/// including the excitation and mouth planes).
inline bool is_inside(CellType t) noexcept {
  return t == CellType::Air || t == CellType::Excitation || t == CellType::Open;
}

using CellRaster = Grid2<CellType>;

/// Placement of a straight tube on a grid. The tube axis runs along x on
/// the horizontal midline; the excitation column sits one cell in from the
/// left border and the mouth (Open) column closes the tube.
///
/// The velocity edge between the excitation column and the first Air
/// column is axial position 0; the Open column's centre is the mouth.
struct TubeLayout {
  int excitation_column = 1;
  int air_columns = 0;
  int open_column = 0;
  double axis_y = 0.0;  // in cell units from the grid's bottom edge

  static TubeLayout for_tube(const AreaFunction& af, const GridSpec& grid);

  /// Axial position (m) of a continuous column coordinate (cell centres at
  /// integer values).
  double axial_position(double column, double ds) const noexcept {
    return (column - excitation_column - 0.5) * ds;
  }
  /// Signed distance (m) from the axis of a continuous row coordinate.
  double axis_offset(double row, double ds) const noexcept {
    return (row + 0.5 - axis_y) * ds;
  }
  int axis_row() const noexcept { return static_cast<int>(axis_y); }
  double acoustic_length(double ds) const noexcept { return (air_columns + 0.5) * ds; }
};

/// Mid-sagittal contour of the tube: cells whose centres lie strictly
/// within the section radius are inside, the 4-neighbour ring around them
/// is Wall, everything else Outside. The row(s) nearest the axis are always
/// kept inside so the airway never closes. Throws DomainTooSmallError.
CellRaster build_contour(const AreaFunction& af, const GridSpec& grid);

/// Chord length of a circle of radius r at distance y from its centre;
/// 0 when the line misses the circle.
double chord_depth(double radius, double y) noexcept;

struct DepthMap {
  Grid2<double> d_bar;  // cell centres
  Grid2<double> d_x;    // edge (i + 1/2, j)
  Grid2<double> d_y;    // edge (i, j + 1/2)
  double min_depth = 0.0;
  double open_space_depth = 0.05;
};

/// Every intermediate stage of the depth-map extraction, kept for
/// inspection and tests.
struct DepthStages {
  Grid2<double> raw_x, raw_y;        // chords at the edge sample points
  Grid2<double> smooth_x, smooth_y;  // neighbour-averaged edges
  Grid2<double> bar_unclamped;       // 4-average at cell centres
  double smallest_raw_depth = 0.0;   // smallest nonzero raw chord inside
  DepthMap map;                      // clamped result
  std::vector<std::string> warnings;
};

inline constexpr double kDefaultOpenSpaceDepth = 0.05;
inline constexpr double kDefaultMinDepthFraction = 0.01;

/// Depth map from an area function and the contour built from it.
/// `min_depth` defaults to kDefaultMinDepthFraction of the smallest nonzero
/// raw chord. Throws ValidationError for min_depth <= 0 or
/// open_space_depth <= 0.
DepthStages build_depth_stages(const AreaFunction& af, const CellRaster& cells,
                               const GridSpec& grid, std::optional<double> min_depth = {},
                               double open_space_depth = kDefaultOpenSpaceDepth);

inline DepthMap build_depth_map(const AreaFunction& af, const CellRaster& cells,
                                const GridSpec& grid, std::optional<double> min_depth = {},
                                double open_space_depth = kDefaultOpenSpaceDepth) {
  return build_depth_stages(af, cells, grid, min_depth, open_space_depth).map;
}

/// Placeholder for depth extraction by ray casting through a triangulated
/// 3D tube. Always throws NotImplementedError.
struct TriangleMesh {
  std::vector<double> vertices;
  std::vector<std::uint32_t> indices;
};
DepthMap build_depth_map_from_mesh(const TriangleMesh& mesh, const CellRaster& cells,
                                   const GridSpec& grid);

/// CSV with header `x,y,d_bar,d_x,d_y`, row-major, x/y in metres.
void write_depth_csv(std::ostream& out, const GridSpec& grid, const DepthMap& depth);

}  // namespace vt25
