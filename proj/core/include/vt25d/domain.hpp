#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vt25d/area_function.hpp"
#include "vt25d/geometry.hpp"
#include "vt25d/grid.hpp"

namespace vt25 {

struct PhysicalConstants {
  double c = 350.0;   // m/s
  double rho = 1.14;  // kg/m^3
  double mu = 0.005;  // normalised wall admittance, [0, 1]

  void validate() const;
};

/// Immutable problem definition handed to the solver.
class SimDomain {
 public:
  // Validates grid/raster/depth agreement, constants, closure of the air
  // region (no Air cell on the border or next to an Outside cell), positive
  // d_bar on every Air cell and, when excitation cells exist, that every
  // Air cell is reachable from them.
  SimDomain(GridSpec grid, CellRaster cells, DepthMap depth, PhysicalConstants constants);

  const GridSpec& grid() const noexcept { return grid_; }
  const CellRaster& cells() const noexcept { return cells_; }
  const DepthMap& depth() const noexcept { return depth_; }
  const PhysicalConstants& constants() const noexcept { return constants_; }

  /// Tube layout when the domain was assembled from an area function.
  const std::optional<TubeLayout>& layout() const noexcept { return layout_; }
  void set_layout(TubeLayout layout) { layout_ = layout; }

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

 private:
  GridSpec grid_;
  CellRaster cells_;
  DepthMap depth_;
  PhysicalConstants constants_;
  std::optional<TubeLayout> layout_;
  std::vector<std::string> warnings_;
};

struct DomainOptions {
  PhysicalConstants constants{};
  std::optional<double> min_depth{};
  double open_space_depth = kDefaultOpenSpaceDepth;
  bool match_circular_modes = true;  // apply scale_radii before contouring
};

SimDomain assemble_domain(const AreaFunction& af, const GridSpec& grid,
                          const DomainOptions& options = {});

}  // namespace vt25
