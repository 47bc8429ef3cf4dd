#pragma once

#include <cmath>
#include <filesystem>
#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace vt25 {

struct AreaSample {
  double position;  // m from the glottis
  double area;      // m^2
};

/// Cross-sectional area along a straight tube, sampled at strictly
/// increasing axial positions starting at 0.
class AreaFunction {
 public:
  // Validates: >= 2 samples, first position 0, positions strictly
  // increasing, every area > 0.
  explicit AreaFunction(std::vector<AreaSample> samples, std::string name = {});

  std::span<const AreaSample> samples() const noexcept { return samples_; }
  const std::string& name() const noexcept { return name_; }
  double length() const noexcept { return samples_.back().position; }

  /// Section radius at axial position s, linear in radius between samples
  /// and clamped to the end samples outside [0, length].
  double radius_at(double s) const noexcept;
  double area_at(double s) const noexcept;
  double max_radius() const noexcept;

 private:
  std::vector<AreaSample> samples_;
  std::string name_;
};

inline double radius_of_area(double area) { return std::sqrt(area / std::numbers::pi); }

/// Radius factor matching the first non-planar mode of a circular section
/// in the mid-sagittal plane.
inline constexpr double kCircularModeScale = 0.5 * std::numbers::pi / 1.84;
inline constexpr double kCircularModeAreaScale = kCircularModeScale * kCircularModeScale;

/// Two whitespace-separated columns per line: position (m), area (m^2).
/// Blank lines and lines starting with '#' are skipped.
AreaFunction parse_area_function(std::istream& in, std::string name = {});
AreaFunction load_area_function(const std::filesystem::path& path);
void write_area_function(std::ostream& out, const AreaFunction& af);

/// Multiplies every radius by kCircularModeScale. Not idempotent.
AreaFunction scale_radii(const AreaFunction& af);

}  // namespace vt25
