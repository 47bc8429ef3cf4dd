#include "vt25d/area_function.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "vt25d/error.hpp"

namespace vt25 {

AreaFunction::AreaFunction(std::vector<AreaSample> samples, std::string name)
    : samples_(std::move(samples)), name_(std::move(name)) {
  if (samples_.size() < 2) {
    throw ValidationError("area function needs at least 2 samples, got " +
                          std::to_string(samples_.size()));
  }
  if (samples_.front().position != 0.0) {
    throw ValidationError("area function must start at position 0");
  }
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    const auto& s = samples_[k];
    if (!std::isfinite(s.position) || !std::isfinite(s.area)) {
      throw ValidationError("area function sample " + std::to_string(k) + " is not finite");
    }
    if (s.area <= 0.0) {
      throw ValidationError("area function sample " + std::to_string(k) +
                            " has non-positive area");
    }
    if (k > 0 && s.position <= samples_[k - 1].position) {
      throw ValidationError("area function positions not increasing at sample " +
                            std::to_string(k));
    }
  }
}

double AreaFunction::radius_at(double s) const noexcept {
  if (s <= samples_.front().position) return radius_of_area(samples_.front().area);
  if (s >= samples_.back().position) return radius_of_area(samples_.back().area);
  auto hi = std::upper_bound(samples_.begin(), samples_.end(), s,
                             [](double v, const AreaSample& a) { return v < a.position; });
  auto lo = hi - 1;
  const double t = (s - lo->position) / (hi->position - lo->position);
  const double r0 = radius_of_area(lo->area);
  const double r1 = radius_of_area(hi->area);
  return r0 + t * (r1 - r0);
}

double AreaFunction::area_at(double s) const noexcept {
  if (s <= samples_.front().position) return samples_.front().area;
  if (s >= samples_.back().position) return samples_.back().area;
  auto hi = std::upper_bound(samples_.begin(), samples_.end(), s,
                             [](double v, const AreaSample& a) { return v < a.position; });
  if (hi->area == (hi - 1)->area) return hi->area;  // flat stretch, skip the radius round trip
  const double r = radius_at(s);
  return std::numbers::pi * r * r;
}

double AreaFunction::max_radius() const noexcept {
  double a = 0.0;
  for (const auto& s : samples_) a = std::max(a, s.area);
  return radius_of_area(a);
}

namespace {

bool parse_double(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

AreaFunction parse_area_function(std::istream& in, std::string name) {
  std::vector<AreaSample> samples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a >> b)) throw ParseError("expected two columns: position area", line_no);
    if (fields >> extra) throw ParseError("unexpected third column '" + extra + "'", line_no);
    AreaSample s{};
    if (!parse_double(a, s.position)) throw ParseError("bad position '" + a + "'", line_no);
    if (!parse_double(b, s.area)) throw ParseError("bad area '" + b + "'", line_no);
    samples.push_back(s);
  }
  return AreaFunction(std::move(samples), std::move(name));
}

AreaFunction load_area_function(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open area function file " + path.string());
  return parse_area_function(in, path.stem().string());
}

void write_area_function(std::ostream& out, const AreaFunction& af) {
  out << "# " << (af.name().empty() ? "area function" : af.name()) << "\n";
  out << "# position_m area_m2\n";
  char buf[64];
  for (const auto& s : af.samples()) {
    auto r1 = std::to_chars(buf, buf + sizeof buf, s.position);
    *r1.ptr++ = ' ';
    auto r2 = std::to_chars(r1.ptr, buf + sizeof buf, s.area);
    out.write(buf, r2.ptr - buf);
    out << '\n';
  }
}

AreaFunction scale_radii(const AreaFunction& af) {
  std::vector<AreaSample> scaled(af.samples().begin(), af.samples().end());
  for (auto& s : scaled) s.area *= kCircularModeAreaScale;
  return AreaFunction(std::move(scaled), af.name());
}

}  // namespace vt25
