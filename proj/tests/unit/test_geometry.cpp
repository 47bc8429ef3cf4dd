#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "vt25d/area_function.hpp"
#include "vt25d/domain.hpp"
#include "vt25d/error.hpp"
#include "vt25d/geometry.hpp"

using namespace vt25;

namespace {

AreaFunction parse(const std::string& text) {
  std::istringstream in(text);
  return parse_area_function(in);
}

AreaFunction uniform(double radius, double length) {
  const double a = std::numbers::pi * radius * radius;
  return AreaFunction({{0.0, a}, {length, a}});
}

// hand formula, kept separate from the library's chord_depth
double chord(double r, double y) { return 2.0 * std::sqrt(std::max(0.0, r * r - y * y)); }

}  // namespace

TEST_CASE("parse_area_function accepts the two-column format") {
  const AreaFunction a = parse("0.0 2.0e-4\n0.175 2.0e-4\n");
  CHECK(a.samples().size() == 2);
  CHECK(a.length() == doctest::Approx(0.175));
  CHECK(a.area_at(0.1) == doctest::Approx(2.0e-4));

  const AreaFunction b = parse("# comment\n\n0.0 1e-4\n0.05 3e-4\n   # indented\n0.17 1e-4\n");
  CHECK(b.samples().size() == 3);
  CHECK(b.samples()[1].area == 3e-4);
}

TEST_CASE("parse_area_function reports malformed lines with their number") {
  try {
    parse("0.0 1e-4\n0.1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse("0.0 1e-4\n0.1 abc\n"), ParseError);
  CHECK_THROWS_AS(parse("0.0 1e-4\n0.1 1e-4 7\n"), ParseError);
}

TEST_CASE("area function invariants are enforced") {
  CHECK_THROWS_AS(parse("0.05 1e-4\n0.0 1e-4\n"), ValidationError);
  CHECK_THROWS_AS(parse("0.0 1e-4\n0.05 1e-4\n0.05 1e-4\n"), ValidationError);
  CHECK_THROWS_AS(parse("0.0 1e-4\n0.1 0\n"), ValidationError);
  CHECK_THROWS_AS(parse("0.0 1e-4\n0.1 -1e-4\n"), ValidationError);
  CHECK_THROWS_AS(parse("0.0 1e-4\n"), ValidationError);
  CHECK_THROWS_AS(parse(""), ValidationError);
}

TEST_CASE("radius is interpolated linearly in radius") {
  const double r0 = 0.005, r1 = 0.010;
  const AreaFunction a({{0.0, std::numbers::pi * r0 * r0}, {0.1, std::numbers::pi * r1 * r1}});
  CHECK(a.radius_at(0.05) == doctest::Approx(0.0075));
  CHECK(a.radius_at(-1.0) == doctest::Approx(r0));
  CHECK(a.radius_at(5.0) == doctest::Approx(r1));
  CHECK(a.max_radius() == doctest::Approx(r1));
}

TEST_CASE("write/parse round trip") {
  const AreaFunction a = parse("0 1e-4\n0.05 3.3333333333e-4\n0.17 1.23456789e-4\n");
  std::ostringstream out;
  write_area_function(out, a);
  const AreaFunction b = parse(out.str());
  REQUIRE(b.samples().size() == a.samples().size());
  for (std::size_t k = 0; k < a.samples().size(); ++k) {
    CHECK(b.samples()[k].position == a.samples()[k].position);
    CHECK(b.samples()[k].area == a.samples()[k].area);
  }
}

TEST_CASE("scale_radii multiplies areas by k^2 and keeps positions") {
  const double k = 0.5 * std::numbers::pi / 1.84;
  CHECK(k == doctest::Approx(0.853694).epsilon(1e-6));
  const AreaFunction a = parse("0 2.0e-4\n0.0333 1e-4\n0.175 2.0e-4\n");
  const AreaFunction s = scale_radii(a);
  CHECK(s.samples()[0].area == doctest::Approx(1.457588e-4).epsilon(1e-6));
  for (std::size_t i = 0; i < a.samples().size(); ++i) {
    CHECK(s.samples()[i].position == a.samples()[i].position);
    CHECK(s.samples()[i].area == a.samples()[i].area * (k * k));
  }
  const AreaFunction twice = scale_radii(s);
  CHECK(twice.samples()[0].area != s.samples()[0].area);
  CHECK(twice.samples()[0].area == doctest::Approx(a.samples()[0].area * std::pow(k, 4)));
}

TEST_CASE("build_contour: r = 2 ds gives four Air rows") {
  const double ds = 0.74e-3;
  const GridSpec g{ds, 40, 12, 0, 0};
  const CellRaster cells = build_contour(uniform(1.48e-3, 0.02), g);
  const TubeLayout layout = TubeLayout::for_tube(uniform(1.48e-3, 0.02), g);
  for (int i = layout.excitation_column + 1; i < layout.open_column; ++i) {
    int air = 0;
    for (int j = 0; j < g.ny; ++j) air += cells(i, j) == CellType::Air;
    CHECK(air == 4);
  }
  // Centres at +-0.37 and +-1.11 mm from the axis.
  for (int j = 0; j < g.ny; ++j) {
    const double y = layout.axis_offset(j, ds);
    const bool inside = std::abs(y) < 1.48e-3;
    CHECK((cells(5, j) == CellType::Air) == inside);
  }
}

TEST_CASE("build_contour cell classes") {
  const GridSpec g{0.01, 12, 8, 0, 0};
  const CellRaster c = build_contour(uniform(0.02, 0.085), g);
  const char* expected[] = {
      "oooooooooooo",  // j = 7
      "oWWWWWWWWWWo",  //
      "WEAAAAAAAAOW",  //
      "WEAAAAAAAAOW",  //
      "WEAAAAAAAAOW",  //
      "WEAAAAAAAAOW",  //
      "oWWWWWWWWWWo",  //
      "oooooooooooo",  // j = 0
  };
  auto code = [](CellType t) {
    switch (t) {
      case CellType::Air: return 'A';
      case CellType::Wall: return 'W';
      case CellType::Excitation: return 'E';
      case CellType::Open: return 'O';
      case CellType::Outside: return 'o';
    }
    return '?';
  };
  for (int j = 0; j < 8; ++j) {
    for (int i = 0; i < 12; ++i) {
      CHECK(code(c(i, j)) == expected[7 - j][i]);
    }
  }
}

TEST_CASE("build_contour rejects a grid that is too small") {
  const GridSpec tiny{0.74e-3, 3, 3, 0, 0};
  try {
    build_contour(uniform(0.008, 0.175), tiny);
    FAIL("expected DomainTooSmallError");
  } catch (const DomainTooSmallError& e) {
    CHECK(e.required_nx() > 3);
    CHECK(e.required_ny() > 3);
    CHECK(std::string(e.what()).find("nx") != std::string::npos);
  }
}

TEST_CASE("chord_depth examples") {
  CHECK(chord_depth(0.01, 0.0) == doctest::Approx(0.02));
  CHECK(chord_depth(0.01, 0.006) == doctest::Approx(0.016));
  CHECK(chord_depth(0.01, 0.012) == 0.0);
}

TEST_CASE("depth map: hand-computed 12x8 fixture") {
  const GridSpec g{0.01, 12, 8, 0, 0};
  const AreaFunction af = uniform(0.02, 0.085);
  const CellRaster c = build_contour(af, g);
  const DepthStages st = build_depth_stages(af, c, g);

  // raw chords, x edges at the row centres
  const double x_outer = chord(0.02, 0.015);  // 2.645751 cm
  const double x_inner = chord(0.02, 0.005);  // 3.872983 cm
  CHECK(x_outer == doctest::Approx(0.02645751));
  CHECK(x_inner == doctest::Approx(0.03872983));
  for (int i = 1; i <= 10; ++i) {
    CHECK(st.raw_x(i, 2) == doctest::Approx(x_outer).epsilon(1e-14));
    CHECK(st.raw_x(i, 3) == doctest::Approx(x_inner).epsilon(1e-14));
    CHECK(st.raw_x(i, 4) == doctest::Approx(x_inner).epsilon(1e-14));
    CHECK(st.raw_x(i, 5) == doctest::Approx(x_outer).epsilon(1e-14));
  }
  // y edges sit half a cell up: y = -1, 0, +1, +2 cm
  const double ry[] = {chord(0.02, 0.01), 0.04, chord(0.02, 0.01), 0.0};
  for (int j = 2; j <= 5; ++j) CHECK(st.raw_y(5, j) == doctest::Approx(ry[j - 2]).epsilon(1e-14));

  // wall zeros, outside constant
  for (int j = 0; j < 8; ++j) {
    for (int i = 0; i < 12; ++i) {
      if (c(i, j) == CellType::Wall) {
        CHECK(st.map.d_bar(i, j) == 0.0);
        CHECK(st.map.d_x(i, j) == 0.0);
        CHECK(st.map.d_y(i, j) == 0.0);
      }
      if (c(i, j) == CellType::Outside) {
        CHECK(st.map.d_bar(i, j) == 0.05);
        CHECK(st.map.d_x(i, j) == 0.05);
        CHECK(st.map.d_y(i, j) == 0.05);
      }
    }
  }

  // step 5: each inside edge averaged with its +1 neighbour
  const double sy[] = {0.0373205081, 0.0373205081, 0.0173205081, 0.0};
  for (int j = 2; j <= 5; ++j) CHECK(st.smooth_y(5, j) == doctest::Approx(sy[j - 2]));
  CHECK(st.smooth_x(10, 3) == doctest::Approx(x_inner / 2.0));  // Wall to the right
  for (int j = 1; j < 7; ++j) {
    for (int i = 1; i < 11; ++i) {
      if (!is_inside(c(i, j))) continue;
      CHECK(st.smooth_x(i, j) == (st.raw_x(i, j) + st.raw_x(i + 1, j)) / 2.0);
      CHECK(st.smooth_y(i, j) == (st.raw_y(i, j) + st.raw_y(i, j + 1)) / 2.0);
      // step 6
      CHECK(st.bar_unclamped(i, j) == (st.smooth_x(i, j) + st.smooth_x(i - 1, j) +
                                       st.smooth_y(i, j) + st.smooth_y(i, j - 1)) /
                                          4.0);
    }
  }
  CHECK(st.bar_unclamped(5, 3) == doctest::Approx((2 * x_inner + 2 * 0.0373205081) / 4));
  CHECK(st.bar_unclamped(5, 2) == doctest::Approx((2 * x_outer + 0.0373205081) / 4));

  // default floor: 1/100 of the smallest raw chord
  CHECK(st.smallest_raw_depth == doctest::Approx(x_outer));
  CHECK(st.map.min_depth == doctest::Approx(0.01 * x_outer));
  CHECK(st.map.d_y(5, 5) == st.map.min_depth);
}

TEST_CASE("depth map clamp floor") {
  const GridSpec g{0.01, 12, 8, 0, 0};
  const AreaFunction af = uniform(0.02, 0.085);
  const CellRaster c = build_contour(af, g);
  const double floor = 0.03;
  const DepthStages st = build_depth_stages(af, c, g, floor);
  CHECK(st.map.min_depth == floor);
  CHECK_FALSE(st.warnings.empty());  // 3 cm is above the smallest chord
  for (int j = 0; j < 8; ++j) {
    for (int i = 0; i < 12; ++i) {
      if (is_inside(c(i, j))) {
        CHECK(st.map.d_bar(i, j) == std::max(st.bar_unclamped(i, j), floor));
        CHECK(st.map.d_x(i, j) == std::max(st.smooth_x(i, j), floor));
        CHECK(st.map.d_y(i, j) == std::max(st.smooth_y(i, j), floor));
      } else if (c(i, j) == CellType::Wall) {
        CHECK(st.map.d_bar(i, j) == 0.0);
      }
    }
  }
  CHECK(build_depth_stages(af, c, g).warnings.empty());
  CHECK_THROWS_AS(build_depth_stages(af, c, g, 0.0), ValidationError);
  CHECK_THROWS_AS(build_depth_stages(af, c, g, -1e-3), ValidationError);
}

TEST_CASE("depth map symmetry and monotone chords") {
  const GridSpec g{0.74e-3, 270, 46, 0, 0};
  const AreaFunction af(
      {{0.0, 1.0e-4}, {0.05, 4.0e-4}, {0.10, 0.8e-4}, {0.175, 2.5e-4}});
  const CellRaster c = build_contour(af, g);
  const DepthStages st = build_depth_stages(af, c, g);
  const TubeLayout layout = TubeLayout::for_tube(af, g);
  const int axis = layout.axis_row();
  // With an even ny the axis runs along a cell boundary: row axis-1-k mirrors axis+k.
  for (int i = 1; i < layout.open_column; ++i) {
    for (int k = 0; axis + k < g.ny && axis - 1 - k >= 0; ++k) {
      CHECK(st.raw_x(i, axis + k) == st.raw_x(i, axis - 1 - k));
      CHECK(st.map.d_x(i, axis + k) == st.map.d_x(i, axis - 1 - k));
    }
    for (int k = 1; axis + k < g.ny; ++k) {
      if (!is_inside(c(i, axis + k))) break;
      CHECK(st.raw_x(i, axis + k) <= st.raw_x(i, axis + k - 1));
    }
  }
}

TEST_CASE("area preservation for r >= 4 ds") {
  const double ds = 1e-3;
  for (double r : {4e-3, 5.5e-3, 7e-3, 10e-3}) {
    const int ny = static_cast<int>(2 * r / ds) + 6;
    const GridSpec g{ds, 20, ny + (ny % 2), 0, 0};
    const AreaFunction af = uniform(r, 0.015);
    const CellRaster c = build_contour(af, g);
    const DepthStages st = build_depth_stages(af, c, g);
    double sum = 0.0;
    for (int j = 0; j < g.ny; ++j) {
      if (is_inside(c(8, j))) sum += st.raw_x(8, j) * ds;
    }
    const double area = std::numbers::pi * r * r;
    CHECK(std::abs(sum - area) / area <= 0.05);
  }
}

TEST_CASE("mesh depth extraction is not implemented") {
  const GridSpec g{0.01, 12, 8, 0, 0};
  const CellRaster c = build_contour(uniform(0.02, 0.085), g);
  CHECK_THROWS_AS(build_depth_map_from_mesh(TriangleMesh{}, c, g), NotImplementedError);
}

TEST_CASE("depth csv export") {
  const GridSpec g{0.01, 12, 8, 0, 0};
  const AreaFunction af = uniform(0.02, 0.085);
  const DepthMap m = build_depth_map(af, build_contour(af, g), g);
  std::ostringstream out;
  write_depth_csv(out, g, m);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,y,d_bar,d_x,d_y");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 12 * 8);
}

TEST_CASE("assemble_domain") {
  const GridSpec g{};  // 270 x 45 at 0.74 mm
  const AreaFunction af = uniform(0.008, 0.175);
  const SimDomain d = assemble_domain(af, g);
  REQUIRE(d.layout().has_value());
  // rectangular Air region
  const auto& c = d.cells();
  const TubeLayout& L = *d.layout();
  int rows = -1;
  for (int i = L.excitation_column + 1; i < L.open_column; ++i) {
    int air = 0;
    for (int j = 0; j < g.ny; ++j) air += c(i, j) == CellType::Air;
    if (rows < 0) rows = air;
    CHECK(air == rows);
  }
  CHECK(rows > 0);

  // a tube of /a/-like extent (largest section ~ 9 cm^2 after scaling) still fits 270 x 45
  const AreaFunction big({{0.0, 0.6e-4}, {0.06, 0.3e-4}, {0.12, 9.0e-4}, {0.17, 5.0e-4}});
  CHECK_NOTHROW(assemble_domain(big, g));

  DomainOptions bad;
  bad.constants.mu = 1.5;
  CHECK_THROWS_AS(assemble_domain(af, g, bad), ValidationError);
  bad.constants = {};
  bad.constants.c = 0.0;
  CHECK_THROWS_AS(assemble_domain(af, g, bad), ValidationError);
}

TEST_CASE("SimDomain rejects sealed pockets and leaks") {
  const GridSpec g{0.01, 12, 8, 0, 0};
  const AreaFunction af = uniform(0.02, 0.085);
  CellRaster c = build_contour(af, g);
  DepthMap m = build_depth_map(af, c, g);
  {
    CellRaster cut = c;
    for (int j = 2; j <= 5; ++j) cut(5, j) = CellType::Wall;  // wall across the tube
    DepthMap mm = m;
    for (int j = 2; j <= 5; ++j) mm.d_bar(5, j) = mm.d_x(5, j) = mm.d_y(5, j) = 0.0;
    CHECK_THROWS_AS(SimDomain(g, cut, mm, {}), ValidationError);
  }
  {
    CellRaster leak = c;
    leak(5, 6) = CellType::Outside;
    CHECK_THROWS_AS(SimDomain(g, leak, m, {}), ValidationError);
  }
  {
    DepthMap neg = m;
    neg.d_x(3, 3) = -1e-3;
    CHECK_THROWS_AS(SimDomain(g, c, neg, {}), ValidationError);
  }
  CHECK_NOTHROW(SimDomain(g, c, m, {}));
}
