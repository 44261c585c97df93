#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <voronoi_tailor/region.hpp>

using namespace vtailor;

#ifndef VT_TEST_DATA
#define VT_TEST_DATA "tests/data"
#endif

namespace {

RegionFile parse(const std::string &text) {
  std::istringstream in(text);
  return parse_region(in, "mem");
}

void expect_same(const Region &a, const Region &b) {
  ASSERT_EQ(a.part_count(), b.part_count());
  for (std::size_t j = 0; j < a.part_count(); ++j) EXPECT_EQ(a.parts()[j].vertices(), b.parts()[j].vertices()) << "part " << j;
}

} // namespace

TEST(Region, PresetAreas) {
  const Region a = builtin("letter_a");
  EXPECT_EQ(a.part_count(), 16u);
  EXPECT_NEAR(a.area(), 232.5318, 1e-3);
  const Region k = builtin("key");
  EXPECT_EQ(k.part_count(), 22u);
  EXPECT_NEAR(k.area(), 88.15209, 1e-4);
}

TEST(Region, RegularPolygonVertices) {
  const Region r = builtin("regular_polygon");
  ASSERT_EQ(r.part_count(), 1u);
  const auto &v = r.parts()[0].vertices();
  ASSERT_EQ(v.size(), 20u);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_NEAR(norm(v[i]), 1.0, 1e-15);
    EXPECT_NEAR(std::atan2(v[i].y, v[i].x), std::remainder(2 * std::numbers::pi * static_cast<double>(i) / 20, 2 * std::numbers::pi), 1e-14);
  }
}

TEST(Region, HexagonIsConvexSinglePart) {
  const Region h = builtin("convex_hexagon");
  EXPECT_TRUE(h.is_convex());
  EXPECT_EQ(h.parts()[0].size(), 6u);
}

TEST(Region, UnknownPreset) { EXPECT_THROW(builtin("america"), Error); }

TEST(Region, ScaleExamples) {
  EXPECT_NEAR(builtin("regular_polygon").scaled(5.70312).area(), 100.510, 1e-3);
  EXPECT_NEAR(builtin("letter_a").scaled(0.65625).area(), 100.143, 1e-3);
  const Region a = builtin("key");
  expect_same(a.scaled(1.0), a);
  EXPECT_THROW(a.scaled(0.0), GeometryError);
  EXPECT_THROW(a.scaled(-2.0), GeometryError);
}

TEST(Region, ScaleMultipliesAreaBySquare) {
  const Region a = builtin("letter_a");
  EXPECT_NEAR(a.scaled(3.25).area(), a.area() * 3.25 * 3.25, 1e-10 * a.area());
}

TEST(Region, SuggestScale) {
  const Region sq100(std::vector<ConvexPolygon>{ConvexPolygon({{0, 0}, {10, 0}, {10, 10}, {0, 10}})});
  EXPECT_EQ(suggest_scale(sq100, 100), 1.0);
  const Region sq25(std::vector<ConvexPolygon>{ConvexPolygon({{0, 0}, {5, 0}, {5, 5}, {0, 5}})});
  EXPECT_EQ(suggest_scale(sq25, 100), 2.0);
  EXPECT_EQ(suggest_scale(builtin("regular_polygon"), 100), 5.6875);
  EXPECT_THROW(suggest_scale(sq25, 0), Error);
}

TEST(Region, StoredFactorsReproduceTabulatedAreas) {
  for (const auto &name : preset_names()) {
    const RegionPreset p = preset(name);
    ASSERT_EQ(p.table_scale.size(), p.table_area.size()) << name;
    for (const auto &[kappa, factor] : p.table_scale) {
      const double area = p.region.area() * factor * factor;
      const double want = p.table_area.at(kappa);
      // 5 significant digits
      const double unit = std::pow(10.0, std::floor(std::log10(want)) - 4);
      EXPECT_NEAR(area, want, 0.5 * unit) << name << " kappa=" << kappa;
      // All factors are multiples of 1/128.
      EXPECT_EQ(factor * 128, std::round(factor * 128)) << name;
    }
  }
}

TEST(Region, BoundaryNormalsAreUnitAndOutward) {
  for (const auto &name : preset_names()) {
    const Region r = builtin(name);
    double len = 0.0;
    for (const auto &s : r.boundary()) {
      EXPECT_NEAR(norm(s.outward_normal), 1.0, 1e-12);
      const Point mid = (s.from + s.to) * 0.5;
      const double h = 1e-6;
      EXPECT_FALSE(r.contains(mid + s.outward_normal * h)) << name;
      EXPECT_TRUE(r.contains(mid - s.outward_normal * h)) << name;
      len += distance(s.from, s.to);
    }
    EXPECT_GT(len, 0.0);
  }
}

TEST(Region, SeamsAreNotBoundary) {
  // Two unit squares side by side: the shared edge x=1 is a seam.
  const Region r(std::vector<ConvexPolygon>{ConvexPolygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}),
                                            ConvexPolygon({{1, 0}, {2, 0}, {2, 1}, {1, 1}})});
  double len = 0.0;
  for (const auto &s : r.boundary()) {
    len += distance(s.from, s.to);
    EXPECT_FALSE(std::abs(s.from.x - 1) < 1e-12 && std::abs(s.to.x - 1) < 1e-12);
  }
  EXPECT_NEAR(len, 6.0, 1e-12);
  EXPECT_EQ(r.boundary_segment_at(0, 1, {1, 0.5}), -1);
}

TEST(Region, OverlappingPartsRejected) {
  EXPECT_THROW(Region(std::vector<ConvexPolygon>{ConvexPolygon({{0, 0}, {2, 0}, {2, 2}, {0, 2}}),
                                                 ConvexPolygon({{1, 1}, {3, 1}, {3, 3}, {1, 3}})}),
               GeometryError);
}

TEST(Region, ParseUnitSquare) {
  const auto f = parse("1\n4\n0 0\n1 0\n1 1\n0 1\n");
  EXPECT_EQ(f.region.part_count(), 1u);
  EXPECT_DOUBLE_EQ(f.region.area(), 1.0);
  EXPECT_TRUE(f.warnings.empty());
}

TEST(Region, ParseCommentsAndClockwise) {
  const auto f = parse("# square\n1\n4   # vertices\n0 0\n0 1\n1 1\n1 0\n");
  EXPECT_DOUBLE_EQ(f.region.area(), 1.0);
  ASSERT_EQ(f.warnings.size(), 1u);
  EXPECT_NE(f.warnings[0].find("polygon 1"), std::string::npos);
}

TEST(Region, ParseErrorsNameThePolygon) {
  try {
    parse("2\n3\n0 0\n1 0\n0 1\nfour\n1 1\n2 1\n2 2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 6);
    EXPECT_NE(std::string(e.what()).find("polygon 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("vertex count"), std::string::npos);
  }
  try {
    parse("1\n4\n0 0\n1 0\n1 1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("polygon 1"), std::string::npos);
  }
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("1\n3\n0 0\n1 x\n0 1\n"), ParseError);
  EXPECT_THROW(parse("1\n3\n0 0\n1 0\n0 1\n7 7\n"), ParseError);
  EXPECT_THROW(parse("1\n2\n0 0\n1 0\n"), ParseError);
  // Overlap detection failure surfaces as a parse error too.
  EXPECT_THROW(parse("2\n4\n0 0\n2 0\n2 2\n0 2\n4\n1 1\n3 1\n3 3\n1 3\n"), ParseError);
}

TEST(Region, LoadedFilesEqualBuiltins) {
  for (const char *name : {"letter_a", "key", "convex_hexagon"}) {
    const Region loaded = load_region(std::string(VT_TEST_DATA) + "/" + name + ".region");
    expect_same(loaded, builtin(name));
    EXPECT_EQ(loaded.area(), builtin(name).area());
  }
}

TEST(Region, WriteThenParseRoundTrips) {
  for (const auto &name : preset_names()) {
    const Region r = builtin(name);
    std::ostringstream out;
    write_region(out, r);
    expect_same(parse(out.str()).region, r);
  }
}

TEST(Region, ResolveFallsBackToPath) {
  EXPECT_EQ(resolve_region("key").part_count(), 22u);
  EXPECT_EQ(resolve_region(std::string(VT_TEST_DATA) + "/key.region").part_count(), 22u);
  EXPECT_THROW(resolve_region("/nonexistent/region.txt"), Error);
}
