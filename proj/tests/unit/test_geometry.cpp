#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dcsplit/geometry.hpp"
#include "dcsplit/rng.hpp"

using namespace dcsplit;
using std::numbers::pi;

namespace {

// n-gon inscribed in a circle of radius r: total chord length 2 n r sin(pi / n).
double ngon_length(std::size_t n, double r) { return 2.0 * static_cast<double>(n) * r * std::sin(pi / static_cast<double>(n)); }

bool has_vertex(const Polygon& p, Vec2 v, double tol = 1e-12) {
  return std::any_of(p.vertices.begin(), p.vertices.end(), [&](const Vec2& w) { return distance(v, w) <= tol; });
}

}  // namespace

TEST(NaturalParametrize, UnitStepsOpenPolyline) {
  const Curve c = natural_parametrize(2, {0, 0, 1, 0, 1, 1}, false);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_DOUBLE_EQ(c.cum_len()[0], 0.0);
  EXPECT_DOUBLE_EQ(c.cum_len()[1], 1.0);
  EXPECT_DOUBLE_EQ(c.cum_len()[2], 2.0);
  EXPECT_EQ(c.class_tag(), CurveClass::free);
  EXPECT_FALSE(c.closed());
}

TEST(NaturalParametrize, SquareOnUnitCircle) {
  const Curve c = natural_parametrize(2, {1, 0, 0, 1, -1, 0, 0, -1}, true);
  EXPECT_NEAR(c.length(), 4.0 * std::sqrt(2.0), 1e-15);
  // closing point appended and equal to the first
  EXPECT_EQ(c.point(c.size() - 1)[0], c.point(0)[0]);
  EXPECT_EQ(c.point(c.size() - 1)[1], c.point(0)[1]);
}

TEST(NaturalParametrize, Inscribed360Gon) {
  std::vector<double> xy;
  for (int i = 0; i < 360; ++i) {
    xy.push_back(std::cos(2 * pi * i / 360));
    xy.push_back(std::sin(2 * pi * i / 360));
  }
  const Curve c = natural_parametrize(2, xy, true);
  EXPECT_NEAR(c.length(), ngon_length(360, 1.0), 1e-12);
  EXPECT_NEAR(c.length(), 2 * pi, 1e-4);
}

TEST(NaturalParametrize, Errors) {
  try {
    natural_parametrize(2, {0, 0, 0, 0, 1, 0}, false);
    FAIL() << "expected DuplicatePoints";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicatePoints);
  }
  try {
    natural_parametrize(2, {0, 0}, false);
    FAIL() << "expected TooFewPoints";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewPoints);
  }
}

TEST(NaturalParametrize, CumLenMatchesChordSumExactly) {
  Rng rng(3);
  std::vector<double> xyz;
  for (int i = 0; i < 501; ++i) xyz.push_back(rng.uniform(-1, 1));
  const Curve c = natural_parametrize(3, xyz, false);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    double d2 = 0.0;
    for (int k = 0; k < 3; ++k) d2 += std::pow(c.point(i + 1)[k] - c.point(i)[k], 2);
    s += std::sqrt(d2);
  }
  EXPECT_EQ(s, c.length());
}

TEST(NaturalParametrize, Idempotent) {
  const Curve a = circle_curve(1.5, 37);
  std::vector<double> pts(a.coords().begin(), a.coords().end() - 2);
  const Curve b = natural_parametrize(2, pts, true);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.cum_len()[i], b.cum_len()[i]);
}

TEST(CircleCurve, FourSamplesIsSquare) {
  const Curve c = circle_curve(1.0, 4);
  EXPECT_EQ(c.class_tag(), CurveClass::circle);
  EXPECT_NEAR(c.point(0)[0], 1.0, 1e-15);
  EXPECT_NEAR(c.point(1)[1], 1.0, 1e-15);
  EXPECT_NEAR(c.point(2)[0], -1.0, 1e-15);
  EXPECT_NEAR(c.point(3)[1], -1.0, 1e-15);
}

TEST(CircleCurve, MillionSamplesLength) {
  const Curve c = circle_curve(1.0, 1000000);
  EXPECT_NEAR(c.length() / ngon_length(1000000, 1.0), 1.0, 1e-9);
  EXPECT_NEAR(c.length() / (2 * pi), 1.0, 1e-9);
}

TEST(CircleCurve, RadiusScalesArcLength) {
  const Curve a = circle_curve(1.0, 64);
  const Curve b = circle_curve(2.0, 64);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b.cum_len()[i], 2.0 * a.cum_len()[i], 1e-13);
}

TEST(CircleCurve, BadRadius) {
  try {
    circle_curve(0.0, 16);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadRadius);
  }
}

TEST(SphereSection, Equator) {
  const Curve c = sphere_section_curve({0, 0, 1}, 0.0, 256);
  EXPECT_EQ(c.class_tag(), CurveClass::sphere_section);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_NEAR(c.point(i)[2], 0.0, 1e-15);
    EXPECT_NEAR(std::hypot(c.point(i)[0], c.point(i)[1]), 1.0, 1e-12);
  }
}

TEST(SphereSection, HeightPointSix) {
  const Curve c = sphere_section_curve({0, 0, 1}, 0.6, 128);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_NEAR(c.point(i)[2], 0.6, 1e-12);
    EXPECT_NEAR(std::hypot(c.point(i)[0], c.point(i)[1]), 0.8, 1e-12);
  }
}

TEST(SphereSection, ResidualsOnTiltedPlane) {
  const double s = 1.0 / std::sqrt(3.0);
  const std::array<double, 3> n{s, s, s};
  const Curve c = sphere_section_curve(n, 0.5, 200);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto p = c.point(i);
    EXPECT_NEAR(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]), 1.0, 1e-12);
    EXPECT_NEAR(p[0] * n[0] + p[1] * n[1] + p[2] * n[2], 0.5, 1e-12);
  }
  EXPECT_TRUE(is_coord_convex(c));
}

TEST(SphereSection, NoIntersection) {
  for (double off : {1.0, -1.2}) {
    try {
      sphere_section_curve({1, 0, 0}, off, 64);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NoIntersection);
    }
  }
}

TEST(ConvexHull, InteriorPointDropped) {
  const Polygon h = convex_hull_2d(std::vector<Vec2>{{0, 0}, {1, 0}, {0, 1}, {0.2, 0.2}});
  ASSERT_EQ(h.size(), 3u);
  EXPECT_FALSE(has_vertex(h, {0.2, 0.2}));
  EXPECT_NEAR(area(h), 0.5, 1e-15);
}

TEST(ConvexHull, SegmentPerimeterIsClosedTraversal) {
  const Polygon h = convex_hull_2d(std::vector<Vec2>{{1, 0}, {0, 1}});
  EXPECT_EQ(h.size(), 2u);
  EXPECT_NEAR(perimeter(h), 2.0 * std::sqrt(2.0), 1e-15);
  const Polygon p = convex_hull_2d(std::vector<Vec2>{{0.5, 0.5}, {0.5, 0.5}});
  EXPECT_EQ(p.size(), 1u);
  EXPECT_EQ(perimeter(p), 0.0);
}

TEST(ConvexHull, RandomDiskContainmentAndPermutation) {
  Rng rng(11);
  std::vector<Vec2> pts;
  while (pts.size() < 100) {
    const Vec2 p{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    if (norm(p) <= 1.0) pts.push_back(p);
  }
  const Polygon h = convex_hull_2d(pts);
  EXPECT_TRUE(is_convex_ccw(h.vertices));
  for (const auto& p : pts) EXPECT_TRUE(contains(h, p, 1e-12));

  std::vector<Vec2> shuffled = pts;
  std::mt19937 g(5);
  std::shuffle(shuffled.begin(), shuffled.end(), g);
  const Polygon h2 = convex_hull_2d(shuffled);
  ASSERT_EQ(h.size(), h2.size());
  for (const auto& v : h.vertices) EXPECT_TRUE(has_vertex(h2, v, 0.0));
}

TEST(ConvexHull, EmptyInput) {
  try {
    convex_hull_2d(std::vector<Vec2>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
  }
}

TEST(Polygon, SupportCentroidDiameter) {
  const Polygon sq{{{0, 0}, {2, 0}, {2, 2}, {0, 2}}};
  EXPECT_DOUBLE_EQ(perimeter(sq), 8.0);
  EXPECT_DOUBLE_EQ(area(sq), 4.0);
  EXPECT_NEAR(centroid(sq).x, 1.0, 1e-15);
  EXPECT_NEAR(centroid(sq).y, 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(support(sq, {1, 1}), 4.0);
  EXPECT_NEAR(diameter(sq), 2.0 * std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(contains(sq, {1, 1}));
  EXPECT_FALSE(contains(sq, {3, 1}));
}

TEST(CurveClasses, ConvexBoundaryChecks) {
  EXPECT_TRUE(is_convex_boundary(circle_curve(1.0, 50)));
  const Curve poly = polygon_curve(Polygon{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}});
  EXPECT_EQ(poly.class_tag(), CurveClass::convex_boundary);
  EXPECT_TRUE(is_convex_boundary(poly));
  // a star is not convex
  std::vector<double> star;
  for (int i = 0; i < 10; ++i) {
    const double r = i % 2 ? 0.4 : 1.0;
    star.push_back(r * std::cos(2 * pi * i / 10));
    star.push_back(r * std::sin(2 * pi * i / 10));
  }
  EXPECT_FALSE(is_convex_boundary(natural_parametrize(2, star, true)));
  // a circle traversed twice turns by 4 pi
  std::vector<double> twice;
  for (int i = 0; i < 20; ++i) {
    twice.push_back(std::cos(2 * pi * i / 10 + 0.01 * i));
    twice.push_back(std::sin(2 * pi * i / 10 + 0.01 * i));
  }
  EXPECT_FALSE(is_convex_boundary(natural_parametrize(2, twice, true)));
}

TEST(CurveClasses, CoordConvexRejectsFigureEight) {
  std::vector<double> eight;
  for (int i = 0; i < 64; ++i) {
    const double t = 2 * pi * i / 64;
    eight.push_back(std::sin(t));
    eight.push_back(std::sin(2 * t));
    eight.push_back(0.3);
  }
  EXPECT_FALSE(is_coord_convex(natural_parametrize(3, eight, true)));
}

TEST(CurveClasses, PointAtWrapsOnClosedCurves) {
  const Curve c = circle_curve(1.0, 8);
  const auto a = c.point_at(0.25 * c.length());
  const auto b = c.point_at(1.25 * c.length());
  EXPECT_NEAR(a[0], b[0], 1e-12);
  EXPECT_NEAR(a[1], b[1], 1e-12);
}
