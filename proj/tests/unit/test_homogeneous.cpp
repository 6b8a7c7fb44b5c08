#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "dcsplit/builtins.hpp"
#include "dcsplit/decompose.hpp"
#include "dcsplit/dctest.hpp"
#include "dcsplit/homogeneous.hpp"
#include "dcsplit/rng.hpp"

using namespace dcsplit;
using std::numbers::pi;

namespace {

const std::vector<std::size_t> kFanSizes{16, 32, 64, 128, 256, 512};

double hausdorff_to_circle(const Polygon& p, double r) {
  double d = 0.0;
  for (const auto& v : p.vertices) d = std::max(d, std::abs(norm(v) - r));
  // edges may cut inside the circle; the worst point is a midpoint
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2 m = (p.vertices[i] + p.vertices[(i + 1) % p.size()]) * 0.5;
    d = std::max(d, std::abs(norm(m) - r));
  }
  return d;
}

}  // namespace

TEST(PHFunction, Homogeneity) {
  Rng rng(5);
  for (unsigned m : {1u, 2u, 3u}) {
    const PHFunction f{m, [](double t) { return 1.0 + 0.3 * std::cos(3 * t) - 0.2 * std::sin(t); }};
    for (int k = 0; k < 100; ++k) {
      const Vec2 x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
      for (double lam : {0.5, 2.0, 7.0}) {
        const double want = std::pow(lam, m) * f.evaluate(x);
        EXPECT_NEAR(f.evaluate(x * lam), want, 1e-10 * (1 + std::abs(want)));
      }
    }
    EXPECT_EQ(f.evaluate({0, 0}), 0.0);
  }
}

TEST(PHFunction, MatchesBuiltinOnCircle) {
  for (const auto& key : builtin_keys()) {
    const Builtin b = make_builtin(key);
    if (!b.boundary || !b.homogeneous) continue;
    const PHFunction f = ph_from_builtin(b);
    for (int i = 0; i < 64; ++i) {
      const double t = 2 * pi * i / 64.0;
      const double x[2] = {3 * std::cos(t), 3 * std::sin(t)};
      EXPECT_NEAR(f.evaluate({x[0], x[1]}), b.field(x), 1e-12) << key;
    }
  }
}

TEST(PHFunction, NoProfile) {
  try {
    ph_from_builtin(make_builtin("norm3"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid);
  }
}

TEST(MinOnCircle, AgainstDenseGrid) {
  for (const auto& key : builtin_keys()) {
    const Builtin b = make_builtin(key);
    if (!b.boundary) continue;
    const SectorFanPH fan = fan_from_profile(b.boundary, 12);
    const int n = 200000;
    double grid = 1e300;
    for (int i = 0; i < n; ++i) grid = std::min(grid, fan.evaluate(unit_at(2 * pi * i / n)));
    const double exact = min_on_circle(fan);
    EXPECT_LE(exact, grid + 1e-15) << key;
    EXPECT_GE(exact, grid - lipschitz_constant(fan) * 2 * pi / n) << key;
  }
}

TEST(RadialLift, UnitCircleOfOnes) {
  const Curve c = circle_curve(1.0, 256);
  const SectorFanPH fan = radial_lift_degree1(c, std::vector<double>(256, 1.0));
  ASSERT_EQ(fan.size(), 256u);
  for (double v : fan.ray_values()) EXPECT_NEAR(v, 1.0, 1e-12);
  EXPECT_TRUE(verify_convex(fan).ok);
}

TEST(RadialLift, ReproducesValuesOnConvexPolygon) {
  Rng rng(7);
  std::vector<Vec2> pts;
  for (int i = 0; i < 12; ++i) {
    const double t = 2 * pi * i / 12.0 + rng.uniform(-0.1, 0.1);
    const double r = rng.uniform(0.8, 1.2);
    pts.push_back({0.1 + r * std::cos(t), -0.05 + r * std::sin(t)});
  }
  const Polygon hull = convex_hull_2d(pts);
  const Curve c = polygon_curve(hull);
  std::vector<double> vals;
  for (const auto& v : hull.vertices) vals.push_back(v.x * v.x + v.y * v.y + v.x);
  const SectorFanPH fan = radial_lift_degree1(c, vals);
  for (std::size_t i = 0; i < hull.size(); ++i) EXPECT_NEAR(fan.evaluate(hull.vertices[i]), vals[i], 1e-12);
}

TEST(RadialLift, LinearCircleTraceGivesLinearFan) {
  const std::size_t n = 64;
  const Curve c = circle_curve(0.5, n);
  std::vector<double> vals;
  for (std::size_t i = 0; i < n; ++i) vals.push_back(2 * c.point(i)[0] - c.point(i)[1]);
  const SectorFanPH fan = radial_lift_degree1(c, vals);
  for (const auto& g : fan.sector_gradients()) {
    EXPECT_NEAR(g.x, 2.0, 1e-9);
    EXPECT_NEAR(g.y, -1.0, 1e-9);
  }
}

TEST(RadialLift, ConvexProfileGivesConvexFan) {
  const std::size_t n = 128;
  const Curve c = circle_curve(1.0, n);
  std::vector<double> vals;
  for (std::size_t i = 0; i < n; ++i) vals.push_back(1.0 + c.point(i)[0]);  // x^2 + y^2 + x on the circle
  EXPECT_TRUE(verify_convex(radial_lift_degree1(c, vals)).ok);
}

TEST(RadialLift, Errors) {
  try {
    radial_lift_degree1(circle_curve(0.5, 32, {2.0, 0.0}), std::vector<double>(32, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OriginOutside);
  }
  try {
    radial_lift_degree1(natural_parametrize(2, {1, 0, 0, 1, -1, 0, 0, -1}, true), std::vector<double>(4, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotConvexInput);
  }
}

TEST(DegreeLift, Examples) {
  const PHFunction norm1{1, [](double) { return 1.0; }};
  EXPECT_NEAR(degree_lift(norm1, 2).evaluate({2, 0}), 4.0, 1e-15);
  const PHFunction psi{1, [](double t) { return 2.0 + std::cos(t); }};
  const PHFunction phi = degree_lift(psi, 3);
  for (int i = 0; i < 16; ++i) {
    const double t = 2 * pi * i / 16.0;
    EXPECT_NEAR(phi.evaluate(unit_at(t) * 2.0), 8.0 * psi.boundary(t), 1e-12);
  }
}

TEST(DegreeLift, StrictNeedsPositiveProfile) {
  try {
    degree_lift(PHFunction{1, [](double t) { return std::cos(2 * t); }}, 2, true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositiveOnCircle);
  }
}

TEST(DegreeLift, ConvexPositiveStaysConvex) {
  const PHFunction psi = ph_from_fan(fan_from_profile([](double t) { return 1.0 + 0.3 * std::cos(t); }, 64));
  EXPECT_EQ(directional_monotonicity_failures(degree_lift(psi, 2, true).field()), 0u);
  EXPECT_EQ(directional_monotonicity_failures(degree_lift(psi, 3, true).field()), 0u);
  // a saddle fails along some line
  EXPECT_GT(directional_monotonicity_failures(make_builtin("saddle").field), 0u);
}

TEST(DegreeDrop, RoundTrip) {
  const PHFunction sq{2, [](double) { return 1.0; }};
  const PHFunction d = degree_drop(sq);
  EXPECT_EQ(d.degree, 1u);
  EXPECT_NEAR(d.evaluate({3, 4}), 5.0, 1e-14);
  const PHFunction back = degree_lift(d, 2);
  for (int i = 0; i < 32; ++i) {
    const double t = 2 * pi * i / 32.0;
    EXPECT_EQ(back.boundary(t), sq.boundary(t));
  }
  // the circle trace does not see the degree
  const PHFunction saddle3 = ph_from_builtin(make_builtin("saddle"), 3);
  const Curve c = circle_curve(1.0, 1 << 14);
  const double v3 = derivative_variation(trace(saddle3.field(), c, 4096));
  const double v1 = derivative_variation(trace(degree_drop(saddle3).field(), c, 4096));
  EXPECT_NEAR(v3, v1, 1e-9 * v1);
}

TEST(DecomposePH, NormHasFlatSecondPart) {
  const auto lv = dc_decompose_ph(ph_from_builtin(make_builtin("norm2")), kFanSizes);
  for (std::size_t k = 0; k < lv.size(); ++k) {
    double total = 0.0;
    for (const auto& e : lv[k].pair.f2.edges()) total += e.jump_norm;
    EXPECT_LE(total, 1e-9);
    if (k > 0) {
      EXPECT_LE(lv[k].sup_error, lv[k - 1].sup_error);
    }
  }
}

TEST(DecomposePH, SaddleLipschitzBounded) {
  const auto lv = dc_decompose_ph(ph_from_builtin(make_builtin("saddle")), kFanSizes);
  double max_l = 0.0;
  for (std::size_t k = 0; k < lv.size(); ++k) {
    max_l = std::max({max_l, lv[k].lipschitz_f1, lv[k].lipschitz_f2});
    if (k > 0) {
      EXPECT_LE(lv[k].sup_error, lv[k - 1].sup_error);
    }
    EXPECT_TRUE(verify_convex(lv[k].pair.f1).ok);
    EXPECT_TRUE(verify_convex(lv[k].pair.f2).ok);
  }
  EXPECT_LE(max_l, 1.25 * std::max(lv[0].lipschitz_f1, lv[0].lipschitz_f2));
}

TEST(DecomposePH, OscLipschitzGrows) {
  // the oscillation is resolved only once rays are finer than its period
  const std::vector<std::size_t> sizes{4096, 8192, 16384, 32768, 65536};
  const auto lv = dc_decompose_ph(ph_from_builtin(make_builtin("osc")), sizes);
  std::vector<std::pair<std::size_t, double>> est;
  for (const auto& l : lv) est.push_back({l.fan_size, l.lipschitz_f1});
  EXPECT_EQ(refine_verdict(est), Verdict::divergent);
}

TEST(DecomposePH, DegreeTwoParts) {
  const PHFunction phi = ph_from_builtin(make_builtin("saddle"), 2);
  const std::vector<std::size_t> sizes{64, 256};
  const auto lv = dc_decompose_ph(phi, sizes);
  for (const auto& l : lv) {
    const double lo = std::min(min_on_circle(l.pair.f1), min_on_circle(l.pair.f2));
    if (lo <= 0.0) {
      EXPECT_NEAR(l.shift, 1.0 - lo, 1e-15);
    } else {
      EXPECT_EQ(l.shift, 0.0);
    }
    for (std::size_t i = 0; i < l.pair.f1.size(); ++i) {
      const Vec2 u = l.pair.f1.ray(i) * 2.0;
      EXPECT_NEAR(l.part1.evaluate(u) - l.part2.evaluate(u), phi.evaluate(u), 1e-9);
    }
  }
}

TEST(DecomposePH, RoundTripForBoundedBuiltins) {
  for (const auto& key : builtin_keys()) {
    const Builtin b = make_builtin(key);
    if (!b.boundary || key == "osc") continue;
    const auto lv = dc_decompose_ph(ph_from_builtin(b), kFanSizes);
    EXPECT_LT(lv.back().sup_error, 1e-3) << key;
    const auto& p = lv.back().pair;
    for (std::size_t i = 0; i < p.f1.size(); ++i) {
      const double t = 2 * pi * static_cast<double>(i) / static_cast<double>(p.f1.size());
      EXPECT_NEAR(p.f1.ray_values()[i] - p.f2.ray_values()[i], b.boundary(t), 1e-9) << key;
    }
  }
}

TEST(DecomposePH, BadSizes) {
  const PHFunction phi = ph_from_builtin(make_builtin("norm2"));
  for (const std::vector<std::size_t>& s : {std::vector<std::size_t>{4, 16}, std::vector<std::size_t>{32, 16}}) {
    try {
      dc_decompose_ph(phi, s);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid);
    }
  }
}

TEST(QDPoint, NormAtOrigin) {
  const QDResult r = qd_point_test(make_builtin("norm2").field, {0, 0}, 1e-6, 256);
  EXPECT_EQ(r.verdict, Verdict::bounded);
  for (const auto& v : r.sub.vertices) EXPECT_LE(norm(v), 1.0 / std::cos(pi / 256) + 1e-6);
  EXPECT_LE(hausdorff_to_circle(r.sub, 1.0), 2.0 * (1.0 / std::cos(pi / 256) - 1.0));
  EXPECT_LE(diameter(r.super), 1e-6);
}

TEST(QDPoint, LinearFunction) {
  const Field f = [](std::span<const double> x) { return 0.5 * x[0] - 1.5 * x[1]; };
  const QDResult r = qd_point_test(f, {0.3, 0.2}, 1e-6, 32);
  EXPECT_EQ(r.verdict, Verdict::bounded);
  EXPECT_LE(diameter(r.sub), 1e-6);
  EXPECT_LE(diameter(r.super), 1e-6);
  ASSERT_FALSE(r.sub.empty());
  // the whole derivative ends up in the convex part, the concave one is centred at 0
  EXPECT_NEAR(r.sub.vertices[0].x, 0.5, 1e-6);
  EXPECT_NEAR(r.sub.vertices[0].y, -1.5, 1e-6);
  EXPECT_NEAR(r.normalization.x, -0.5, 1e-6);
  EXPECT_NEAR(r.normalization.y, 1.5, 1e-6);
}

TEST(QDPoint, NegativeNorm) {
  const Field f = [](std::span<const double> x) { return -std::hypot(x[0], x[1]); };
  const QDResult r = qd_point_test(f, {0, 0}, 1e-6, 64);
  EXPECT_LE(diameter(r.sub), 1e-6);
  EXPECT_LE(hausdorff_to_circle(r.super, 1.0), 2.0 * (1.0 / std::cos(pi / 64) - 1.0));
}

TEST(QDPoint, TooFewRays) {
  try {
    qd_point_test(make_builtin("norm2").field, {0, 0}, 1e-6, 16);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid);
  }
}
