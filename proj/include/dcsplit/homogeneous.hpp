#pragma once

// Positively homogeneous functions on the plane: circle profiles, radial
// lifts of boundary data, conversion between degrees, fan decomposition and
// the quasidifferential of a directional derivative.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "dcsplit/builtins.hpp"
#include "dcsplit/decompose.hpp"
#include "dcsplit/error.hpp"
#include "dcsplit/geometry.hpp"
#include "dcsplit/pwl.hpp"
#include "dcsplit/rng.hpp"
#include "dcsplit/variation.hpp"

namespace dcsplit {

/// phi(x) = |x|^m Phi(angle of x).
struct PHFunction {
  unsigned degree = 1;
  Profile boundary;

  double evaluate(const Vec2& x) const {
    const double r = norm(x);
    if (r == 0.0) return 0.0;
    const double phi = boundary(polar_angle(x.x, x.y));
    // points of the unit circle carry a few ulps of radial rounding; the
    // circle trace must not depend on the degree
    if (std::abs(r - 1.0) <= 4 * std::numeric_limits<double>::epsilon()) return phi;
    return std::pow(r, static_cast<double>(degree)) * phi;
  }
  Field field() const {
    return [self = *this](std::span<const double> x) { return self.evaluate({x[0], x[1]}); };
  }
};

inline PHFunction ph_from_builtin(const Builtin& b, unsigned degree = 1) {
  if (!b.boundary) throw Error(ErrorCode::ConfigInvalid, "builtin '" + b.key + "' has no circle profile");
  return {degree, b.boundary};
}

/// Circle profile of a fan, so that a fan can be lifted like any other
/// degree-1 function.
inline PHFunction ph_from_fan(const SectorFanPH& fan, unsigned degree = 1) {
  return {degree, [fan](double t) { return fan.evaluate(unit_at(t)); }};
}

/// Fan with m equal sectors interpolating Phi at its rays.
inline SectorFanPH fan_from_profile(const Profile& phi, std::size_t m, double offset = 0.0) {
  auto angles = uniform_angles(m, offset);
  std::vector<double> vals(m);
  for (std::size_t i = 0; i < m; ++i) vals[i] = phi(angles[i]);
  return build_sector_fan(std::move(vals), std::move(angles));
}

/// Exact minimum of a fan over the unit circle.
inline double min_on_circle(const SectorFanPH& fan) {
  double lo = std::numeric_limits<double>::infinity();
  const auto& a = fan.angles();
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < fan.size(); ++i) {
    lo = std::min(lo, fan.ray_values()[i]);
    const Vec2 g = fan.sector_gradients()[i];
    if (norm(g) == 0.0) continue;
    // (g, u) is smallest at u = -g / |g|
    double t = std::atan2(-g.y, -g.x);
    t = a[i] + std::fmod(std::fmod(t - a[i], two_pi) + two_pi, two_pi);
    if (t < a[i + 1]) lo = std::min(lo, -norm(g));
  }
  return lo;
}

/// Degree-1 fan through the points of a closed convex curve around the
/// origin, scaled so that psi(r) = v at every curve point r.
inline SectorFanPH radial_lift_degree1(const Curve& curve, const std::vector<double>& values) {
  if (curve.dim() != 2 || !curve.closed()) throw Error(ErrorCode::NotConvexInput, "need a closed planar curve");
  if (curve.class_tag() != CurveClass::convex_boundary && curve.class_tag() != CurveClass::circle) {
    throw Error(ErrorCode::NotConvexInput, "radial lift needs a convex boundary curve");
  }
  const std::size_t n = curve.size() - 1;
  if (values.size() != n) throw Error(ErrorCode::ConfigInvalid, "one value per curve point is required");

  std::vector<Vec2> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = {curve.point(i)[0], curve.point(i)[1]};
  double orient = 0.0;
  for (std::size_t i = 0; i < n; ++i) orient += cross(pts[i], pts[(i + 1) % n]);
  const double sign = orient >= 0.0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = pts[i], b = pts[(i + 1) % n];
    // origin strictly to the left of every ccw edge
    if (sign * cross(b - a, Vec2{} - a) <= kGeomTol * std::max(1.0, norm(b - a))) {
      throw Error(ErrorCode::OriginOutside, "origin is not strictly inside the curve");
    }
  }

  std::vector<std::pair<double, double>> rays(n);
  for (std::size_t i = 0; i < n; ++i) rays[i] = {polar_angle(pts[i].x, pts[i].y), values[i] / norm(pts[i])};
  std::sort(rays.begin(), rays.end());
  std::vector<double> angles(n), vals(n);
  for (std::size_t i = 0; i < n; ++i) std::tie(angles[i], vals[i]) = rays[i];
  return build_sector_fan(std::move(vals), std::move(angles));
}

/// Same boundary, degree m. In strict mode the profile must be positive on
/// the circle, which is what makes the lift of a convex psi convex.
inline PHFunction degree_lift(const PHFunction& psi, unsigned m, bool strict = false, std::size_t probes = 4096) {
  if (m < 1) throw Error(ErrorCode::ConfigInvalid, "degree must be positive");
  if (strict) {
    for (std::size_t i = 0; i < probes; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(probes);
      if (!(psi.boundary(t) > 0.0)) throw Error(ErrorCode::NotPositiveOnCircle, "profile is not positive on the circle");
    }
  }
  return {m, psi.boundary};
}

inline PHFunction degree_drop(const PHFunction& phi) { return {1, phi.boundary}; }

/// Number of random lines x0 + alpha p on which the forward slopes of f fail
/// to be non-decreasing. Zero for a convex f.
inline std::size_t directional_monotonicity_failures(const Field& f, std::size_t rays = 20, std::uint64_t seed = 1,
                                                     std::size_t steps = 200, double reach = 2.0) {
  Rng rng(seed);
  std::size_t failures = 0;
  for (std::size_t r = 0; r < rays; ++r) {
    const Vec2 x0{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const Vec2 p = unit_at(rng.uniform(0.0, 2.0 * std::numbers::pi));
    const double h = reach / static_cast<double>(steps);
    std::vector<double> vals(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
      const Vec2 x = x0 + p * (h * static_cast<double>(k));
      const double c[2] = {x.x, x.y};
      vals[k] = f(c);
    }
    double scale = 0.0;
    for (double v : vals) scale = std::max(scale, std::abs(v));
    const double tol = 1e-9 * (1.0 + scale) / h;
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < steps; ++k) {
      const double s = (vals[k + 1] - vals[k]) / h;
      if (s < prev - tol) {
        ++failures;
        break;
      }
      prev = s;
    }
  }
  return failures;
}

struct PHLevel {
  std::size_t fan_size = 0;
  DCPair<SectorFanPH> pair;  // degree-1 parts
  double shift = 0.0;        // c |q| added to both parts before lifting
  PHFunction part1, part2;   // degree-m parts, part1 - part2 = phi
  double sup_error = 0.0;    // over a dense circle grid
  double lipschitz_f1 = 0.0;
  double lipschitz_f2 = 0.0;
};

/// Fan decomposition of a p.h. function for each fan size. Degree m > 1 is
/// decomposed through its degree-1 drop and both parts are lifted back.
inline std::vector<PHLevel> dc_decompose_ph(const PHFunction& phi, std::span<const std::size_t> fan_sizes,
                                            std::size_t probes = 8192) {
  for (std::size_t i = 0; i < fan_sizes.size(); ++i) {
    if (fan_sizes[i] < 8) throw Error(ErrorCode::ConfigInvalid, "fan sizes must be at least 8");
    if (i > 0 && fan_sizes[i] <= fan_sizes[i - 1]) throw Error(ErrorCode::ConfigInvalid, "fan sizes must increase");
  }
  std::vector<PHLevel> out;
  for (std::size_t m : fan_sizes) {
    PHLevel lv;
    lv.fan_size = m;
    lv.pair = aleksandrov_decompose(fan_from_profile(phi.boundary, m));
    lv.lipschitz_f1 = lipschitz_constant(lv.pair.f1);
    lv.lipschitz_f2 = lipschitz_constant(lv.pair.f2);
    if (phi.degree > 1) {
      const double lo = std::min(min_on_circle(lv.pair.f1), min_on_circle(lv.pair.f2));
      if (lo <= 0.0) lv.shift = -lo + 1.0;
    }
    const double c = lv.shift;
    lv.part1 = {phi.degree, [f = lv.pair.f1, c](double t) { return f.evaluate(unit_at(t)) + c; }};
    lv.part2 = {phi.degree, [f = lv.pair.f2, c](double t) { return f.evaluate(unit_at(t)) + c; }};
    const std::size_t n = std::max(probes, 8 * m);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = 2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      const double err = std::abs(phi.boundary(t) - (lv.part1.boundary(t) - lv.part2.boundary(t)));
      lv.sup_error = std::max(lv.sup_error, err);
    }
    out.push_back(std::move(lv));
  }
  return out;
}

struct QDResult {
  Verdict verdict = Verdict::inconclusive;
  Polygon sub;    // subdifferential
  Polygon super;  // superdifferential
  Vec2 normalization;  // linear part moved from the pair
  std::vector<std::pair<std::size_t, double>> levels;  // fan size, variation of the sampled derivative
  DCPair<SectorFanPH> pair;
};

/// Directional derivative g -> f'(x, g) sampled on m rays by one-sided
/// differences with a Richardson step halving.
inline SectorFanPH directional_derivative_fan(const Field& f, const Vec2& x, double alpha, std::size_t m) {
  const double c0[2] = {x.x, x.y};
  const double f0 = f(c0);
  auto diff = [&](const Vec2& g, double a) {
    const Vec2 y = x + g * a;
    const double c[2] = {y.x, y.y};
    return (f(c) - f0) / a;
  };
  auto angles = uniform_angles(m);
  std::vector<double> vals(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 g = unit_at(angles[i]);
    vals[i] = 2.0 * diff(g, 0.5 * alpha) - diff(g, alpha);
  }
  return build_sector_fan(std::move(vals), std::move(angles));
}

/// Quasidifferential of f at x. Both parts of the pair are shifted by the
/// linear function whose gradient is the Steiner point of the concave part's
/// subdifferential, so that the superdifferential is centred at zero.
inline QDResult qd_point_test(const Field& f, const Vec2& x, double alpha, std::size_t m_fan,
                              const VerdictRule& rule = {}) {
  if (m_fan < 32) throw Error(ErrorCode::ConfigInvalid, "qd test needs at least 32 rays");
  if (!(alpha > 0.0)) throw Error(ErrorCode::ConfigInvalid, "step must be positive");
  QDResult res;
  for (std::size_t k : {m_fan / 8, m_fan / 4, m_fan / 2, m_fan}) {
    const SectorFanPH h = directional_derivative_fan(f, x, alpha, k);
    const Curve circle = circle_curve(1.0, 8 * k);
    const auto ts = trace([&h](std::span<const double> p) { return h.evaluate({p[0], p[1]}); }, circle, 8 * k);
    res.levels.push_back({k, derivative_variation(ts)});
    if (k == m_fan) {
      DCPair<SectorFanPH> pair = aleksandrov_decompose(h);
      const Vec2 s = steiner_point(pair.f2);
      pair.f1 = add_linear(pair.f1, -s);
      pair.f2 = add_linear(pair.f2, -s);
      res.normalization = s;
      res.sub = subdifferential_zero(pair.f1);
      Polygon hull = subdifferential_zero(pair.f2);
      for (auto& v : hull.vertices) v = -v;
      res.super = hull;
      res.pair = std::move(pair);
    }
  }
  res.verdict = refine_verdict(res.levels, rule);
  return res;
}

}  // namespace dcsplit
