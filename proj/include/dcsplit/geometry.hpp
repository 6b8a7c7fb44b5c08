#pragma once

// Planar and spatial primitives: naturally parametrized polylines, convex
// hulls and the curve generators used by the variation diagnostics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcsplit/error.hpp"
#include "dcsplit/vec2.hpp"

namespace dcsplit {

/// Absolute coincidence tolerance for unit-scale geometry.
inline constexpr double kGeomTol = 1e-12;

enum class CurveClass { circle, convex_boundary, sphere_section, coord_convex, free };

constexpr std::string_view to_string(CurveClass c) {
  switch (c) {
    case CurveClass::circle: return "circle";
    case CurveClass::convex_boundary: return "convex_boundary";
    case CurveClass::sphere_section: return "sphere_section";
    case CurveClass::coord_convex: return "coord_convex";
    case CurveClass::free: return "free";
  }
  return "free";
}

/// Polyline in R^dim with cumulative chord lengths. Closed curves repeat
/// their first point at the end, so `cum_len.back()` is the full perimeter.
class Curve {
 public:
  Curve() = default;

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return cum_len_.size(); }
  bool closed() const { return closed_; }
  CurveClass class_tag() const { return tag_; }
  double length() const { return cum_len_.empty() ? 0.0 : cum_len_.back(); }
  const std::vector<double>& cum_len() const { return cum_len_; }
  const std::vector<double>& coords() const { return coords_; }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }

  /// Position at arc length `s`; closed curves wrap around.
  void point_at(double s, std::span<double> out) const {
    const double total = length();
    if (closed_) {
      s = std::fmod(s, total);
      if (s < 0.0) s += total;
    } else {
      s = std::clamp(s, 0.0, total);
    }
    auto it = std::upper_bound(cum_len_.begin(), cum_len_.end(), s);
    std::size_t hi = static_cast<std::size_t>(it - cum_len_.begin());
    if (hi >= size()) hi = size() - 1;
    const std::size_t lo = hi - 1;
    const double span_len = cum_len_[hi] - cum_len_[lo];
    const double w = span_len > 0.0 ? (s - cum_len_[lo]) / span_len : 0.0;
    auto a = point(lo);
    auto b = point(hi);
    for (std::size_t d = 0; d < dim_; ++d) out[d] = a[d] + w * (b[d] - a[d]);
  }

  std::vector<double> point_at(double s) const {
    std::vector<double> p(dim_);
    point_at(s, p);
    return p;
  }

  void set_class_tag(CurveClass tag) { tag_ = tag; }

  /// Builds a curve from flat coordinates (`dim` values per point) with exact
  /// cumulative chord lengths. A closed curve gets its first point appended
  /// unless the input already ends on it.
  Curve(std::size_t dim, std::vector<double> coords, bool closed);

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<double> cum_len_;
  bool closed_ = false;
  CurveClass tag_ = CurveClass::free;
};

namespace detail {

inline double chord(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(s);
}

}  // namespace detail

inline Curve::Curve(std::size_t dim, std::vector<double> coords, bool closed) {
  if (dim == 0 || coords.size() % dim != 0) {
    throw Error(ErrorCode::TooFewPoints, "coordinate count is not a multiple of the dimension");
  }
  std::size_t n = coords.size() / dim;
  auto pt = [&](std::size_t i) { return std::span<const double>(coords.data() + i * dim, dim); };
  if (closed && n >= 2 && detail::chord(pt(0), pt(n - 1)) <= kGeomTol) {
    coords.resize((n - 1) * dim);
    --n;
  }
  if (n < 2) throw Error(ErrorCode::TooFewPoints, "a curve needs at least two distinct points");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (detail::chord(pt(i), pt(i + 1)) <= kGeomTol) {
      throw Error(ErrorCode::DuplicatePoints, "consecutive points coincide at index " + std::to_string(i));
    }
  }
  if (closed) {
    for (std::size_t d = 0; d < dim; ++d) coords.push_back(coords[d]);
    ++n;
  }
  dim_ = dim;
  closed_ = closed;
  coords_ = std::move(coords);
  cum_len_.resize(n);
  cum_len_[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) cum_len_[i] = cum_len_[i - 1] + detail::chord(point(i - 1), point(i));
}

inline Curve natural_parametrize(std::size_t dim, std::vector<double> coords, bool closed) {
  return Curve(dim, std::move(coords), closed);
}

inline Curve natural_parametrize(std::span<const Vec2> points, bool closed) {
  std::vector<double> coords;
  coords.reserve(points.size() * 2);
  for (const auto& p : points) {
    coords.push_back(p.x);
    coords.push_back(p.y);
  }
  return natural_parametrize(2, std::move(coords), closed);
}

/// Uniformly sampled circle, counterclockwise from angle 0.
inline Curve circle_curve(double radius, std::size_t samples, Vec2 center = {}) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(ErrorCode::BadRadius, "radius must be positive");
  if (samples < 3) throw Error(ErrorCode::TooFewPoints, "a circle needs at least 3 samples");
  std::vector<double> coords;
  coords.reserve(2 * (samples + 1));
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(samples);
    coords.push_back(center.x + radius * std::cos(t));
    coords.push_back(center.y + radius * std::sin(t));
  }
  Curve c = natural_parametrize(2, std::move(coords), true);
  c.set_class_tag(CurveClass::circle);
  return c;
}

/// Intersection of the unit sphere with the plane (normal, x) = offset.
inline Curve sphere_section_curve(std::array<double, 3> normal, double offset, std::size_t samples) {
  const double nn = std::sqrt(normal[0] * normal[0] + normal[1] * normal[1] + normal[2] * normal[2]);
  if (!(nn > 0.0)) throw Error(ErrorCode::NoIntersection, "plane normal is zero");
  for (auto& v : normal) v /= nn;
  if (!(std::abs(offset) < 1.0)) throw Error(ErrorCode::NoIntersection, "plane misses the unit sphere");
  if (samples < 3) throw Error(ErrorCode::TooFewPoints, "a section needs at least 3 samples");

  // Orthonormal basis of the plane, seeded by the axis least aligned with the normal.
  std::size_t axis = 0;
  for (std::size_t k = 1; k < 3; ++k) {
    if (std::abs(normal[k]) < std::abs(normal[axis])) axis = k;
  }
  std::array<double, 3> seed{0.0, 0.0, 0.0};
  seed[axis] = 1.0;
  const double proj = seed[0] * normal[0] + seed[1] * normal[1] + seed[2] * normal[2];
  std::array<double, 3> e1{seed[0] - proj * normal[0], seed[1] - proj * normal[1], seed[2] - proj * normal[2]};
  const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  for (auto& v : e1) v /= n1;
  const std::array<double, 3> e2{normal[1] * e1[2] - normal[2] * e1[1], normal[2] * e1[0] - normal[0] * e1[2],
                                 normal[0] * e1[1] - normal[1] * e1[0]};

  const double rho = std::sqrt(1.0 - offset * offset);
  std::vector<double> coords;
  coords.reserve(3 * (samples + 1));
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(samples);
    const double c = rho * std::cos(t);
    const double s = rho * std::sin(t);
    for (std::size_t d = 0; d < 3; ++d) coords.push_back(offset * normal[d] + c * e1[d] + s * e2[d]);
  }
  Curve curve = natural_parametrize(3, std::move(coords), true);
  curve.set_class_tag(CurveClass::sphere_section);
  return curve;
}

/// Convex polygon, counterclockwise. A segment or a single point is kept as
/// a degenerate polygon with two or one vertices.
struct Polygon {
  std::vector<Vec2> vertices;

  bool empty() const { return vertices.empty(); }
  std::size_t size() const { return vertices.size(); }
};

/// Closed-traversal perimeter: twice the length for a segment, 0 for a point.
inline double perimeter(const Polygon& poly) {
  const auto& v = poly.vertices;
  if (v.size() < 2) return 0.0;
  double p = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) p += distance(v[i], v[(i + 1) % v.size()]);
  return p;
}

inline double area(const Polygon& poly) {
  const auto& v = poly.vertices;
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

inline Vec2 centroid(const Polygon& poly) {
  const auto& v = poly.vertices;
  if (v.empty()) return {};
  const double a = area(poly);
  if (std::abs(a) <= kGeomTol) {
    Vec2 c;
    for (const auto& p : v) c += p;
    return c * (1.0 / static_cast<double>(v.size()));
  }
  Vec2 c;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    c += (p + q) * cross(p, q);
  }
  return c * (1.0 / (6.0 * a));
}

/// Support function max_{v in poly} (v, dir).
inline double support(const Polygon& poly, const Vec2& dir) {
  double best = -INFINITY;
  for (const auto& v : poly.vertices) best = std::max(best, dot(v, dir));
  return best;
}

inline double diameter(const Polygon& poly) {
  double d = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    for (std::size_t j = i + 1; j < poly.size(); ++j) d = std::max(d, distance(poly.vertices[i], poly.vertices[j]));
  }
  return d;
}

inline bool contains(const Polygon& poly, const Vec2& p, double tol = kGeomTol) {
  const auto& v = poly.vertices;
  if (v.empty()) return false;
  if (v.size() == 1) return distance(v[0], p) <= tol;
  if (v.size() == 2) {
    const Vec2 d = v[1] - v[0];
    const double len = norm(d);
    const double along = dot(p - v[0], d) / len;
    return std::abs(cross(d, p - v[0])) / len <= tol && along >= -tol && along <= len + tol;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 e = v[(i + 1) % v.size()] - v[i];
    if (cross(e, p - v[i]) < -tol * norm(e)) return false;
  }
  return true;
}

/// Strict convexity test on a counterclockwise vertex loop.
inline bool is_convex_ccw(std::span<const Vec2> v, double tol = kGeomTol) {
  if (v.size() < 3) return true;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[(i + 1) % v.size()] - v[i];
    const Vec2 b = v[(i + 2) % v.size()] - v[(i + 1) % v.size()];
    if (cross(a, b) < -tol * norm(a) * norm(b)) return false;
  }
  return true;
}

/// Andrew's monotone chain. Collinear points on the hull boundary are dropped.
inline Polygon convex_hull_2d(std::span<const Vec2> points) {
  if (points.empty()) throw Error(ErrorCode::EmptyInput, "convex hull of an empty set");
  std::vector<Vec2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  // Merge points closer than the coincidence tolerance.
  std::vector<Vec2> uniq;
  for (const auto& p : pts) {
    bool dup = false;
    for (auto it = uniq.rbegin(); it != uniq.rend() && p.x - it->x <= kGeomTol; ++it) {
      if (distance(*it, p) <= kGeomTol) {
        dup = true;
        break;
      }
    }
    if (!dup) uniq.push_back(p);
  }
  if (uniq.size() <= 2) return Polygon{uniq};

  auto turn = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    const Vec2 u = a - o;
    const Vec2 w = b - o;
    const double c = cross(u, w);
    return c > kGeomTol * norm(u) * norm(w) ? c : 0.0;
  };
  std::vector<Vec2> hull(2 * uniq.size());
  std::size_t k = 0;
  for (const auto& p : uniq) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = uniq.size() - 1, t = k + 1; i-- > 0;) {
    const Vec2& p = uniq[i];
    while (k >= t && turn(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return Polygon{std::move(hull)};
}

inline Polygon convex_hull_2d(const std::vector<Vec2>& points) {
  return convex_hull_2d(std::span<const Vec2>(points));
}

/// Closed curve tracing the boundary of a convex polygon.
inline Curve polygon_curve(const Polygon& poly) {
  if (poly.size() < 3) throw Error(ErrorCode::TooFewPoints, "polygon curve needs a non-degenerate polygon");
  Curve c = natural_parametrize(std::span<const Vec2>(poly.vertices), true);
  c.set_class_tag(CurveClass::convex_boundary);
  return c;
}

namespace detail {

// Convex closed loop traversed once: consecutive edge cross products share
// one sign and the edge directions turn by exactly one full revolution.
inline bool planar_loop_convex(const std::vector<Vec2>& pts, bool allow_degenerate) {
  const std::size_t n = pts.size();
  std::vector<Vec2> edges;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = pts[(i + 1) % n] - pts[i];
    if (norm(e) > kGeomTol) edges.push_back(e);
  }
  if (edges.size() < 2) return allow_degenerate;
  int sign = 0;
  double total = 0.0;
  bool any_turn = false;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Vec2& a = edges[i];
    const Vec2& b = edges[(i + 1) % edges.size()];
    const double c = cross(a, b);
    const double scale = norm(a) * norm(b);
    const double ang = std::atan2(c, dot(a, b));
    if (std::abs(c) > 1e-9 * scale) {
      const int s = c > 0 ? 1 : -1;
      if (sign != 0 && s != sign) return false;
      sign = s;
      any_turn = true;
    }
    total += ang;
  }
  if (!any_turn) return allow_degenerate;
  const double revolutions = std::abs(total) / (2.0 * std::numbers::pi);
  if (std::abs(revolutions - 1.0) < 1e-6) return true;
  // Flat projections double back on themselves: total turning is a multiple of pi.
  return allow_degenerate && std::abs(total) < 1e-6;
}

}  // namespace detail

/// Checks the convex_boundary class invariant on a closed planar curve.
inline bool is_convex_boundary(const Curve& c) {
  if (c.dim() != 2 || !c.closed()) return false;
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) pts.push_back({c.point(i)[0], c.point(i)[1]});
  return detail::planar_loop_convex(pts, false);
}

/// Checks that every coordinate-plane projection of a closed curve is a
/// convex boundary, possibly degenerate.
inline bool is_coord_convex(const Curve& c) {
  if (!c.closed() || c.dim() < 2) return false;
  for (std::size_t a = 0; a < c.dim(); ++a) {
    for (std::size_t b = a + 1; b < c.dim(); ++b) {
      std::vector<Vec2> pts;
      for (std::size_t i = 0; i + 1 < c.size(); ++i) pts.push_back({c.point(i)[a], c.point(i)[b]});
      if (!detail::planar_loop_convex(pts, true)) return false;
    }
  }
  return true;
}

}  // namespace dcsplit
