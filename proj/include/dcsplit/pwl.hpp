#pragma once

// Piecewise-linear functions on the plane: triangulated functions on a
// convex domain and positively homogeneous functions on a fan of sectors.
// Both expose their dihedral edges (kinks between adjacent linear pieces).

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "dcsplit/error.hpp"
#include "dcsplit/geometry.hpp"
#include "dcsplit/vec2.hpp"

namespace dcsplit {

enum class EdgeKind { convex, concave, flat };

constexpr std::string_view to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::convex: return "convex";
    case EdgeKind::concave: return "concave";
    case EdgeKind::flat: return "flat";
  }
  return "flat";
}

/// Kink between two adjacent linear pieces. The left cell lies to the left
/// of `edge_dir`; `normal` points from the left cell into the right one.
struct DihedralEdge {
  std::size_t id = 0;
  EdgeKind kind = EdgeKind::flat;
  Vec2 grad_left;
  Vec2 grad_right;
  Vec2 jump;  // grad_right - grad_left
  Vec2 anchor;
  Vec2 edge_dir;
  Vec2 normal;
  double jump_norm = 0.0;
  double strength = 0.0;  // (jump, normal): positive on convex kinks
  std::size_t left_cell = 0;
  std::size_t right_cell = 0;
  // Extent of the edge: a segment for meshes, the unit ray for fans.
  Vec2 tail;
  Vec2 head;
  bool is_ray = false;
};

/// Relative tolerance separating convex, concave and flat edges.
inline double convexity_eps(const Vec2& gl, const Vec2& gr) {
  return 1e-9 * (1.0 + std::max(norm(gl), norm(gr)));
}

namespace detail {

inline DihedralEdge make_edge(std::size_t id, Vec2 tail, Vec2 head, Vec2 gl, Vec2 gr, std::size_t left,
                              std::size_t right, bool is_ray) {
  DihedralEdge e;
  e.id = id;
  e.tail = tail;
  e.head = head;
  e.is_ray = is_ray;
  e.edge_dir = normalized(head - tail);
  e.normal = -perp(e.edge_dir);
  e.anchor = is_ray ? Vec2{} : (tail + head) * 0.5;
  e.grad_left = gl;
  e.grad_right = gr;
  e.jump = gr - gl;
  e.jump_norm = norm(e.jump);
  e.strength = dot(e.jump, e.normal);
  e.left_cell = left;
  e.right_cell = right;
  const double eps = convexity_eps(gl, gr);
  e.kind = e.strength > eps ? EdgeKind::convex : (e.strength < -eps ? EdgeKind::concave : EdgeKind::flat);
  return e;
}

/// Gradient of the affine function through three valued points.
inline Vec2 plane_gradient(const Vec2& p0, const Vec2& p1, const Vec2& p2, double v0, double v1, double v2) {
  const Vec2 e1 = p1 - p0;
  const Vec2 e2 = p2 - p0;
  const double det = cross(e1, e2);
  const double d1 = v1 - v0;
  const double d2 = v2 - v0;
  return {(d1 * e2.y - d2 * e1.y) / det, (e1.x * d2 - e2.x * d1) / det};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Triangulated piecewise-linear function

using Triangle = std::array<std::uint32_t, 3>;

class TriangulatedPWL {
 public:
  TriangulatedPWL() = default;

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<Vec2>& gradients() const { return gradients_; }
  const Polygon& domain_hull() const { return hull_; }
  std::size_t cell_count() const { return triangles_.size(); }

  /// Index of the lowest-numbered triangle containing `x`, if any.
  std::optional<std::size_t> locate(const Vec2& x) const {
    if (x.x < lo_.x - tol_ || x.y < lo_.y - tol_ || x.x > hi_.x + tol_ || x.y > hi_.y + tol_) return std::nullopt;
    const auto bucket = bucket_of(x);
    for (std::uint32_t t : buckets_[bucket]) {
      if (contains_point(t, x)) return t;
    }
    return std::nullopt;
  }

  double value_in(std::size_t cell, const Vec2& x) const {
    const Vec2& p0 = vertices_[triangles_[cell][0]];
    return values_[triangles_[cell][0]] + dot(gradients_[cell], x - p0);
  }

  double evaluate(const Vec2& x) const {
    const auto cell = locate(x);
    if (!cell) throw Error(ErrorCode::OutOfDomain, "point lies outside the triangulated domain");
    return value_in(*cell, x);
  }

  /// Interior edges in ascending (min vertex, max vertex) order.
  std::vector<DihedralEdge> edges() const {
    std::vector<DihedralEdge> out;
    out.reserve(interior_.size());
    for (const auto& ie : interior_) {
      const Vec2 a = vertices_[ie.a];
      const Vec2 b = vertices_[ie.b];
      out.push_back(detail::make_edge(out.size(), a, b, gradients_[ie.left], gradients_[ie.right], ie.left,
                                      ie.right, false));
    }
    return out;
  }

  /// Same triangulation carrying different vertex values.
  TriangulatedPWL with_values(std::vector<double> values) const {
    if (values.size() != vertices_.size()) throw Error(ErrorCode::NonConforming, "one value per vertex is required");
    TriangulatedPWL g = *this;
    g.values_ = std::move(values);
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      const auto& tri = triangles_[t];
      g.gradients_[t] = detail::plane_gradient(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]],
                                               g.values_[tri[0]], g.values_[tri[1]], g.values_[tri[2]]);
    }
    return g;
  }

  friend TriangulatedPWL build_triangulated(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
                                            std::vector<double> values);

 private:
  struct InteriorEdge {
    std::uint32_t a, b;
    std::size_t left, right;
  };

  bool contains_point(std::size_t t, const Vec2& x) const {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const Vec2& p = vertices_[tri[k]];
      const Vec2& q = vertices_[tri[(k + 1) % 3]];
      const Vec2 e = q - p;
      if (cross(e, x - p) < -tol_ * norm(e)) return false;
    }
    return true;
  }

  std::size_t bucket_of(const Vec2& x) const {
    auto clampi = [](double v, std::size_t n) {
      if (!(v > 0.0)) return std::size_t{0};
      const auto i = static_cast<std::size_t>(v);
      return std::min(i, n - 1);
    };
    const std::size_t ix = clampi((x.x - lo_.x) / cell_w_, nx_);
    const std::size_t iy = clampi((x.y - lo_.y) / cell_h_, ny_);
    return iy * nx_ + ix;
  }

  void build_locator() {
    lo_ = {INFINITY, INFINITY};
    hi_ = {-INFINITY, -INFINITY};
    for (const auto& v : vertices_) {
      lo_ = {std::min(lo_.x, v.x), std::min(lo_.y, v.y)};
      hi_ = {std::max(hi_.x, v.x), std::max(hi_.y, v.y)};
    }
    const double scale = std::max(hi_.x - lo_.x, hi_.y - lo_.y);
    tol_ = 1e-12 * std::max(1.0, scale);
    const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(triangles_.size()))));
    nx_ = ny_ = std::max<std::size_t>(1, side);
    cell_w_ = std::max((hi_.x - lo_.x) / static_cast<double>(nx_), 1e-300);
    cell_h_ = std::max((hi_.y - lo_.y) / static_cast<double>(ny_), 1e-300);
    buckets_.assign(nx_ * ny_, {});
    for (std::uint32_t t = 0; t < triangles_.size(); ++t) {
      Vec2 tlo{INFINITY, INFINITY}, thi{-INFINITY, -INFINITY};
      for (auto vi : triangles_[t]) {
        const Vec2& v = vertices_[vi];
        tlo = {std::min(tlo.x, v.x), std::min(tlo.y, v.y)};
        thi = {std::max(thi.x, v.x), std::max(thi.y, v.y)};
      }
      const Vec2 pad{tol_, tol_};
      const std::size_t b0 = bucket_of(tlo - pad);
      const std::size_t b1 = bucket_of(thi + pad);
      for (std::size_t iy = b0 / nx_; iy <= b1 / nx_; ++iy) {
        for (std::size_t ix = b0 % nx_; ix <= b1 % nx_; ++ix) buckets_[iy * nx_ + ix].push_back(t);
      }
    }
  }

  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<double> values_;
  std::vector<Vec2> gradients_;
  Polygon hull_;
  std::vector<InteriorEdge> interior_;

  Vec2 lo_, hi_;
  double tol_ = 1e-12;
  std::size_t nx_ = 1, ny_ = 1;
  double cell_w_ = 1.0, cell_h_ = 1.0;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

/// Validates a conforming triangulation of a convex region and computes the
/// per-triangle gradients. Clockwise triangles are reoriented.
inline TriangulatedPWL build_triangulated(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
                                          std::vector<double> values) {
  if (vertices.size() != values.size()) throw Error(ErrorCode::NonConforming, "one value per vertex is required");
  if (triangles.empty()) throw Error(ErrorCode::NonConforming, "no triangles");
  Polygon hull = convex_hull_2d(vertices);
  const double scale = std::max(diameter(hull), 1e-300);
  const double area_eps = 1e-14 * scale * scale;

  double total_area = 0.0;
  for (auto& tri : triangles) {
    for (auto vi : tri) {
      if (vi >= vertices.size()) throw Error(ErrorCode::NonConforming, "triangle references a missing vertex");
    }
    double a = 0.5 * cross(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]);
    if (a < 0.0) {
      std::swap(tri[1], tri[2]);
      a = -a;
    }
    if (a <= area_eps) throw Error(ErrorCode::DegenerateTriangle, "triangle area below tolerance");
    total_area += a;
  }

  // Directed edge (a -> b) belongs to the triangle on its left.
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::array<std::int64_t, 2>> edge_map;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t a = triangles[t][k];
      const std::uint32_t b = triangles[t][(k + 1) % 3];
      auto& slot = edge_map.try_emplace({std::min(a, b), std::max(a, b)}, std::array<std::int64_t, 2>{-1, -1})
                       .first->second;
      const int side = a < b ? 0 : 1;  // 0: left of (min -> max)
      if (slot[side] >= 0) throw Error(ErrorCode::NonConforming, "edge shared with inconsistent orientation");
      slot[side] = static_cast<std::int64_t>(t);
    }
  }

  TriangulatedPWL f;
  const double hull_area = area(hull);
  if (std::abs(total_area - hull_area) > 1e-9 * std::max(hull_area, 1e-300)) {
    throw Error(ErrorCode::NonConforming, "triangles do not tile the convex hull of the vertices");
  }
  const double tol = 1e-9 * scale;
  auto on_hull_edge = [&](const Vec2& a, const Vec2& b) {
    const auto& hv = hull.vertices;
    for (std::size_t i = 0; i < hv.size(); ++i) {
      const Vec2& p = hv[i];
      const Vec2& q = hv[(i + 1) % hv.size()];
      const Vec2 e = q - p;
      const double len = norm(e);
      if (std::abs(cross(e, a - p)) <= tol * len && std::abs(cross(e, b - p)) <= tol * len) return true;
    }
    return false;
  };
  for (const auto& [key, slot] : edge_map) {
    if (slot[0] >= 0 && slot[1] >= 0) {
      f.interior_.push_back({key.first, key.second, static_cast<std::size_t>(slot[0]),
                             static_cast<std::size_t>(slot[1])});
    } else if (!on_hull_edge(vertices[key.first], vertices[key.second])) {
      throw Error(ErrorCode::NonConforming, "boundary edge lies inside the domain (hanging vertex)");
    }
  }

  f.gradients_.reserve(triangles.size());
  for (const auto& tri : triangles) {
    f.gradients_.push_back(detail::plane_gradient(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]],
                                                  values[tri[0]], values[tri[1]], values[tri[2]]));
  }
  f.vertices_ = std::move(vertices);
  f.triangles_ = std::move(triangles);
  f.values_ = std::move(values);
  f.hull_ = std::move(hull);
  f.build_locator();
  return f;
}

// ---------------------------------------------------------------------------
// Positively homogeneous sector fan

class SectorFanPH {
 public:
  SectorFanPH() = default;

  std::size_t size() const { return ray_values_.size(); }
  /// m + 1 angles; the last one closes the fan at angles[0] + 2 pi.
  const std::vector<double>& angles() const { return angles_; }
  const std::vector<double>& ray_values() const { return ray_values_; }
  const std::vector<Vec2>& sector_gradients() const { return gradients_; }

  Vec2 ray(std::size_t i) const { return unit_at(angles_[i]); }

  std::size_t sector_of(const Vec2& x) const {
    double theta = std::atan2(x.y, x.x);
    const double t0 = angles_.front();
    theta = t0 + std::fmod(std::fmod(theta - t0, 2.0 * std::numbers::pi) + 2.0 * std::numbers::pi,
                           2.0 * std::numbers::pi);
    auto it = std::upper_bound(angles_.begin(), angles_.end(), theta);
    std::size_t s = static_cast<std::size_t>(it - angles_.begin());
    s = s == 0 ? 0 : s - 1;
    return std::min(s, size() - 1);
  }

  double evaluate(const Vec2& x) const {
    if (x.x == 0.0 && x.y == 0.0) return 0.0;
    return dot(gradients_[sector_of(x)], x);
  }

  /// One edge per ray; the left cell of ray i is sector i.
  std::vector<DihedralEdge> edges() const {
    std::vector<DihedralEdge> out;
    const std::size_t m = size();
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t right = (i + m - 1) % m;
      out.push_back(detail::make_edge(i, Vec2{}, ray(i), gradients_[i], gradients_[right], i, right, true));
    }
    return out;
  }

  friend SectorFanPH build_sector_fan(std::vector<double> values, std::vector<double> angles);

 private:
  std::vector<double> angles_;
  std::vector<double> ray_values_;
  std::vector<Vec2> gradients_;
};

/// Fan through rays at `angles` carrying `values`. Each sector gradient is the
/// solution of the 2x2 system reproducing the values on its two bounding rays.
inline SectorFanPH build_sector_fan(std::vector<double> values, std::vector<double> angles) {
  const double two_pi = 2.0 * std::numbers::pi;
  if (angles.size() == values.size() + 1) angles.pop_back();
  if (angles.size() != values.size()) throw Error(ErrorCode::SingularSector, "one value per ray is required");
  const std::size_t m = angles.size();
  if (m < 3) throw Error(ErrorCode::SectorTooWide, "a fan needs at least 3 rays");
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (!(angles[i + 1] > angles[i])) throw Error(ErrorCode::SingularSector, "angles must increase strictly");
  }
  angles.push_back(angles.front() + two_pi);
  if (!(angles[m] > angles[m - 1])) throw Error(ErrorCode::SingularSector, "angles span more than a full turn");

  SectorFanPH fan;
  fan.gradients_.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double width = angles[i + 1] - angles[i];
    if (width >= std::numbers::pi) throw Error(ErrorCode::SectorTooWide, "sector spans pi or more");
    const Vec2 ua = unit_at(angles[i]);
    const Vec2 ub = unit_at(angles[i + 1]);
    const double det = cross(ua, ub);
    if (det < 1e-12) throw Error(ErrorCode::SingularSector, "sector rays nearly parallel");
    const double va = values[i];
    const double vb = values[(i + 1) % m];
    fan.gradients_.push_back({(va * ub.y - vb * ua.y) / det, (ua.x * vb - ub.x * va) / det});
  }
  fan.angles_ = std::move(angles);
  fan.ray_values_ = std::move(values);
  return fan;
}

/// m equal sectors starting at angle `offset`.
inline std::vector<double> uniform_angles(std::size_t m, double offset = 0.0) {
  std::vector<double> a(m);
  for (std::size_t i = 0; i < m; ++i) a[i] = offset + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
  return a;
}

// Free-function surface shared by both representations.

inline double evaluate(const TriangulatedPWL& f, const Vec2& x) { return f.evaluate(x); }
inline double evaluate(const SectorFanPH& f, const Vec2& x) { return f.evaluate(x); }

inline std::vector<DihedralEdge> enumerate_edges(const TriangulatedPWL& f) { return f.edges(); }
inline std::vector<DihedralEdge> enumerate_edges(const SectorFanPH& f) { return f.edges(); }

inline double lipschitz_constant(const TriangulatedPWL& f) {
  double l = 0.0;
  for (const auto& g : f.gradients()) l = std::max(l, norm(g));
  return l;
}

inline double lipschitz_constant(const SectorFanPH& f) {
  double l = 0.0;
  for (const auto& g : f.sector_gradients()) l = std::max(l, norm(g));
  return l;
}

}  // namespace dcsplit
