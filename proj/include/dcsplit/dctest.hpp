#pragma once

// DC-representability diagnostics for Lipschitz functions: decomposition on
// nested uniform meshes, derivative-variation tests over families of convex
// curves (planar and in R^3), and the convergence test for sequences of
// directional-derivative traces.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dcsplit/decompose.hpp"
#include "dcsplit/error.hpp"
#include "dcsplit/geometry.hpp"
#include "dcsplit/parallel.hpp"
#include "dcsplit/pwl.hpp"
#include "dcsplit/rng.hpp"
#include "dcsplit/variation.hpp"

namespace dcsplit {

// ---------------------------------------------------------------- meshes

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
};

namespace detail {

inline Polygon ccw_convex_domain(const Polygon& domain) {
  Polygon d = domain;
  if (d.size() < 3) throw Error(ErrorCode::NonConvexDomain, "domain needs at least 3 vertices");
  if (area(d) < 0.0) std::reverse(d.vertices.begin(), d.vertices.end());
  if (!is_convex_ccw(d.vertices)) throw Error(ErrorCode::NonConvexDomain, "domain is not convex");
  return d;
}

inline double max_triangle_diameter(const Mesh& m) {
  double d = 0.0;
  for (const auto& t : m.triangles) {
    for (int k = 0; k < 3; ++k) d = std::max(d, distance(m.vertices[t[k]], m.vertices[t[(k + 1) % 3]]));
  }
  return d;
}

}  // namespace detail

inline double max_triangle_diameter(const Mesh& m) { return detail::max_triangle_diameter(m); }

/// Fan triangulation of a convex domain from its first vertex, refined
/// `level` times by midpoint quadrisection. Level k + 1 refines level k.
inline Mesh triangulate_refine(const Polygon& domain, unsigned level) {
  const Polygon d = detail::ccw_convex_domain(domain);
  Mesh m;
  m.vertices = d.vertices;
  for (std::uint32_t k = 1; k + 1 < d.size(); ++k) m.triangles.push_back({0, k, k + 1});
  for (unsigned l = 0; l < level; ++l) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const auto id = static_cast<std::uint32_t>(m.vertices.size());
      m.vertices.push_back((m.vertices[a] + m.vertices[b]) * 0.5);
      mid.emplace(key, id);
      return id;
    };
    std::vector<Triangle> next;
    next.reserve(4 * m.triangles.size());
    for (const auto& t : m.triangles) {
      const auto ab = midpoint(t[0], t[1]);
      const auto bc = midpoint(t[1], t[2]);
      const auto ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({ab, t[1], bc});
      next.push_back({ca, bc, t[2]});
      next.push_back({ab, bc, ca});
    }
    m.triangles = std::move(next);
  }
  return m;
}

/// Interpolant of f on a mesh.
inline TriangulatedPWL sample_on_mesh(const Field& f, const Mesh& mesh) {
  std::vector<double> vals(mesh.vertices.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double c[2] = {mesh.vertices[i].x, mesh.vertices[i].y};
    vals[i] = f(c);
  }
  return build_triangulated(mesh.vertices, mesh.triangles, std::move(vals));
}

/// Regular grid of points inside the domain, fixed for a given domain so
/// that errors at different levels are comparable.
inline std::vector<Vec2> probe_grid(const Polygon& domain, std::size_t per_side = 101) {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  for (const auto& v : domain.vertices) {
    x0 = std::min(x0, v.x), x1 = std::max(x1, v.x);
    y0 = std::min(y0, v.y), y1 = std::max(y1, v.y);
  }
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < per_side; ++i) {
    for (std::size_t j = 0; j < per_side; ++j) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(per_side);
      const double v = (static_cast<double>(j) + 0.5) / static_cast<double>(per_side);
      const Vec2 p{x0 + u * (x1 - x0), y0 + v * (y1 - y0)};
      if (contains(domain, p)) pts.push_back(p);
    }
  }
  return pts;
}

struct GeneralLevel {
  unsigned level = 0;
  std::size_t cells = 0;          // triangles of the sampling mesh
  DCPair<TriangulatedPWL> pair;
  double sup_error = 0.0;         // max |f - f_N| over the probe grid
  double reconstruction_error = 0.0;  // max |f1 - f2 - f_N| over the vertices of the parts
  double lipschitz_f1 = 0.0;
  double lipschitz_f2 = 0.0;
  double f1_sup = 0.0;            // max |f1| over its vertices; f1 vanishes at the centroid
};

/// Samples f on nested meshes, decomposes each interpolant and normalizes
/// f1 to vanish at the centroid of the domain.
inline std::vector<GeneralLevel> dc_decompose_general(const Field& f, const Polygon& domain,
                                                      std::span<const unsigned> levels) {
  const Polygon d = detail::ccw_convex_domain(domain);
  const auto probes = probe_grid(d);
  std::vector<double> exact(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double c[2] = {probes[i].x, probes[i].y};
    exact[i] = f(c);
  }
  std::vector<GeneralLevel> out;
  for (unsigned level : levels) {
    GeneralLevel lv;
    lv.level = level;
    const TriangulatedPWL fn = sample_on_mesh(f, triangulate_refine(d, level));
    lv.cells = fn.cell_count();
    for (std::size_t i = 0; i < probes.size(); ++i) {
      lv.sup_error = std::max(lv.sup_error, std::abs(exact[i] - fn.evaluate(probes[i])));
    }
    lv.pair = aleksandrov_decompose(fn);
    const auto& v1 = lv.pair.f1.values();
    const auto& v2 = lv.pair.f2.values();
    const auto& verts = lv.pair.f1.vertices();
    for (std::size_t i = 0; i < verts.size(); ++i) {
      lv.reconstruction_error = std::max(lv.reconstruction_error, std::abs(v1[i] - v2[i] - fn.evaluate(verts[i])));
      lv.f1_sup = std::max(lv.f1_sup, std::abs(v1[i]));
    }
    lv.lipschitz_f1 = lipschitz_constant(lv.pair.f1);
    lv.lipschitz_f2 = lipschitz_constant(lv.pair.f2);
    out.push_back(std::move(lv));
  }
  return out;
}

// ---------------------------------------------------------- curve families

enum class FamilyKind { circle_family, convex_boundary_family, coord_convex_family, sphere_sections };

constexpr std::string_view to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::circle_family: return "circle_family";
    case FamilyKind::convex_boundary_family: return "convex_boundary_family";
    case FamilyKind::coord_convex_family: return "coord_convex_family";
    case FamilyKind::sphere_sections: return "sphere_sections";
  }
  return "circle_family";
}

struct CurveFamily {
  FamilyKind kind = FamilyKind::convex_boundary_family;
  std::size_t count = 20;
  double r_min = 0.1;             // sub-disk / circle / ellipse radii
  double r_max = 0.4;
  std::size_t samples = 65536;    // polyline resolution of smooth curves; a multiple of every trace size
  std::size_t hotspot_circles = 4;  // planar families only
  std::uint64_t seed = 1;
};

struct FamilyCurve {
  std::string id;
  Curve curve;
};

namespace detail {

/// Distance from an interior point to the boundary of a ccw convex polygon.
inline double inner_distance(const Polygon& d, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Vec2 a = d.vertices[i], b = d.vertices[(i + 1) % d.size()];
    best = std::min(best, cross(b - a, p - a) / norm(b - a));
  }
  return best;
}

inline void bounding_box(const Polygon& d, Vec2& lo, Vec2& hi) {
  lo = hi = d.vertices.front();
  for (const auto& v : d.vertices) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  }
}

/// Random disk inside the domain with radius in [r_min, r_max].
inline std::pair<Vec2, double> random_disk(const Polygon& d, Rng& rng, double r_min, double r_max) {
  Vec2 lo, hi;
  bounding_box(d, lo, hi);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const Vec2 c{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
    const double room = inner_distance(d, c);
    if (room < r_min) continue;
    return {c, rng.uniform(r_min, std::min(r_max, room))};
  }
  throw Error(ErrorCode::EmptyFamily, "domain too small for the requested radii");
}

/// Sutherland-Hodgman clip of a convex polygon against a ccw convex domain.
inline std::vector<Vec2> clip_convex(std::vector<Vec2> poly, const Polygon& d) {
  for (std::size_t i = 0; i < d.size() && !poly.empty(); ++i) {
    const Vec2 a = d.vertices[i], b = d.vertices[(i + 1) % d.size()];
    auto side = [&](const Vec2& p) { return cross(b - a, p - a); };
    std::vector<Vec2> out;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Vec2 p = poly[k], q = poly[(k + 1) % poly.size()];
      const double sp = side(p), sq = side(q);
      if (sp >= 0.0) out.push_back(p);
      if ((sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0)) out.push_back(p + (q - p) * (sp / (sp - sq)));
    }
    poly = std::move(out);
  }
  return poly;
}

inline Curve hull_curve(std::vector<Vec2> pts) {
  const Polygon hull = convex_hull_2d(pts);
  if (hull.size() < 3) throw Error(ErrorCode::TooFewPoints, "degenerate hull");
  return polygon_curve(hull);
}

}  // namespace detail

/// Planar family inside a convex domain; deterministic in the seed.
inline std::vector<FamilyCurve> generate_family(const CurveFamily& fam, const Polygon& domain) {
  const Polygon d = detail::ccw_convex_domain(domain);
  Rng rng(fam.seed);
  std::vector<FamilyCurve> out;
  for (std::size_t i = 0; i < fam.count; ++i) {
    const auto [c, r] = detail::random_disk(d, rng, fam.r_min, fam.r_max);
    if (fam.kind == FamilyKind::circle_family) {
      out.push_back({"c" + std::to_string(i), circle_curve(r, fam.samples, c)});
    } else if (fam.kind == FamilyKind::convex_boundary_family) {
      for (;;) {
        const std::size_t k = 6 + static_cast<std::size_t>(rng.next() % 10);
        std::vector<Vec2> pts;
        for (std::size_t j = 0; j < k; ++j) {
          const double rho = r * std::sqrt(rng.uniform());
          pts.push_back(c + unit_at(rng.uniform(0.0, 2.0 * std::numbers::pi)) * rho);
        }
        if (convex_hull_2d(pts).size() >= 3) {
          out.push_back({"p" + std::to_string(i), detail::hull_curve(std::move(pts))});
          break;
        }
      }
    } else {
      throw Error(ErrorCode::ConfigInvalid, "family kind is not planar");
    }
  }
  return out;
}

/// Curves in R^3: sections of the unit sphere, or ellipses whose coordinate
/// projections are all convex.
inline std::vector<FamilyCurve> generate_family_3d(const CurveFamily& fam) {
  Rng rng(fam.seed);
  std::vector<FamilyCurve> out;
  auto random_unit = [&rng] {
    for (;;) {
      std::array<double, 3> v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      if (n > 0.1 && n <= 1.0) return std::array<double, 3>{v[0] / n, v[1] / n, v[2] / n};
    }
  };
  for (std::size_t i = 0; i < fam.count; ++i) {
    if (fam.kind == FamilyKind::sphere_sections) {
      const auto normal = random_unit();
      out.push_back({"s" + std::to_string(i), sphere_section_curve(normal, rng.uniform(-0.9, 0.9), fam.samples)});
    } else if (fam.kind == FamilyKind::coord_convex_family) {
      const std::array<double, 3> c{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
      const auto a = random_unit();
      auto b = random_unit();
      const double ab = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
      for (int k = 0; k < 3; ++k) b[k] -= ab * a[k];
      const double bn = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
      const double ra = rng.uniform(fam.r_min, fam.r_max), rb = rng.uniform(fam.r_min, fam.r_max);
      std::vector<double> coords;
      for (std::size_t j = 0; j < fam.samples; ++j) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(fam.samples);
        for (int k = 0; k < 3; ++k) coords.push_back(c[k] + ra * std::cos(t) * a[k] + rb * std::sin(t) * b[k] / bn);
      }
      Curve curve = natural_parametrize(3, std::move(coords), true);
      curve.set_class_tag(CurveClass::coord_convex);
      out.push_back({"e" + std::to_string(i), std::move(curve)});
    } else {
      throw Error(ErrorCode::ConfigInvalid, "family kind is not spatial");
    }
  }
  return out;
}

/// Recursive quadrant subdivision of the domain's bounding box. Each cell is
/// scored by the variation of f along its boundary, enlarged by a quarter
/// and clipped to the domain; the best cell is kept.
inline std::optional<Vec2> find_hotspot(const Field& f, const Polygon& domain, unsigned depth = 8,
                                        std::size_t n = 1024) {
  const Polygon d = detail::ccw_convex_domain(domain);
  Vec2 lo, hi;
  detail::bounding_box(d, lo, hi);
  std::optional<Vec2> best_center;
  for (unsigned level = 0; level < std::min(depth, 8u); ++level) {
    const Vec2 mid = (lo + hi) * 0.5;
    const std::array<std::pair<Vec2, Vec2>, 4> quads{{{lo, mid}, {{mid.x, lo.y}, {hi.x, mid.y}}, {{lo.x, mid.y}, {mid.x, hi.y}}, {mid, hi}}};
    double best = -1.0;
    std::optional<std::size_t> pick;
    for (std::size_t q = 0; q < 4; ++q) {
      const auto [a, b] = quads[q];
      const Vec2 c = (a + b) * 0.5;
      const Vec2 h = (b - a) * 0.625;
      std::vector<Vec2> sq{{c.x - h.x, c.y - h.y}, {c.x + h.x, c.y - h.y}, {c.x + h.x, c.y + h.y}, {c.x - h.x, c.y + h.y}};
      auto clipped = detail::clip_convex(std::move(sq), d);
      if (clipped.size() < 3) continue;
      double score;
      try {
        const Curve probe = detail::hull_curve(std::move(clipped));
        score = derivative_variation(trace(f, probe, n));
      } catch (const Error&) {
        continue;
      }
      if (score > best) best = score, pick = q;
    }
    if (!pick) break;
    lo = quads[*pick].first;
    hi = quads[*pick].second;
    best_center = (lo + hi) * 0.5;
  }
  return best_center;
}

// ------------------------------------------------------------- diagnostics

enum class DCClass { likely_dc, divergent, inconclusive };

constexpr std::string_view to_string(DCClass v) {
  switch (v) {
    case DCClass::likely_dc: return "likely_dc";
    case DCClass::divergent: return "divergent";
    case DCClass::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct CurveReport {
  std::string id;
  CurveClass class_tag = CurveClass::free;
  double length = 0.0;
  double curve_turn = 0.0;  // turn of the curve itself at the finest level
  VariationReport report;
  /// Final variation divided by 1 + turn of the curve; informational only.
  double weighted_variation() const {
    return report.levels.empty() ? 0.0 : report.levels.back().variation / (1.0 + curve_turn);
  }
};

struct DCVerdict {
  DCClass verdict = DCClass::inconclusive;
  double constant_estimate = 0.0;  // max over curves of the final variation
  std::string worst_curve;         // curve attaining it
  std::vector<CurveReport> reports;
  std::optional<Vec2> hotspot;
};

namespace detail {

inline DCVerdict aggregate(const Field& f, const std::vector<FamilyCurve>& curves, std::span<const std::size_t> schedule,
                           const VerdictRule& rule) {
  if (curves.empty()) throw Error(ErrorCode::EmptyFamily, "no curves to diagnose");
  DCVerdict out;
  out.reports.resize(curves.size());
  parallel_for(curves.size(), [&](std::size_t i) {
    CurveReport& cr = out.reports[i];
    cr.id = curves[i].id;
    cr.class_tag = curves[i].curve.class_tag();
    cr.length = curves[i].curve.length();
    cr.report = variation_report(f, curves[i].curve, schedule, rule);
    cr.curve_turn = planar_turn(trace(f, curves[i].curve, schedule.back()));
  });
  bool any_divergent = false, all_bounded = true;
  double worst = -1.0;
  for (const auto& cr : out.reports) {
    any_divergent = any_divergent || cr.report.verdict == Verdict::divergent;
    all_bounded = all_bounded && cr.report.verdict == Verdict::bounded;
    const double v = cr.report.levels.back().variation;
    if (v > worst) worst = v, out.worst_curve = cr.id;
  }
  out.constant_estimate = worst;
  out.verdict = any_divergent ? DCClass::divergent : (all_bounded ? DCClass::likely_dc : DCClass::inconclusive);
  return out;
}

}  // namespace detail

/// Default refinement schedule of the curve diagnostics.
inline std::vector<std::size_t> default_schedule() { return {1024, 2048, 4096, 8192, 16384}; }

/// Variation test over a planar family plus concentric circles around the
/// hot spot of f. Divergent if any curve diverges, likely_dc if all are bounded.
inline DCVerdict dc_diagnose(const Field& f, const Polygon& domain, const CurveFamily& family,
                             std::span<const std::size_t> schedule, const VerdictRule& rule = {}) {
  const Polygon d = detail::ccw_convex_domain(domain);
  std::vector<FamilyCurve> curves = family.count > 0 ? generate_family(family, d) : std::vector<FamilyCurve>{};
  std::optional<Vec2> hotspot;
  if (family.hotspot_circles > 0) {
    hotspot = find_hotspot(f, d);
    if (hotspot) {
      const double room = 0.9 * detail::inner_distance(d, *hotspot);
      double r = std::min(room, family.r_max);
      for (std::size_t j = 0; j < family.hotspot_circles && r > 1e-6; ++j, r *= 0.5) {
        curves.push_back({"h" + std::to_string(j), circle_curve(r, family.samples, *hotspot)});
      }
    }
  }
  for (const auto& fc : curves) {
    for (std::size_t i = 0; i + 1 < fc.curve.size(); ++i) {
      if (!contains(d, {fc.curve.point(i)[0], fc.curve.point(i)[1]}, 1e-12)) {
        throw Error(ErrorCode::OutOfDomain, "curve " + fc.id + " leaves the domain");
      }
    }
  }
  DCVerdict out = detail::aggregate(f, curves, schedule, rule);
  out.hotspot = hotspot;
  return out;
}

/// Same test for curves in R^3. Only dimension 3 is supported.
inline DCVerdict dc_diagnose_nd(const Field& f, std::size_t dim, std::span<const CurveFamily> families,
                                std::span<const std::size_t> schedule, const VerdictRule& rule = {}) {
  if (dim != 3) throw Error(ErrorCode::UnsupportedDimension, "only n = 3 is supported");
  std::vector<FamilyCurve> curves;
  for (const auto& fam : families) {
    auto part = generate_family_3d(fam);
    for (auto& c : part) curves.push_back(std::move(c));
  }
  return detail::aggregate(f, curves, schedule, rule);
}

// ------------------------------------------------------------ qd sequences

struct QDSequenceResult {
  bool conditions_hold = false;
  bool uniform_ok = false;      // traces converge uniformly
  bool variation_ok = false;    // variations bounded by a finite constant
  double uniform_gap = 0.0;     // sup distance used for the uniform test
  double uniform_tol = 0.0;
  double c_estimate = 0.0;      // max variation over the sequence
  double limit_variation_bound = 0.0;
  std::optional<double> limit_variation;
};

/// Checks the two conditions under which the limit of directional
/// derivatives of f_k is the directional derivative of a DC function:
/// uniform convergence of the traces and a common bound on their variation.
/// Without an explicit limit the last trace stands in for it and the
/// uniform test compares the last two traces.
inline QDSequenceResult qd_sequence_test(std::span<const TraceSamples> traces, std::optional<double> uniform_tol = {},
                                         const TraceSamples* limit = nullptr) {
  if (traces.size() < 2) throw Error(ErrorCode::GridMismatch, "need at least two traces");
  auto same_grid = [&](const TraceSamples& a) {
    const auto& ref = traces.front();
    if (a.size() != ref.size() || a.closed != ref.closed) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::abs(a.t[i] - ref.t[i]) > 1e-12 * (1.0 + std::abs(ref.t[i]))) return false;
    }
    return true;
  };
  for (const auto& ts : traces) {
    if (!same_grid(ts)) throw Error(ErrorCode::GridMismatch, "traces are not on a common grid");
  }
  if (limit && !same_grid(*limit)) throw Error(ErrorCode::GridMismatch, "limit trace is not on the common grid");

  QDSequenceResult res;
  double scale = 0.0;
  for (const auto& ts : traces) {
    for (double v : ts.phi) scale = std::max(scale, std::abs(v));
  }
  if (limit) {
    for (double v : limit->phi) scale = std::max(scale, std::abs(v));
  }
  res.uniform_tol = uniform_tol.value_or(1e-6 * (1.0 + scale));

  const TraceSamples& last = traces.back();
  const TraceSamples& ref = limit ? *limit : last;
  const TraceSamples& probe = limit ? last : traces[traces.size() - 2];
  for (std::size_t i = 0; i < ref.size(); ++i) res.uniform_gap = std::max(res.uniform_gap, std::abs(probe.phi[i] - ref.phi[i]));
  res.uniform_ok = res.uniform_gap <= res.uniform_tol;

  for (const auto& ts : traces) res.c_estimate = std::max(res.c_estimate, derivative_variation(ts));
  res.variation_ok = std::isfinite(res.c_estimate);
  res.limit_variation_bound = 2.0 * res.c_estimate;
  if (limit) res.limit_variation = derivative_variation(*limit);
  res.conditions_hold = res.uniform_ok && res.variation_ok;
  return res;
}

}  // namespace dcsplit
