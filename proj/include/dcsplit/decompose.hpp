#pragma once

// Difference-of-convex splitting of planar piecewise-linear functions.
//
// f1 is the sum of the convex dihedral ridges of f, each extended along its
// whole kink line; f2 = f1 - f. Ridges sharing a kink line are represented
// once, by the strongest convex kink on that line, so f1 dominates every
// convex kink of f and the difference has only convex kinks. Both parts are
// resampled onto a refinement of f's own mesh or fan that carries every
// ridge line, which keeps the reconstruction f1 - f2 = f exact.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "dcsplit/error.hpp"
#include "dcsplit/geometry.hpp"
#include "dcsplit/pwl.hpp"
#include "dcsplit/vec2.hpp"

namespace dcsplit {

/// max(0, (jump, x - anchor)): one extended convex dihedral angle.
struct RidgeFunction {
  Vec2 jump;
  Vec2 anchor;
  bool homogeneous = false;

  double value(const Vec2& x) const { return std::max(0.0, dot(jump, x - anchor)); }
};

namespace detail {

// The jump of a conforming edge is normal to it up to rounding; dropping the
// tangential residue keeps the ridge's kink exactly on the edge line, which
// matters once sectors get thin.
inline RidgeFunction ridge_of(const DihedralEdge& e) {
  return RidgeFunction{e.normal * e.strength, e.is_ray ? Vec2{} : e.anchor, e.is_ray};
}

}  // namespace detail

inline RidgeFunction ridge_from_edge(const DihedralEdge& e) {
  if (e.kind != EdgeKind::convex) throw Error(ErrorCode::NotConvexEdge, "ridge requested for a non-convex edge");
  return detail::ridge_of(e);
}

struct EdgeCounts {
  std::size_t convex = 0;
  std::size_t concave = 0;
  std::size_t flat = 0;
  std::size_t kink_lines = 0;
};

template <class Pwl>
struct DCPair {
  Pwl f1;
  Pwl f2;
  double normalization = 0.0;  // constant subtracted from both parts
  EdgeCounts counts;
  std::vector<RidgeFunction> ridges;
};

struct ConvexityReport {
  bool ok = true;
  double worst_jump = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> witness;
};

namespace detail {

inline ConvexityReport convexity_of(const std::vector<DihedralEdge>& edges) {
  ConvexityReport r;
  for (const auto& e : edges) {
    if (e.strength < r.worst_jump) {
      r.worst_jump = e.strength;
      r.witness = e.id;
    }
    if (e.kind == EdgeKind::concave) r.ok = false;
  }
  return r;
}

inline EdgeCounts count_edges(const std::vector<DihedralEdge>& edges) {
  EdgeCounts c;
  for (const auto& e : edges) {
    switch (e.kind) {
      case EdgeKind::convex: ++c.convex; break;
      case EdgeKind::concave: ++c.concave; break;
      case EdgeKind::flat: ++c.flat; break;
    }
  }
  return c;
}

/// Oriented line (normal, x) = offset with the normal in a canonical half-plane.
struct LineKey {
  double angle;
  double offset;
};

inline LineKey line_key(const DihedralEdge& e) {
  Vec2 n = e.normal;
  if (n.x < -1e-12 || (std::abs(n.x) <= 1e-12 && n.y < 0.0)) n = -n;
  const Vec2 on_line = e.is_ray ? Vec2{} : e.anchor;
  return {std::atan2(n.y, n.x), dot(n, on_line)};
}

/// Groups convex edges by kink line and keeps the strongest one per line.
/// Returns edge indices in ascending order of the representative id.
// Edges that receive a ridge. The threshold sits far below the flat band of
// edge classification: an edge left without a ridge then has a jump that
// the second part still classifies as flat.
inline bool ridge_candidate(const DihedralEdge& e) {
  return e.strength > 1e-12 * (1.0 + std::max(norm(e.grad_left), norm(e.grad_right)));
}


inline std::vector<std::size_t> strongest_per_line(const std::vector<DihedralEdge>& edges, double offset_tol) {
  constexpr double kAngleTol = 1e-10;
  std::vector<std::pair<LineKey, std::size_t>> keyed;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (ridge_candidate(edges[i])) keyed.push_back({line_key(edges[i]), i});
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first.angle != b.first.angle) return a.first.angle < b.first.angle;
    return a.first.offset < b.first.offset;
  });

  std::vector<std::size_t> chosen;
  std::size_t i = 0;
  while (i < keyed.size()) {
    // One run of (nearly) parallel lines.
    std::size_t j = i + 1;
    while (j < keyed.size() && keyed[j].first.angle - keyed[j - 1].first.angle <= kAngleTol) ++j;
    std::vector<std::pair<LineKey, std::size_t>> run(keyed.begin() + static_cast<std::ptrdiff_t>(i),
                                                    keyed.begin() + static_cast<std::ptrdiff_t>(j));
    std::sort(run.begin(), run.end(), [](const auto& a, const auto& b) { return a.first.offset < b.first.offset; });
    std::size_t k = 0;
    while (k < run.size()) {
      std::size_t l = k + 1;
      while (l < run.size() && run[l].first.offset - run[l - 1].first.offset <= offset_tol) ++l;
      std::size_t best = run[k].second;
      for (std::size_t q = k + 1; q < l; ++q) {
        const auto& cand = edges[run[q].second];
        const auto& cur = edges[best];
        if (cand.strength > cur.strength || (cand.strength == cur.strength && cand.id < cur.id)) best = run[q].second;
      }
      chosen.push_back(best);
      k = l;
    }
    i = j;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

// Compensated (Neumaier) sum: fine fans carry thousands of ridges and plain
// accumulation error shows up in the gradients of thin sectors.
inline double ridge_sum(const std::vector<RidgeFunction>& ridges, const Vec2& x) {
  double s = 0.0, c = 0.0;
  for (const auto& r : ridges) {
    const double v = r.value(x);
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  return s + c;
}

// Splits the cells of a triangulation along a set of lines. Cells are convex
// polygons over a shared vertex pool; a vertex created on edge (a, b) by line
// L is keyed by (a, b, L), so both cells adjacent to the edge receive the
// same vertex and the subdivision stays conforming.
struct LineCutter {
  std::vector<Vec2> verts;
  std::vector<std::size_t> source_cell;  // original triangle a vertex was created in
  std::vector<std::vector<std::uint32_t>> cells;
  std::vector<std::size_t> parent;  // original triangle of each cell

  void cut(const Vec2& normal, const Vec2& point, double tol) {
    std::vector<double> dist(verts.size());
    for (std::size_t v = 0; v < verts.size(); ++v) {
      const double d = dot(normal, verts[v] - point);
      dist[v] = std::abs(d) <= tol ? 0.0 : d;
    }
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> created;
    const std::size_t n_cells = cells.size();
    for (std::size_t c = 0; c < n_cells; ++c) {
      bool pos = false, neg = false;
      for (auto v : cells[c]) {
        pos = pos || dist[v] > 0.0;
        neg = neg || dist[v] < 0.0;
      }
      if (!(pos && neg)) continue;
      const auto poly = cells[c];
      std::vector<std::uint32_t> left, right;
      for (std::size_t k = 0; k < poly.size(); ++k) {
        const std::uint32_t a = poly[k];
        const std::uint32_t b = poly[(k + 1) % poly.size()];
        const double da = dist[a];
        if (da >= 0.0) left.push_back(a);
        if (da <= 0.0) right.push_back(a);
        const double db = dist[b];
        if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) {
          const auto key = std::make_pair(std::min(a, b), std::max(a, b));
          auto it = created.find(key);
          std::uint32_t nv;
          if (it == created.end()) {
            const std::uint32_t lo = key.first, hi = key.second;
            const double t = dist[lo] / (dist[lo] - dist[hi]);
            nv = static_cast<std::uint32_t>(verts.size());
            verts.push_back(verts[lo] + (verts[hi] - verts[lo]) * t);
            source_cell.push_back(parent[c]);
            dist.push_back(0.0);
            created.emplace(key, nv);
          } else {
            nv = it->second;
          }
          left.push_back(nv);
          right.push_back(nv);
        }
      }
      cells[c] = std::move(left);
      cells.push_back(std::move(right));
      parent.push_back(parent[c]);
    }
  }

  /// Triangulates every cell; cells with collinear boundary vertices get a
  /// centroid fan so that no triangle degenerates.
  void triangulate(std::vector<Triangle>& tris, std::vector<std::size_t>& tri_parent) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& poly = cells[c];
      if (poly.size() == 3) {
        tris.push_back({poly[0], poly[1], poly[2]});
        tri_parent.push_back(parent[c]);
        continue;
      }
      bool collinear = false;
      for (std::size_t k = 0; k < poly.size(); ++k) {
        const Vec2 a = verts[poly[(k + 1) % poly.size()]] - verts[poly[k]];
        const Vec2 b = verts[poly[(k + 2) % poly.size()]] - verts[poly[(k + 1) % poly.size()]];
        if (std::abs(cross(a, b)) <= 1e-9 * norm(a) * norm(b)) collinear = true;
      }
      if (!collinear) {
        for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
          tris.push_back({poly[0], poly[k], poly[k + 1]});
          tri_parent.push_back(parent[c]);
        }
        continue;
      }
      Vec2 center;
      for (auto v : poly) center += verts[v];
      center *= 1.0 / static_cast<double>(poly.size());
      const auto cv = static_cast<std::uint32_t>(verts.size());
      verts.push_back(center);
      source_cell.push_back(parent[c]);
      for (std::size_t k = 0; k < poly.size(); ++k) {
        tris.push_back({cv, poly[k], poly[(k + 1) % poly.size()]});
        tri_parent.push_back(parent[c]);
      }
    }
  }
};

}  // namespace detail

inline ConvexityReport verify_convex(const TriangulatedPWL& f) { return detail::convexity_of(f.edges()); }
inline ConvexityReport verify_convex(const SectorFanPH& f) { return detail::convexity_of(f.edges()); }

/// Steiner point of the subdifferential at zero of a fan, i.e. the average of
/// the sector gradients weighted by sector angle. Affine in the fan.
inline Vec2 steiner_point(const SectorFanPH& f) {
  Vec2 s;
  const auto& a = f.angles();
  for (std::size_t i = 0; i < f.size(); ++i) s += f.sector_gradients()[i] * (a[i + 1] - a[i]);
  return s * (1.0 / (2.0 * std::numbers::pi));
}

/// Subdifferential at zero of a convex fan: the hull of its sector gradients.
inline Polygon subdifferential_zero(const SectorFanPH& f) {
  if (!verify_convex(f).ok) throw Error(ErrorCode::NotConvexInput, "subdifferential requested for a non-convex fan");
  return convex_hull_2d(f.sector_gradients());
}

/// Adds the linear function (w, x) to a fan.
inline SectorFanPH add_linear(const SectorFanPH& f, const Vec2& w) {
  std::vector<double> vals(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) vals[i] = f.ray_values()[i] + dot(w, f.ray(i));
  std::vector<double> ang(f.angles().begin(), f.angles().end() - 1);
  return build_sector_fan(std::move(vals), std::move(ang));
}

inline DCPair<SectorFanPH> aleksandrov_decompose(const SectorFanPH& f) {
  const auto edges = f.edges();
  DCPair<SectorFanPH> out;
  out.counts = detail::count_edges(edges);
  const auto chosen = detail::strongest_per_line(edges, 1e-12);
  out.counts.kink_lines = chosen.size();

  // Every ridge kinks along the full line through its ray; make sure the
  // opposite direction is a ray of the refined fan.
  const double two_pi = 2.0 * std::numbers::pi;
  const double t0 = f.angles().front();
  std::vector<std::pair<double, std::optional<std::size_t>>> rays;  // angle, original index
  for (std::size_t i = 0; i < f.size(); ++i) rays.push_back({f.angles()[i], i});
  for (std::size_t idx : chosen) {
    out.ridges.push_back(detail::ridge_of(edges[idx]));
    double opposite = f.angles()[idx] + std::numbers::pi;
    opposite = t0 + std::fmod(opposite - t0, two_pi);
    rays.push_back({opposite, std::nullopt});
  }
  std::sort(rays.begin(), rays.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second.has_value() && !b.second.has_value();
  });
  std::vector<std::pair<double, std::optional<std::size_t>>> merged;
  for (const auto& r : rays) {
    const bool near_prev = !merged.empty() && r.first - merged.back().first <= 1e-12;
    const bool near_first = !merged.empty() && merged.front().first + two_pi - r.first <= 1e-12;
    if (near_prev || near_first) continue;
    merged.push_back(r);
  }

  std::vector<double> angles, fv, f1v, f2v;
  for (const auto& [angle, orig] : merged) {
    const Vec2 u = unit_at(angle);
    const double v = orig ? f.ray_values()[*orig] : f.evaluate(u);
    const double v1 = detail::ridge_sum(out.ridges, u);
    angles.push_back(angle);
    fv.push_back(v);
    f1v.push_back(v1);
    f2v.push_back(v1 - v);
  }
  out.f1 = build_sector_fan(std::move(f1v), angles);
  out.f2 = build_sector_fan(std::move(f2v), angles);
  for (const auto* part : {&out.f1, &out.f2}) {
    const ConvexityReport rep = verify_convex(*part);
    if (!rep.ok) {
      throw Error(ErrorCode::ConvexityCertificateFailed,
                  std::string("fan decomposition produced a non-convex part f") + (part == &out.f1 ? "1" : "2") +
                      " (jump " + std::to_string(rep.worst_jump) + " at edge " + std::to_string(*rep.witness) + ")");
    }
  }
  return out;
}

/// Mesh version. Both parts are normalized by c1 = f1(a) at the centroid a
/// of the domain.
inline DCPair<TriangulatedPWL> aleksandrov_decompose(const TriangulatedPWL& f) {
  const auto edges = f.edges();
  const double scale = std::max(diameter(f.domain_hull()), 1e-300);
  DCPair<TriangulatedPWL> out;
  out.counts = detail::count_edges(edges);
  const auto chosen = detail::strongest_per_line(edges, 1e-10 * scale);
  out.counts.kink_lines = chosen.size();

  detail::LineCutter cutter;
  cutter.verts = f.vertices();
  cutter.source_cell.assign(f.vertices().size(), 0);
  for (std::size_t t = 0; t < f.triangles().size(); ++t) {
    const auto& tri = f.triangles()[t];
    cutter.cells.push_back({tri[0], tri[1], tri[2]});
    cutter.parent.push_back(t);
  }
  for (std::size_t idx : chosen) {
    out.ridges.push_back(detail::ridge_of(edges[idx]));
    cutter.cut(edges[idx].normal, edges[idx].anchor, 1e-10 * scale);
  }
  std::vector<Triangle> tris;
  std::vector<std::size_t> tri_parent;
  cutter.triangulate(tris, tri_parent);

  const std::size_t n_orig = f.vertices().size();
  const Vec2 anchor = centroid(f.domain_hull());
  out.normalization = detail::ridge_sum(out.ridges, anchor);
  std::vector<double> f1v(cutter.verts.size()), f2v(cutter.verts.size());
  for (std::size_t v = 0; v < cutter.verts.size(); ++v) {
    const Vec2& p = cutter.verts[v];
    const double fv = v < n_orig ? f.values()[v] : f.value_in(cutter.source_cell[v], p);
    const double v1 = detail::ridge_sum(out.ridges, p) - out.normalization;
    f1v[v] = v1;
    f2v[v] = v1 - fv;
  }
  out.f1 = build_triangulated(std::move(cutter.verts), std::move(tris), std::move(f1v));
  out.f2 = out.f1.with_values(std::move(f2v));
  if (!verify_convex(out.f1).ok || !verify_convex(out.f2).ok) {
    throw Error(ErrorCode::ConvexityCertificateFailed, "mesh decomposition produced a non-convex part");
  }
  return out;
}

}  // namespace dcsplit
