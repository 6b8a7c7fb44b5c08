#pragma once

// Variation of the derivative of a function traced along a curve, the turn
// of the lifted curve (r(t), f(r(t))), and the cumulative-variation split of
// a one-dimensional trace into two convex parts.
//
// Derivatives are never formed pointwise: everything is computed from chord
// slopes over the sample partition, which is what the supremum-over-
// partitions definition of the variation measures.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "dcsplit/error.hpp"
#include "dcsplit/geometry.hpp"

namespace dcsplit {

/// Scalar field on R^n, evaluated at a point given by its coordinates.
using Field = std::function<double(std::span<const double>)>;

struct TraceSamples {
  std::size_t dim = 0;
  bool closed = false;
  double period = 0.0;          // curve length; closed traces wrap at t = period
  std::vector<double> t;        // arc-length parameters
  std::vector<double> points;   // sample positions, dim values each
  std::vector<double> phi;      // f at the samples
  std::vector<double> slopes;   // chord slopes; one extra wrap slope when closed

  std::size_t size() const { return t.size(); }
  std::span<const double> point(std::size_t i) const { return {points.data() + i * dim, dim}; }
};

namespace detail {

inline void fill_slopes(TraceSamples& ts) {
  const std::size_t n = ts.t.size();
  ts.slopes.clear();
  for (std::size_t i = 0; i + 1 < n; ++i) ts.slopes.push_back((ts.phi[i + 1] - ts.phi[i]) / (ts.t[i + 1] - ts.t[i]));
  if (ts.closed) ts.slopes.push_back((ts.phi[0] - ts.phi[n - 1]) / (ts.period - ts.t[n - 1]));
}

}  // namespace detail

/// Samples f along `curve` at the given arc-length parameters (strictly
/// increasing, inside [0, length); an open curve may include its end).
inline TraceSamples trace_at(const Field& f, const Curve& curve, std::vector<double> params) {
  if (params.size() < 3) throw Error(ErrorCode::TooFewPoints, "a trace needs at least 3 samples");
  for (std::size_t i = 0; i + 1 < params.size(); ++i) {
    if (!(params[i + 1] > params[i])) throw Error(ErrorCode::TooFewPoints, "trace parameters must increase");
  }
  TraceSamples ts;
  ts.dim = curve.dim();
  ts.closed = curve.closed();
  ts.period = curve.length();
  ts.t = std::move(params);
  ts.points.resize(ts.t.size() * ts.dim);
  ts.phi.resize(ts.t.size());
  for (std::size_t i = 0; i < ts.t.size(); ++i) {
    std::span<double> p(ts.points.data() + i * ts.dim, ts.dim);
    curve.point_at(ts.t[i], p);
    ts.phi[i] = f(p);
  }
  detail::fill_slopes(ts);
  return ts;
}

/// Uniform arc-length sampling with n points. Closed curves are sampled at
/// i * T / n, open ones at i * T / (n - 1).
inline TraceSamples trace(const Field& f, const Curve& curve, std::size_t n) {
  if (n < 8) throw Error(ErrorCode::TooFewPoints, "trace needs n >= 8");
  const double total = curve.length();
  std::vector<double> params(n);
  const double denom = static_cast<double>(curve.closed() ? n : n - 1);
  for (std::size_t i = 0; i < n; ++i) params[i] = total * static_cast<double>(i) / denom;
  return trace_at(f, curve, std::move(params));
}

/// Sum of |s_{i+1} - s_i| over consecutive chord slopes, cyclic on closed traces.
inline double derivative_variation(const TraceSamples& ts) {
  const auto& s = ts.slopes;
  if (ts.size() < 3 || s.size() < 2) throw Error(ErrorCode::TooFewPoints, "variation needs at least 3 samples");
  double v = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) v += std::abs(s[i + 1] - s[i]);
  if (ts.closed) v += std::abs(s.front() - s.back());
  return v;
}

/// Turn of the polyline through the given points (dim coordinates each):
/// the summed distance between consecutive unit chord tangents.
inline double polyline_turn(std::span<const double> pts, std::size_t dim, bool closed) {
  const std::size_t n = pts.size() / dim;
  const std::size_t chords = closed ? n : n - 1;
  std::vector<double> units(chords * dim);
  for (std::size_t i = 0; i < chords; ++i) {
    const std::size_t j = (i + 1) % n;
    double len = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double c = pts[j * dim + d] - pts[i * dim + d];
      units[i * dim + d] = c;
      len += c * c;
    }
    len = std::sqrt(len);
    for (std::size_t d = 0; d < dim; ++d) units[i * dim + d] /= len;
  }
  auto gap = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double c = units[a * dim + d] - units[b * dim + d];
      s += c * c;
    }
    return std::sqrt(s);
  };
  double turn = 0.0;
  for (std::size_t i = 1; i < chords; ++i) turn += gap(i, i - 1);
  if (closed && chords > 1) turn += gap(0, chords - 1);
  return turn;
}

/// Turn of the lifted curve R(t) = (r(t), f(r(t))) over the samples of a trace.
inline double lifted_turn(const TraceSamples& ts) {
  const std::size_t d = ts.dim + 1;
  std::vector<double> lifted(ts.size() * d);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t k = 0; k < ts.dim; ++k) lifted[i * d + k] = ts.points[i * ts.dim + k];
    lifted[i * d + ts.dim] = ts.phi[i];
  }
  return polyline_turn(lifted, d, ts.closed);
}

/// Turn of the curve itself, i.e. the lifted turn of the zero function.
inline double planar_turn(const TraceSamples& ts) { return polyline_turn(ts.points, ts.dim, ts.closed); }

inline double curve_turn(const Field& f, const Curve& curve, std::size_t n) { return lifted_turn(trace(f, curve, n)); }

/// Constants of the two-sided estimate
///   lower(L) * var(Phi') <= turn(R) <= upper(L) * (turn(r) + var(Phi'))
/// for a trace of an L-Lipschitz function along a unit-speed curve.
inline double turn_upper_constant(double lipschitz) { return std::max(1.0, std::sqrt(1.0 + lipschitz * lipschitz)); }
inline double turn_lower_constant(double lipschitz) { return std::pow(1.0 + lipschitz * lipschitz, -1.5); }

/// Psi = Psi1 - Psi2 with Psi1' equal to the running variation of Psi'.
struct CumulativeSplit {
  std::vector<double> t;
  std::vector<double> psi1;
  std::vector<double> psi2;
  std::vector<double> slopes1;
  std::vector<double> slopes2;
};

inline CumulativeSplit cumulative_decomposition(const TraceSamples& ts) {
  if (ts.size() < 3) throw Error(ErrorCode::TooFewPoints, "decomposition needs at least 3 samples");
  CumulativeSplit out;
  out.t = ts.t;
  std::vector<double> phi = ts.phi;
  if (ts.closed) {
    out.t.push_back(ts.period);
    phi.push_back(ts.phi.front());
  }
  const auto& s = ts.slopes;
  out.psi1.assign(out.t.size(), 0.0);
  double running = 0.0, second = -s[0];
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0) {
      // |d| - d is exactly 0 or 2|d|, so both slope sequences never decrease
      const double d = s[i] - s[i - 1];
      running += std::abs(d);
      second += std::abs(d) - d;
    }
    out.slopes1.push_back(running);
    out.slopes2.push_back(second);
    out.psi1[i + 1] = out.psi1[i] + running * (out.t[i + 1] - out.t[i]);
  }
  out.psi2.resize(out.t.size());
  for (std::size_t i = 0; i < out.t.size(); ++i) out.psi2[i] = out.psi1[i] - phi[i];
  return out;
}

enum class Verdict { bounded, divergent, inconclusive };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::bounded: return "bounded";
    case Verdict::divergent: return "divergent";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

/// Thresholds of the refinement test. Increments are relative to the
/// previous estimate, floored at `abs_floor` so that vanishing estimates
/// count as converged.
struct VerdictRule {
  double bounded_tol = 0.01;
  double divergent_growth = 0.05;
  std::size_t window = 3;
  std::size_t min_levels = 4;
  double abs_floor = 1e-6;
};

inline Verdict refine_verdict(std::span<const std::pair<std::size_t, double>> estimates, const VerdictRule& rule = {}) {
  if (estimates.size() < rule.min_levels || estimates.size() < rule.window + 1) {
    throw Error(ErrorCode::TooFewLevels, "refinement verdict needs at least " + std::to_string(rule.min_levels) +
                                             " levels");
  }
  bool all_small = true;
  bool all_growing = true;
  for (std::size_t k = estimates.size() - rule.window; k < estimates.size(); ++k) {
    const double prev = estimates[k - 1].second;
    const double cur = estimates[k].second;
    const double rel = (cur - prev) / std::max(std::abs(prev), rule.abs_floor);
    all_small = all_small && std::abs(rel) < rule.bounded_tol;
    all_growing = all_growing && rel >= rule.divergent_growth;
  }
  if (all_small) return Verdict::bounded;
  if (all_growing) return Verdict::divergent;
  return Verdict::inconclusive;
}

struct VariationLevel {
  std::size_t n_samples = 0;
  double variation = 0.0;
  double turn = 0.0;
};

struct VariationReport {
  std::vector<VariationLevel> levels;
  Verdict verdict = Verdict::inconclusive;
  std::optional<double> constant_estimate;  // set when the verdict is bounded
};

inline Verdict verdict_of(const std::vector<VariationLevel>& levels, const VerdictRule& rule = {}) {
  std::vector<std::pair<std::size_t, double>> est;
  for (const auto& l : levels) est.push_back({l.n_samples, l.variation});
  return refine_verdict(est, rule);
}

/// Variation and turn of f along `curve` at every sample count in `schedule`.
inline VariationReport variation_report(const Field& f, const Curve& curve, std::span<const std::size_t> schedule,
                                        const VerdictRule& rule = {}) {
  VariationReport rep;
  for (std::size_t n : schedule) {
    const TraceSamples ts = trace(f, curve, n);
    rep.levels.push_back({n, derivative_variation(ts), lifted_turn(ts)});
  }
  rep.verdict = verdict_of(rep.levels, rule);
  if (rep.verdict == Verdict::bounded) rep.constant_estimate = rep.levels.back().variation;
  return rep;
}

}  // namespace dcsplit
