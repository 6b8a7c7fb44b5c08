#pragma once

// Registry of analytic test functions. Each entry carries its evaluator,
// a Lipschitz bound and, for functions with a meaningful circle trace, the
// boundary profile Phi(t) = f(cos t, sin t).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcsplit/error.hpp"
#include "dcsplit/variation.hpp"
#include "dcsplit/vec2.hpp"

namespace dcsplit {

using Profile = std::function<double(double)>;

struct Builtin {
  std::string key;
  std::vector<double> params;
  std::size_t dim = 2;
  Field field;
  Profile boundary;            // empty when f has no circle profile of interest
  double lipschitz = 0.0;      // of the degree-1 extension of `boundary` (2-D) or of f (3-D)
  double domain_lipschitz = 0.0;  // of f itself on [-1, 1]^dim
  bool convex = false;
  bool homogeneous = false;    // positively homogeneous of degree 1
};

/// Angle of (x, y) normalized into [0, 2 pi).
inline double polar_angle(double x, double y) {
  double t = std::atan2(y, x);
  if (t < 0.0) t += 2.0 * std::numbers::pi;
  return t;
}

/// Profile with a derivative of unbounded variation at t = pi:
/// Phi(t) = 1 + 0.1 u^2 cos(1/u), u = t - pi.
inline double osc_profile(double t) {
  const double u = t - std::numbers::pi;
  if (u == 0.0) return 1.0;
  return 1.0 + 0.1 * u * u * std::cos(1.0 / u);
}

namespace detail {

/// Degree-1 positively homogeneous extension of a circle profile.
inline Field ph_field(Profile phi) {
  return [phi = std::move(phi)](std::span<const double> x) {
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0) return 0.0;
    return r * phi(polar_angle(x[0], x[1]));
  };
}

inline void expect_params(std::string_view key, const std::vector<double>& params, std::size_t n) {
  if (params.size() != n) {
    throw Error(ErrorCode::ParseError, "builtin '" + std::string(key) + "' takes " + std::to_string(n) +
                                           " parameters, got " + std::to_string(params.size()));
  }
}

}  // namespace detail

inline const std::vector<std::string>& builtin_keys() {
  static const std::vector<std::string> keys = {"norm2", "norm1",  "maxcoord", "saddle", "linear", "osc",
                                                "poly2", "sincos", "absdiff",  "linf3",  "norm3",  "linear3"};
  return keys;
}

/// Looks up a builtin. `params` is required only by the linear families;
/// linear defaults to (1, 0) and linear3 to (1, 0, 0) when none are given.
inline Builtin make_builtin(std::string_view key, std::vector<double> params = {}) {
  using std::numbers::pi;
  using std::numbers::sqrt2;
  Builtin b;
  b.key = std::string(key);
  if (key == "norm2") {
    detail::expect_params(key, params, 0);
    b.boundary = [](double) { return 1.0; };
    b.field = [](std::span<const double> x) { return std::hypot(x[0], x[1]); };
    b.lipschitz = b.domain_lipschitz = 1.0;
    b.convex = b.homogeneous = true;
  } else if (key == "norm1") {
    detail::expect_params(key, params, 0);
    b.boundary = [](double t) { return std::abs(std::cos(t)) + std::abs(std::sin(t)); };
    b.field = [](std::span<const double> x) { return std::abs(x[0]) + std::abs(x[1]); };
    b.lipschitz = b.domain_lipschitz = sqrt2;
    b.convex = b.homogeneous = true;
  } else if (key == "maxcoord") {
    detail::expect_params(key, params, 0);
    b.boundary = [](double t) { return std::max(std::cos(t), std::sin(t)); };
    b.field = [](std::span<const double> x) { return std::max(x[0], x[1]); };
    b.lipschitz = b.domain_lipschitz = 1.0;
    b.convex = b.homogeneous = true;
  } else if (key == "saddle") {
    // r cos 2t = (x^2 - y^2) / r; gradient norm sqrt(cos^2 2t + 4 sin^2 2t) <= 2
    detail::expect_params(key, params, 0);
    b.boundary = [](double t) { return std::cos(2.0 * t); };
    b.field = [](std::span<const double> x) {
      const double r = std::hypot(x[0], x[1]);
      return r == 0.0 ? 0.0 : (x[0] * x[0] - x[1] * x[1]) / r;
    };
    b.lipschitz = b.domain_lipschitz = 2.0;
    b.homogeneous = true;
  } else if (key == "linear") {
    if (params.empty()) params = {1.0, 0.0};
    detail::expect_params(key, params, 2);
    const double a = params[0], c = params[1];
    b.boundary = [a, c](double t) { return a * std::cos(t) + c * std::sin(t); };
    b.field = [a, c](std::span<const double> x) { return a * x[0] + c * x[1]; };
    b.lipschitz = b.domain_lipschitz = std::hypot(a, c);
    b.convex = b.homogeneous = true;
  } else if (key == "osc") {
    // |Phi'| <= 0.1 (2 pi + 1), |Phi| <= 1 + 0.1 pi^2
    detail::expect_params(key, params, 0);
    b.boundary = osc_profile;
    b.field = detail::ph_field(osc_profile);
    const double d = 0.1 * (2.0 * pi + 1.0);
    const double v = 1.0 + 0.1 * pi * pi;
    b.lipschitz = b.domain_lipschitz = std::hypot(v, d);
    b.homogeneous = true;
  } else if (key == "poly2") {
    // circle trace 1 + cos t; its degree-1 extension |q| + q1 is 2-Lipschitz
    detail::expect_params(key, params, 0);
    b.boundary = [](double t) { return 1.0 + std::cos(t); };
    b.field = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1] + x[0]; };
    b.lipschitz = 2.0;
    b.domain_lipschitz = std::sqrt(13.0);
    b.convex = true;
  } else if (key == "sincos") {
    detail::expect_params(key, params, 0);
    b.boundary = [](double t) { return std::sin(std::cos(t)) * std::cos(std::sin(t)); };
    b.field = [](std::span<const double> x) { return std::sin(x[0]) * std::cos(x[1]); };
    b.lipschitz = b.domain_lipschitz = 1.0;
  } else if (key == "absdiff") {
    detail::expect_params(key, params, 0);
    b.boundary = [](double t) { return std::abs(std::cos(t)) - std::abs(std::sin(t)); };
    b.field = [](std::span<const double> x) { return std::abs(x[0]) - std::abs(x[1]); };
    b.lipschitz = b.domain_lipschitz = sqrt2;
    b.homogeneous = true;
  } else if (key == "linf3") {
    detail::expect_params(key, params, 0);
    b.dim = 3;
    b.field = [](std::span<const double> x) {
      return std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
    };
    b.lipschitz = b.domain_lipschitz = 1.0;
    b.convex = b.homogeneous = true;
  } else if (key == "norm3") {
    detail::expect_params(key, params, 0);
    b.dim = 3;
    b.field = [](std::span<const double> x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); };
    b.lipschitz = b.domain_lipschitz = 1.0;
    b.convex = b.homogeneous = true;
  } else if (key == "linear3") {
    if (params.empty()) params = {1.0, 0.0, 0.0};
    detail::expect_params(key, params, 3);
    const double a = params[0], c = params[1], e = params[2];
    b.dim = 3;
    b.field = [a, c, e](std::span<const double> x) { return a * x[0] + c * x[1] + e * x[2]; };
    b.lipschitz = b.domain_lipschitz = std::sqrt(a * a + c * c + e * e);
    b.convex = b.homogeneous = true;
  } else {
    throw Error(ErrorCode::UnknownBuiltin, "unknown builtin '" + std::string(key) + "'");
  }
  b.params = std::move(params);
  return b;
}

/// Adapts a planar evaluator to the Field signature.
template <class F>
Field planar_field(F f) {
  return [f = std::move(f)](std::span<const double> x) { return f(Vec2{x[0], x[1]}); };
}

}  // namespace dcsplit
