#pragma once

// File formats and function specifications.
//
//   mesh: {"vertices": [[x, y], ...], "triangles": [[i, j, k], ...], "values": [...]}
//   fan:  {"angles": [...], "values": [...]}
//
// Function specs are "builtin:key[:p1,p2,...]", "mesh:path" or "fan:path";
// a bare registry key is accepted as a builtin.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "dcsplit/builtins.hpp"
#include "dcsplit/error.hpp"
#include "dcsplit/pwl.hpp"
#include "dcsplit/variation.hpp"

namespace dcsplit {

using json = nlohmann::json;

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

/// 64-bit FNV-1a, used to fingerprint inputs in run manifests.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// 17 significant digits: reads back to the same double.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

template <class T>
T require(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::SchemaError, std::string(what) + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string(what) + ": bad '" + key + "': " + e.what());
  }
}

}  // namespace detail

inline TriangulatedPWL mesh_from_json(const json& j) {
  const auto pts = detail::require<std::vector<std::array<double, 2>>>(j, "vertices", "mesh");
  const auto tris = detail::require<std::vector<std::array<std::int64_t, 3>>>(j, "triangles", "mesh");
  auto values = detail::require<std::vector<double>>(j, "values", "mesh");
  if (values.size() != pts.size()) throw Error(ErrorCode::SchemaError, "mesh: one value per vertex is required");
  std::vector<Vec2> verts;
  for (const auto& p : pts) verts.push_back({p[0], p[1]});
  std::vector<Triangle> triangles;
  for (const auto& t : tris) {
    Triangle tri{};
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || static_cast<std::size_t>(t[k]) >= verts.size()) {
        throw Error(ErrorCode::SchemaError, "mesh: triangle index out of range");
      }
      tri[k] = static_cast<std::uint32_t>(t[k]);
    }
    triangles.push_back(tri);
  }
  return build_triangulated(std::move(verts), std::move(triangles), std::move(values));
}

inline SectorFanPH fan_from_json(const json& j) {
  auto angles = detail::require<std::vector<double>>(j, "angles", "fan");
  auto values = detail::require<std::vector<double>>(j, "values", "fan");
  return build_sector_fan(std::move(values), std::move(angles));
}

inline json to_json(const TriangulatedPWL& f) {
  json j;
  j["vertices"] = json::array();
  for (const auto& v : f.vertices()) j["vertices"].push_back({v.x, v.y});
  j["triangles"] = f.triangles();
  j["values"] = f.values();
  return j;
}

inline json to_json(const SectorFanPH& f) {
  json j;
  j["angles"] = std::vector<double>(f.angles().begin(), f.angles().end() - 1);
  j["values"] = f.ray_values();
  return j;
}

inline json to_json(const VariationReport& r) {
  json j;
  j["levels"] = json::array();
  for (const auto& l : r.levels) j["levels"].push_back({{"n_samples", l.n_samples}, {"variation", l.variation}, {"turn", l.turn}});
  j["verdict"] = std::string(to_string(r.verdict));
  j["constant_estimate"] = r.constant_estimate ? json(*r.constant_estimate) : json(nullptr);
  return j;
}

// ------------------------------------------------------------ function specs

enum class SpecKind { builtin, mesh, fan };

struct FunctionSpec {
  SpecKind kind = SpecKind::builtin;
  std::string text;
  std::size_t dim = 2;
  Field field;
  std::optional<Builtin> builtin;
  std::optional<TriangulatedPWL> mesh;
  std::optional<SectorFanPH> fan;
};

inline std::vector<double> parse_numbers(std::string_view s) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t end = std::min(s.find(',', pos), s.size());
    std::string_view tok = s.substr(pos, end - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw Error(ErrorCode::ParseError, "not a number: '" + std::string(tok) + "'");
    }
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

inline FunctionSpec parse_function_spec(std::string_view spec) {
  FunctionSpec out;
  out.text = std::string(spec);
  auto starts = [&](std::string_view p) { return spec.substr(0, p.size()) == p; };
  if (starts("mesh:") || starts("fan:")) {
    const bool is_mesh = starts("mesh:");
    const std::string path(spec.substr(is_mesh ? 5 : 4));
    if (path.empty()) throw Error(ErrorCode::ParseError, "missing file path in '" + out.text + "'");
    const json j = read_json(path);
    if (is_mesh) {
      out.kind = SpecKind::mesh;
      out.mesh = mesh_from_json(j);
      out.field = [m = *out.mesh](std::span<const double> x) { return m.evaluate({x[0], x[1]}); };
    } else {
      out.kind = SpecKind::fan;
      out.fan = fan_from_json(j);
      out.field = [f = *out.fan](std::span<const double> x) { return f.evaluate({x[0], x[1]}); };
    }
    return out;
  }
  std::string_view rest = starts("builtin:") ? spec.substr(8) : spec;
  const std::size_t colon = rest.find(':');
  const std::string_view key = rest.substr(0, colon);
  if (key.empty()) throw Error(ErrorCode::ParseError, "empty builtin key");
  const std::vector<double> params = colon == std::string_view::npos ? std::vector<double>{} : parse_numbers(rest.substr(colon + 1));
  out.builtin = make_builtin(key, params);
  out.dim = out.builtin->dim;
  out.field = out.builtin->field;
  return out;
}

}  // namespace dcsplit
