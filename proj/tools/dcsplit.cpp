// dcsplit: command-line front end of the library.
//
// Every command writes manifest.json, report.json and report.csv into --out.
// Exit status: 0 on success, 2 when the mathematical verdict is divergent
// (or the sequence conditions fail), 1 on any error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dcsplit/dcsplit.hpp"

namespace fs = std::filesystem;
using namespace dcsplit;

namespace {

// ------------------------------------------------------------------ config

struct Config {
  std::string command;
  std::string fn;
  std::string out = "dcsplit_out";
  std::uint64_t seed = 1;
  std::string schedule_text;
  VerdictRule rule;
  std::optional<double> uniform_tol;

  // per-command
  std::string fans_text = "16,64,256";
  std::string levels_text = "2,4,6";
  unsigned degree = 1;
  std::string mode = "auto";
  std::string domain_text = "-1,-1,1,1";
  std::string curve_text = "circle:1";
  std::size_t samples = 65536;
  std::size_t curves = 20;
  std::string family = "convex";
  std::size_t hotspot_circles = 4;
  double r_min = 0.1, r_max = 0.4;
  std::string at_text = "0,0";
  double alpha = 1e-6;
  std::size_t rays = 256;
  unsigned ramp = 20;
  std::size_t trace_samples = 4096;
  std::string traces_file;
};

struct CsvRow {
  std::string curve_id;
  std::size_t level = 0;
  std::size_t n_samples = 0;
  double variation = 0.0;
  std::optional<double> turn;
  std::string verdict;
};

struct Outcome {
  json report;
  std::vector<CsvRow> rows;
  json options = json::object();
  int exit_code = 0;
  std::vector<std::pair<std::string, json>> extra_files;  // relative path, content
  std::string extra_csv_name, extra_csv;
};

std::vector<std::size_t> parse_sizes(const std::string& text, const char* what, std::size_t min_value) {
  std::vector<std::size_t> out;
  for (double v : parse_numbers(text)) {
    if (!(v >= static_cast<double>(min_value)) || v != std::floor(v) || v > 1e9) {
      throw Error(ErrorCode::ConfigInvalid, std::string(what) + ": entries must be integers >= " + std::to_string(min_value));
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw Error(ErrorCode::ConfigInvalid, std::string(what) + " is empty");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] <= out[i - 1]) throw Error(ErrorCode::ConfigInvalid, std::string(what) + " must be strictly increasing");
  }
  return out;
}

std::vector<std::size_t> schedule_of(const Config& cfg) {
  if (cfg.schedule_text.empty()) return default_schedule();
  return parse_sizes(cfg.schedule_text, "--schedule", 8);
}

Polygon parse_domain(const std::string& text) {
  const auto v = parse_numbers(text);
  Polygon d;
  if (v.size() == 4) {
    if (!(v[2] > v[0] && v[3] > v[1])) throw Error(ErrorCode::ConfigInvalid, "--domain box needs x0 < x1 and y0 < y1");
    d.vertices = {{v[0], v[1]}, {v[2], v[1]}, {v[2], v[3]}, {v[0], v[3]}};
  } else if (v.size() >= 6 && v.size() % 2 == 0) {
    for (std::size_t i = 0; i < v.size(); i += 2) d.vertices.push_back({v[i], v[i + 1]});
  } else {
    throw Error(ErrorCode::ConfigInvalid, "--domain takes x0,y0,x1,y1 or a vertex list");
  }
  return d;
}

Vec2 parse_point(const std::string& text) {
  const auto v = parse_numbers(text);
  if (v.size() != 2) throw Error(ErrorCode::ConfigInvalid, "--at takes x,y");
  return {v[0], v[1]};
}

// circle:r[,cx,cy] | polygon:x,y,... | segment:x0,y0,x1,y1 | sphere:nx,ny,nz,offset
Curve parse_curve(const std::string& text, std::size_t samples) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const auto v = colon == std::string::npos ? std::vector<double>{} : parse_numbers(text.substr(colon + 1));
  if (kind == "circle" && (v.size() == 1 || v.size() == 3)) {
    return circle_curve(v[0], samples, v.size() == 3 ? Vec2{v[1], v[2]} : Vec2{});
  }
  if (kind == "polygon" && v.size() >= 6 && v.size() % 2 == 0) {
    Polygon p;
    for (std::size_t i = 0; i < v.size(); i += 2) p.vertices.push_back({v[i], v[i + 1]});
    if (area(p) < 0.0) std::reverse(p.vertices.begin(), p.vertices.end());
    if (is_convex_ccw(p.vertices)) return polygon_curve(p);
    return natural_parametrize(2, std::vector<double>(v.begin(), v.end()), true);
  }
  if (kind == "segment" && v.size() == 4) return natural_parametrize(2, std::vector<double>(v.begin(), v.end()), false);
  if (kind == "sphere" && v.size() == 4) return sphere_section_curve({v[0], v[1], v[2]}, v[3], samples);
  throw Error(ErrorCode::ConfigInvalid, "bad curve spec '" + text + "'");
}

// Fingerprint of the function: spec text plus the bytes of any file it names.
std::string fingerprint(const std::string& spec) {
  std::string bytes = spec;
  for (const char* prefix : {"mesh:", "fan:"}) {
    if (spec.rfind(prefix, 0) == 0) bytes += read_text(spec.substr(std::string(prefix).size()));
  }
  return hex64(fnv1a64(bytes));
}

double lipschitz_of(const FunctionSpec& fs) {
  if (fs.builtin) return fs.builtin->domain_lipschitz;
  if (fs.mesh) return lipschitz_constant(*fs.mesh);
  return lipschitz_constant(*fs.fan);
}

json polygon_json(const Polygon& p) {
  json a = json::array();
  for (const auto& v : p.vertices) a.push_back({v.x, v.y});
  return a;
}

json levels_json(const std::vector<VariationLevel>& levels) {
  json a = json::array();
  for (const auto& l : levels) a.push_back({{"n_samples", l.n_samples}, {"variation", l.variation}, {"turn", l.turn}});
  return a;
}

json constant_json(const std::optional<double>& c) { return c ? json(*c) : json(nullptr); }

void append_levels(std::vector<CsvRow>& rows, const std::string& id, const std::vector<VariationLevel>& levels,
                   std::string_view verdict) {
  for (std::size_t k = 0; k < levels.size(); ++k) {
    rows.push_back({id, k, levels[k].n_samples, levels[k].variation, levels[k].turn, std::string(verdict)});
  }
}

// ---------------------------------------------------------------- commands

Outcome cmd_decompose(const Config& cfg, const FunctionSpec& fs) {
  Outcome out;
  out.report["command"] = "decompose";
  std::string mode = cfg.mode;
  if (mode == "auto") {
    if (fs.kind == SpecKind::mesh) mode = "mesh";
    else if (fs.kind == SpecKind::fan || (fs.builtin && fs.builtin->homogeneous && fs.builtin->boundary)) mode = "ph";
    else mode = "mesh";
  }
  if (mode != "ph" && mode != "mesh") throw Error(ErrorCode::ConfigInvalid, "--mode is auto, ph or mesh");
  if (fs.dim != 2) throw Error(ErrorCode::UnsupportedDimension, "decomposition is planar only");
  out.options["mode"] = mode;
  out.report["mode"] = mode;
  std::string table = "level,size,sup_error,reconstruction_error,lipschitz_f1,lipschitz_f2,shift\n";
  json levels = json::array();

  if (mode == "ph") {
    if (fs.kind == SpecKind::mesh) throw Error(ErrorCode::ConfigInvalid, "a mesh is not positively homogeneous");
    PHFunction phi;
    std::vector<std::size_t> sizes;
    if (fs.kind == SpecKind::fan) {
      phi = ph_from_fan(*fs.fan, cfg.degree);
      sizes = {fs.fan->size()};
    } else {
      phi = ph_from_builtin(*fs.builtin, cfg.degree);
      sizes = parse_sizes(cfg.fans_text, "--fans", 8);
    }
    out.options["fans"] = sizes;
    out.options["degree"] = cfg.degree;
    const auto lv = fs.kind == SpecKind::fan ? std::vector<PHLevel>{} : dc_decompose_ph(phi, sizes);
    std::vector<VariationLevel> v1, v2;
    auto record = [&](std::size_t k, const DCPair<SectorFanPH>& pair, double sup, double l1, double l2, double shift) {
      const std::size_t m = pair.f1.size();
      const std::string base = "pairs/fan_" + std::to_string(m);
      out.extra_files.push_back({base + "_f1.json", to_json(pair.f1)});
      out.extra_files.push_back({base + "_f2.json", to_json(pair.f2)});
      double recon = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const Vec2 u = pair.f1.ray(i);
        recon = std::max(recon, std::abs(pair.f1.ray_values()[i] - pair.f2.ray_values()[i] -
                                         phi.boundary(polar_angle(u.x, u.y))));
      }
      levels.push_back({{"fan_size", sizes[k]},
                        {"sup_error", sup},
                        {"reconstruction_error", recon},
                        {"lipschitz_f1", l1},
                        {"lipschitz_f2", l2},
                        {"shift", shift},
                        {"ridges", pair.ridges.size()},
                        {"edges", {{"convex", pair.counts.convex}, {"concave", pair.counts.concave}, {"flat", pair.counts.flat}}},
                        {"files", {base + "_f1.json", base + "_f2.json"}}});
      table += std::to_string(k) + "," + std::to_string(sizes[k]) + "," + fmt17(sup) + "," + fmt17(recon) + "," +
               fmt17(l1) + "," + fmt17(l2) + "," + fmt17(shift) + "\n";
      // circle traces of both parts; every ray of the refined fan is a sample
      const Curve circle = circle_curve(1.0, 8 * m);
      for (auto [part, dst] : {std::pair{&pair.f1, &v1}, std::pair{&pair.f2, &v2}}) {
        const auto ts = trace([p = part](std::span<const double> x) { return p->evaluate({x[0], x[1]}); }, circle, 8 * m);
        dst->push_back({8 * m, derivative_variation(ts), lifted_turn(ts)});
      }
    };
    if (fs.kind == SpecKind::fan) {
      const auto pair = aleksandrov_decompose(*fs.fan);
      record(0, pair, 0.0, lipschitz_constant(pair.f1), lipschitz_constant(pair.f2), 0.0);
    } else {
      for (std::size_t k = 0; k < lv.size(); ++k) {
        record(k, lv[k].pair, lv[k].sup_error, lv[k].lipschitz_f1, lv[k].lipschitz_f2, lv[k].shift);
      }
    }
    append_levels(out.rows, "f1", v1, "n/a");
    append_levels(out.rows, "f2", v2, "n/a");
  } else {
    const Polygon domain = fs.kind == SpecKind::mesh ? fs.mesh->domain_hull() : parse_domain(cfg.domain_text);
    out.options["domain"] = polygon_json(domain);
    std::vector<VariationLevel> v1, v2;
    const Curve boundary = polygon_curve(detail::ccw_convex_domain(domain));
    const std::size_t n_trace = 4096;
    auto trace_parts = [&](const DCPair<TriangulatedPWL>& pair) {
      for (auto [part, dst] : {std::pair{&pair.f1, &v1}, std::pair{&pair.f2, &v2}}) {
        const auto ts = trace([p = part](std::span<const double> x) { return p->evaluate({x[0], x[1]}); }, boundary, n_trace);
        dst->push_back({n_trace, derivative_variation(ts), lifted_turn(ts)});
      }
    };
    if (fs.kind == SpecKind::mesh) {
      const auto pair = aleksandrov_decompose(*fs.mesh);
      out.extra_files.push_back({"pairs/mesh_f1.json", to_json(pair.f1)});
      out.extra_files.push_back({"pairs/mesh_f2.json", to_json(pair.f2)});
      const double l1 = lipschitz_constant(pair.f1), l2 = lipschitz_constant(pair.f2);
      levels.push_back({{"cells", fs.mesh->cell_count()},
                        {"sup_error", 0.0},
                        {"lipschitz_f1", l1},
                        {"lipschitz_f2", l2},
                        {"normalization", pair.normalization},
                        {"ridges", pair.ridges.size()},
                        {"files", {"pairs/mesh_f1.json", "pairs/mesh_f2.json"}}});
      table += "0," + std::to_string(fs.mesh->cell_count()) + ",0,0," + fmt17(l1) + "," + fmt17(l2) + ",0\n";
      trace_parts(pair);
    } else {
      std::vector<unsigned> lvls;
      for (std::size_t v : parse_sizes(cfg.levels_text, "--levels", 0)) lvls.push_back(static_cast<unsigned>(v));
      out.options["levels"] = lvls;
      const auto res = dc_decompose_general(fs.field, domain, lvls);
      for (std::size_t k = 0; k < res.size(); ++k) {
        const auto& l = res[k];
        const std::string base = "pairs/mesh_l" + std::to_string(l.level);
        out.extra_files.push_back({base + "_f1.json", to_json(l.pair.f1)});
        out.extra_files.push_back({base + "_f2.json", to_json(l.pair.f2)});
        levels.push_back({{"level", l.level},
                          {"cells", l.cells},
                          {"sup_error", l.sup_error},
                          {"reconstruction_error", l.reconstruction_error},
                          {"lipschitz_f1", l.lipschitz_f1},
                          {"lipschitz_f2", l.lipschitz_f2},
                          {"f1_sup", l.f1_sup},
                          {"ridges", l.pair.ridges.size()},
                          {"files", {base + "_f1.json", base + "_f2.json"}}});
        table += std::to_string(l.level) + "," + std::to_string(l.cells) + "," + fmt17(l.sup_error) + "," +
                 fmt17(l.reconstruction_error) + "," + fmt17(l.lipschitz_f1) + "," + fmt17(l.lipschitz_f2) + ",0\n";
        trace_parts(l.pair);
      }
    }
    append_levels(out.rows, "f1", v1, "n/a");
    append_levels(out.rows, "f2", v2, "n/a");
  }
  out.report["levels"] = levels;
  out.extra_csv_name = "decompose.csv";
  out.extra_csv = table;
  return out;
}

Outcome cmd_variation(const Config& cfg, const FunctionSpec& fs, bool turn_mode) {
  Outcome out;
  out.report["command"] = turn_mode ? "turn" : "variation";
  const auto sched = schedule_of(cfg);
  const Curve curve = parse_curve(cfg.curve_text, cfg.samples);
  if (curve.dim() != fs.dim) throw Error(ErrorCode::ConfigInvalid, "curve and function dimensions differ");
  out.options["curve"] = cfg.curve_text;
  out.options["samples"] = cfg.samples;
  const VariationReport rep = variation_report(fs.field, curve, sched, cfg.rule);
  out.report["curve"] = {{"spec", cfg.curve_text}, {"length", curve.length()}, {"closed", curve.closed()}};
  out.report["levels"] = levels_json(rep.levels);
  if (!turn_mode) {
    out.report["verdict"] = std::string(to_string(rep.verdict));
    out.report["constant_estimate"] = constant_json(rep.constant_estimate);
    append_levels(out.rows, "curve", rep.levels, to_string(rep.verdict));
    out.exit_code = rep.verdict == Verdict::divergent ? 2 : 0;
    return out;
  }
  std::vector<std::pair<std::size_t, double>> est;
  for (const auto& l : rep.levels) est.push_back({l.n_samples, l.turn});
  const Verdict tv = refine_verdict(est, cfg.rule);
  const double lip = lipschitz_of(fs);
  const auto ts = trace(fs.field, curve, sched.back());
  const double planar = planar_turn(ts), v = rep.levels.back().variation, o = rep.levels.back().turn;
  out.report["verdict"] = std::string(to_string(tv));
  out.report["constant_estimate"] = tv == Verdict::bounded ? json(o) : json(nullptr);
  out.report["sandwich"] = {{"lipschitz", lip},
                            {"lower_constant", turn_lower_constant(lip)},
                            {"upper_constant", turn_upper_constant(lip)},
                            {"curve_turn", planar},
                            {"variation", v},
                            {"lower_bound", turn_lower_constant(lip) * v},
                            {"upper_bound", turn_upper_constant(lip) * (planar + v)},
                            {"holds", turn_lower_constant(lip) * v <= o && o <= turn_upper_constant(lip) * (planar + v)}};
  append_levels(out.rows, "curve", rep.levels, to_string(tv));
  out.exit_code = tv == Verdict::divergent ? 2 : 0;
  return out;
}

json verdict_json(const DCVerdict& v) {
  json j;
  j["verdict"] = std::string(to_string(v.verdict));
  j["constant_estimate"] = v.constant_estimate;
  j["worst_curve"] = v.worst_curve;
  j["hotspot"] = v.hotspot ? json({v.hotspot->x, v.hotspot->y}) : json(nullptr);
  json curves = json::array();
  for (const auto& r : v.reports) {
    curves.push_back({{"id", r.id},
                      {"class", std::string(to_string(r.class_tag))},
                      {"length", r.length},
                      {"curve_turn", r.curve_turn},
                      {"weighted_variation", r.weighted_variation()},
                      {"levels", levels_json(r.report.levels)},
                      {"verdict", std::string(to_string(r.report.verdict))},
                      {"constant_estimate", constant_json(r.report.constant_estimate)}});
  }
  j["curves"] = curves;
  return j;
}

void verdict_rows(Outcome& out, const DCVerdict& v) {
  for (const auto& r : v.reports) append_levels(out.rows, r.id, r.report.levels, to_string(r.report.verdict));
  out.exit_code = v.verdict == DCClass::divergent ? 2 : 0;
}

Outcome cmd_diagnose(const Config& cfg, const FunctionSpec& fs) {
  Outcome out;
  out.report["command"] = "diagnose";
  if (fs.dim != 2) throw Error(ErrorCode::ConfigInvalid, "diagnose is planar; use diagnose3d");
  const auto sched = schedule_of(cfg);
  const Polygon domain = fs.kind == SpecKind::mesh && cfg.domain_text == "-1,-1,1,1" ? fs.mesh->domain_hull()
                                                                                       : parse_domain(cfg.domain_text);
  CurveFamily fam;
  if (cfg.family == "convex") fam.kind = FamilyKind::convex_boundary_family;
  else if (cfg.family == "circle") fam.kind = FamilyKind::circle_family;
  else throw Error(ErrorCode::ConfigInvalid, "--family is convex or circle");
  fam.count = cfg.curves;
  fam.r_min = cfg.r_min;
  fam.r_max = cfg.r_max;
  fam.samples = cfg.samples;
  fam.hotspot_circles = cfg.hotspot_circles;
  fam.seed = cfg.seed;
  out.options = {{"domain", polygon_json(domain)}, {"family", cfg.family},     {"curves", cfg.curves},
                 {"r_min", cfg.r_min},             {"r_max", cfg.r_max},       {"samples", cfg.samples},
                 {"hotspot_circles", cfg.hotspot_circles}};
  const DCVerdict v = dc_diagnose(fs.field, domain, fam, sched, cfg.rule);
  out.report.update(verdict_json(v));
  verdict_rows(out, v);
  return out;
}

Outcome cmd_diagnose3d(const Config& cfg, const FunctionSpec& fs) {
  Outcome out;
  out.report["command"] = "diagnose3d";
  const auto sched = schedule_of(cfg);
  std::vector<CurveFamily> fams;
  auto add = [&](FamilyKind kind) {
    CurveFamily f;
    f.kind = kind;
    f.count = cfg.curves;
    f.r_min = cfg.r_min;
    f.r_max = cfg.r_max;
    f.samples = cfg.samples;
    f.seed = cfg.seed + fams.size();
    fams.push_back(f);
  };
  if (cfg.family == "sphere" || cfg.family == "both") add(FamilyKind::sphere_sections);
  if (cfg.family == "ellipse" || cfg.family == "both") add(FamilyKind::coord_convex_family);
  if (fams.empty()) throw Error(ErrorCode::ConfigInvalid, "--family is sphere, ellipse or both");
  out.options = {{"family", cfg.family}, {"curves", cfg.curves}, {"samples", cfg.samples}};
  const DCVerdict v = dc_diagnose_nd(fs.field, fs.dim, fams, sched, cfg.rule);
  out.report.update(verdict_json(v));
  verdict_rows(out, v);
  return out;
}

Outcome cmd_qdpoint(const Config& cfg, const FunctionSpec& fs) {
  Outcome out;
  out.report["command"] = "qdpoint";
  if (fs.dim != 2) throw Error(ErrorCode::UnsupportedDimension, "qdpoint is planar only");
  const Vec2 x = parse_point(cfg.at_text);
  out.options = {{"at", {x.x, x.y}}, {"alpha", cfg.alpha}, {"rays", cfg.rays}};
  const QDResult r = qd_point_test(fs.field, x, cfg.alpha, cfg.rays, cfg.rule);
  out.report["verdict"] = std::string(to_string(r.verdict));
  out.report["sub"] = polygon_json(r.sub);
  out.report["super"] = polygon_json(r.super);
  out.report["sub_diameter"] = diameter(r.sub);
  out.report["super_diameter"] = diameter(r.super);
  out.report["normalization"] = {r.normalization.x, r.normalization.y};
  json lv = json::array();
  for (std::size_t k = 0; k < r.levels.size(); ++k) {
    lv.push_back({{"rays", r.levels[k].first}, {"variation", r.levels[k].second}});
    out.rows.push_back({"h", k, r.levels[k].first, r.levels[k].second, std::nullopt, std::string(to_string(r.verdict))});
  }
  out.report["levels"] = lv;
  out.exit_code = r.verdict == Verdict::divergent ? 2 : 0;
  return out;
}

TraceSamples trace_from_json(const json& grid, const std::vector<double>& phi) {
  TraceSamples ts;
  ts.dim = 0;
  ts.closed = detail::require<bool>(grid, "closed", "traces");
  ts.period = detail::require<double>(grid, "period", "traces");
  ts.t = detail::require<std::vector<double>>(grid, "t", "traces");
  if (phi.size() != ts.t.size()) throw Error(ErrorCode::GridMismatch, "trace length differs from the grid");
  if (ts.t.size() < 3) throw Error(ErrorCode::TooFewPoints, "a trace needs at least 3 samples");
  ts.phi = phi;
  detail::fill_slopes(ts);
  return ts;
}

Outcome cmd_qdseq(const Config& cfg, const std::optional<FunctionSpec>& fs) {
  Outcome out;
  out.report["command"] = "qdseq";
  std::vector<TraceSamples> traces;
  std::optional<TraceSamples> limit;
  if (!cfg.traces_file.empty()) {
    const json j = read_json(cfg.traces_file);
    for (const auto& phi : detail::require<std::vector<std::vector<double>>>(j, "traces", "traces")) {
      traces.push_back(trace_from_json(j, phi));
    }
    if (j.contains("limit")) limit = trace_from_json(j, detail::require<std::vector<double>>(j, "limit", "traces"));
    out.options = {{"traces", cfg.traces_file}};
  } else {
    // f_j = (1 - 2^-j) f, converging uniformly to f
    const Curve curve = parse_curve(cfg.curve_text, cfg.samples);
    if (curve.dim() != fs->dim) throw Error(ErrorCode::ConfigInvalid, "curve and function dimensions differ");
    const TraceSamples base = trace(fs->field, curve, cfg.trace_samples);
    for (unsigned j = 0; j <= cfg.ramp; ++j) {
      TraceSamples ts = base;
      const double s = 1.0 - std::ldexp(1.0, -static_cast<int>(j));
      for (auto& v : ts.phi) v *= s;
      detail::fill_slopes(ts);
      traces.push_back(std::move(ts));
    }
    limit = base;
    out.options = {{"curve", cfg.curve_text}, {"ramp", cfg.ramp}, {"trace_samples", cfg.trace_samples}};
  }
  const QDSequenceResult r = qd_sequence_test(traces, cfg.uniform_tol, limit ? &*limit : nullptr);
  const std::string verdict = r.conditions_hold ? "holds" : "fails";
  out.report["conditions_hold"] = r.conditions_hold;
  out.report["uniform_ok"] = r.uniform_ok;
  out.report["variation_ok"] = r.variation_ok;
  out.report["uniform_gap"] = r.uniform_gap;
  out.report["uniform_tol"] = r.uniform_tol;
  out.report["c_estimate"] = r.c_estimate;
  out.report["limit_variation_bound"] = r.limit_variation_bound;
  out.report["limit_variation"] = constant_json(r.limit_variation);
  out.report["verdict"] = verdict;
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const auto& ts = traces[k];
    const std::optional<double> turn = ts.points.empty() ? std::nullopt : std::optional<double>(lifted_turn(ts));
    out.rows.push_back({"k" + std::to_string(k), k, ts.size(), derivative_variation(ts), turn, verdict});
  }
  out.exit_code = r.conditions_hold ? 0 : 2;
  return out;
}

// ------------------------------------------------------------------ output

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream o(p, std::ios::binary);
  if (!o) throw Error(ErrorCode::FileNotFound, "cannot write '" + p.string() + "'");
  o << text;
}

std::string csv_of(const std::vector<CsvRow>& rows) {
  std::string s = "curve_id,level,n_samples,variation,turn,verdict\n";
  for (const auto& r : rows) {
    s += r.curve_id + "," + std::to_string(r.level) + "," + std::to_string(r.n_samples) + "," + fmt17(r.variation) + "," +
         (r.turn ? fmt17(*r.turn) : std::string()) + "," + r.verdict + "\n";
  }
  return s;
}

json rule_json(const Config& cfg) {
  return {{"bounded_tol", cfg.rule.bounded_tol},
          {"divergent_growth", cfg.rule.divergent_growth},
          {"window", cfg.rule.window},
          {"min_levels", cfg.rule.min_levels},
          {"abs_floor", cfg.rule.abs_floor},
          {"uniform_tol", cfg.uniform_tol ? json(*cfg.uniform_tol) : json(nullptr)}};
}

int run(const Config& cfg) {
  std::optional<FunctionSpec> fs;
  const bool needs_fn = !(cfg.command == "qdseq" && !cfg.traces_file.empty());
  if (needs_fn) {
    if (cfg.fn.empty()) throw Error(ErrorCode::ConfigInvalid, "--fn is required");
    fs = parse_function_spec(cfg.fn);
  }
  Outcome out;
  if (cfg.command == "decompose") out = cmd_decompose(cfg, *fs);
  else if (cfg.command == "variation") out = cmd_variation(cfg, *fs, false);
  else if (cfg.command == "turn") out = cmd_variation(cfg, *fs, true);
  else if (cfg.command == "diagnose") out = cmd_diagnose(cfg, *fs);
  else if (cfg.command == "diagnose3d") out = cmd_diagnose3d(cfg, *fs);
  else if (cfg.command == "qdpoint") out = cmd_qdpoint(cfg, *fs);
  else out = cmd_qdseq(cfg, fs);

  json function = json(nullptr);
  if (fs) function = {{"spec", cfg.fn}, {"kind", fs->kind == SpecKind::builtin ? "builtin" : (fs->kind == SpecKind::mesh ? "mesh" : "fan")},
                      {"dim", fs->dim}, {"fingerprint", fingerprint(cfg.fn)}};
  out.report["function"] = function;
  out.report["exit_code"] = out.exit_code;

  json manifest;
  manifest["tool"] = "dcsplit";
  manifest["version"] = kVersion;
  manifest["command"] = cfg.command;
  manifest["function"] = function;
  manifest["seed"] = cfg.seed;
  const bool scheduled = cfg.command == "variation" || cfg.command == "turn" || cfg.command == "diagnose" ||
                         cfg.command == "diagnose3d";
  manifest["schedule"] = scheduled ? json(schedule_of(cfg)) : json(nullptr);
  manifest["tolerances"] = rule_json(cfg);
  manifest["options"] = out.options;
  json files = {"manifest.json", "report.json", "report.csv"};
  if (!out.extra_csv_name.empty()) files.push_back(out.extra_csv_name);
  for (const auto& [name, _] : out.extra_files) files.push_back(name);
  manifest["outputs"] = files;

  const fs::path dir(cfg.out);
  for (const auto& [name, content] : out.extra_files) write_file(dir / name, content.dump() + "\n");
  if (!out.extra_csv_name.empty()) write_file(dir / out.extra_csv_name, out.extra_csv);
  write_file(dir / "report.csv", csv_of(out.rows));
  write_file(dir / "report.json", out.report.dump(2) + "\n");
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");

  const auto& rep = out.report;
  std::cout << cfg.command << ": ";
  if (rep.contains("verdict")) std::cout << "verdict " << rep["verdict"].get<std::string>();
  else std::cout << rep["levels"].size() << " level(s)";
  std::cout << ", reports in " << dir.string() << "\n";
  return out.exit_code;
}

void add_common(CLI::App* sub, Config& cfg, bool scheduled) {
  sub->add_option("--fn", cfg.fn, "function: builtin:key[:params], mesh:path, fan:path or a builtin key");
  sub->add_option("--out", cfg.out, "output directory")->capture_default_str();
  sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  if (scheduled) sub->add_option("--schedule", cfg.schedule_text, "refinement sizes, strictly increasing");
  sub->add_option("--bounded-tol", cfg.rule.bounded_tol, "relative increment below which a level counts as converged")
      ->capture_default_str();
  sub->add_option("--divergent-growth", cfg.rule.divergent_growth, "relative growth per level counted as divergence")
      ->capture_default_str();
  sub->add_option("--window", cfg.rule.window, "number of trailing increments inspected")->capture_default_str();
  sub->add_option("--min-levels", cfg.rule.min_levels, "minimum number of levels")->capture_default_str();
  sub->add_option("--abs-floor", cfg.rule.abs_floor, "floor of the relative-increment denominator")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dcsplit: DC decompositions and DC diagnostics of planar and spatial functions"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Config cfg;

  auto* dec = app.add_subcommand("decompose", "Aleksandrov decomposition of a fan, a mesh or a sampled function");
  add_common(dec, cfg, false);
  dec->add_option("--fans", cfg.fans_text, "fan sizes for positively homogeneous functions")->capture_default_str();
  dec->add_option("--levels", cfg.levels_text, "mesh refinement levels for general functions")->capture_default_str();
  dec->add_option("--degree", cfg.degree, "degree of homogeneity")->capture_default_str();
  dec->add_option("--mode", cfg.mode, "auto, ph or mesh")->capture_default_str();
  dec->add_option("--domain", cfg.domain_text, "x0,y0,x1,y1 box or convex vertex list")->capture_default_str();

  auto* var = app.add_subcommand("variation", "variation of the derivative of a trace under refinement");
  auto* trn = app.add_subcommand("turn", "turn of the lifted curve under refinement");
  for (auto* sub : {var, trn}) {
    add_common(sub, cfg, true);
    sub->add_option("--curve", cfg.curve_text, "circle:r[,cx,cy], polygon:x,y,..., segment:x0,y0,x1,y1, sphere:nx,ny,nz,c")
        ->capture_default_str();
    sub->add_option("--samples", cfg.samples, "polyline resolution of smooth curves")->capture_default_str();
  }

  auto* dia = app.add_subcommand("diagnose", "DC diagnostic over a family of convex curves in a planar domain");
  add_common(dia, cfg, true);
  dia->add_option("--curves", cfg.curves, "random curves in the family")->capture_default_str();
  dia->add_option("--family", cfg.family, "convex or circle")->capture_default_str();
  dia->add_option("--domain", cfg.domain_text, "x0,y0,x1,y1 box or convex vertex list")->capture_default_str();
  dia->add_option("--hotspot-circles", cfg.hotspot_circles, "concentric circles around the hot spot")->capture_default_str();
  dia->add_option("--r-min", cfg.r_min, "smallest sub-disk radius")->capture_default_str();
  dia->add_option("--r-max", cfg.r_max, "largest sub-disk radius")->capture_default_str();
  dia->add_option("--samples", cfg.samples, "polyline resolution of circles")->capture_default_str();

  auto* d3 = app.add_subcommand("diagnose3d", "DC diagnostic over curves in R^3");
  add_common(d3, cfg, true);
  d3->add_option("--curves", cfg.curves, "curves per family")->capture_default_str();
  d3->add_option("--family", cfg.family, "sphere, ellipse or both")->default_str("sphere");
  d3->add_option("--r-min", cfg.r_min, "smallest ellipse semi-axis")->capture_default_str();
  d3->add_option("--r-max", cfg.r_max, "largest ellipse semi-axis")->capture_default_str();
  d3->add_option("--samples", cfg.samples, "polyline resolution")->capture_default_str();

  auto* qdp = app.add_subcommand("qdpoint", "quasidifferential of f at a point");
  add_common(qdp, cfg, false);
  qdp->add_option("--at", cfg.at_text, "point x,y")->capture_default_str();
  qdp->add_option("--alpha", cfg.alpha, "finite-difference step")->capture_default_str();
  qdp->add_option("--rays", cfg.rays, "rays of the derivative fan, at least 32")->capture_default_str();

  auto* qds = app.add_subcommand("qdseq", "convergence conditions for a sequence of traces");
  add_common(qds, cfg, false);
  qds->add_option("--traces", cfg.traces_file, "JSON file with t, closed, period, traces and optional limit");
  qds->add_option("--ramp", cfg.ramp, "with --fn: sequence (1 - 2^-j) f for j = 0..ramp")->capture_default_str();
  qds->add_option("--curve", cfg.curve_text, "curve of the traces")->capture_default_str();
  qds->add_option("--samples", cfg.samples, "polyline resolution of the curve")->capture_default_str();
  qds->add_option("--trace-samples", cfg.trace_samples, "samples per trace")->capture_default_str();
  qds->add_option("--uniform-tol", cfg.uniform_tol, "tolerance of the uniform-convergence test");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  if (cfg.command == "diagnose3d" && d3->count("--family") == 0) cfg.family = "sphere";

  try {
    return run(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}
