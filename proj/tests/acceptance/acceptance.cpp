// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dcsplit/dcsplit.hpp"

using namespace dcsplit;
using std::numbers::pi;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream why;
  void expect(bool cond, const std::string& what) {
    if (!cond && ok) why << what;
    ok = ok && cond;
  }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const Polygon kSquare{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};

std::string num(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

// Riemann-sum oracle for the variation of a derivative given in closed form.
double variation_of_derivative(const std::function<double(double)>& dphi, double a, double b, int grid) {
  double v = 0.0, prev = dphi(a);
  for (int i = 1; i <= grid; ++i) {
    const double cur = dphi(a + (b - a) * i / grid);
    v += std::abs(cur - prev);
    prev = cur;
  }
  return v;
}

// Distance from p to a convex ccw polygon, 0 inside.
double distance_to_polygon(const Polygon& poly, const Vec2& p) {
  const auto& v = poly.vertices;
  bool inside = true;
  double best = 1e300;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[i], b = v[(i + 1) % v.size()];
    const Vec2 ab = b - a, ap = p - a;
    if (ab.x * ap.y - ab.y * ap.x < 0) inside = false;
    const double s = std::clamp(dot(ap, ab) / dot(ab, ab), 0.0, 1.0);
    best = std::min(best, norm(ap - ab * s));
  }
  return inside ? 0.0 : best;
}

// ------------------------------------------------------------------ criteria

Check ac1() {
  Check c;
  const auto t0 = Clock::now();
  for (const char* key : {"saddle", "norm1", "maxcoord", "poly2"}) {
    const Builtin b = make_builtin(key);
    for (std::size_t m : {16u, 64u, 256u}) {
      const SectorFanPH fan = fan_from_profile(b.boundary, m);
      const auto p = aleksandrov_decompose(fan);
      double scale = 1.0, gap = 0.0;
      for (double v : fan.ray_values()) scale = std::max(scale, std::abs(v));
      for (std::size_t i = 0; i < m; ++i) {
        const Vec2 u = fan.ray(i);
        gap = std::max(gap, std::abs(p.f1.evaluate(u) - p.f2.evaluate(u) - fan.ray_values()[i]));
      }
      c.expect(gap <= 1e-9 * scale, std::string(key) + " fan m=" + std::to_string(m) + " gap " + num(gap));
      c.expect(verify_convex(p.f1).ok && verify_convex(p.f2).ok, std::string(key) + " fan parts not convex");
    }
    // meshes of 32, 128 and 512 cells: the first square refinements with at least 16, 64, 256 cells
    for (unsigned level : {2u, 3u, 4u}) {
      const TriangulatedPWL mesh = sample_on_mesh(b.field, triangulate_refine(kSquare, level));
      const auto p = aleksandrov_decompose(mesh);
      double scale = 1.0, gap = 0.0;
      for (double v : mesh.values()) scale = std::max(scale, std::abs(v));
      for (std::size_t i = 0; i < mesh.vertices().size(); ++i) {
        const Vec2 x = mesh.vertices()[i];
        gap = std::max(gap, std::abs(p.f1.evaluate(x) - p.f2.evaluate(x) - mesh.values()[i]));
      }
      c.expect(gap <= 1e-9 * scale, std::string(key) + " mesh level " + std::to_string(level) + " gap " + num(gap));
      c.expect(verify_convex(p.f1).ok && verify_convex(p.f2).ok, std::string(key) + " mesh parts not convex");
    }
  }
  const double s = seconds_since(t0);
  c.expect(s < 10.0, "runtime " + num(s) + " s");
  return c;
}

Check ac2() {
  Check c;
  const std::size_t n = 1 << 16;
  const double v = derivative_variation(trace(make_builtin("saddle").field, circle_curve(1.0, n), n));
  const double oracle = variation_of_derivative([](double t) { return -2.0 * std::sin(2.0 * t); }, 0.0, 2 * pi, 1 << 22);
  c.expect(std::abs(oracle - 16.0) < 1e-6, "oracle " + num(oracle));
  c.expect(std::abs(v - oracle) <= 0.01 * oracle, "variation " + num(v) + " vs " + num(oracle));
  return c;
}

Check ac3() {
  Check c;
  const std::size_t n = 1 << 16;
  const double v = derivative_variation(trace(make_builtin("maxcoord").field, circle_curve(1.0, n), n));
  // max(cos t, sin t): cos wins outside (pi/4, 5 pi/4)
  const auto dphi = [](double t) { return std::cos(t) >= std::sin(t) ? -std::sin(t) : std::cos(t); };
  const double oracle = variation_of_derivative(dphi, 0.0, 2 * pi, 1 << 22);
  const double closed = 4.0 + 2.0 * std::sqrt(2.0);
  c.expect(std::abs(oracle - closed) < 1e-5, "oracle " + num(oracle));
  c.expect(std::abs(v - closed) <= 0.01 * closed, "variation " + num(v) + " vs " + num(closed));
  return c;
}

Check ac4() {
  Check c;
  for (const char* key : {"norm2", "maxcoord"}) {
    const Builtin b = make_builtin(key);
    const SectorFanPH fan = fan_from_profile(b.boundary, 256);
    const auto p = aleksandrov_decompose(fan);
    const double per = perimeter(subdifferential_zero(p.f1));
    const double v = derivative_variation(trace(ph_from_fan(fan).field(), circle_curve(1.0, 1 << 16), 1 << 14));
    const double bound = per + 2 * pi * b.lipschitz;
    c.expect(v <= 1.01 * bound, std::string(key) + ": " + num(v) + " > " + num(bound));
  }
  return c;
}

Check ac5() {
  Check c;
  for (const auto& key : builtin_keys()) {
    const Builtin b = make_builtin(key);
    if (!b.boundary) continue;
    for (std::size_t m = 8; m <= 512; m *= 2) {
      const double l = lipschitz_constant(fan_from_profile(b.boundary, m));
      c.expect(l <= b.lipschitz / std::cos(2 * pi / static_cast<double>(m)), key + " m=" + std::to_string(m) + " L=" + num(l));
    }
  }
  // unit octagon: every sector gradient lies at the chord midpoint's inverse radius
  const double l8 = lipschitz_constant(fan_from_profile(make_builtin("norm2").boundary, 8));
  c.expect(std::abs(l8 - 1.0 / std::cos(pi / 8)) <= 1e-9, "octagon L=" + num(l8));
  return c;
}

Check ac6() {
  Check c;
  const std::size_t n = 10000;
  const Field zero = [](std::span<const double>) { return 0.0; };
  const double turn = curve_turn(zero, circle_curve(1.0, n), n);
  const double ngon = 2.0 * static_cast<double>(n) * std::sin(pi / static_cast<double>(n));
  c.expect(std::abs(turn - ngon) <= 1e-9, "n-gon " + num(turn) + " vs " + num(ngon));
  c.expect(std::abs(turn - 2 * pi) <= 1e-3 * 2 * pi, "turn " + num(turn));
  for (const auto& key : builtin_keys()) {
    const Builtin b = make_builtin(key);
    const Curve curve = b.dim == 2 ? circle_curve(1.0, 1 << 14) : sphere_section_curve({1, 2, 2}, 0.3, 1 << 14);
    const TraceSamples ts = trace(b.field, curve, 4096);
    const double v = derivative_variation(ts), o = lifted_turn(ts), rv = planar_turn(ts);
    const double l = b.domain_lipschitz;
    c.expect(o >= turn_lower_constant(l) * v * (1 - 1e-9), key + ": turn " + num(o) + " below lower bound");
    c.expect(o <= turn_upper_constant(l) * (rv + v) * (1 + 1e-9), key + ": turn " + num(o) + " above upper bound");
  }
  return c;
}

Check ac7() {
  Check c;
  const auto t0 = Clock::now();
  const auto sched = default_schedule();
  const VariationReport circle = variation_report(make_builtin("osc").field, circle_curve(1.0, 1 << 16), sched);
  c.expect(circle.verdict == Verdict::divergent, std::string("osc circle verdict ") + std::string(to_string(circle.verdict)));
  c.expect(circle.levels.size() >= 4, "fewer than 4 levels");
  CurveFamily fam;
  fam.count = 6;
  fam.samples = 1 << 14;
  fam.hotspot_circles = 2;
  fam.seed = 1;
  const DCVerdict osc = dc_diagnose(make_builtin("osc").field, kSquare, fam, sched);
  c.expect(osc.verdict == DCClass::divergent, std::string("osc diagnose ") + std::string(to_string(osc.verdict)));
  for (const char* key : {"norm2", "saddle", "poly2", "sincos"}) {
    const DCVerdict v = dc_diagnose(make_builtin(key).field, kSquare, fam, sched);
    c.expect(v.verdict == DCClass::likely_dc, std::string(key) + " diagnose " + std::string(to_string(v.verdict)));
  }
  const double s = seconds_since(t0);
  c.expect(s < 60.0, "runtime " + num(s) + " s");
  return c;
}

Check ac8() {
  Check c;
  const Field absx = [](std::span<const double> x) { return std::abs(x[0]); };
  for (std::size_t n : {200u, 201u, 1000u}) {
    const Curve seg = natural_parametrize(2, {-1, 0, 1, 0}, false);
    const CumulativeSplit cs = cumulative_decomposition(trace(absx, seg, n));
    const double h = 2.0 / static_cast<double>(n - 1);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < cs.t.size(); ++i) {
      const double s = cs.t[i] - 1.0;
      e1 = std::max(e1, std::abs(cs.psi1[i] - 2.0 * std::max(s, 0.0)));
      e2 = std::max(e2, std::abs(cs.psi2[i] - s));
    }
    c.expect(e1 <= h && e2 <= h, "n=" + std::to_string(n) + " errors " + num(e1) + ", " + num(e2) + " step " + num(h));
    for (std::size_t i = 1; i < cs.slopes1.size(); ++i) {
      c.expect(cs.slopes1[i] >= cs.slopes1[i - 1] && cs.slopes2[i] >= cs.slopes2[i - 1],
               "slopes not monotone at n=" + std::to_string(n));
    }
  }
  return c;
}

Check ac9() {
  Check c;
  const Curve circle = circle_curve(1.0, 1 << 14);
  for (const char* key : {"saddle", "norm1", "maxcoord", "osc"}) {
    for (unsigned m : {2u, 3u, 5u}) {
      const PHFunction phi = ph_from_builtin(make_builtin(key), m);
      const TraceSamples a = trace(phi.field(), circle, 4096);
      const TraceSamples b = trace(degree_drop(phi).field(), circle, 4096);
      c.expect(a.phi == b.phi, std::string(key) + " degree " + std::to_string(m) + ": traces differ");
      const double va = derivative_variation(a), vb = derivative_variation(b);
      c.expect(std::abs(va - vb) <= 1e-12, std::string(key) + ": variations " + num(va) + " vs " + num(vb));
    }
  }
  return c;
}

Check ac10() {
  Check c;
  const std::size_t m = 256;
  const QDResult r = qd_point_test(make_builtin("norm2").field, {0, 0}, 1e-6, m);
  c.expect(diameter(r.super) <= 1e-6, "super diameter " + num(diameter(r.super)));
  c.expect(is_convex_ccw(r.sub.vertices), "sub is not a convex polygon");
  double h = 0.0;
  for (const auto& v : r.sub.vertices) h = std::max(h, norm(v) - 1.0);
  const int probes = 1 << 16;
  for (int i = 0; i < probes; ++i) {
    const double t = 2 * pi * i / probes;
    h = std::max(h, distance_to_polygon(r.sub, {std::cos(t), std::sin(t)}));
  }
  const double bound = 2.0 * (1.0 / std::cos(pi / static_cast<double>(m)) - 1.0);
  c.expect(h <= bound, "Hausdorff " + num(h) + " > " + num(bound));
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Check ac11() {
  Check c;
  const std::string cli = DCSPLIT_CLI;
  const auto base = std::filesystem::temp_directory_path() / "dcsplit_acceptance";
  std::filesystem::remove_all(base);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"decompose", "decompose --fn saddle --fans 16,64"},
      {"decompose_general", "decompose --fn sincos --levels 2,3"},
      {"variation", "variation --fn maxcoord --schedule 256,512,1024,2048"},
      {"turn", "turn --fn poly2 --curve circle:0.5,0.2,0 --schedule 256,512,1024,2048"},
      {"diagnose", "diagnose --fn saddle --curves 5 --seed 42 --schedule 256,512,1024,2048"},
      {"diagnose3d", "diagnose3d --fn linf3 --family both --curves 3 --seed 9 --schedule 256,512,1024,2048"},
      {"qdpoint", "qdpoint --fn norm1 --at 0,0"},
      {"qdseq", "qdseq --fn saddle --ramp 12"},
  };
  for (const auto& [name, args] : commands) {
    std::string csv[2];
    for (int run = 0; run < 2; ++run) {
      const auto dir = base / (name + "_" + std::to_string(run));
      const std::string cmd = "\"" + cli + "\" " + args + " --out \"" + dir.string() + "\" > /dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      c.expect(code == 0 || code == 2, name + ": exit " + std::to_string(code));
      csv[run] = slurp(dir / "report.csv");
    }
    c.expect(!csv[0].empty(), name + ": empty csv");
    c.expect(csv[0] == csv[1], name + ": csv differs between runs");
  }
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Check (*)()>> criteria = {
      {"AC1 reconstruction exactness", ac1},   {"AC2 saddle variation", ac2},     {"AC3 maxcoord variation", ac3},
      {"AC4 perimeter bound", ac4},            {"AC5 fan Lipschitz bound", ac5},  {"AC6 turn of flat circle", ac6},
      {"AC7 divergence detection", ac7},       {"AC8 cumulative split", ac8},     {"AC9 degree-lift invariance", ac9},
      {"AC10 quasidifferential at a point", ac10}, {"AC11 CLI determinism", ac11},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.why << "exception: " << e.what();
    }
    std::cout << (c.ok ? "PASS " : "FAIL ") << name;
    if (!c.ok) std::cout << " (" << c.why.str() << ")";
    std::cout << std::endl;
    failed += c.ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
