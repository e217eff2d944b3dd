// End-to-end acceptance checks. Each case prints one PASS/FAIL line so the
// suite doubles as a report when run directly.
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "vortexloop/field.hpp"
#include "vortexloop/io.hpp"
#include "vortexloop/single_center.hpp"
#include "vortexloop/tracer.hpp"
#include "vortexloop/vortex.hpp"

using namespace vortexloop;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

void report(int id, const char* name, bool ok) {
  std::printf("acceptance %d %-34s %s\n", id, name, ok ? "PASS" : "FAIL");
  std::fflush(stdout);
  CHECK_MESSAGE(ok, name);
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

FieldState single_state(double alpha, double k = 2.0) {
  return FieldState::solve(ScattererSet{{Vec3(0, 0, 0)}, {alpha}},
                           IncidentWave{k});
}

FieldState seeded_state(std::uint64_t seed, int count, double alpha) {
  const RandomScatterers params{seed, count,
                                Box{Vec3(-1, -1, -1), Vec3(1, 1, 1)}, alpha};
  return FieldState::solve(generate_scatterers(params), IncidentWave{2.0});
}

double ring_distance(const RingGeometry& g, const Vec3& p) {
  const double axial = p.x() - g.axial_x;
  const double transverse = std::hypot(p.y(), p.z()) - g.radius;
  return std::hypot(axial, transverse);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("1: analytic ring reproduction") {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  for (double alpha : {0.0, -0.05, 0.01}) {
    const auto g = ring_geometry(alpha, 2.0);
    REQUIRE(g.has_value());
    const auto loops = trace_all(single_state(alpha), TraceConfig{});
    const bool one_closed = loops.size() == 1 && loops.front().closed;
    CHECK(one_closed);
    ok &= one_closed;
    if (!one_closed) continue;
    double worst = 0.0;
    for (const Vec3& v : loops.front().vertices) {
      worst = std::max(worst, ring_distance(*g, v));
    }
    CHECK(worst < 1e-6);
    ok &= worst < 1e-6;
  }
  const double dt = elapsed_since(t0);
  CHECK(dt < 10.0);
  report(1, "analytic ring reproduction", ok && dt < 10.0);
}

TEST_CASE("2: existence threshold") {
  const double ks = kappa_threshold();
  const double bound = 1.0 / (4.0 * kPi * ks);
  bool ok = ks >= 2.9705 && ks <= 2.9715;
  ok &= bound >= 2.678e-2 && bound <= 2.680e-2;
  CHECK(ok);

  // Bisect over alpha at k = 2 using the tracer itself as the oracle.
  // Near the threshold the ring shrinks toward (-distance - gamma, 0, 0),
  // so a small box with a fine step suffices.
  const double k = 2.0;
  TraceConfig cfg = TraceConfig::with_step(0.002);
  cfg.bounds = Box{Vec3(-0.65, -0.25, -0.25), Vec3(-0.25, 0.25, 0.25)};
  cfg.seed_resolution = 40;
  const auto ring_found = [&](double alpha) {
    return !trace_all(single_state(alpha, k), cfg).empty();
  };
  double lo = 0.04, hi = 0.07;
  REQUIRE(ring_found(lo));
  REQUIRE(!ring_found(hi));
  while (hi - lo > 1e-3 * k * bound) {
    const double mid = 0.5 * (lo + hi);
    (ring_found(mid) ? lo : hi) = mid;
  }
  const bool bracketed = lo / k <= bound && bound <= hi / k;
  const bool tight = (hi - lo) / k <= 1e-3 * bound;
  CHECK(bracketed);
  CHECK(tight);
  ok &= bracketed && tight;
  report(2, "existence threshold", ok);
}

TEST_CASE("3: circulation quantization") {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;

  const FieldState single = single_state(0.0);
  const auto g = ring_geometry(0.0, 2.0);
  for (int i = 0; i < 8; ++i) {
    const double a = kTwoPi * i / 8.0;
    const Vec3 center(g->axial_x, g->radius * std::cos(a),
                      g->radius * std::sin(a));
    const Vec3 tangent = Vec3(0, -std::sin(a), std::cos(a));
    const VortexReport r = winding_number(single, center, tangent, 0.01);
    const bool good = std::abs(r.winding) == 1 &&
                      std::abs(std::abs(r.circulation) - kTwoPi) <
                          0.005 * kTwoPi;
    CHECK(good);
    ok &= good;
  }

  const FieldState state = seeded_state(1, 10, 0.0);
  const auto loops = trace_all(state, TraceConfig{});
  REQUIRE(!loops.empty());
  int probed = 0;
  for (const NodalLoop& loop : loops) {
    const auto frames = loop_frames(loop);
    const std::size_t stride =
        std::max<std::size_t>(1, loop.vertices.size() / 10);
    for (std::size_t i = 0; i < loop.vertices.size(); i += stride) {
      VortexReport r;
      try {
        r = winding_number(state, loop.vertices[i], frames[i].tangent, 0.01);
      } catch (const ProbeError&) {
        continue;
      }
      const bool good = std::abs(r.winding) == 1 &&
                        std::abs(std::abs(r.circulation) - kTwoPi) <
                            0.005 * kTwoPi;
      CHECK(good);
      ok &= good;
      ++probed;
    }
  }
  CHECK(probed >= 20);
  ok &= probed >= 20;
  const double dt = elapsed_since(t0);
  CHECK(dt < 30.0);
  report(3, "circulation quantization", ok && dt < 30.0);
}

TEST_CASE("4: field correctness suite") {
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const int count = static_cast<int>(seed);  // N = 1..10
    const FieldState state = seeded_state(seed, count, seed % 2 ? 0.0 : -0.05);
    const Diagnostics diag = run_diagnostics(state, seed, 100);
    CHECK(diag.helmholtz_worst < Diagnostics::kHelmholtzTol);
    CHECK(diag.gradient_worst < Diagnostics::kGradientTol);
    CHECK(diag.boundary_worst < Diagnostics::kBoundaryTol);
    CHECK(diag.flux_worst < Diagnostics::kFluxTol);
    ok &= diag.pass();
  }
  report(4, "field correctness suite", ok);
}

TEST_CASE("5: multicenter loop properties") {
  const FieldState state = seeded_state(1, 10, 0.0);
  const TraceConfig cfg;
  const auto loops = trace_all(state, cfg);
  bool ok = !loops.empty();
  CHECK(!loops.empty());

  for (const NodalLoop& loop : loops) {
    const bool closed =
        loop.closed && (loop.vertices.front() - loop.vertices.back()).norm() <
                           cfg.step / 10.0;
    CHECK(closed);
    ok &= closed;
  }

  // Confinement: doubling the box must reveal nothing new.
  TraceConfig big = cfg;
  big.bounds = cfg.bounds.scaled(2.0);
  big.seed_resolution = 2 * cfg.seed_resolution;
  const auto more = trace_all(state, big);
  const bool same_count = more.size() == loops.size();
  CHECK(same_count);
  ok &= same_count;
  for (const NodalLoop& loop : loops) {
    double best = 1e9;
    for (const NodalLoop& other : more) {
      double worst = 0.0;
      for (const Vec3& v : loop.vertices) {
        worst = std::max(worst, polyline_distance(other, v));
      }
      best = std::min(best, worst);
    }
    CHECK(best < cfg.dedup_tol);
    ok &= best < cfg.dedup_tol;
  }

  for (const NodalLoop& loop : loops) {
    const TriMesh mesh = tube_mesh(loop, 0.1, 16);
    const bool watertight = is_watertight(mesh);
    CHECK(watertight);
    ok &= watertight;
  }
  report(5, "multicenter loop properties", ok);
}

TEST_CASE("6: tube phase carries a single cut") {
  const FieldState state = single_state(0.0);
  TraceConfig cfg;
  cfg.bounds = Box{Vec3(-1, -1, -1), Vec3(1, 1, 1)};
  const auto loops = trace_all(state, cfg);
  REQUIRE(loops.size() == 1);
  const auto rings = tube_samples(state, loops.front(), 0.1, 64);
  bool ok = true;
  for (const auto& circle : rings) {
    double total_variation = 0.0, net = 0.0;
    for (std::size_t j = 0; j < circle.size(); ++j) {
      double d = circle[(j + 1) % circle.size()].phase - circle[j].phase;
      while (d > kPi) d -= kTwoPi;
      while (d < -kPi) d += kTwoPi;
      total_variation += std::abs(d);
      net += d;
    }
    // Monotone-unwrappable: the variation is all in one direction and
    // amounts to exactly one phase turn.
    const bool good = std::abs(total_variation - kTwoPi) < 0.02 * kTwoPi &&
                      std::abs(std::abs(net) - kTwoPi) < 0.02 * kTwoPi;
    CHECK(good);
    ok &= good;
  }
  report(6, "tube phase single cut", ok);
}

TEST_CASE("7: determinism and round-trip") {
  bool ok = true;

  const std::vector<std::string> corpus = {
      "{\"k\": 2.0}",
      "{\"k\": 0.5, \"direction\": [0, 0, 1], \"output_dir\": \"runs/a\"}",
      "{\"k\": 2.0, \"scatterers\": [{\"pos\": [0, 0, 0], \"alpha\": 0.0}],"
      " \"trace\": {\"step\": 0.02}}",
      "{\"k\": 2.0, \"random_scatterers\": {\"seed\": 1, \"count\": 10,"
      " \"alpha\": 0.0},"
      " \"probes\": [{\"loop\": 0, \"tube_radius\": 0.02}]}",
  };
  for (const std::string& doc : corpus) {
    const RunConfig cfg = load_config(doc);
    const bool round_trip = load_config(emit_config(cfg)) == cfg &&
                            config_fingerprint(cfg) == config_fingerprint(cfg);
    CHECK(round_trip);
    ok &= round_trip;
  }

  // Byte-identical re-run of the full export pipeline.
  const RunConfig cfg = load_config(corpus.back());
  const FieldState state = FieldState::solve(resolve_scatterers(cfg), cfg.wave);
  LoopArchive archive;
  archive.loops = trace_all(state, cfg.trace);
  archive.fingerprint = config_fingerprint(cfg);
  archive.version = VORTEXLOOP_VERSION;
  REQUIRE(!archive.loops.empty());

  const auto base = std::filesystem::temp_directory_path();
  const auto dir_a = base / "vortexloop_accept_a";
  const auto dir_b = base / "vortexloop_accept_b";
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
  for (const auto& dir : {dir_a, dir_b}) {
    export_loops(archive, dir);
    export_archive(archive, dir);
    export_tube_fields(
        {{0, tube_samples(state, archive.loops[0], cfg.probes[0].tube_radius,
                          cfg.probes[0].angular_samples)}},
        dir);
  }
  for (const char* file : {"loops.csv", "loops.obj", "tubes.obj",
                           "archive.json", "phase.csv", "current.csv"}) {
    const bool identical = read_file(dir_a / file) == read_file(dir_b / file);
    CHECK_MESSAGE(identical, file);
    ok &= identical;
  }
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
  report(7, "determinism and round-trip", ok);
}
