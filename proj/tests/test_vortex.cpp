#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vortexloop/field.hpp"
#include "vortexloop/io.hpp"
#include "vortexloop/single_center.hpp"
#include "vortexloop/tracer.hpp"
#include "vortexloop/vortex.hpp"

using namespace vortexloop;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

/// Canonical simple vortex along the z-axis: psi = x + iy.
struct SimpleVortex final : WaveField {
  Complex psi(const Vec3& p) const override { return {p.x(), p.y()}; }
  CVec3 grad_psi(const Vec3&) const override {
    return CVec3(Complex(1, 0), Complex(0, 1), Complex(0, 0));
  }
};

/// psi = (x + iy)^m, used to force undersampled phase increments.
struct PowerVortex final : WaveField {
  explicit PowerVortex(int m) : m_(m) {}
  Complex psi(const Vec3& p) const override {
    return std::pow(Complex(p.x(), p.y()), m_);
  }
  CVec3 grad_psi(const Vec3& p) const override {
    const Complex d = double(m_) * std::pow(Complex(p.x(), p.y()), m_ - 1);
    return CVec3(d, Complex(0, 1) * d, Complex(0, 0));
  }
  int m_;
};

FieldState single_state(double alpha, double k = 2.0) {
  return FieldState::solve(ScattererSet{{Vec3(0, 0, 0)}, {alpha}},
                           IncidentWave{k});
}

FieldState seeded_state(std::uint64_t seed, int count, double alpha) {
  RandomScatterers params{seed, count, Box{Vec3(-1, -1, -1), Vec3(1, 1, 1)},
                          alpha};
  return FieldState::solve(generate_scatterers(params), IncidentWave{2.0});
}

NodalLoop traced_ring() {
  const FieldState state = single_state(0.0);
  TraceConfig cfg;
  cfg.bounds = Box{Vec3(-1, -1, -1), Vec3(1, 1, 1)};
  const auto loops = trace_all(state, cfg);
  REQUIRE(loops.size() == 1);
  return loops.front();
}

}  // namespace

TEST_CASE("bessel_j matches the standard library for small arguments") {
  for (int m = 0; m <= 4; ++m) {
    for (double x = 0.0; x <= 2.0; x += 0.1) {
      CHECK(bessel_j(m, x) ==
            doctest::Approx(std::cyl_bessel_j(m, x)).epsilon(1e-12));
    }
  }
  CHECK(bessel_j(-1, 0.3) == doctest::Approx(-std::cyl_bessel_j(1, 0.3)));
  CHECK(bessel_j(-2, 0.3) == doctest::Approx(std::cyl_bessel_j(2, 0.3)));
  CHECK(bessel_j(0, 0.0) == 1.0);
}

TEST_CASE("canonical vortex: winding +1 exactly, circulation 2pi") {
  const SimpleVortex field;
  const VortexReport report =
      winding_number(field, Vec3(0, 0, 0), Vec3(0, 0, 1), 0.1);
  CHECK(report.winding == 1);
  CHECK(report.circulation == doctest::Approx(kTwoPi).epsilon(1e-10));
  // Only the m = +1 harmonic is present.
  const auto coeffs = local_fourier(field, Vec3(0, 0, 0), Vec3(0, 0, 1), 0.1);
  const double dominant = std::abs(coeffs.at(1));
  CHECK(dominant > 0.0);
  for (const auto& [m, c] : coeffs) {
    if (m == 1) continue;
    CHECK(std::abs(c) < 1e-10 * dominant);
  }
}

TEST_CASE("free-field probe has zero winding") {
  const FieldState state = FieldState::solve(ScattererSet{}, IncidentWave{2.0});
  const VortexReport report =
      winding_number(state, Vec3(0.2, 0.1, 0.0), Vec3(0, 0, 1), 0.05);
  CHECK(report.winding == 0);
}

TEST_CASE("single-center ring: winding +-1 and circulation 2pi to 0.5%") {
  const FieldState state = single_state(0.0);
  const auto g = ring_geometry(0.0, 2.0);
  const Vec3 center(g->axial_x, g->radius, 0.0);
  const Vec3 tangent(0, 0, 1);  // ring tangent at this point
  const VortexReport report = winding_number(state, center, tangent, 0.01);
  CHECK(std::abs(report.winding) == 1);
  CHECK(std::abs(std::abs(report.circulation) - kTwoPi) < 0.005 * kTwoPi);
  CHECK(std::abs(report.circulation - kTwoPi * report.winding) <
        0.01 * kTwoPi);
}

TEST_CASE("winding is radius independent") {
  const FieldState state = single_state(0.0);
  const auto g = ring_geometry(0.0, 2.0);
  const Vec3 center(g->axial_x, 0.0, g->radius);
  const Vec3 tangent(0, -1, 0);
  const VortexReport a = winding_number(state, center, tangent, 0.02);
  const VortexReport b = winding_number(state, center, tangent, 0.01);
  const VortexReport c = winding_number(state, center, tangent, 0.005);
  CHECK(a.winding == b.winding);
  CHECK(b.winding == c.winding);
}

TEST_CASE("quadrature converges: doubling samples is inert at 720") {
  const FieldState state = single_state(0.0);
  const auto g = ring_geometry(0.0, 2.0);
  const Vec3 center(g->axial_x, g->radius, 0.0);
  const VortexReport a = winding_number(state, center, Vec3(0, 0, 1), 0.01, 720);
  const VortexReport b = winding_number(state, center, Vec3(0, 0, 1), 0.01, 1440);
  CHECK(std::abs(a.circulation - b.circulation) <
        1e-6 * std::abs(b.circulation));
}

TEST_CASE("m = 0 coefficient is suppressed on the nodal line") {
  const FieldState state = single_state(0.0);
  const auto g = ring_geometry(0.0, 2.0);
  const Vec3 center(g->axial_x, g->radius, 0.0);
  const auto coeffs = local_fourier(state, center, Vec3(0, 0, 1), 0.01);
  const double dominant =
      std::max(std::abs(coeffs.at(1)), std::abs(coeffs.at(-1)));
  CHECK(std::abs(coeffs.at(0)) < 1e-3 * dominant);
}

TEST_CASE("Fourier dominance sign agrees with the winding estimator") {
  const FieldState state = seeded_state(1, 10, 0.0);
  const auto loops = trace_all(state, TraceConfig{});
  REQUIRE(!loops.empty());
  int checked = 0;
  for (const NodalLoop& loop : loops) {
    const auto frames = loop_frames(loop);
    for (std::size_t i = 0; i < loop.vertices.size();
         i += loop.vertices.size() / 5) {
      VortexReport report;
      try {
        report = winding_number(state, loop.vertices[i], frames[i].tangent,
                                0.01);
      } catch (const ProbeError&) {
        continue;
      }
      // Weight by J_m(kr): compare the harmonics as seen on the circle,
      // not the noise-amplified expansion coefficients.
      const auto on_circle = [&](int m) {
        return report.c_abs.at(m) *
               std::abs(bessel_j(m, state.wavenumber() * report.probe_radius));
      };
      const double c1 = on_circle(1), cm1 = on_circle(-1);
      double others = 0.0;
      for (const auto& [m, mag] : report.c_abs) {
        if (m != 1 && m != -1) others = std::max(others, on_circle(m));
      }
      if (std::max(c1, cm1) > 10.0 * others) {
        CHECK(report.winding == (c1 > cm1 ? 1 : -1));
        ++checked;
      }
    }
  }
  CHECK(checked >= 5);
}

TEST_CASE("circulation quantization over random probes on traced loops") {
  int successes = 0;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const FieldState state = seeded_state(seed, 10, 0.0);
    const auto loops = trace_all(state, TraceConfig{});
    for (const NodalLoop& loop : loops) {
      const auto frames = loop_frames(loop);
      const std::size_t stride = std::max<std::size_t>(
          1, loop.vertices.size() / 12);
      for (std::size_t i = 0; i < loop.vertices.size(); i += stride) {
        VortexReport report;
        try {
          report = winding_number(state, loop.vertices[i], frames[i].tangent,
                                  0.01);
        } catch (const ProbeError&) {
          continue;
        }
        const double turns = report.circulation / kTwoPi;
        CHECK(std::abs(turns - std::lround(turns)) < 0.01);
        ++successes;
      }
    }
  }
  CHECK(successes >= 100);
}

TEST_CASE("undersampled probe raises a probe error") {
  // (x+iy)^4 with 8 samples puts exactly pi of phase between neighbors.
  const PowerVortex field(4);
  CHECK_THROWS_AS(
      winding_number(field, Vec3(0, 0, 0), Vec3(0, 0, 1), 0.1, 8),
      ProbeError);
}

TEST_CASE("probe with density below the floor raises a probe error") {
  const FieldState state = FieldState::solve(ScattererSet{}, IncidentWave{2.0});
  CHECK_THROWS_AS(winding_number(state, Vec3(0, 0, 0), Vec3(0, 0, 1), 0.05,
                                 720, /*rho_floor=*/2.0),
                  ProbeError);
}

TEST_CASE("tube circles carry a single phase cut") {
  const FieldState state = single_state(0.0);
  const NodalLoop ring = traced_ring();
  const auto rings = tube_samples(state, ring, 0.1, 64);
  CHECK(rings.size() == ring.vertices.size());
  for (const auto& circle : rings) {
    REQUIRE(circle.size() == 64);
    double net = 0.0;
    for (std::size_t j = 0; j < circle.size(); ++j) {
      const double a = circle[j].phase;
      const double b = circle[(j + 1) % circle.size()].phase;
      double d = b - a;
      while (d > kPi) d -= kTwoPi;
      while (d < -kPi) d += kTwoPi;
      net += d;
    }
    CHECK(std::abs(std::abs(net) - kTwoPi) < 0.02 * kTwoPi);
    for (const TubeSample& s : circle) {
      CHECK(s.phase >= 0.0);
      CHECK(s.phase < kTwoPi);
    }
  }
}

TEST_CASE("zero tube radius is a geometry error") {
  const FieldState state = single_state(0.0);
  const NodalLoop ring = traced_ring();
  CHECK_THROWS_AS(tube_samples(state, ring, 0.0, 16), GeometryError);
}

TEST_CASE("tube radius beyond the curvature radius is a geometry error") {
  const FieldState state = single_state(0.0);
  const NodalLoop ring = traced_ring();  // radius about 0.41
  CHECK_THROWS_AS(tube_samples(state, ring, 0.5, 16), GeometryError);
}

TEST_CASE("velocity near the line lies close to the normal plane") {
  const FieldState state = single_state(0.0);
  const NodalLoop ring = traced_ring();
  const auto frames = loop_frames(ring);
  const auto rings = tube_samples(state, ring, 0.01, 32);
  const double sin15 = std::sin(15.0 * kPi / 180.0);
  for (std::size_t i = 0; i < rings.size(); i += 16) {
    for (const TubeSample& s : rings[i]) {
      const double v = s.velocity.norm();
      if (v <= 0.0) continue;
      CHECK(std::abs(s.velocity.dot(frames[i].tangent)) / v < sin15);
    }
  }
}
