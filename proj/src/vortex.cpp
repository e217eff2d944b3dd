#include "vortexloop/vortex.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace vortexloop {

double bessel_j(int m, double x) {
  if (m < 0) {
    const double v = bessel_j(-m, x);
    return (-m) % 2 == 0 ? v : -v;
  }
  const double half = 0.5 * x;
  double term = 1.0;
  for (int i = 1; i <= m; ++i) term *= half / i;
  double sum = term;
  const double half_sq = half * half;
  for (int s = 1; s <= 60; ++s) {
    term *= -half_sq / (s * (s + m));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-320) break;
  }
  return sum;
}

namespace {

struct ProbeFrame {
  Vec3 t, e1, e2;  // right-handed: e1 x e2 = t
};

ProbeFrame make_frame(const Vec3& tangent) {
  const double n = tangent.norm();
  if (!(n > 0.0)) throw ProbeError("probe tangent is zero");
  ProbeFrame f;
  f.t = tangent / n;
  f.e1 = f.t.unitOrthogonal();
  f.e2 = f.t.cross(f.e1);
  return f;
}

}  // namespace

std::map<int, Complex> local_fourier(const WaveField& field, const Vec3& center,
                                     const Vec3& tangent, double radius,
                                     int m_max, int samples) {
  if (!(radius > 0.0)) throw ProbeError("probe radius must be positive");
  if (samples < 2 * m_max + 2) throw ProbeError("too few samples for m_max");
  const ProbeFrame frame = make_frame(tangent);
  const double k = field.wavenumber();

  std::vector<Complex> values(samples);
  for (int i = 0; i < samples; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / samples;
    const Vec3 p =
        center + radius * (std::cos(phi) * frame.e1 + std::sin(phi) * frame.e2);
    values[i] = field.psi(p);
  }

  std::map<int, Complex> coeffs;
  for (int m = -m_max; m <= m_max; ++m) {
    Complex acc(0.0, 0.0);
    for (int i = 0; i < samples; ++i) {
      const double phi = 2.0 * std::numbers::pi * i / samples;
      acc += values[i] * std::exp(Complex(0.0, -m * phi));
    }
    acc /= static_cast<double>(samples);
    const double jm = bessel_j(m, k * radius);
    if (std::abs(jm) < 1e-300) continue;  // radius too small for this order
    coeffs[m] = acc / jm;
  }
  return coeffs;
}

VortexReport winding_number(const WaveField& field, const Vec3& center,
                            const Vec3& tangent, double radius, int samples,
                            double rho_floor, int m_max) {
  if (!(radius > 0.0)) throw ProbeError("probe radius must be positive");
  if (samples < 8) throw ProbeError("need at least 8 probe samples");
  const ProbeFrame frame = make_frame(tangent);

  VortexReport report;
  report.probe_radius = radius;
  report.samples = samples;

  const double dphi = 2.0 * std::numbers::pi / samples;
  double accumulated = 0.0;
  double circulation = 0.0;
  Complex prev;
  for (int i = 0; i <= samples; ++i) {
    const double phi = dphi * (i % samples);
    const Vec3 p =
        center + radius * (std::cos(phi) * frame.e1 + std::sin(phi) * frame.e2);
    const FieldSample s = field.sample(p, rho_floor);
    if (s.rho < rho_floor) {
      throw ProbeError("probe circle touches the nodal set (rho below floor)");
    }
    if (i > 0) {
      const double inc = std::arg(s.psi / prev);
      if (std::abs(inc) >= std::numbers::pi * 0.999) {
        throw ProbeError("phase jump >= pi between adjacent probe samples");
      }
      accumulated += inc;
    }
    prev = s.psi;
    if (i < samples) {
      // Trapezoid on a periodic integrand: sum v . dx/dphi times dphi.
      const Vec3 dxdphi =
          radius * (-std::sin(phi) * frame.e1 + std::cos(phi) * frame.e2);
      circulation += s.velocity->dot(dxdphi) * dphi;
    }
  }
  report.winding =
      static_cast<int>(std::lround(accumulated / (2.0 * std::numbers::pi)));
  report.circulation = circulation;

  for (const auto& [m, c] : local_fourier(field, center, frame.t, radius,
                                          m_max, samples)) {
    report.c_abs[m] = std::abs(c);
  }
  return report;
}

std::vector<LoopFrame> loop_frames(const NodalLoop& loop) {
  const int n = static_cast<int>(loop.vertices.size());
  if (n < 3) throw GeometryError("loop too short for a frame");
  const auto vertex = [&](int i) {
    return loop.vertices[((i % n) + n) % n];
  };
  std::vector<LoopFrame> frames(n);
  for (int i = 0; i < n; ++i) {
    Vec3 d;
    if (loop.closed) {
      d = vertex(i + 1) - vertex(i - 1);
    } else if (i == 0) {
      d = loop.vertices[1] - loop.vertices[0];
    } else if (i == n - 1) {
      d = loop.vertices[n - 1] - loop.vertices[n - 2];
    } else {
      d = loop.vertices[i + 1] - loop.vertices[i - 1];
    }
    if (!(d.norm() > 0.0)) throw GeometryError("degenerate loop segment");
    frames[i].tangent = d.normalized();
  }
  // Rotation-minimizing frame: transport the normal by projection.
  frames[0].normal = frames[0].tangent.unitOrthogonal();
  for (int i = 1; i < n; ++i) {
    Vec3 projected = frames[i - 1].normal -
                     frames[i].tangent *
                         frames[i].tangent.dot(frames[i - 1].normal);
    if (projected.norm() < 1e-12) {
      projected = frames[i].tangent.unitOrthogonal();
    }
    frames[i].normal = projected.normalized();
  }
  for (int i = 0; i < n; ++i) {
    frames[i].binormal = frames[i].tangent.cross(frames[i].normal);
  }
  return frames;
}

double min_curvature_radius(const NodalLoop& loop) {
  const int n = static_cast<int>(loop.vertices.size());
  const auto vertex = [&](int i) {
    return loop.vertices[((i % n) + n) % n];
  };
  double best = std::numeric_limits<double>::infinity();
  for (int i = loop.closed ? 0 : 1; i < (loop.closed ? n : n - 1); ++i) {
    const Vec3 a = vertex(i - 1), b = vertex(i), c = vertex(i + 1);
    const double area2 = (b - a).cross(c - a).norm();
    if (area2 <= 0.0) continue;  // locally straight
    const double circum =
        (b - a).norm() * (c - b).norm() * (c - a).norm() / (2.0 * area2);
    best = std::min(best, circum);
  }
  return best;
}

std::vector<std::vector<TubeSample>> tube_samples(const WaveField& field,
                                                  const NodalLoop& loop,
                                                  double tube_radius,
                                                  int angular_samples) {
  if (!(tube_radius > 0.0)) {
    throw GeometryError("tube radius must be positive");
  }
  if (angular_samples < 3) throw GeometryError("need at least 3 tube samples");
  const int n = static_cast<int>(loop.vertices.size());
  if (n < 3) throw GeometryError("loop too short for a tube");
  if (tube_radius >= min_curvature_radius(loop)) {
    throw GeometryError("tube radius exceeds local curvature radius");
  }

  const std::vector<LoopFrame> frames = loop_frames(loop);
  std::vector<std::vector<TubeSample>> rings(n);
  for (int i = 0; i < n; ++i) {
    rings[i].reserve(angular_samples);
    for (int j = 0; j < angular_samples; ++j) {
      const double a = 2.0 * std::numbers::pi * j / angular_samples;
      TubeSample ts;
      ts.position = loop.vertices[i] +
                    tube_radius * (std::cos(a) * frames[i].normal +
                                   std::sin(a) * frames[i].binormal);
      const FieldSample s = field.sample(ts.position);
      double phase = std::arg(s.psi);
      if (phase < 0.0) phase += 2.0 * std::numbers::pi;
      if (phase >= 2.0 * std::numbers::pi) phase = 0.0;
      ts.phase = phase;
      if (!s.velocity) {
        throw GeometryError("tube surface touches the nodal set");
      }
      ts.velocity = *s.velocity;
      rings[i].push_back(ts);
    }
  }
  return rings;
}

}  // namespace vortexloop
