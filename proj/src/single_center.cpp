#include "vortexloop/single_center.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace vortexloop {

namespace {
constexpr double kFourPi = 4.0 * std::numbers::pi;
const Complex kImag(0.0, 1.0);
}  // namespace

Complex psi_single(double alpha, double k, const Vec3& point) {
  const double r = point.norm();
  if (r <= 1e-9) {
    throw SingularityError("psi_single evaluated at the scatterer");
  }
  return std::exp(kImag * k * point.x()) +
         std::exp(kImag * k * r) / ((kFourPi * alpha - kImag * k) * r);
}

RingGeometry ring_geometry_on_branch(double alpha, double k, int branch_n) {
  RingGeometry g;
  g.branch_n = branch_n;
  g.kappa = alpha == 0.0 ? std::numeric_limits<double>::infinity()
                         : k / (kFourPi * alpha);
  g.distance = 1.0 / std::sqrt(k * k + 16.0 * std::numbers::pi * std::numbers::pi *
                                           alpha * alpha);
  const double arctan =
      alpha == 0.0 ? std::numbers::pi / 2.0 : std::atan(g.kappa);
  g.gamma = (arctan - branch_n * std::numbers::pi) / k;
  const double radius_sq = -g.gamma * (g.gamma + 2.0 * g.distance);
  g.radius = radius_sq > 0.0 ? std::sqrt(radius_sq) : 0.0;
  g.axial_x = g.distance + g.gamma;
  return g;
}

bool ring_exists(const RingGeometry& g) {
  return g.gamma > -2.0 * g.distance && g.gamma < 0.0;
}

std::optional<RingGeometry> ring_geometry(double alpha, double k) {
  if (!(k > 0.0)) throw ConfigError("wavenumber k must be positive");
  const int branch = alpha < 0.0 ? 0 : 1;
  RingGeometry g = ring_geometry_on_branch(alpha, k, branch);
  if (!ring_exists(g)) return std::nullopt;
  return g;
}

double kappa_threshold() {
  const auto f = [](double kp) {
    return std::atan(kp) - std::numbers::pi + 2.0 * kp / std::sqrt(1.0 + kp * kp);
  };
  double lo = 2.0, hi = 4.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace vortexloop
