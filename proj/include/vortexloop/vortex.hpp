#pragma once

#include <map>
#include <vector>

#include "vortexloop/field.hpp"
#include "vortexloop/tracer.hpp"

namespace vortexloop {

/// Bessel function J_m of integer order by the ascending series, intended
/// for small arguments (probe radii well below 1/k).
double bessel_j(int m, double x);

/// Vortical structure at a nodal-line point: phase winding, velocity
/// circulation over the probe circle, and magnitudes of the local
/// cylindrical-expansion coefficients (Bessel factor divided out).
struct VortexReport {
  int winding = 0;
  double circulation = 0.0;
  std::map<int, double> c_abs;
  double probe_radius = 0.0;
  int samples = 0;
};

/// Local expansion coefficients c_m for |m| <= m_max on the probe circle
/// of the given radius in the plane normal to `tangent`. Entries whose
/// Bessel factor underflows are omitted.
std::map<int, Complex> local_fourier(const WaveField& field, const Vec3& center,
                                     const Vec3& tangent, double radius,
                                     int m_max = 4, int samples = 720);

/// Winding number by unwrapped phase accumulation plus circulation by
/// trapezoidal quadrature of v . dr, with the Fourier magnitudes filled in.
/// Throws ProbeError on a phase jump >= pi between adjacent samples
/// (undersampling) or |psi|^2 below rho_floor at a sample.
VortexReport winding_number(const WaveField& field, const Vec3& center,
                            const Vec3& tangent, double radius,
                            int samples = 720, double rho_floor = 1e-14,
                            int m_max = 4);

/// Orthonormal frame at a loop vertex; normals are transported along the
/// loop by projection (rotation-minimizing), avoiding Frenet twist.
struct LoopFrame {
  Vec3 tangent = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
  Vec3 binormal = Vec3::Zero();
};

std::vector<LoopFrame> loop_frames(const NodalLoop& loop);

/// Smallest circumscribed-circle radius over consecutive vertex triples.
double min_curvature_radius(const NodalLoop& loop);

struct TubeSample {
  Vec3 position = Vec3::Zero();
  double phase = 0.0;  ///< arg psi in [0, 2pi)
  Vec3 velocity = Vec3::Zero();
};

/// Phase and velocity on the tubular surface around a loop, one circle of
/// angular_samples points per loop vertex, framed by a rotation-minimizing
/// normal frame. Throws GeometryError when tube_radius is non-positive or
/// not below the local curvature radius.
std::vector<std::vector<TubeSample>> tube_samples(const WaveField& field,
                                                  const NodalLoop& loop,
                                                  double tube_radius,
                                                  int angular_samples);

}  // namespace vortexloop
