#pragma once

#include <optional>

#include "vortexloop/field.hpp"

namespace vortexloop {

/// Exact geometry of the nodal ring of a single point scatterer at the
/// origin. The ring is a circle of the given radius in the plane
/// x1 = axial_x, centered on the incidence axis.
struct RingGeometry {
  double axial_x = 0.0;   ///< ring-plane coordinate along the incidence axis
  double radius = 0.0;    ///< circle radius, > 0
  double distance = 0.0;  ///< distance of the ring from the origin
  double gamma = 0.0;     ///< phase-offset length, -2*distance < gamma < 0
  double kappa = 0.0;     ///< k/(4 pi alpha); +inf when alpha = 0
  int branch_n = 0;       ///< arctangent branch index
};

/// Closed-form scattering wavefunction for one scatterer of strength alpha
/// at the origin: exp(ikx1) + exp(ik|x|)/((4 pi alpha - ik)|x|).
Complex psi_single(double alpha, double k, const Vec3& point);

/// Nodal-ring geometry, or nullopt when no ring exists. For alpha < 0 the
/// principal arctangent branch always yields a ring; for alpha > 0 the
/// shifted branch (n = 1) yields one iff kappa > kappa_threshold();
/// alpha = 0 is the kappa -> inf limit of the n = 1 branch.
std::optional<RingGeometry> ring_geometry(double alpha, double k);

/// Candidate geometry on an explicit arctangent branch, ignoring the
/// existence window. Used by the branch-uniqueness scan.
RingGeometry ring_geometry_on_branch(double alpha, double k, int branch_n);

/// True when the candidate satisfies -2*distance < gamma < 0.
bool ring_exists(const RingGeometry& g);

/// Root kappa* of arctan(kappa) - pi = -2 kappa / sqrt(1 + kappa^2),
/// computed by bracketed bisection on [2, 4] to 1e-10. Approximately 2.971;
/// the implied existence bound is alpha/k < 1/(4 pi kappa*).
double kappa_threshold();

}  // namespace vortexloop
