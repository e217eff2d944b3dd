#pragma once

#include <optional>
#include <vector>

#include "vortexloop/field.hpp"

namespace vortexloop {

/// Axis-aligned box.
struct Box {
  Vec3 lo = Vec3(-2.0, -2.0, -2.0);
  Vec3 hi = Vec3(2.0, 2.0, 2.0);

  bool contains(const Vec3& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
  Vec3 center() const { return 0.5 * (lo + hi); }
  /// Box scaled about its center by the given factor.
  Box scaled(double factor) const {
    const Vec3 c = center();
    return Box{c + factor * (lo - c), c + factor * (hi - c)};
  }
  void validate() const;
  bool operator==(const Box& other) const;
};

struct TraceConfig {
  Box bounds;
  int seed_resolution = 40;
  double newton_tol = 1e-10;  ///< on |psi| scaled by the local gradient norm
  double step = 0.01;         ///< arc-length predictor step
  int max_vertices = 100000;
  double closure_tol = 1e-3;   ///< default step/10
  double crossing_tol = 1e-4;  ///< on |gradR x gradI|/(|gradR||gradI|)
  double dedup_tol = 5e-3;     ///< default step/2
  double seed_min_cap = 0.1;   ///< coarse |psi| cap for local-minimum seeds

  void validate() const;
  bool operator==(const TraceConfig& other) const;
  /// Config with closure_tol and dedup_tol rederived from the given step.
  static TraceConfig with_step(double step);
};

struct CrossingMarker {
  int vertex_index = 0;
  int partner_loop = -1;  ///< other loop id, or own id when unresolved/self
};

/// Ordered polyline along a nodal line. Closed loops end within closure_tol
/// of their first vertex.
struct NodalLoop {
  std::vector<Vec3> vertices;
  bool closed = false;
  std::vector<CrossingMarker> crossings;

  double length() const;
};

/// Unit tangent grad(Re psi) x grad(Im psi) normalized, with the
/// degeneracy measure |cross|/(|gradR||gradI|). Quality at or below
/// crossing_tol signals a crossing candidate.
struct TangentInfo {
  Vec3 tangent = Vec3::Zero();
  double quality = 0.0;
};
TangentInfo nodal_tangent(const WaveField& field, const Vec3& point);

/// Grid cells where Re psi and Im psi both change sign across the corners,
/// plus strict local minima of |psi| below a coarse cap. One candidate per
/// cell.
std::vector<Vec3> seed_candidates(const WaveField& field,
                                  const TraceConfig& cfg);

/// Gauss-Newton on (Re psi, Im psi) with minimum-norm updates. Throws
/// RefineError on non-convergence within 50 iterations.
Vec3 refine_to_node(const WaveField& field, const Vec3& guess,
                    const TraceConfig& cfg);

/// Predictor-corrector continuation from a refined nodal point. The
/// corrector is confined to the plane normal to the step tangent.
NodalLoop trace_loop(const WaveField& field, const Vec3& start,
                     const TraceConfig& cfg);

/// Full pipeline: seed, refine, trace, deduplicate, cross-reference
/// crossing markers between loops.
std::vector<NodalLoop> trace_all(const WaveField& field,
                                 const TraceConfig& cfg);

/// Distance from a point to a polyline (closing segment included for
/// closed loops).
double polyline_distance(const NodalLoop& loop, const Vec3& point);

/// Crossing count of the loop projected onto its best-fit plane, as a
/// planarity-limited knot proxy. nullopt when the loop is too far from
/// planar for the projection to be meaningful.
std::optional<int> planar_projection_crossings(const NodalLoop& loop);

}  // namespace vortexloop
