#include "vortexloop/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vortexloop {

void Box::validate() const {
  if (!(lo.array() < hi.array()).all()) {
    throw ConfigError("bounds box is degenerate");
  }
}

bool Box::operator==(const Box& other) const {
  return lo.cwiseEqual(other.lo).all() && hi.cwiseEqual(other.hi).all();
}

bool TraceConfig::operator==(const TraceConfig& other) const {
  return bounds == other.bounds &&
         seed_resolution == other.seed_resolution &&
         newton_tol == other.newton_tol && step == other.step &&
         max_vertices == other.max_vertices &&
         closure_tol == other.closure_tol &&
         crossing_tol == other.crossing_tol &&
         dedup_tol == other.dedup_tol && seed_min_cap == other.seed_min_cap;
}

void TraceConfig::validate() const {
  bounds.validate();
  if (seed_resolution < 1) throw ConfigError("seed_resolution must be >= 1");
  if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be > 0");
  if (!(step > 0.0)) throw ConfigError("step must be > 0");
  if (max_vertices < 4) throw ConfigError("max_vertices must be >= 4");
  if (!(closure_tol > 0.0)) throw ConfigError("closure_tol must be > 0");
  if (!(crossing_tol > 0.0)) throw ConfigError("crossing_tol must be > 0");
  if (!(dedup_tol > 0.0)) throw ConfigError("dedup_tol must be > 0");
}

TraceConfig TraceConfig::with_step(double step) {
  TraceConfig cfg;
  cfg.step = step;
  cfg.closure_tol = step / 10.0;
  cfg.dedup_tol = step / 2.0;
  return cfg;
}

double NodalLoop::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    total += (vertices[i] - vertices[i - 1]).norm();
  }
  if (closed && vertices.size() > 2) {
    total += (vertices.front() - vertices.back()).norm();
  }
  return total;
}

TangentInfo nodal_tangent(const WaveField& field, const Vec3& point) {
  const CVec3 g = field.grad_psi(point);
  const Vec3 gr = g.real();
  const Vec3 gi = g.imag();
  const Vec3 cross = gr.cross(gi);
  TangentInfo info;
  const double denom = gr.norm() * gi.norm();
  if (denom <= 0.0) return info;
  info.quality = cross.norm() / denom;
  if (cross.norm() > 0.0) info.tangent = cross.normalized();
  return info;
}

std::vector<Vec3> seed_candidates(const WaveField& field,
                                  const TraceConfig& cfg) {
  cfg.validate();
  const int res = cfg.seed_resolution;
  const int n = res + 1;
  const Vec3 lo = cfg.bounds.lo;
  const Vec3 span = cfg.bounds.hi - cfg.bounds.lo;

  const auto node = [&](int i, int j, int l) {
    return Vec3(lo.x() + span.x() * i / res, lo.y() + span.y() * j / res,
                lo.z() + span.z() * l / res);
  };
  const auto idx = [&](int i, int j, int l) { return (i * n + j) * n + l; };

  std::vector<Complex> values(static_cast<std::size_t>(n) * n * n);
  std::vector<char> valid(values.size(), 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        try {
          values[idx(i, j, l)] = field.psi(node(i, j, l));
        } catch (const SingularityError&) {
          valid[idx(i, j, l)] = 0;
        }
      }
    }
  }

  std::vector<Vec3> candidates;
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      for (int l = 0; l < res; ++l) {
        bool ok = true;
        double re_min = std::numeric_limits<double>::infinity(), re_max = -re_min;
        double im_min = re_min, im_max = -re_min;
        for (int di = 0; di <= 1 && ok; ++di) {
          for (int dj = 0; dj <= 1 && ok; ++dj) {
            for (int dl = 0; dl <= 1 && ok; ++dl) {
              const std::size_t id = idx(i + di, j + dj, l + dl);
              if (!valid[id]) { ok = false; break; }
              const Complex v = values[id];
              re_min = std::min(re_min, v.real());
              re_max = std::max(re_max, v.real());
              im_min = std::min(im_min, v.imag());
              im_max = std::max(im_max, v.imag());
            }
          }
        }
        if (ok && re_min <= 0.0 && re_max >= 0.0 && im_min <= 0.0 &&
            im_max >= 0.0) {
          candidates.push_back(0.5 * (node(i, j, l) + node(i + 1, j + 1, l + 1)));
        }
      }
    }
  }

  // Strict |psi| local minima catch loops thinner than the cell size.
  for (int i = 1; i < res; ++i) {
    for (int j = 1; j < res; ++j) {
      for (int l = 1; l < res; ++l) {
        if (!valid[idx(i, j, l)]) continue;
        const double a = std::abs(values[idx(i, j, l)]);
        if (a >= cfg.seed_min_cap) continue;
        bool strict_min = true;
        const int off[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                               {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
        for (const auto& o : off) {
          const std::size_t id = idx(i + o[0], j + o[1], l + o[2]);
          if (!valid[id] || std::abs(values[id]) <= a) {
            strict_min = false;
            break;
          }
        }
        if (strict_min) candidates.push_back(node(i, j, l));
      }
    }
  }
  return candidates;
}

namespace {

double gradient_scale(const CVec3& g) {
  return std::sqrt(g.squaredNorm());
}

/// One plane-constrained Newton solve: correct `guess` to the nodal set
/// within the plane through `guess` normal to `axis`.
Vec3 correct_in_plane(const WaveField& field, const Vec3& guess,
                      const Vec3& axis, const TraceConfig& cfg,
                      double trust_radius) {
  Vec3 a = axis.unitOrthogonal();
  Vec3 b = axis.cross(a);
  Vec3 x = guess;
  for (int iter = 0; iter < 50; ++iter) {
    const Complex value = field.psi(x);
    const CVec3 g = field.grad_psi(x);
    const double scale = std::max(gradient_scale(g), 1e-300);
    if (std::abs(value) < cfg.newton_tol * scale) return x;
    // 2x2 Newton system in the plane basis.
    const double j00 = g.real().dot(a), j01 = g.real().dot(b);
    const double j10 = g.imag().dot(a), j11 = g.imag().dot(b);
    const double det = j00 * j11 - j01 * j10;
    if (std::abs(det) < 1e-30 * scale * scale) {
      throw RefineError("degenerate corrector Jacobian");
    }
    const double f0 = value.real(), f1 = value.imag();
    const double du = (-f0 * j11 + f1 * j01) / det;
    const double dv = (-f1 * j00 + f0 * j10) / det;
    x += du * a + dv * b;
    if ((x - guess).norm() > trust_radius) {
      throw RefineError("corrector left trust region");
    }
  }
  throw RefineError("corrector did not converge in 50 iterations");
}

enum class WalkStatus { Closed, LeftBounds, Degenerate, Exhausted, Stuck };

struct WalkResult {
  std::vector<Vec3> vertices;  // not including the start point
  WalkStatus status = WalkStatus::Stuck;
};

WalkResult walk(const WaveField& field, const Vec3& start, const Vec3& dir,
                const TraceConfig& cfg, int vertex_budget) {
  WalkResult out;
  Vec3 x = start;
  Vec3 t = dir;
  bool moved_away = false;
  while (static_cast<int>(out.vertices.size()) < vertex_budget) {
    const double d0 = (x - start).norm();
    if (moved_away && d0 < 1.6 * cfg.step && t.dot(start - x) > 0.0) {
      // Closing step: aim the predictor at the start point.
      const double len = std::clamp(d0, cfg.step / 4.0, 2.0 * cfg.step);
      try {
        const Vec3 closed =
            correct_in_plane(field, x + len * t, t, cfg, 2.0 * cfg.step);
        if ((closed - start).norm() < cfg.closure_tol) {
          out.vertices.push_back(closed);
          out.status = WalkStatus::Closed;
          return out;
        }
      } catch (const RefineError&) {
      }
    }

    Vec3 next;
    bool stepped = false;
    for (double h = cfg.step; h >= cfg.step / 8.0 - 1e-300; h *= 0.5) {
      try {
        next = correct_in_plane(field, x + h * t, t, cfg, h);
        stepped = true;
        break;
      } catch (const RefineError&) {
      }
    }
    if (!stepped) {
      out.status = WalkStatus::Stuck;
      return out;
    }

    const TangentInfo info = nodal_tangent(field, next);
    if (!cfg.bounds.contains(next)) {
      out.status = WalkStatus::LeftBounds;
      return out;
    }
    out.vertices.push_back(next);
    if (info.quality <= cfg.crossing_tol) {
      out.status = WalkStatus::Degenerate;
      return out;
    }
    Vec3 tn = info.tangent;
    if (tn.dot(t) < 0.0) tn = -tn;
    x = next;
    t = tn;
    if ((x - start).norm() > 2.0 * cfg.step) moved_away = true;
  }
  out.status = WalkStatus::Exhausted;
  return out;
}

}  // namespace

Vec3 refine_to_node(const WaveField& field, const Vec3& guess,
                    const TraceConfig& cfg) {
  Vec3 x = guess;
  for (int iter = 0; iter < 50; ++iter) {
    const Complex value = field.psi(x);
    const CVec3 g = field.grad_psi(x);
    const double scale = std::max(gradient_scale(g), 1e-300);
    if (std::abs(value) < cfg.newton_tol * scale) return x;
    // Minimum-norm Gauss-Newton update: delta = -J^T (J J^T)^{-1} F with
    // J the 2x3 real Jacobian (rows Re grad, Im grad).
    const Vec3 gr = g.real(), gi = g.imag();
    const double a = gr.squaredNorm(), b = gr.dot(gi), c = gi.squaredNorm();
    const double det = a * c - b * b;
    if (det < 1e-30 * scale * scale * scale * scale) {
      throw RefineError("degenerate Jacobian in nodal refinement");
    }
    const double f0 = value.real(), f1 = value.imag();
    const double l0 = (c * f0 - b * f1) / det;
    const double l1 = (a * f1 - b * f0) / det;
    x -= l0 * gr + l1 * gi;
    if (!x.allFinite() || (x - guess).norm() > 1e3) {
      throw RefineError("nodal refinement diverged");
    }
  }
  throw RefineError("nodal refinement did not converge in 50 iterations");
}

NodalLoop trace_loop(const WaveField& field, const Vec3& start,
                     const TraceConfig& cfg) {
  cfg.validate();
  {
    const Complex value = field.psi(start);
    const double scale =
        std::max(gradient_scale(field.grad_psi(start)), 1e-300);
    if (std::abs(value) > 10.0 * cfg.newton_tol * scale) {
      throw RefineError("trace start point is not on the nodal set");
    }
  }
  const TangentInfo info = nodal_tangent(field, start);
  if (info.quality <= cfg.crossing_tol) {
    throw RefineError("tangent degenerate at trace start");
  }

  NodalLoop loop;
  const WalkResult fwd =
      walk(field, start, info.tangent, cfg, cfg.max_vertices - 1);
  if (fwd.status == WalkStatus::Closed) {
    loop.closed = true;
    loop.vertices.push_back(start);
    loop.vertices.insert(loop.vertices.end(), fwd.vertices.begin(),
                         fwd.vertices.end());
    return loop;
  }

  const int budget =
      cfg.max_vertices - 1 - static_cast<int>(fwd.vertices.size());
  const WalkResult bwd = walk(field, start, -info.tangent, cfg, budget);
  loop.closed = false;
  loop.vertices.assign(bwd.vertices.rbegin(), bwd.vertices.rend());
  loop.vertices.push_back(start);
  loop.vertices.insert(loop.vertices.end(), fwd.vertices.begin(),
                       fwd.vertices.end());
  if (bwd.status == WalkStatus::Degenerate) {
    loop.crossings.push_back({0, -1});
  }
  if (fwd.status == WalkStatus::Degenerate) {
    loop.crossings.push_back({static_cast<int>(loop.vertices.size()) - 1, -1});
  }
  return loop;
}

double polyline_distance(const NodalLoop& loop, const Vec3& point) {
  double best = std::numeric_limits<double>::infinity();
  const auto segment = [&](const Vec3& p, const Vec3& q) {
    const Vec3 d = q - p;
    const double len_sq = d.squaredNorm();
    double s = len_sq > 0.0 ? (point - p).dot(d) / len_sq : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    best = std::min(best, (point - (p + s * d)).norm());
  };
  for (std::size_t i = 1; i < loop.vertices.size(); ++i) {
    segment(loop.vertices[i - 1], loop.vertices[i]);
  }
  if (loop.closed && loop.vertices.size() > 2) {
    segment(loop.vertices.back(), loop.vertices.front());
  }
  return best;
}

std::vector<NodalLoop> trace_all(const WaveField& field,
                                 const TraceConfig& cfg) {
  cfg.validate();
  const std::vector<Vec3> seeds = seed_candidates(field, cfg);
  std::vector<NodalLoop> loops;

  const auto near_existing = [&](const Vec3& p) {
    for (const NodalLoop& loop : loops) {
      if (polyline_distance(loop, p) < cfg.dedup_tol) return true;
    }
    return false;
  };

  for (const Vec3& seed : seeds) {
    if (near_existing(seed)) continue;
    Vec3 node;
    try {
      node = refine_to_node(field, seed, cfg);
    } catch (const RefineError&) {
      continue;
    }
    if (!cfg.bounds.contains(node) || near_existing(node)) continue;
    NodalLoop loop;
    try {
      loop = trace_loop(field, node, cfg);
    } catch (const RefineError&) {
      continue;
    }
    if (loop.vertices.size() < 4) continue;
    // Duplicate when most vertices lie on an already traced loop (loops
    // meeting at a crossing share only the contact region).
    bool duplicate = false;
    for (const NodalLoop& other : loops) {
      int hits = 0;
      for (const Vec3& v : loop.vertices) {
        if (polyline_distance(other, v) < cfg.dedup_tol) ++hits;
      }
      if (2 * hits > static_cast<int>(loop.vertices.size())) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) loops.push_back(std::move(loop));
  }

  // Resolve crossing partners: the nearest other loop at the marker, or
  // self when none is within dedup_tol.
  for (std::size_t i = 0; i < loops.size(); ++i) {
    for (CrossingMarker& marker : loops[i].crossings) {
      marker.partner_loop = static_cast<int>(i);
      const Vec3& at = loops[i].vertices[marker.vertex_index];
      for (std::size_t j = 0; j < loops.size(); ++j) {
        if (j == i) continue;
        if (polyline_distance(loops[j], at) < cfg.dedup_tol) {
          marker.partner_loop = static_cast<int>(j);
          break;
        }
      }
    }
  }
  return loops;
}

std::optional<int> planar_projection_crossings(const NodalLoop& input) {
  NodalLoop loop = input;
  // A closed loop ends within closure_tol of its start; drop the
  // near-duplicate end vertex so the seam is not seen as a crossing.
  if (loop.closed && loop.vertices.size() > 3) {
    const double spacing =
        loop.length() / static_cast<double>(loop.vertices.size());
    while (loop.vertices.size() > 3 &&
           (loop.vertices.front() - loop.vertices.back()).norm() <
               0.5 * spacing) {
      loop.vertices.pop_back();
    }
  }
  if (loop.vertices.size() < 4) return 0;
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& v : loop.vertices) centroid += v;
  centroid /= static_cast<double>(loop.vertices.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Vec3& v : loop.vertices) {
    const Vec3 d = v - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Vec3 normal = eig.eigenvectors().col(0);
  const Vec3 a = eig.eigenvectors().col(2);
  const Vec3 b = eig.eigenvectors().col(1);

  double diameter = 0.0, out_of_plane_sq = 0.0;
  for (const Vec3& v : loop.vertices) {
    const Vec3 d = v - centroid;
    diameter = std::max(diameter, 2.0 * d.norm());
    const double h = d.dot(normal);
    out_of_plane_sq += h * h;
  }
  const double rms =
      std::sqrt(out_of_plane_sq / static_cast<double>(loop.vertices.size()));
  if (diameter <= 0.0 || rms > 0.1 * diameter) return std::nullopt;

  std::vector<Eigen::Vector2d> p2;
  p2.reserve(loop.vertices.size());
  for (const Vec3& v : loop.vertices) {
    const Vec3 d = v - centroid;
    p2.emplace_back(d.dot(a), d.dot(b));
  }
  const int n = static_cast<int>(p2.size());
  const auto seg = [&](int i) {
    return std::pair<Eigen::Vector2d, Eigen::Vector2d>(p2[i], p2[(i + 1) % n]);
  };
  const int segs = loop.closed ? n : n - 1;
  int crossings = 0;
  for (int i = 0; i < segs; ++i) {
    for (int j = i + 2; j < segs; ++j) {
      if (i == 0 && j == segs - 1 && loop.closed) continue;  // shared vertex
      const auto [p, q] = seg(i);
      const auto [r, s] = seg(j);
      const auto orient = [](const Eigen::Vector2d& u, const Eigen::Vector2d& v,
                             const Eigen::Vector2d& w) {
        return (v.x() - u.x()) * (w.y() - u.y()) -
               (v.y() - u.y()) * (w.x() - u.x());
      };
      const double o1 = orient(p, q, r), o2 = orient(p, q, s);
      const double o3 = orient(r, s, p), o4 = orient(r, s, q);
      if (o1 * o2 < 0.0 && o3 * o4 < 0.0) ++crossings;
    }
  }
  return crossings;
}

}  // namespace vortexloop
