#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vortexloop/field.hpp"
#include "vortexloop/tracer.hpp"
#include "vortexloop/vortex.hpp"

namespace vortexloop {

/// Seed-driven generator parameters for reproducible random scatterer
/// configurations (uniform positions in a box, one shared strength).
struct RandomScatterers {
  std::uint64_t seed = 0;
  int count = 0;
  Box box;
  double alpha = 0.0;

  bool operator==(const RandomScatterers& other) const;
};

struct ProbeSpec {
  int loop = 0;
  double tube_radius = 0.1;
  int angular_samples = 64;

  bool operator==(const ProbeSpec&) const = default;
};

/// Full run description, loadable from and emittable to canonical JSON.
struct RunConfig {
  IncidentWave wave;
  ScattererSet scatterers;
  std::optional<RandomScatterers> random_scatterers;
  TraceConfig trace;
  std::vector<ProbeSpec> probes;
  std::string output_dir = "out";

  bool operator==(const RunConfig& other) const;
};

/// Parses and fully validates a JSON config document. Unknown keys are
/// rejected; error messages carry the path to the offending field.
RunConfig load_config(const std::string& document);
RunConfig load_config_file(const std::filesystem::path& path);

/// Canonical emission: fixed key order, defaults applied, 17 significant
/// digits so that load_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

/// FNV-1a 64-bit hash of the canonical emission, as fixed-width hex.
std::string config_fingerprint(const RunConfig& config);

/// Explicit scatterers plus the seed-generated ones, validated.
ScattererSet resolve_scatterers(const RunConfig& config);

/// Traced loops with replay metadata.
struct LoopArchive {
  std::vector<NodalLoop> loops;
  std::string fingerprint;
  std::string version;
};

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
};

/// Tube surface around a loop: n-gon cross-section swept along the
/// rotation-minimizing frame; torus for closed loops, capped cylinder for
/// open ones.
TriMesh tube_mesh(const NodalLoop& loop, double radius, int sides = 16);

/// Every edge shared by exactly two triangles.
bool is_watertight(const TriMesh& mesh);
int euler_characteristic(const TriMesh& mesh);

/// Writes loops.csv, loops.obj and tubes.obj into dir.
void export_loops(const LoopArchive& archive, const std::filesystem::path& dir,
                  double tube_radius = 0.1, int tube_sides = 16);

/// Writes archive.json (fingerprint, version, per-loop metadata).
void export_archive(const LoopArchive& archive,
                    const std::filesystem::path& dir);

/// Writes phase.csv and current.csv for the given per-loop tube samples.
void export_tube_fields(
    const std::vector<std::pair<int, std::vector<std::vector<TubeSample>>>>&
        samples_per_loop,
    const std::filesystem::path& dir);

/// Field correctness diagnostics over one solved state: Helmholtz residual,
/// analytic-vs-FD gradient, boundary-condition residual, closed-box flux.
struct Diagnostics {
  double helmholtz_worst = 0.0;
  double gradient_worst = 0.0;
  double boundary_worst = 0.0;
  double flux_worst = 0.0;

  static constexpr double kHelmholtzTol = 1e-4;
  static constexpr double kGradientTol = 1e-6;
  static constexpr double kBoundaryTol = 1e-10;
  static constexpr double kFluxTol = 1e-6;

  bool pass() const {
    return helmholtz_worst < kHelmholtzTol && gradient_worst < kGradientTol &&
           boundary_worst < kBoundaryTol && flux_worst < kFluxTol;
  }
};

Diagnostics run_diagnostics(const FieldState& state, std::uint64_t seed = 0,
                            int points = 100);

/// Deterministic uniform generator used for seeded configurations and
/// diagnostics sampling (fixed bit-to-double mapping, platform independent).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next();
  double uniform(double lo, double hi);
  Vec3 uniform_in(const Box& box);

 private:
  std::uint64_t state_;
};

ScattererSet generate_scatterers(const RandomScatterers& params,
                                 double min_separation = 0.05);

}  // namespace vortexloop
