#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <numbers>
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

struct Context {
  std::string config_path;
  std::string output_dir_override;
};

FieldState solve_from(const RunConfig& config) {
  return FieldState::solve(resolve_scatterers(config), config.wave);
}

std::filesystem::path output_dir(const Context& ctx, const RunConfig& config) {
  return ctx.output_dir_override.empty() ? config.output_dir
                                         : ctx.output_dir_override;
}

int cmd_trace(const Context& ctx) {
  const RunConfig config = load_config_file(ctx.config_path);
  const FieldState state = solve_from(config);
  LoopArchive archive;
  archive.loops = trace_all(state, config.trace);
  archive.fingerprint = config_fingerprint(config);
  archive.version = VORTEXLOOP_VERSION;

  const std::filesystem::path dir = output_dir(ctx, config);
  export_loops(archive, dir);
  export_archive(archive, dir);

  std::vector<std::pair<int, std::vector<std::vector<TubeSample>>>> fields;
  for (const ProbeSpec& probe : config.probes) {
    if (probe.loop >= static_cast<int>(archive.loops.size())) {
      std::cerr << "warning: probe loop " << probe.loop
                << " does not exist (only " << archive.loops.size()
                << " loops traced), skipped\n";
      continue;
    }
    fields.emplace_back(probe.loop,
                        tube_samples(state, archive.loops[probe.loop],
                                     probe.tube_radius, probe.angular_samples));
  }
  if (!fields.empty()) export_tube_fields(fields, dir);

  int closed = 0;
  for (const NodalLoop& loop : archive.loops) closed += loop.closed ? 1 : 0;
  std::cout << "traced " << archive.loops.size() << " loop(s) (" << closed
            << " closed) into " << dir.string() << "\n";
  return 0;
}

int cmd_field(const Context& ctx, const std::vector<double>& at) {
  const RunConfig config = load_config_file(ctx.config_path);
  const FieldState state = solve_from(config);
  const Vec3 x(at[0], at[1], at[2]);
  const FieldSample s = state.sample(x);
  std::printf("psi      = %.12g %+.12gi\n", s.psi.real(), s.psi.imag());
  std::printf("grad psi = (%.12g%+.12gi, %.12g%+.12gi, %.12g%+.12gi)\n",
              s.grad(0).real(), s.grad(0).imag(), s.grad(1).real(),
              s.grad(1).imag(), s.grad(2).real(), s.grad(2).imag());
  std::printf("rho      = %.12g\n", s.rho);
  std::printf("current  = (%.12g, %.12g, %.12g)\n", s.current.x(),
              s.current.y(), s.current.z());
  if (s.velocity) {
    std::printf("velocity = (%.12g, %.12g, %.12g)\n", s.velocity->x(),
                s.velocity->y(), s.velocity->z());
  } else {
    std::printf("velocity = (absent: rho below floor, nodal point)\n");
  }
  return 0;
}

int cmd_single_center(double alpha, double k) {
  const double ks = kappa_threshold();
  const double bound = 1.0 / (4.0 * kPi * ks);
  std::printf("kappa threshold = %.10g (alpha/k bound %.6g)\n", ks, bound);
  const auto g = ring_geometry(alpha, k);
  if (!g) {
    std::printf("no nodal ring (alpha/k = %g > %.6g)\n", alpha / k, bound);
    return 0;
  }
  std::printf("nodal ring:\n");
  std::printf("  distance = %.10g\n", g->distance);
  std::printf("  axial_x  = %.10g\n", g->axial_x);
  std::printf("  radius   = %.10g\n", g->radius);
  std::printf("  gamma    = %.10g\n", g->gamma);
  std::printf("  kappa    = %.10g\n", g->kappa);
  std::printf("  branch   = %d\n", g->branch_n);
  return 0;
}

int cmd_winding(const Context& ctx, int loop_index, int vertex_index,
                double radius, int samples) {
  const RunConfig config = load_config_file(ctx.config_path);
  const FieldState state = solve_from(config);
  const std::vector<NodalLoop> loops = trace_all(state, config.trace);
  if (loop_index < 0 || loop_index >= static_cast<int>(loops.size())) {
    throw ConfigError("loop index out of range (traced " +
                      std::to_string(loops.size()) + " loops)");
  }
  const NodalLoop& loop = loops[loop_index];
  if (vertex_index < 0 ||
      vertex_index >= static_cast<int>(loop.vertices.size())) {
    throw ConfigError("vertex index out of range (loop has " +
                      std::to_string(loop.vertices.size()) + " vertices)");
  }
  const std::vector<LoopFrame> frames = loop_frames(loop);
  const VortexReport report =
      winding_number(state, loop.vertices[vertex_index],
                     frames[vertex_index].tangent, radius, samples);
  std::printf("winding     = %+d\n", report.winding);
  std::printf("circulation = %.10g (%.6g x 2pi)\n", report.circulation,
              report.circulation / (2.0 * kPi));
  for (const auto& [m, mag] : report.c_abs) {
    std::printf("|c_%+d|     = %.6g\n", m, mag);
  }
  if (std::abs(report.winding) >= 2) {
    std::fprintf(stderr, "warning: |winding| >= 2 is non-generic\n");
  }
  return 0;
}

int cmd_check(const Context& ctx, std::uint64_t seed) {
  const RunConfig config = load_config_file(ctx.config_path);
  const FieldState state = solve_from(config);
  const auto t0 = std::chrono::steady_clock::now();
  const Diagnostics diag = run_diagnostics(state, seed);
  const auto dt = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  const auto line = [](const char* name, double worst, double tol) {
    std::printf("%-22s %-4s (worst %.3e, tolerance %.0e)\n", name,
                worst < tol ? "PASS" : "FAIL", worst, tol);
    return worst < tol;
  };
  bool ok = true;
  ok &= line("helmholtz residual", diag.helmholtz_worst,
             Diagnostics::kHelmholtzTol);
  ok &= line("gradient consistency", diag.gradient_worst,
             Diagnostics::kGradientTol);
  ok &= line("boundary condition", diag.boundary_worst,
             Diagnostics::kBoundaryTol);
  ok &= line("box flux", diag.flux_worst, Diagnostics::kFluxTol);
  std::printf("(%d scatterers, %.2fs)\n", state.scatterers().size(), dt);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point-scatterer Helmholtz fields: nodal loops and "
               "probability-current vortices"};
  app.require_subcommand(1);
  Context ctx;

  auto* trace = app.add_subcommand("trace", "Trace nodal loops and export them");
  trace->add_option("config", ctx.config_path, "JSON run config")->required();
  trace->add_option("--output-dir", ctx.output_dir_override,
                    "Override the config's output directory");

  auto* field = app.add_subcommand("field", "Evaluate psi and the current");
  field->add_option("config", ctx.config_path, "JSON run config")->required();
  std::vector<double> at;
  field->add_option("--at", at, "Evaluation point x,y,z")
      ->required()
      ->delimiter(',')
      ->expected(3);

  auto* sc = app.add_subcommand("single-center",
                                "Closed-form single-scatterer nodal ring");
  double alpha = 0.0, k = 2.0;
  sc->add_option("--alpha", alpha, "Interaction strength")->required();
  sc->add_option("--k", k, "Wavenumber")->required();

  auto* winding = app.add_subcommand("winding",
                                     "Winding number at a traced loop vertex");
  winding->add_option("config", ctx.config_path, "JSON run config")->required();
  int loop_index = 0, vertex_index = 0, samples = 720;
  double radius = 0.01;
  winding->add_option("--loop", loop_index, "Loop index")->required();
  winding->add_option("--vertex", vertex_index, "Vertex index")->required();
  winding->add_option("--radius", radius, "Probe circle radius")->required();
  winding->add_option("--samples", samples, "Probe samples");

  auto* check = app.add_subcommand("check", "Run the field diagnostics suite");
  check->add_option("config", ctx.config_path, "JSON run config")->required();
  std::uint64_t seed = 0;
  check->add_option("--seed", seed, "Diagnostics sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (trace->parsed()) return cmd_trace(ctx);
    if (field->parsed()) return cmd_field(ctx, at);
    if (sc->parsed()) return cmd_single_center(alpha, k);
    if (winding->parsed()) {
      return cmd_winding(ctx, loop_index, vertex_index, radius, samples);
    }
    if (check->parsed()) return cmd_check(ctx, seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
