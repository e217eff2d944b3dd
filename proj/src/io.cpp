#include "vortexloop/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <utility>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace vortexloop {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_vec3(const Vec3& v) {
  return "[" + fmt_double(v.x()) + ", " + fmt_double(v.y()) + ", " +
         fmt_double(v.z()) + "]";
}

std::string fmt_box(const Box& b) {
  return "[" + fmt_vec3(b.lo) + ", " + fmt_vec3(b.hi) + "]";
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) fail(path + "." + key, "unknown key");
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::int64_t get_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

Vec3 get_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) {
    fail(path, "expected an array of 3 numbers");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = get_number(j[i], path);
  return v;
}

Box get_box(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) {
    fail(path, "expected [[lo_x,lo_y,lo_z],[hi_x,hi_y,hi_z]]");
  }
  Box b{get_vec3(j[0], path + "[0]"), get_vec3(j[1], path + "[1]")};
  try {
    b.validate();
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
  return b;
}

}  // namespace

bool RandomScatterers::operator==(const RandomScatterers& other) const {
  return seed == other.seed && count == other.count && box == other.box &&
         alpha == other.alpha;
}

bool RunConfig::operator==(const RunConfig& other) const {
  if (wave.k != other.wave.k ||
      !wave.direction.cwiseEqual(other.wave.direction).all()) {
    return false;
  }
  if (scatterers.strengths != other.scatterers.strengths) return false;
  if (scatterers.positions.size() != other.scatterers.positions.size()) {
    return false;
  }
  for (std::size_t i = 0; i < scatterers.positions.size(); ++i) {
    if (!scatterers.positions[i]
             .cwiseEqual(other.scatterers.positions[i])
             .all()) {
      return false;
    }
  }
  return random_scatterers == other.random_scatterers &&
         trace == other.trace && probes == other.probes &&
         output_dir == other.output_dir;
}

RunConfig load_config(const std::string& document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: expected a JSON object");

  reject_unknown_keys(root, "config",
                      {"k", "direction", "scatterers", "random_scatterers",
                       "trace", "probes", "output_dir"});

  RunConfig cfg;
  if (!root.contains("k")) fail("config.k", "required");
  cfg.wave.k = get_number(root["k"], "config.k");
  if (root.contains("direction")) {
    cfg.wave.direction = get_vec3(root["direction"], "config.direction");
  }
  try {
    cfg.wave.validate();
  } catch (const ConfigError& e) {
    fail("config.k/direction", e.what());
  }

  if (root.contains("scatterers")) {
    const json& arr = root["scatterers"];
    if (!arr.is_array()) fail("config.scatterers", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "config.scatterers[" + std::to_string(i) + "]";
      const json& entry = arr[i];
      if (!entry.is_object()) fail(path, "expected an object");
      reject_unknown_keys(entry, path, {"pos", "alpha"});
      if (!entry.contains("pos")) fail(path + ".pos", "required");
      if (!entry.contains("alpha")) fail(path + ".alpha", "required");
      cfg.scatterers.positions.push_back(get_vec3(entry["pos"], path + ".pos"));
      cfg.scatterers.strengths.push_back(
          get_number(entry["alpha"], path + ".alpha"));
    }
  }
  try {
    cfg.scatterers.validate();
  } catch (const ConfigError& e) {
    fail("config.scatterers", e.what());
  }

  if (root.contains("random_scatterers")) {
    const std::string path = "config.random_scatterers";
    const json& obj = root["random_scatterers"];
    if (!obj.is_object()) fail(path, "expected an object");
    reject_unknown_keys(obj, path, {"seed", "count", "box", "alpha"});
    RandomScatterers rs;
    if (!obj.contains("seed")) fail(path + ".seed", "required");
    rs.seed = static_cast<std::uint64_t>(get_integer(obj["seed"], path + ".seed"));
    if (!obj.contains("count")) fail(path + ".count", "required");
    rs.count = static_cast<int>(get_integer(obj["count"], path + ".count"));
    if (rs.count < 0) fail(path + ".count", "must be >= 0");
    rs.box = Box{Vec3(-1, -1, -1), Vec3(1, 1, 1)};
    if (obj.contains("box")) rs.box = get_box(obj["box"], path + ".box");
    if (!obj.contains("alpha")) fail(path + ".alpha", "required");
    rs.alpha = get_number(obj["alpha"], path + ".alpha");
    if (!std::isfinite(rs.alpha)) fail(path + ".alpha", "must be finite");
    cfg.random_scatterers = rs;
  }

  if (root.contains("trace")) {
    const std::string path = "config.trace";
    const json& obj = root["trace"];
    if (!obj.is_object()) fail(path, "expected an object");
    reject_unknown_keys(obj, path,
                        {"bounds", "seed_resolution", "newton_tol", "step",
                         "max_vertices", "closure_tol", "crossing_tol",
                         "dedup_tol"});
    TraceConfig& t = cfg.trace;
    if (obj.contains("bounds")) t.bounds = get_box(obj["bounds"], path + ".bounds");
    if (obj.contains("seed_resolution")) {
      t.seed_resolution = static_cast<int>(
          get_integer(obj["seed_resolution"], path + ".seed_resolution"));
    }
    if (obj.contains("newton_tol")) {
      t.newton_tol = get_number(obj["newton_tol"], path + ".newton_tol");
    }
    if (obj.contains("step")) {
      t.step = get_number(obj["step"], path + ".step");
      // Dependent defaults follow a user-supplied step.
      t.closure_tol = t.step / 10.0;
      t.dedup_tol = t.step / 2.0;
    }
    if (obj.contains("max_vertices")) {
      t.max_vertices = static_cast<int>(
          get_integer(obj["max_vertices"], path + ".max_vertices"));
    }
    if (obj.contains("closure_tol")) {
      t.closure_tol = get_number(obj["closure_tol"], path + ".closure_tol");
    }
    if (obj.contains("crossing_tol")) {
      t.crossing_tol = get_number(obj["crossing_tol"], path + ".crossing_tol");
    }
    if (obj.contains("dedup_tol")) {
      t.dedup_tol = get_number(obj["dedup_tol"], path + ".dedup_tol");
    }
    try {
      t.validate();
    } catch (const ConfigError& e) {
      fail(path, e.what());
    }
  }

  if (root.contains("probes")) {
    const json& arr = root["probes"];
    if (!arr.is_array()) fail("config.probes", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "config.probes[" + std::to_string(i) + "]";
      const json& entry = arr[i];
      if (!entry.is_object()) fail(path, "expected an object");
      reject_unknown_keys(entry, path, {"loop", "tube_radius", "angular_samples"});
      ProbeSpec p;
      if (entry.contains("loop")) {
        p.loop = static_cast<int>(get_integer(entry["loop"], path + ".loop"));
      }
      if (entry.contains("tube_radius")) {
        p.tube_radius = get_number(entry["tube_radius"], path + ".tube_radius");
      }
      if (entry.contains("angular_samples")) {
        p.angular_samples = static_cast<int>(
            get_integer(entry["angular_samples"], path + ".angular_samples"));
      }
      if (p.loop < 0) fail(path + ".loop", "must be >= 0");
      if (!(p.tube_radius > 0.0)) fail(path + ".tube_radius", "must be > 0");
      if (p.angular_samples < 3) fail(path + ".angular_samples", "must be >= 3");
      cfg.probes.push_back(p);
    }
  }

  if (root.contains("output_dir")) {
    if (!root["output_dir"].is_string()) {
      fail("config.output_dir", "expected a string");
    }
    cfg.output_dir = root["output_dir"].get<std::string>();
  }
  return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config(buf.str());
}

std::string emit_config(const RunConfig& config) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"k\": " << fmt_double(config.wave.k) << ",\n";
  os << "  \"direction\": " << fmt_vec3(config.wave.direction) << ",\n";
  os << "  \"scatterers\": [";
  for (int j = 0; j < config.scatterers.size(); ++j) {
    if (j) os << ",";
    os << "\n    {\"pos\": " << fmt_vec3(config.scatterers.positions[j])
       << ", \"alpha\": " << fmt_double(config.scatterers.strengths[j]) << "}";
  }
  os << (config.scatterers.size() ? "\n  ],\n" : "],\n");
  if (config.random_scatterers) {
    const RandomScatterers& rs = *config.random_scatterers;
    os << "  \"random_scatterers\": {\"seed\": " << rs.seed
       << ", \"count\": " << rs.count << ", \"box\": " << fmt_box(rs.box)
       << ", \"alpha\": " << fmt_double(rs.alpha) << "},\n";
  }
  const TraceConfig& t = config.trace;
  os << "  \"trace\": {\n"
     << "    \"bounds\": " << fmt_box(t.bounds) << ",\n"
     << "    \"seed_resolution\": " << t.seed_resolution << ",\n"
     << "    \"newton_tol\": " << fmt_double(t.newton_tol) << ",\n"
     << "    \"step\": " << fmt_double(t.step) << ",\n"
     << "    \"max_vertices\": " << t.max_vertices << ",\n"
     << "    \"closure_tol\": " << fmt_double(t.closure_tol) << ",\n"
     << "    \"crossing_tol\": " << fmt_double(t.crossing_tol) << ",\n"
     << "    \"dedup_tol\": " << fmt_double(t.dedup_tol) << "\n"
     << "  },\n";
  os << "  \"probes\": [";
  for (std::size_t i = 0; i < config.probes.size(); ++i) {
    if (i) os << ",";
    const ProbeSpec& p = config.probes[i];
    os << "\n    {\"loop\": " << p.loop
       << ", \"tube_radius\": " << fmt_double(p.tube_radius)
       << ", \"angular_samples\": " << p.angular_samples << "}";
  }
  os << (config.probes.empty() ? "],\n" : "\n  ],\n");
  os << "  \"output_dir\": " << json(config.output_dir).dump() << "\n";
  os << "}\n";
  return os.str();
}

std::string config_fingerprint(const RunConfig& config) {
  const std::string text = emit_config(config);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

std::uint64_t Rng::next() {
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform(double lo, double hi) {
  const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

Vec3 Rng::uniform_in(const Box& box) {
  return Vec3(uniform(box.lo.x(), box.hi.x()), uniform(box.lo.y(), box.hi.y()),
              uniform(box.lo.z(), box.hi.z()));
}

ScattererSet generate_scatterers(const RandomScatterers& params,
                                 double min_separation) {
  Rng rng(params.seed);
  ScattererSet set;
  int attempts = 0;
  while (set.size() < params.count) {
    if (++attempts > 1000 * (params.count + 1)) {
      throw ConfigError("could not place random scatterers with the required separation");
    }
    const Vec3 p = rng.uniform_in(params.box);
    bool ok = true;
    for (const Vec3& q : set.positions) {
      if ((p - q).norm() < min_separation) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    set.positions.push_back(p);
    set.strengths.push_back(params.alpha);
  }
  return set;
}

ScattererSet resolve_scatterers(const RunConfig& config) {
  ScattererSet set = config.scatterers;
  if (config.random_scatterers) {
    const ScattererSet generated = generate_scatterers(*config.random_scatterers);
    set.positions.insert(set.positions.end(), generated.positions.begin(),
                         generated.positions.end());
    set.strengths.insert(set.strengths.end(), generated.strengths.begin(),
                         generated.strengths.end());
  }
  set.validate();
  return set;
}

TriMesh tube_mesh(const NodalLoop& loop, double radius, int sides) {
  if (!(radius > 0.0)) throw GeometryError("tube radius must be positive");
  if (sides < 3) throw GeometryError("tube cross-section needs >= 3 sides");
  const int n = static_cast<int>(loop.vertices.size());
  if (n < 2) throw GeometryError("loop too short for a tube mesh");

  const std::vector<LoopFrame> frames = loop_frames(loop);
  TriMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(n) * sides + 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < sides; ++j) {
      const double a = 2.0 * std::numbers::pi * j / sides;
      mesh.vertices.push_back(loop.vertices[i] +
                              radius * (std::cos(a) * frames[i].normal +
                                        std::sin(a) * frames[i].binormal));
    }
  }
  const auto ring_vertex = [&](int ring, int j) {
    return ring * sides + ((j % sides) + sides) % sides;
  };
  const auto quad = [&](int a, int b, int c, int d) {
    mesh.triangles.push_back({a, b, c});
    mesh.triangles.push_back({a, c, d});
  };
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = 0; j < sides; ++j) {
      quad(ring_vertex(i, j), ring_vertex(i, j + 1), ring_vertex(i + 1, j + 1),
           ring_vertex(i + 1, j));
    }
  }
  if (loop.closed) {
    // Close the seam with the angular shift that undoes the frame
    // transport mismatch accumulated around the loop.
    Vec3 transported =
        frames[n - 1].normal -
        frames[0].tangent * frames[0].tangent.dot(frames[n - 1].normal);
    int shift = 0;
    if (transported.norm() > 1e-12) {
      transported.normalize();
      const double theta = std::atan2(transported.dot(frames[0].binormal),
                                      transported.dot(frames[0].normal));
      shift = static_cast<int>(
          std::lround(theta * sides / (2.0 * std::numbers::pi)));
    }
    for (int j = 0; j < sides; ++j) {
      quad(ring_vertex(n - 1, j), ring_vertex(n - 1, j + 1),
           ring_vertex(0, j + 1 + shift), ring_vertex(0, j + shift));
    }
  } else {
    const int cap0 = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(loop.vertices.front());
    const int cap1 = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(loop.vertices.back());
    for (int j = 0; j < sides; ++j) {
      mesh.triangles.push_back({cap0, ring_vertex(0, j + 1), ring_vertex(0, j)});
      mesh.triangles.push_back(
          {cap1, ring_vertex(n - 1, j), ring_vertex(n - 1, j + 1)});
    }
  }
  return mesh;
}

namespace {

std::map<std::pair<int, int>, int> edge_counts(const TriMesh& mesh) {
  std::map<std::pair<int, int>, int> counts;
  for (const auto& tri : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      int a = tri[e], b = tri[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++counts[{a, b}];
    }
  }
  return counts;
}

}  // namespace

bool is_watertight(const TriMesh& mesh) {
  if (mesh.triangles.empty()) return false;
  for (const auto& [edge, count] : edge_counts(mesh)) {
    if (count != 2) return false;
  }
  return true;
}

int euler_characteristic(const TriMesh& mesh) {
  const auto edges = edge_counts(mesh);
  return static_cast<int>(mesh.vertices.size()) -
         static_cast<int>(edges.size()) +
         static_cast<int>(mesh.triangles.size());
}

namespace {

std::ofstream open_output(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot open " + file.string() + " for writing");
  return out;
}

}  // namespace

void export_loops(const LoopArchive& archive, const std::filesystem::path& dir,
                  double tube_radius, int tube_sides) {
  std::filesystem::create_directories(dir);

  {
    std::ofstream csv = open_output(dir / "loops.csv");
    csv << "loop_id,vertex_index,x,y,z,closed,crossing_flag\n";
    for (std::size_t i = 0; i < archive.loops.size(); ++i) {
      const NodalLoop& loop = archive.loops[i];
      std::set<int> marked;
      for (const CrossingMarker& m : loop.crossings) marked.insert(m.vertex_index);
      for (std::size_t v = 0; v < loop.vertices.size(); ++v) {
        const Vec3& p = loop.vertices[v];
        csv << i << ',' << v << ',' << fmt_double(p.x()) << ','
            << fmt_double(p.y()) << ',' << fmt_double(p.z()) << ','
            << (loop.closed ? 1 : 0) << ','
            << (marked.count(static_cast<int>(v)) ? 1 : 0) << '\n';
      }
    }
    if (!csv) throw IoError("write failure on " + (dir / "loops.csv").string());
  }

  {
    std::ofstream obj = open_output(dir / "loops.obj");
    int base = 1;
    for (std::size_t i = 0; i < archive.loops.size(); ++i) {
      const NodalLoop& loop = archive.loops[i];
      obj << "o loop_" << i << '\n';
      for (const Vec3& p : loop.vertices) {
        obj << "v " << fmt_double(p.x()) << ' ' << fmt_double(p.y()) << ' '
            << fmt_double(p.z()) << '\n';
      }
      obj << 'l';
      for (std::size_t v = 0; v < loop.vertices.size(); ++v) {
        obj << ' ' << base + static_cast<int>(v);
      }
      if (loop.closed) obj << ' ' << base;
      obj << '\n';
      base += static_cast<int>(loop.vertices.size());
    }
    if (!obj) throw IoError("write failure on " + (dir / "loops.obj").string());
  }

  {
    std::ofstream obj = open_output(dir / "tubes.obj");
    int base = 1;
    for (std::size_t i = 0; i < archive.loops.size(); ++i) {
      const TriMesh mesh = tube_mesh(archive.loops[i], tube_radius, tube_sides);
      obj << "o tube_" << i << '\n';
      for (const Vec3& p : mesh.vertices) {
        obj << "v " << fmt_double(p.x()) << ' ' << fmt_double(p.y()) << ' '
            << fmt_double(p.z()) << '\n';
      }
      for (const auto& tri : mesh.triangles) {
        obj << "f " << base + tri[0] << ' ' << base + tri[1] << ' '
            << base + tri[2] << '\n';
      }
      base += static_cast<int>(mesh.vertices.size());
    }
    if (!obj) throw IoError("write failure on " + (dir / "tubes.obj").string());
  }
}

void export_archive(const LoopArchive& archive,
                    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out = open_output(dir / "archive.json");
  out << "{\n"
      << "  \"version\": " << json(archive.version).dump() << ",\n"
      << "  \"config_fingerprint\": " << json(archive.fingerprint).dump()
      << ",\n"
      << "  \"loops\": [";
  for (std::size_t i = 0; i < archive.loops.size(); ++i) {
    const NodalLoop& loop = archive.loops[i];
    if (i) out << ",";
    out << "\n    {\"closed\": " << (loop.closed ? "true" : "false")
        << ", \"vertex_count\": " << loop.vertices.size()
        << ", \"length\": " << fmt_double(loop.length())
        << ", \"crossings\": " << loop.crossings.size() << "}";
  }
  out << (archive.loops.empty() ? "]\n" : "\n  ]\n") << "}\n";
  if (!out) throw IoError("write failure on " + (dir / "archive.json").string());
}

void export_tube_fields(
    const std::vector<std::pair<int, std::vector<std::vector<TubeSample>>>>&
        samples_per_loop,
    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream phase = open_output(dir / "phase.csv");
  std::ofstream current = open_output(dir / "current.csv");
  phase << "loop_id,vertex_index,angle_index,x,y,z,phase\n";
  current << "loop_id,vertex_index,angle_index,x,y,z,vx,vy,vz\n";
  for (const auto& [loop_id, rings] : samples_per_loop) {
    for (std::size_t v = 0; v < rings.size(); ++v) {
      for (std::size_t a = 0; a < rings[v].size(); ++a) {
        const TubeSample& s = rings[v][a];
        phase << loop_id << ',' << v << ',' << a << ','
              << fmt_double(s.position.x()) << ',' << fmt_double(s.position.y())
              << ',' << fmt_double(s.position.z()) << ','
              << fmt_double(s.phase) << '\n';
        current << loop_id << ',' << v << ',' << a << ','
                << fmt_double(s.position.x()) << ','
                << fmt_double(s.position.y()) << ','
                << fmt_double(s.position.z()) << ','
                << fmt_double(s.velocity.x()) << ','
                << fmt_double(s.velocity.y()) << ','
                << fmt_double(s.velocity.z()) << '\n';
      }
    }
  }
  if (!phase || !current) {
    throw IoError("write failure in " + dir.string());
  }
}

namespace {

// Gauss-Legendre 8-point rule on [-1, 1].
constexpr double kGaussNodes[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr double kGaussWeights[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

double min_scatterer_distance(const FieldState& state, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& y : state.scatterers().positions) {
    best = std::min(best, (p - y).norm());
  }
  return best;
}

}  // namespace

Diagnostics run_diagnostics(const FieldState& state, std::uint64_t seed,
                            int points) {
  Diagnostics diag;
  Rng rng(seed ^ 0xd1a6005715ull);

  Box sample_box{Vec3(-2, -2, -2), Vec3(2, 2, 2)};
  if (state.scatterers().size() > 0) {
    Vec3 lo = state.scatterers().positions.front();
    Vec3 hi = lo;
    for (const Vec3& y : state.scatterers().positions) {
      lo = lo.cwiseMin(y);
      hi = hi.cwiseMax(y);
    }
    sample_box = Box{lo - Vec3::Constant(1.5), hi + Vec3::Constant(1.5)};
  }

  const double k = state.wave().k;

  // Helmholtz residual (fourth-order cross stencil) and analytic-vs-FD
  // gradient at generic points: away from scatterers and off the nodal
  // set, where the relative normalization is meaningful.
  int accepted = 0;
  int guard = 0;
  while (accepted < points && ++guard < 100000) {
    const Vec3 x = rng.uniform_in(sample_box);
    if (min_scatterer_distance(state, x) < 0.1) continue;
    const Complex center = state.psi(x);
    if (std::abs(center) < 0.1) continue;
    ++accepted;

    const double h = 1e-3;
    Complex lap(0.0, 0.0);
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 e = Vec3::Zero();
      e[axis] = h;
      lap += (-state.psi(x + 2.0 * e) + 16.0 * state.psi(x + e) -
              30.0 * center + 16.0 * state.psi(x - e) - state.psi(x - 2.0 * e)) /
             (12.0 * h * h);
    }
    const double helm =
        std::abs(lap + k * k * center) / (k * k * std::abs(center) + 1e-12);
    diag.helmholtz_worst = std::max(diag.helmholtz_worst, helm);

    const CVec3 analytic = state.grad_psi(x);
    const double scale = std::max(std::sqrt(analytic.squaredNorm()), 1e-12);
    const double hg = 1e-5;
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 e = Vec3::Zero();
      e[axis] = hg;
      const Complex fd = (state.psi(x + e) - state.psi(x - e)) / (2.0 * hg);
      diag.gradient_worst =
          std::max(diag.gradient_worst, std::abs(analytic[axis] - fd) / scale);
    }
  }

  for (int j = 0; j < state.scatterers().size(); ++j) {
    const auto [a, b] = state.local_expansion_coeffs(j);
    diag.boundary_worst = std::max(
        diag.boundary_worst,
        std::abs(b + state.scatterers().strengths[j] * a));
  }

  // Probability conservation: flux of j through small closed boxes that
  // contain no scatterer.
  const double edge = 0.05;
  int boxes = 0;
  guard = 0;
  while (boxes < 20 && ++guard < 100000) {
    const Vec3 c = rng.uniform_in(sample_box);
    if (min_scatterer_distance(state, c) < 0.2) continue;
    ++boxes;
    double flux = 0.0;
    double max_j = 0.0;
    const double half = 0.5 * edge;
    for (int axis = 0; axis < 3; ++axis) {
      const int u = (axis + 1) % 3, v = (axis + 2) % 3;
      for (int side = -1; side <= 1; side += 2) {
        for (int gu = 0; gu < 8; ++gu) {
          for (int gv = 0; gv < 8; ++gv) {
            Vec3 p = c;
            p[axis] += side * half;
            p[u] += half * kGaussNodes[gu];
            p[v] += half * kGaussNodes[gv];
            const FieldSample s = state.sample(p);
            max_j = std::max(max_j, s.current.norm());
            flux += side * s.current[axis] * kGaussWeights[gu] *
                    kGaussWeights[gv] * half * half;
          }
        }
      }
    }
    const double area = 6.0 * edge * edge;
    diag.flux_worst =
        std::max(diag.flux_worst, std::abs(flux) / (area * max_j + 1e-300));
  }

  return diag;
}

}  // namespace vortexloop
