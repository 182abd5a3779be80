#include "qcal/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qcal/errors.hpp"

namespace qcal {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError("config: unknown key '" + where + (where.empty() ? "" : ".") + k + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: key '" + where + key + "' has the wrong type");
  }
}

Tensor2 tensor_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() || j[0].size() != 2 ||
      j[1].size() != 2)
    throw ConfigError("config: phantom.a0 must be a 2x2 array");
  Tensor2 t;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      if (!j[r][c].is_number()) throw ConfigError("config: phantom.a0 entries must be numbers");
      t(r, c) = j[r][c].get<double>();
    }
  require_spd(t, "phantom.a0");
  return t;
}

json tensor_json(const Tensor2& t) { return json::array({{t(0, 0), t(0, 1)}, {t(1, 0), t(1, 1)}}); }

json phantom_json(const PhantomSpec& p) {
  return {{"name", p.name}, {"contrast", p.contrast}, {"a0", tensor_json(p.a0)}};
}

json mesh_json(const MeshConfig& m) { return {{"radius", m.radius}, {"target_h", m.target_h}}; }

json electrode_json(const ElectrodeConfig& e) {
  return {{"count", e.count}, {"coverage", e.coverage}, {"contact_impedance", e.contact_impedance}};
}

json map_json(const MapConfig& m) {
  return {{"n", m.grid.n},
          {"s", m.grid.s},
          {"r", m.grid.r},
          {"blend", m.grid.blend},
          {"tol", m.solver.tol},
          {"max_iter", m.solver.max_iter},
          {"initial_guess", m.solver.initial == InitialGuess::Mu ? "mu" : "transform"},
          {"fft_padding", m.solver.fft_padding}};
}

json recon_json(const ReconConfig& r) {
  return {{"radii", r.radii},
          {"lattice", r.lattice},
          {"grid", r.grid},
          {"mode", r.difference ? "difference" : "absolute"},
          {"zero_mode", r.zero_mode == ZeroMode::Extrapolate ? "extrapolate" : "exclude"}};
}

std::string hash_of(const json& j) { return fnv1a_hex(j.dump()); }

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void RunConfig::validate() const {
  if (!(phantom.contrast > 0.0)) throw ConfigError("config: phantom.contrast must be > 0");
  require_spd(phantom.a0, "phantom.a0");
  if (!(mesh.radius > 0.0)) throw ConfigError("config: mesh.radius must be > 0");
  if (!(mesh.target_h > 0.0) || !(mesh.target_h < mesh.radius))
    throw ConfigError("config: mesh.target_h must lie in (0, mesh.radius)");
  if (electrodes.count < 4 || electrodes.count % 2 != 0)
    throw ConfigError("config: electrodes.count must be even and >= 4");
  if (!(electrodes.coverage > 0.0 && electrodes.coverage < 1.0))
    throw ConfigError("config: electrodes.coverage must lie in (0, 1)");
  if (!(electrodes.contact_impedance > 0.0))
    throw ConfigError("config: electrodes.contact_impedance must be > 0");
  if (!(current_amplitude > 0.0) || !std::isfinite(current_amplitude))
    throw ConfigError("config: current_amplitude must be > 0");
  const auto& g = qcmap.grid;
  if (g.n < 16 || g.n % 2 != 0) throw ConfigError("config: qcmap.n must be even and >= 16");
  if (!(g.blend > 0.0) || !(g.blend < g.r)) throw ConfigError("config: qcmap.blend must lie in (0, qcmap.r)");
  if (!(g.s >= 2.0 * g.r)) throw ConfigError("config: qcmap.s must be >= 2 * qcmap.r");
  if (mesh.radius > g.r - g.blend) throw ConfigError("config: the domain must lie inside |x| <= qcmap.r - qcmap.blend");
  if (mesh.radius > 0.5 * g.s) throw ConfigError("config: the map window s/2 must cover the domain");
  if (!(qcmap.solver.tol > 0.0)) throw ConfigError("config: qcmap.tol must be > 0");
  if (qcmap.solver.max_iter < 1) throw ConfigError("config: qcmap.max_iter must be >= 1");
  if (qcmap.solver.fft_padding < 1 || qcmap.solver.fft_padding > 4)
    throw ConfigError("config: qcmap.fft_padding must be 1..4");
  if (recon.radii.empty()) throw ConfigError("config: recon.radii must list at least one radius");
  for (double r : recon.radii)
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("config: recon.radii entries must be > 0");
  if (recon.lattice < 5 || recon.lattice % 2 == 0) throw ConfigError("config: recon.lattice must be odd and >= 5");
  if (recon.grid < 3 || recon.grid % 2 == 0) throw ConfigError("config: recon.grid must be odd and >= 3");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("config: noise must be >= 0");
  if (output_dir.empty()) throw ConfigError("config: output_dir must not be empty");
}

std::string RunConfig::simulation_hash() const {
  return hash_of({{"phantom", phantom_json(phantom)},
                  {"mesh", mesh_json(mesh)},
                  {"electrodes", electrode_json(electrodes)},
                  {"current_amplitude", current_amplitude},
                  {"noise", noise},
                  {"seed", seed}});
}

std::string RunConfig::map_hash() const {
  return hash_of({{"a0", tensor_json(phantom.a0)}, {"radius", mesh.radius}, {"qcmap", map_json(qcmap)}});
}

std::string RunConfig::config_hash() const {
  json j = json::parse(to_json());
  j.erase("output_dir");
  return hash_of(j);
}

std::string RunConfig::to_json() const {
  json j = {{"phantom", phantom_json(phantom)},
            {"mesh", mesh_json(mesh)},
            {"electrodes", electrode_json(electrodes)},
            {"current_amplitude", current_amplitude},
            {"qcmap", map_json(qcmap)},
            {"recon", recon_json(recon)},
            {"noise", noise},
            {"seed", seed},
            {"output_dir", output_dir}};
  return j.dump(2);
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j, "", {"phantom", "mesh", "electrodes", "current_amplitude", "qcmap", "recon", "noise", "seed",
                     "output_dir"});
  RunConfig c;
  if (j.contains("phantom")) {
    const json& p = j["phantom"];
    if (p.is_string()) {
      c.phantom = phantom_by_name(p.get<std::string>());
    } else {
      check_keys(p, "phantom", {"name", "contrast", "a0"});
      if (p.contains("name")) c.phantom = phantom_by_name(p["name"].get<std::string>());
      if (p.contains("contrast") || p.contains("a0")) {
        if (!p.contains("name")) c.phantom.name = "custom";
        read(p, "contrast", c.phantom.contrast, "phantom.");
        if (p.contains("a0")) c.phantom.a0 = tensor_from_json(p["a0"]);
        if (p.contains("name")) c.phantom.name = p["name"].get<std::string>() + "-custom";
      }
    }
  }
  if (j.contains("mesh")) {
    check_keys(j["mesh"], "mesh", {"radius", "target_h"});
    read(j["mesh"], "radius", c.mesh.radius, "mesh.");
    read(j["mesh"], "target_h", c.mesh.target_h, "mesh.");
  }
  if (j.contains("electrodes")) {
    const json& e = j["electrodes"];
    check_keys(e, "electrodes", {"count", "coverage", "contact_impedance"});
    read(e, "count", c.electrodes.count, "electrodes.");
    read(e, "coverage", c.electrodes.coverage, "electrodes.");
    read(e, "contact_impedance", c.electrodes.contact_impedance, "electrodes.");
  }
  read(j, "current_amplitude", c.current_amplitude, "");
  if (j.contains("qcmap")) {
    const json& m = j["qcmap"];
    check_keys(m, "qcmap", {"n", "s", "r", "blend", "tol", "max_iter", "initial_guess", "fft_padding"});
    read(m, "n", c.qcmap.grid.n, "qcmap.");
    read(m, "s", c.qcmap.grid.s, "qcmap.");
    read(m, "r", c.qcmap.grid.r, "qcmap.");
    read(m, "blend", c.qcmap.grid.blend, "qcmap.");
    read(m, "tol", c.qcmap.solver.tol, "qcmap.");
    read(m, "max_iter", c.qcmap.solver.max_iter, "qcmap.");
    read(m, "fft_padding", c.qcmap.solver.fft_padding, "qcmap.");
    if (m.contains("initial_guess")) {
      const std::string g = m["initial_guess"].get<std::string>();
      if (g == "mu") c.qcmap.solver.initial = InitialGuess::Mu;
      else if (g == "transform") c.qcmap.solver.initial = InitialGuess::TransformOfMu;
      else throw ConfigError("config: qcmap.initial_guess must be 'transform' or 'mu'");
    }
  }
  if (j.contains("recon")) {
    const json& r = j["recon"];
    check_keys(r, "recon", {"radii", "lattice", "grid", "mode", "zero_mode"});
    if (r.contains("radii") && r["radii"].is_number()) c.recon.radii = {r["radii"].get<double>()};
    else read(r, "radii", c.recon.radii, "recon.");
    read(r, "lattice", c.recon.lattice, "recon.");
    read(r, "grid", c.recon.grid, "recon.");
    if (r.contains("mode")) {
      const std::string m = r["mode"].get<std::string>();
      if (m != "difference" && m != "absolute") throw ConfigError("config: recon.mode must be 'difference' or 'absolute'");
      c.recon.difference = m == "difference";
    }
    if (r.contains("zero_mode")) {
      const std::string z = r["zero_mode"].get<std::string>();
      if (z == "extrapolate") c.recon.zero_mode = ZeroMode::Extrapolate;
      else if (z == "exclude") c.recon.zero_mode = ZeroMode::Exclude;
      else throw ConfigError("config: recon.zero_mode must be 'extrapolate' or 'exclude'");
    }
  }
  read(j, "noise", c.noise, "");
  read(j, "seed", c.seed, "");
  read(j, "output_dir", c.output_dir, "");
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_reference() {
  return R"(Config keys (JSON; every key optional):
  phantom                     "A1".."A4", or {"name", "contrast", "a0": [[a, b], [b, c]]}   default "A1"
  mesh.radius                 disk radius                                   default 1.0
  mesh.target_h               target edge length                            default 0.05
  electrodes.count            L, even, >= 4                                 default 16
  electrodes.coverage         fraction of the boundary under electrodes     default 0.5
  electrodes.contact_impedance  z for every electrode                       default 0.01
  current_amplitude           trig pattern amplitude                        default 1.0
  qcmap.n                     grid points per axis (even)                   default 512
  qcmap.s                     grid half-width                               default 4.0
  qcmap.r                     support radius of mu                          default 2.0
  qcmap.blend                 width of the C^1 ramp inside r                default 0.5
  qcmap.tol                   sup-norm increment tolerance                  default 1e-10
  qcmap.max_iter              iteration cap                                 default 200
  qcmap.initial_guess         "transform" (T[mu]) or "mu"                   default "transform"
  qcmap.fft_padding           zero-padding factor of the Beurling FFT       default 2
  recon.radii                 truncation radii R (number or list)           default [2.0]
  recon.lattice               frequency lattice points per axis (odd)       default 33
  recon.grid                  output grid points per axis over [-1, 1]      default 101
  recon.mode                  "difference" or "absolute"                    default "difference"
  recon.zero_mode             "extrapolate" or "exclude" for F(0)           default "extrapolate"
  noise                       relative Gaussian noise level                 default 0
  seed                        noise RNG seed                                default 0
  output_dir                  directory for output files                    default "out"
)";
}

}  // namespace qcal
