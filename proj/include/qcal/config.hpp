#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcal/calderon.hpp"
#include "qcal/phantoms.hpp"
#include "qcal/quasiconformal.hpp"

namespace qcal {

struct MeshConfig {
  double radius = 1.0;
  double target_h = 0.05;
};

struct ElectrodeConfig {
  int count = 16;
  double coverage = 0.5;
  double contact_impedance = 0.01;
};

struct MapConfig {
  QcGridParams grid;
  BeltramiOptions solver;
};

struct ReconConfig {
  std::vector<double> radii{2.0};
  int lattice = 33;
  int grid = 101;
  bool difference = true;
  ZeroMode zero_mode = ZeroMode::Extrapolate;
};

struct RunConfig {
  PhantomSpec phantom = phantom_by_name("A1");
  MeshConfig mesh;
  ElectrodeConfig electrodes;
  double current_amplitude = 1.0;
  MapConfig qcmap;
  ReconConfig recon;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  /// Throws ConfigError naming the first offending key.
  void validate() const;

  /// Provenance hashes (FNV-1a over the canonical JSON of the relevant
  /// sections). The simulation hash covers phantom, mesh, electrodes,
  /// amplitude, noise and seed; the map hash covers A0, the mesh radius and
  /// the map section; the config hash covers everything except output_dir.
  std::string simulation_hash() const;
  std::string map_hash() const;
  std::string config_hash() const;

  std::string to_json() const;
};

/// Parses a JSON document; unknown keys are rejected. Missing keys keep
/// their defaults. The result is validated.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// One line per key with its default, for --help.
std::string config_reference();

std::string fnv1a_hex(const std::string& bytes);

}  // namespace qcal
