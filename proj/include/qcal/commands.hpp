#pragma once

#include <string>
#include <vector>

#include "qcal/calderon.hpp"
#include "qcal/cem.hpp"
#include "qcal/config.hpp"
#include "qcal/geometry.hpp"

namespace qcal {

/// Mesh and electrodes exactly as the simulate command builds them.
struct Setup {
  ElectrodeLayout layout;
  Mesh mesh;
};
Setup make_setup(const RunConfig& config);

/// Noise-free data of a = 1 times A0 on the config's mesh; the reference
/// for difference reconstructions.
DnMatrix background_dn(const RunConfig& config, const Setup& setup);

struct Metrics {
  double l2_rel = 0.0;   // ||a - target|| / ||target|| over the disk mask
  double center = 0.0;   // a(0)
  double bg_mean = 0.0;  // mean of a over 0.6 <= |x| <= 0.9
  double slope = 0.0;    // max |da/dx| on the x-axis for 0.3 <= |x| <= 0.7
};
Metrics evaluate_metrics(const ReconstructedField& field, const ScalarField& target);
std::string metrics_to_json(const Metrics& m, const std::string& config_hash);

/// File stem used for per-radius outputs, e.g. "R2.00".
std::string radius_tag(double truncation);

// Each command writes into config.output_dir (created if missing) and
// returns the paths it wrote, in order.
std::vector<std::string> cmd_simulate(const RunConfig& config);
std::vector<std::string> cmd_map(const RunConfig& config);
std::vector<std::string> cmd_reconstruct(const RunConfig& config, const std::string& dn_path,
                                         const std::string& map_bin, const std::string& map_json);
std::vector<std::string> cmd_evaluate(const RunConfig& config, const std::string& recon_bin,
                                      const std::string& recon_json);

}  // namespace qcal
