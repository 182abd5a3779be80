#include "qcal/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>

#include <Eigen/LU>
#include <json.hpp>

#include "qcal/errors.hpp"
#include "qcal/phantoms.hpp"
#include "qcal/quasiconformal.hpp"
#include "qcal/serialization.hpp"

namespace qcal {
namespace {

namespace fs = std::filesystem;

std::string out_path(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.output_dir);
  return (fs::path(c.output_dir) / name).string();
}

Provenance provenance(const RunConfig& c) { return {c.config_hash(), c.simulation_hash(), c.map_hash()}; }

std::string fmt17(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Setup make_setup(const RunConfig& c) {
  Setup s;
  s.layout = place_electrodes(c.electrodes.count, c.electrodes.coverage, c.electrodes.contact_impedance,
                              c.mesh.radius);
  s.mesh = build_disk_mesh(c.mesh.radius, c.mesh.target_h, s.layout);
  return s;
}

DnMatrix background_dn(const RunConfig& c, const Setup& s) {
  const auto patterns = trig_current_patterns(s.layout.center_angles(), c.current_amplitude);
  return dn_matrix(simulate_voltages(s.mesh, c.phantom.background_field(), s.layout, patterns));
}

std::string radius_tag(double truncation) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "R%.2f", truncation);
  return buf;
}

Metrics evaluate_metrics(const ReconstructedField& f, const ScalarField& target) {
  if (f.size < 3 || static_cast<int>(f.x.size()) != f.size || f.a.size() != static_cast<size_t>(f.size) * f.size)
    throw ConfigError("evaluate: reconstruction grid is inconsistent");
  if (f.size % 2 == 0) throw ConfigError("evaluate: reconstruction grid must have a center node");
  Metrics m;
  double err2 = 0.0, ref2 = 0.0, bg_sum = 0.0;
  int bg_count = 0;
  for (int iy = 0; iy < f.size; ++iy)
    for (int ix = 0; ix < f.size; ++ix) {
      const double a = f.at(iy, ix);
      if (std::isnan(a)) continue;
      const Point2 x(f.x[ix], f.x[iy]);
      const double t = target(x);
      err2 += (a - t) * (a - t);
      ref2 += t * t;
      const double rho = x.norm();
      if (rho >= 0.6 && rho <= 0.9) bg_sum += a, ++bg_count;
    }
  if (ref2 == 0.0 || bg_count == 0) throw ConfigError("evaluate: reconstruction grid has no interior samples");
  m.l2_rel = std::sqrt(err2 / ref2);
  m.bg_mean = bg_sum / bg_count;
  m.center = f.at(f.size / 2, f.size / 2);
  const auto cs = f.cross_section();
  for (size_t i = 1; i + 1 < cs.size(); ++i) {
    const double x = std::abs(cs[i].first);
    if (x < 0.3 || x > 0.7) continue;
    const double d = (cs[i + 1].second - cs[i - 1].second) / (cs[i + 1].first - cs[i - 1].first);
    if (std::isfinite(d)) m.slope = std::max(m.slope, std::abs(d));
  }
  return m;
}

std::string metrics_to_json(const Metrics& m, const std::string& config_hash) {
  nlohmann::json j = {{"l2_rel", m.l2_rel},
                      {"center", m.center},
                      {"bg_mean", m.bg_mean},
                      {"slope", m.slope},
                      {"provenance", {{"config_hash", config_hash}}}};
  return j.dump(1) + "\n";
}

std::vector<std::string> cmd_simulate(const RunConfig& c) {
  c.validate();
  const Setup s = make_setup(c);
  const auto patterns = trig_current_patterns(s.layout.center_angles(), c.current_amplitude);
  const VoltageData data = simulate_voltages(s.mesh, c.phantom.field(), s.layout, patterns, {c.noise, c.seed});
  const DnMatrix dn = dn_matrix(data);
  const Provenance prov = provenance(c);

  const std::string mesh_path = out_path(c, "mesh.txt");
  {
    std::ostringstream os;
    write_mesh(os, s.mesh);
    write_text_file(mesh_path, os.str());
  }
  const std::string vpath = out_path(c, "voltages.json");
  const std::string dpath = out_path(c, "dn.json");
  write_text_file(vpath, voltage_data_to_json(data, prov));
  write_text_file(dpath, dn_matrix_to_json(dn, prov));
  return {mesh_path, vpath, dpath};
}

std::vector<std::string> cmd_map(const RunConfig& c) {
  c.validate();
  const MuGrid mu = extend_mu(c.phantom.a0, c.qcmap.grid, c.mesh.radius);
  const QcMap map = solve_beltrami(mu, c.qcmap.solver);
  const Provenance prov = provenance(c);
  const std::string bin = out_path(c, "qcmap.bin");
  const std::string side = out_path(c, "qcmap.json");
  write_qcmap(map, bin, side, prov);

  constexpr int samples = 720;
  std::vector<Point2> pts(samples);
  for (int k = 0; k < samples; ++k) {
    const double t = 2.0 * std::numbers::pi * k / samples;
    pts[k] = c.mesh.radius * Point2(std::cos(t), std::sin(t));
  }
  const auto img = evaluate_map(map, pts);
  std::ostringstream os;
  os << "theta,x,y\n";
  for (int k = 0; k < samples; ++k)
    os << fmt17(2.0 * std::numbers::pi * k / samples) << ',' << fmt17(img[k].x()) << ',' << fmt17(img[k].y()) << '\n';
  const std::string csv = out_path(c, "boundary_image.csv");
  write_text_file(csv, os.str());
  return {bin, side, csv};
}

std::vector<std::string> cmd_reconstruct(const RunConfig& c, const std::string& dn_path,
                                         const std::string& map_bin, const std::string& map_json) {
  c.validate();
  Provenance dn_prov, map_prov;
  const DnMatrix dn = dn_matrix_from_json(read_text_file(dn_path), &dn_prov);
  if (dn_prov.simulation_hash != c.simulation_hash())
    throw ConfigError("reconstruct: DN file was simulated with a different configuration (simulation hash " +
                      dn_prov.simulation_hash + ", expected " + c.simulation_hash() + ")");
  const QcMap map = read_qcmap(map_bin, map_json, &map_prov);
  if (map_prov.map_hash != c.map_hash())
    throw ConfigError("reconstruct: QC map was computed for a different configuration (map hash " +
                      map_prov.map_hash + ", expected " + c.map_hash() + ")");

  DnMatrix reference;
  if (c.recon.difference) reference = background_dn(c, make_setup(c));

  const Provenance prov = provenance(c);
  const Tensor2& a0 = c.phantom.a0;
  const ScalarField target = c.phantom.scalar();
  std::vector<std::string> written;
  for (double radius : c.recon.radii) {
    FhatOptions opt;
    opt.truncation = radius;
    opt.lattice = c.recon.lattice;
    opt.det_a0 = a0.determinant();
    opt.reference = c.recon.difference ? &reference : nullptr;
    opt.zero_mode = c.recon.zero_mode;
    const FhatGrid fhat = fhat_grid(dn, map, opt);
    const ReconstructedField field = reconstruct_field(fhat, map, a0, c.recon.grid);
    const std::string tag = radius_tag(radius);

    const std::string fbin = out_path(c, "fhat_" + tag + ".bin"), fjson = out_path(c, "fhat_" + tag + ".json");
    write_fhat(fhat, fbin, fjson, prov);
    const std::string rbin = out_path(c, "recon_" + tag + ".bin"), rjson = out_path(c, "recon_" + tag + ".json");
    write_reconstruction(field, radius, rbin, rjson, prov);
    const std::string cs = out_path(c, "cross_section_" + tag + ".csv");
    write_cross_section(field, target, cs);

    std::ostringstream os;
    os << "x,y,a11,a12,a22\n";
    for (int iy = 0; iy < field.size; ++iy)
      for (int ix = 0; ix < field.size; ++ix) {
        const double a = field.at(iy, ix);
        if (std::isnan(a)) continue;
        const Tensor2 t = a * a0;
        os << fmt17(field.x[ix]) << ',' << fmt17(field.x[iy]) << ',' << fmt17(t(0, 0)) << ',' << fmt17(t(0, 1))
           << ',' << fmt17(t(1, 1)) << '\n';
      }
    const std::string tpath = out_path(c, "tensor_" + tag + ".csv");
    write_text_file(tpath, os.str());
    written.insert(written.end(), {fbin, fjson, rbin, rjson, cs, tpath});
  }
  return written;
}

std::vector<std::string> cmd_evaluate(const RunConfig& c, const std::string& recon_bin,
                                      const std::string& recon_json) {
  c.validate();
  Provenance prov;
  double truncation = 0.0;
  const ReconstructedField field = read_reconstruction(recon_bin, recon_json, &prov, &truncation);
  if (prov.config_hash != c.config_hash())
    throw ConfigError("evaluate: reconstruction provenance " + prov.config_hash + " does not match config hash " +
                      c.config_hash());
  if (field.size != c.recon.grid) throw ConfigError("evaluate: reconstruction grid does not match recon.grid");
  const Metrics m = evaluate_metrics(field, c.phantom.scalar());
  const std::string path = out_path(c, "metrics_" + radius_tag(truncation) + ".json");
  write_text_file(path, metrics_to_json(m, c.config_hash()));
  return {path};
}

}  // namespace qcal
