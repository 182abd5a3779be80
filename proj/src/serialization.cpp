#include "qcal/serialization.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "qcal/config.hpp"
#include "qcal/errors.hpp"

static_assert(std::endian::native == std::endian::little, "binary grid files are little-endian");

namespace qcal {
namespace {

using nlohmann::json;

json prov_json(const Provenance& p) {
  return {{"config_hash", p.config_hash}, {"simulation_hash", p.simulation_hash}, {"map_hash", p.map_hash}};
}

void read_prov(const json& j, Provenance* p) {
  if (!p) return;
  const json& q = j.at("provenance");
  p->config_hash = q.value("config_hash", "");
  p->simulation_hash = q.value("simulation_hash", "");
  p->map_hash = q.value("map_hash", "");
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string("malformed matrix '") + what + "'");
  const int rows = static_cast<int>(j.size()), cols = static_cast<int>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols)
      throw ConfigError(std::string("ragged matrix '") + what + "'");
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json parse_checked(const std::string& text, const char* format) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON in ") + format + " file: " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != format)
    throw ConfigError(std::string("expected a '") + format + "' document");
  return j;
}

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed ") + what + " file: " + e.what());
  }
}

class BinWriter {
 public:
  explicit BinWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot write '" + path + "'");
  }
  void i64(std::int64_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void f64(double v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void c128(cplx v) { f64(v.real()), f64(v.imag()); }
  ~BinWriter() { out_.flush(); }

 private:
  std::ofstream out_;
};

class BinReader {
 public:
  explicit BinReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw ConfigError("cannot open '" + path + "'");
  }
  std::int64_t i64() { return get<std::int64_t>(); }
  double f64() { return get<double>(); }
  cplx c128() {
    const double re = f64();
    return {re, f64()};
  }

 private:
  template <class T>
  T get() {
    T v;
    if (!in_.read(reinterpret_cast<char*>(&v), sizeof v)) throw ConfigError("truncated binary file '" + path_ + "'");
    return v;
  }
  std::ifstream in_;
  std::string path_;
};

json electrode_geometry(const std::vector<double>& angles, double radius, double coverage,
                        const std::vector<double>& impedance) {
  return {{"count", angles.size()},
          {"radius", radius},
          {"coverage", coverage},
          {"center_angles", angles},
          {"contact_impedance", impedance}};
}

double nan_or(const json& v) { return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>(); }

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

std::string file_hash(const std::string& path) { return fnv1a_hex(read_text_file(path)); }

std::string voltage_data_to_json(const VoltageData& d, const Provenance& prov) {
  const auto& p = d.patterns;
  json j = {{"format", "qcal-voltages"},
            {"version", 1},
            {"provenance", prov_json(prov)},
            {"electrodes", electrode_geometry(d.electrode_angles, d.radius, d.coverage, d.contact_impedance)},
            {"patterns",
             {{"type", "trigonometric"},
              {"amplitude", p.amplitude},
              {"frequency", p.frequency},
              {"is_cosine", p.is_cosine},
              {"normalization", "euclidean"},
              {"currents", matrix_json(p.currents)}}},
            {"voltages", matrix_json(d.voltages)},
            {"noise", {{"relative_std", d.noise}, {"seed", d.seed}}}};
  return j.dump(1) + "\n";
}

VoltageData voltage_data_from_json(const std::string& text, Provenance* prov) {
  const json j = parse_checked(text, "qcal-voltages");
  return guarded("voltage", [&] {
    VoltageData d;
    const json& e = j.at("electrodes");
    d.electrode_angles = e.at("center_angles").get<std::vector<double>>();
    d.radius = e.at("radius").get<double>();
    d.coverage = e.at("coverage").get<double>();
    d.contact_impedance = e.at("contact_impedance").get<std::vector<double>>();
    d.patterns = trig_current_patterns(d.electrode_angles, j.at("patterns").at("amplitude").get<double>());
    const Eigen::MatrixXd stored = matrix_from(j.at("patterns").at("currents"), "currents");
    if (stored.rows() != d.patterns.currents.rows() || stored.cols() != d.patterns.currents.cols() ||
        !stored.isApprox(d.patterns.currents, 1e-12))
      throw ConfigError("voltage file: stored currents are not the trigonometric patterns of its electrodes");
    d.voltages = matrix_from(j.at("voltages"), "voltages");
    d.noise = j.at("noise").at("relative_std").get<double>();
    d.seed = j.at("noise").at("seed").get<std::uint64_t>();
    read_prov(j, prov);
    return d;
  });
}

std::string dn_matrix_to_json(const DnMatrix& dn, const Provenance& prov) {
  json j = {{"format", "qcal-dn"},
            {"version", 1},
            {"provenance", prov_json(prov)},
            {"electrodes", electrode_geometry(dn.electrode_angles, dn.radius, dn.coverage, {})},
            {"basis", {{"frequency", dn.frequency}, {"is_cosine", dn.is_cosine}, {"normalization", dn.normalization}}},
            {"slot_length", dn.slot_length},
            {"asymmetry", dn.asymmetry},
            {"condition", dn.condition},
            {"lambda", matrix_json(dn.lambda)},
            {"nd", matrix_json(dn.nd)}};
  j["electrodes"].erase("contact_impedance");
  return j.dump(1) + "\n";
}

DnMatrix dn_matrix_from_json(const std::string& text, Provenance* prov) {
  const json j = parse_checked(text, "qcal-dn");
  return guarded("DN", [&] {
    DnMatrix dn;
    const json& e = j.at("electrodes");
    dn.electrode_angles = e.at("center_angles").get<std::vector<double>>();
    dn.electrodes = static_cast<int>(dn.electrode_angles.size());
    dn.radius = e.at("radius").get<double>();
    dn.coverage = e.at("coverage").get<double>();
    dn.frequency = j.at("basis").at("frequency").get<std::vector<int>>();
    dn.is_cosine = j.at("basis").at("is_cosine").get<std::vector<bool>>();
    dn.normalization = j.at("basis").at("normalization").get<std::string>();
    if (dn.normalization != "euclidean") throw ConfigError("DN file: unsupported pattern normalization '" + dn.normalization + "'");
    dn.slot_length = j.at("slot_length").get<double>();
    dn.asymmetry = j.at("asymmetry").get<double>();
    dn.condition = j.at("condition").get<double>();
    dn.lambda = matrix_from(j.at("lambda"), "lambda");
    dn.nd = matrix_from(j.at("nd"), "nd");
    const int n = dn.electrodes - 1;
    if (dn.lambda.rows() != n || dn.lambda.cols() != n || dn.nd.rows() != n || dn.nd.cols() != n)
      throw ConfigError("DN file: matrix size does not match the electrode count");
    read_prov(j, prov);
    return dn;
  });
}

void write_qcmap(const QcMap& map, const std::string& bin_path, const std::string& json_path,
                 const Provenance& prov) {
  {
    BinWriter w(bin_path);
    w.i64(map.n());
    w.f64(map.s());
    w.f64(map.support_radius);
    for (const cplx& v : map.phi().values) w.c128(v);
  }
  json j = {{"format", "qcal-qcmap"},
            {"version", 1},
            {"provenance", prov_json(prov)},
            {"grid", {{"n", map.n()}, {"s", map.s()}, {"r", map.support_radius}}},
            {"mu0", {map.mu0.real(), map.mu0.imag()}},
            {"residual", map.residual},
            {"iterations", map.iterations},
            {"increments", map.increments},
            {"contraction", map.contraction},
            {"far_field", map.far_field},
            {"min_jacobian", map.min_jacobian},
            {"binary", {{"file_hash", file_hash(bin_path)}}}};
  write_text_file(json_path, j.dump(1) + "\n");
}

QcMap read_qcmap(const std::string& bin_path, const std::string& json_path, Provenance* prov) {
  const json j = parse_checked(read_text_file(json_path), "qcal-qcmap");
  if (j.at("binary").at("file_hash").get<std::string>() != file_hash(bin_path))
    throw ConfigError("QC map: binary grid does not match its sidecar");
  BinReader r(bin_path);
  const std::int64_t n = r.i64();
  const double s = r.f64();
  const double support = r.f64();
  if (n < 4 || n > 1 << 14 || !(s > 0.0)) throw ConfigError("QC map: bad grid header");
  ComplexGrid g(static_cast<int>(n), s);
  for (auto& v : g.values) v = r.c128();
  QcMap map(std::move(g));
  return guarded("QC map", [&] {
    map.support_radius = support;
    map.mu0 = {j.at("mu0")[0].get<double>(), j.at("mu0")[1].get<double>()};
    map.residual = j.at("residual").get<double>();
    map.iterations = j.at("iterations").get<int>();
    map.increments = j.at("increments").get<std::vector<double>>();
    map.contraction = j.at("contraction").get<double>();
    map.far_field = j.at("far_field").get<double>();
    map.min_jacobian = j.at("min_jacobian").get<double>();
    read_prov(j, prov);
    return map;
  });
}

void write_fhat(const FhatGrid& f, const std::string& bin_path, const std::string& json_path,
                const Provenance& prov) {
  {
    BinWriter w(bin_path);
    w.i64(f.lattice);
    w.f64(f.truncation);
    w.f64(f.spacing);
    for (const cplx& v : f.values) w.c128(v);
  }
  json j = {{"format", "qcal-fhat"},
            {"version", 1},
            {"provenance", prov_json(prov)},
            {"truncation", f.truncation},
            {"lattice", f.lattice},
            {"spacing", f.spacing},
            {"points_inside", f.point_count()},
            {"baseline", f.baseline},
            {"det_a0", f.det_a0},
            {"background_scaling", 1.0 / std::sqrt(f.det_a0)},
            {"difference", f.difference},
            {"hermitian_error", f.hermitian_error},
            {"normalization", f.normalization},
            {"binary", {{"file_hash", file_hash(bin_path)}}}};
  write_text_file(json_path, j.dump(1) + "\n");
}

FhatGrid read_fhat(const std::string& bin_path, const std::string& json_path, Provenance* prov) {
  const json j = parse_checked(read_text_file(json_path), "qcal-fhat");
  if (j.at("binary").at("file_hash").get<std::string>() != file_hash(bin_path))
    throw ConfigError("F-hat: binary grid does not match its sidecar");
  BinReader r(bin_path);
  const std::int64_t m = r.i64();
  const double radius = r.f64();
  r.f64();
  FhatGrid f = fhat_from_function([](const Point2&) { return cplx(0.0); }, radius, static_cast<int>(m));
  for (auto& v : f.values) v = r.c128();
  return guarded("F-hat", [&] {
    f.baseline = j.at("baseline").get<double>();
    f.det_a0 = j.at("det_a0").get<double>();
    f.difference = j.at("difference").get<bool>();
    f.hermitian_error = j.at("hermitian_error").get<double>();
    f.normalization = j.at("normalization").get<std::string>();
    read_prov(j, prov);
    return f;
  });
}

void write_reconstruction(const ReconstructedField& rf, double truncation, const std::string& bin_path,
                          const std::string& json_path, const Provenance& prov) {
  {
    BinWriter w(bin_path);
    w.i64(rf.size);
    for (double v : rf.a) w.f64(v);
    for (double v : rf.atilde) w.f64(v);
  }
  json j = {{"format", "qcal-reconstruction"},
            {"version", 1},
            {"provenance", prov_json(prov)},
            {"truncation", truncation},
            {"size", rf.size},
            {"x", rf.x},
            {"atilde_x", rf.atilde_x},
            {"a0", {{rf.a0(0, 0), rf.a0(0, 1)}, {rf.a0(1, 0), rf.a0(1, 1)}}},
            {"imag_residual", rf.imag_residual},
            {"binary", {{"file_hash", file_hash(bin_path)}, {"layout", "a then atilde, row-major, NaN outside"}}}};
  write_text_file(json_path, j.dump(1) + "\n");
}

ReconstructedField read_reconstruction(const std::string& bin_path, const std::string& json_path,
                                       Provenance* prov, double* truncation) {
  const json j = parse_checked(read_text_file(json_path), "qcal-reconstruction");
  if (j.at("binary").at("file_hash").get<std::string>() != file_hash(bin_path))
    throw ConfigError("reconstruction: binary grid does not match its sidecar");
  ReconstructedField rf;
  BinReader r(bin_path);
  rf.size = static_cast<int>(r.i64());
  if (rf.size < 3 || rf.size > 1 << 14) throw ConfigError("reconstruction: bad grid size");
  const size_t count = static_cast<size_t>(rf.size) * rf.size;
  rf.a.resize(count);
  rf.atilde.resize(count);
  for (auto& v : rf.a) v = r.f64();
  for (auto& v : rf.atilde) v = r.f64();
  rf.mask.resize(count);
  rf.atilde_mask.resize(count);
  for (size_t k = 0; k < count; ++k) {
    rf.mask[k] = !std::isnan(rf.a[k]);
    rf.atilde_mask[k] = !std::isnan(rf.atilde[k]);
  }
  return guarded("reconstruction", [&] {
    rf.x = j.at("x").get<std::vector<double>>();
    rf.atilde_x = j.at("atilde_x").get<std::vector<double>>();
    const json& a0 = j.at("a0");
    rf.a0 << a0[0][0].get<double>(), a0[0][1].get<double>(), a0[1][0].get<double>(), a0[1][1].get<double>();
    rf.imag_residual = nan_or(j.at("imag_residual"));
    if (truncation) *truncation = j.at("truncation").get<double>();
    if (static_cast<int>(rf.x.size()) != rf.size) throw ConfigError("reconstruction: axis length mismatch");
    read_prov(j, prov);
    return rf;
  });
}

void write_cross_section(const ReconstructedField& field, const ScalarField& target, const std::string& path) {
  std::ostringstream os;
  os.precision(17);
  os << "x,a,target\n";
  for (const auto& [x, a] : field.cross_section()) os << x << ',' << a << ',' << target(Point2(x, 0.0)) << '\n';
  write_text_file(path, os.str());
}

}  // namespace qcal
