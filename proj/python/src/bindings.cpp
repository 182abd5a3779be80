#include <Eigen/LU>
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qcal/commands.hpp"
#include "qcal/config.hpp"
#include "qcal/errors.hpp"
#include "qcal/phantoms.hpp"
#include "qcal/quasiconformal.hpp"

namespace py = pybind11;

namespace {

std::vector<qcal::Point2> to_points(const Eigen::MatrixX2d& xy) {
  std::vector<qcal::Point2> pts(xy.rows());
  for (Eigen::Index i = 0; i < xy.rows(); ++i) pts[i] = xy.row(i).transpose();
  return pts;
}

Eigen::MatrixX2d from_points(const std::vector<qcal::Point2>& pts) {
  Eigen::MatrixX2d out(pts.size(), 2);
  for (size_t i = 0; i < pts.size(); ++i) out.row(i) = pts[i].transpose();
  return out;
}

qcal::RunConfig config_from(const std::string& json_text) { return qcal::parse_config(json_text); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Anisotropic EIT: CEM forward model, Beltrami solver and Calderon reconstruction";

  py::register_exception<qcal::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<qcal::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("beltrami_coefficient", &qcal::beltrami_coefficient, py::arg("a"),
        "Complex dilatation of a symmetric positive definite 2x2 tensor.");

  m.def("a0_catalog", [] {
    std::vector<std::pair<std::string, Eigen::Matrix2d>> out;
    for (const auto& e : qcal::a0_catalog()) out.emplace_back(e.name, e.tensor);
    return out;
  });

  m.def("sigma_profile", [](double contrast, const Eigen::MatrixX2d& xy) {
    const auto f = qcal::sigma_profile(contrast);
    Eigen::VectorXd v(xy.rows());
    for (Eigen::Index i = 0; i < xy.rows(); ++i) v(i) = f(xy.row(i).transpose());
    return v;
  }, py::arg("contrast"), py::arg("points"));

  m.def("disk_indicator_transform", [](double z1, double z2) {
    return qcal::disk_indicator_transform({z1, z2});
  });

  m.def("config_hash", [](const std::string& json_text) { return config_from(json_text).config_hash(); },
        py::arg("config_json") = "{}");

  m.def("simulate_dn", [](const std::string& json_text) {
    const auto c = config_from(json_text);
    const auto s = qcal::make_setup(c);
    const auto patterns = qcal::trig_current_patterns(s.layout.center_angles(), c.current_amplitude);
    const auto data = qcal::simulate_voltages(s.mesh, c.phantom.field(), s.layout, patterns, {c.noise, c.seed});
    const auto dn = qcal::dn_matrix(data);
    py::dict d;
    d["voltages"] = data.voltages;
    d["lambda"] = dn.lambda;
    d["continuum"] = dn.continuum();
    d["asymmetry"] = dn.asymmetry;
    d["condition"] = dn.condition;
    return d;
  }, py::arg("config_json") = "{}", "Simulates the config's phantom and returns the DN matrix.");

  py::class_<qcal::QcMap>(m, "QcMap")
      .def_readonly("residual", &qcal::QcMap::residual)
      .def_readonly("iterations", &qcal::QcMap::iterations)
      .def_readonly("contraction", &qcal::QcMap::contraction)
      .def_readonly("increments", &qcal::QcMap::increments)
      .def_readonly("mu0", &qcal::QcMap::mu0)
      .def("evaluate", [](const qcal::QcMap& map, const Eigen::MatrixX2d& xy) {
        const auto pts = to_points(xy);
        return from_points(qcal::evaluate_map(map, pts));
      })
      .def("invert", [](const qcal::QcMap& map, const Eigen::MatrixX2d& xy) {
        const auto pts = to_points(xy);
        return from_points(qcal::invert_map(map, pts));
      });

  m.def("solve_map", [](const Eigen::Matrix2d& a0, int n, double s, double r, double blend) {
    return qcal::solve_beltrami(qcal::extend_mu(a0, {n, s, r, blend}));
  }, py::arg("a0"), py::arg("n") = 512, py::arg("s") = 4.0, py::arg("r") = 2.0, py::arg("blend") = 0.5);

  m.def("reconstruct", [](const std::string& json_text) {
    const auto c = config_from(json_text);
    const auto s = qcal::make_setup(c);
    const auto patterns = qcal::trig_current_patterns(s.layout.center_angles(), c.current_amplitude);
    const auto dn = qcal::dn_matrix(
        qcal::simulate_voltages(s.mesh, c.phantom.field(), s.layout, patterns, {c.noise, c.seed}));
    const auto map = qcal::solve_beltrami(qcal::extend_mu(c.phantom.a0, c.qcmap.grid, c.mesh.radius),
                                          c.qcmap.solver);
    qcal::DnMatrix reference;
    if (c.recon.difference) reference = qcal::background_dn(c, s);
    py::list out;
    for (double radius : c.recon.radii) {
      qcal::FhatOptions opt;
      opt.truncation = radius;
      opt.lattice = c.recon.lattice;
      opt.det_a0 = c.phantom.a0.determinant();
      opt.reference = c.recon.difference ? &reference : nullptr;
      opt.zero_mode = c.recon.zero_mode;
      const auto field = qcal::reconstruct_field(qcal::fhat_grid(dn, map, opt), map, c.phantom.a0, c.recon.grid);
      const auto metrics = qcal::evaluate_metrics(field, c.phantom.scalar());
      Eigen::MatrixXd a(field.size, field.size);
      for (int iy = 0; iy < field.size; ++iy)
        for (int ix = 0; ix < field.size; ++ix) a(iy, ix) = field.at(iy, ix);
      py::dict d;
      d["truncation"] = radius;
      d["x"] = field.x;
      d["a"] = a;
      d["imag_residual"] = field.imag_residual;
      d["metrics"] = py::dict(py::arg("l2_rel") = metrics.l2_rel, py::arg("center") = metrics.center,
                              py::arg("bg_mean") = metrics.bg_mean, py::arg("slope") = metrics.slope);
      out.append(d);
    }
    return out;
  }, py::arg("config_json") = "{}", "Runs simulate, map and reconstruct in memory.");
}
