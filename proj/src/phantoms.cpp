#include "qcal/phantoms.hpp"

#include <cmath>
#include <numbers>

#include "qcal/errors.hpp"

namespace qcal {

ScalarField sigma_profile(double contrast) {
  if (!(contrast > 0.0)) throw ConfigError("sigma_profile: contrast M must be positive");
  return [contrast](const Point2& x) { return x.norm() < 0.5 ? contrast : 1.0; };
}

std::array<CatalogTensor, 4> a0_catalog() {
  auto diag = [](double a, double b) {
    Tensor2 t = Tensor2::Zero();
    t(0, 0) = a;
    t(1, 1) = b;
    return t;
  };
  return {{{"A0_1", diag(1.0, 1.3)}, {"A0_2", diag(1.3, 1.0)}, {"A0_3", diag(1.0, 4.0)}, {"A0_4", diag(4.0, 1.0)}}};
}

ConductivityTensorField PhantomSpec::field() const {
  return tensor_from_factored(scalar(), a0, std::min(contrast, 1.0));
}

ConductivityTensorField PhantomSpec::background_field() const {
  return tensor_from_factored([](const Point2&) { return 1.0; }, a0, 1.0);
}

PhantomSpec phantom_by_name(const std::string& name) {
  const auto cat = a0_catalog();
  if (name == "A1") return {name, 1.3, cat[0].tensor};
  if (name == "A2") return {name, 1.3, cat[1].tensor};
  if (name == "A3") return {name, 4.0, cat[2].tensor};
  if (name == "A4") return {name, 4.0, cat[3].tensor};
  throw ConfigError("unknown phantom '" + name + "' (expected A1, A2, A3 or A4)");
}

double analytic_disk_dn(double sigma, int k) {
  if (k == 0) throw ConfigError("analytic_disk_dn: frequency k must be nonzero");
  if (!(sigma > 0.0)) throw ConfigError("analytic_disk_dn: sigma must be positive");
  return sigma * std::abs(k);
}

DnMatrix analytic_dn_matrix(double sigma, const CurrentPatternSet& patterns,
                            const std::vector<double>& electrode_angles, double radius) {
  const int n = patterns.pattern_count();
  DnMatrix dn;
  dn.electrodes = patterns.electrodes;
  dn.electrode_angles = electrode_angles;
  dn.frequency = patterns.frequency;
  dn.is_cosine = patterns.is_cosine;
  dn.radius = radius;
  dn.slot_length = 2.0 * std::numbers::pi * radius / patterns.electrodes;
  dn.lambda = Eigen::MatrixXd::Zero(n, n);
  dn.nd = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    dn.lambda(k, k) = analytic_disk_dn(sigma, patterns.frequency[k]) / radius * dn.slot_length;
    dn.nd(k, k) = 1.0 / dn.lambda(k, k);
  }
  dn.condition = dn.lambda.diagonal().maxCoeff() / dn.lambda.diagonal().minCoeff();
  return dn;
}

}  // namespace qcal
