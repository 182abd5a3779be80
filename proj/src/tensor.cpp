#include "qcal/tensor.hpp"

#include <cmath>
#include <string>

#include "qcal/errors.hpp"

namespace qcal {

double min_eigenvalue(const Tensor2& a) {
  const double m = 0.5 * (a(0, 0) + a(1, 1));
  const double d = 0.5 * (a(0, 0) - a(1, 1));
  const double off = 0.5 * (a(0, 1) + a(1, 0));
  return m - std::sqrt(d * d + off * off);
}

void require_spd(const Tensor2& a, const char* what) {
  if (!a.allFinite()) throw ConfigError(std::string(what) + " has non-finite entries");
  const double scale = a.cwiseAbs().maxCoeff();
  if (std::abs(a(0, 1) - a(1, 0)) > 1e-12 * std::max(scale, 1e-300))
    throw ConfigError(std::string(what) + " is not symmetric");
  if (!(min_eigenvalue(a) > 0.0)) throw ConfigError(std::string(what) + " is not positive definite");
}

ConductivityTensorField::ConductivityTensorField(std::function<Tensor2(const Point2&)> eval,
                                                 double ellipticity)
    : eval_(std::move(eval)), ellipticity_(ellipticity) {
  if (!(ellipticity_ > 0.0)) throw ConfigError("conductivity ellipticity floor must be positive");
}

ConductivityTensorField ConductivityTensorField::constant(const Tensor2& a) {
  require_spd(a, "conductivity tensor");
  return tensor_from_factored([](const Point2&) { return 1.0; }, a, 1.0);
}

ConductivityTensorField tensor_from_factored(ScalarField a, const Tensor2& a0,
                                             double scalar_floor) {
  require_spd(a0, "A0");
  if (!(scalar_floor > 0.0)) throw ConfigError("scalar multiplier must be positive");
  const Tensor2 bg = a0;
  ConductivityTensorField f([a, bg](const Point2& x) -> Tensor2 { return a(x) * bg; },
                            scalar_floor * min_eigenvalue(a0));
  f.scalar_ = std::move(a);
  f.background_ = bg;
  return f;
}

}  // namespace qcal
