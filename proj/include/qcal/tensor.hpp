#pragma once

#include <functional>
#include <optional>

#include <Eigen/Core>

#include "qcal/geometry.hpp"

namespace qcal {

using Tensor2 = Eigen::Matrix2d;
using ScalarField = std::function<double(const Point2&)>;

/// Throws ConfigError unless `a` is symmetric (to 1e-12 relative) and
/// positive definite.
void require_spd(const Tensor2& a, const char* what = "tensor");

double min_eigenvalue(const Tensor2& a);

/// Conductivity A(x) on the domain. When built from a scalar multiplier and
/// a constant background tensor the factors are kept so the reconstruction
/// can reuse them.
class ConductivityTensorField {
 public:
  ConductivityTensorField(std::function<Tensor2(const Point2&)> eval, double ellipticity);

  Tensor2 operator()(const Point2& x) const { return eval_(x); }
  double ellipticity() const { return ellipticity_; }

  bool factored() const { return background_.has_value(); }
  const Tensor2& background() const { return *background_; }
  double scalar(const Point2& x) const { return scalar_(x); }

  static ConductivityTensorField constant(const Tensor2& a);

 private:
  friend ConductivityTensorField tensor_from_factored(ScalarField, const Tensor2&, double);
  std::function<Tensor2(const Point2&)> eval_;
  double ellipticity_;
  ScalarField scalar_;
  std::optional<Tensor2> background_;
};

/// A(x) = a(x) * A0. `scalar_floor` is inf a over the domain, which the
/// caller knows for analytic profiles; the ellipticity is
/// scalar_floor * lambda_min(A0).
ConductivityTensorField tensor_from_factored(ScalarField a, const Tensor2& a0,
                                             double scalar_floor);

}  // namespace qcal
