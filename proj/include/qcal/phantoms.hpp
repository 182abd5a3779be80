#pragma once

#include <array>
#include <string>

#include <Eigen/Core>

#include "qcal/cem.hpp"
#include "qcal/tensor.hpp"

namespace qcal {

/// sigma_M(x) = M for |x| < 0.5 and 1 for |x| >= 0.5.
ScalarField sigma_profile(double contrast);

struct CatalogTensor {
  std::string name;  // "A0_1" .. "A0_4"
  Tensor2 tensor;
};

/// diag(1, 1.3), diag(1.3, 1), diag(1, 4), diag(4, 1).
std::array<CatalogTensor, 4> a0_catalog();

struct PhantomSpec {
  std::string name;
  double contrast = 1.0;  // M
  Tensor2 a0 = Tensor2::Identity();

  ScalarField scalar() const { return sigma_profile(contrast); }
  ConductivityTensorField field() const;
  /// a = 1 everywhere, the background used for difference data.
  ConductivityTensorField background_field() const;
};

/// "A1".."A4": sigma_1.3 A0_1, sigma_1.3 A0_2, sigma_4 A0_3, sigma_4 A0_4.
PhantomSpec phantom_by_name(const std::string& name);

/// Continuum DN eigenvalue sigma*|k| of the homogeneous unit disk.
double analytic_disk_dn(double sigma, int k);

/// The continuum DN map of a homogeneous disk written in the discrete
/// normalized trig basis of `patterns`, in electrode units (diagonal
/// sigma*|k|/radius times the slot length).
DnMatrix analytic_dn_matrix(double sigma, const CurrentPatternSet& patterns,
                            const std::vector<double>& electrode_angles, double radius = 1.0);

}  // namespace qcal
