#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qcal/cem.hpp"
#include "qcal/grid_transforms.hpp"
#include "qcal/quasiconformal.hpp"

namespace qcal {

/// Exponentially growing harmonic traces exp(i pi z.y +/- pi b.y) with
/// b = (-z2, z1).
struct CgoTracePair {
  Point2 z;
  Point2 b;

  cplx phi1(const Point2& y) const;
  cplx phi2(const Point2& y) const;
};

CgoTracePair make_cgo_pair(const Point2& z);

/// B(phi1, phi2) = c1^T Lambda c2 with c_j = E^T phi_j, E the orthonormal
/// discrete trig basis and phi_j sampled at the electrode centers. For the
/// continuum DN map this equals int phi1 Lambda phi2 dS.
cplx bilinear_form(const DnMatrix& dn, const Eigen::VectorXcd& phi1, const Eigen::VectorXcd& phi2);

enum class ZeroMode {
  Extrapolate,  // F(0) = (4 f(dz) - f(2 dz)) / 3 from the axis neighbours
  Exclude,      // F(0) = 0
};

enum class TraceSampling {
  Center,   // trace value at each electrode center
  Average,  // mean of the trace over each electrode arc
};

struct FhatOptions {
  double truncation = 2.0;  // R
  int lattice = 33;         // m x m points over [-R, R]^2, m odd
  double det_a0 = 1.0;
  /// Background DN data; when set F is the difference F[dn] - F[reference]
  /// and the inverse transform is taken around conductivity 1.
  const DnMatrix* reference = nullptr;
  ZeroMode zero_mode = ZeroMode::Extrapolate;
  TraceSampling sampling = TraceSampling::Center;
};

struct FhatGrid {
  double truncation = 0.0;
  int lattice = 0;
  double spacing = 0.0;  // dz = 2R/(m-1)
  std::vector<cplx> values;  // row-major m x m, rows along z2
  std::vector<unsigned char> mask;  // 1 where |z| <= R
  double baseline = 0.0;  // constant added by the inverse transform
  double det_a0 = 1.0;
  double hermitian_error = 0.0;  // max |F(-z) - conj F(z)| / max |F|
  bool difference = false;
  std::string normalization = "euclidean";

  int center() const { return lattice / 2; }
  Point2 z(int i2, int i1) const { return {(i1 - center()) * spacing, (i2 - center()) * spacing}; }
  cplx& at(int i2, int i1) { return values[static_cast<size_t>(i2) * lattice + i1]; }
  const cplx& at(int i2, int i1) const { return values[static_cast<size_t>(i2) * lattice + i1]; }
  bool inside(int i2, int i1) const { return mask[static_cast<size_t>(i2) * lattice + i1] != 0; }
  int point_count() const;
};

/// F(z) = -B(phi1 o Phi, phi2 o Phi) / (2 pi^2 |z|^2) over the lattice,
/// with Lambda divided by sqrt(det A0).
FhatGrid fhat_grid(const DnMatrix& dn, const QcMap& map, const FhatOptions& options);

/// Samples an explicit F on the same lattice layout (z = 0 included).
FhatGrid fhat_from_function(const std::function<cplx(const Point2&)>& f, double truncation,
                            int lattice);

/// Fourier transform of the unit-disk indicator, int_{|x|<=1} e^{2 pi i z.x} dx
/// = J1(2 pi |z|)/|z|.
double disk_indicator_transform(const Point2& z);

struct InverseResult {
  std::vector<double> values;
  double imag_residual = 0.0;  // max |Im| / max |Re| before discarding
};

/// a(y) = baseline + Re sum F(z) e^{-2 pi i z.y} dz^2 over |z| <= R.
InverseResult inverse_fourier(const FhatGrid& fhat, std::span<const Point2> points);

/// a(x) = atilde(Phi(x)): maps the points, then inverts the transform there.
InverseResult reconstruct_scalar(const FhatGrid& fhat, const QcMap& map, std::span<const Point2> points);

std::vector<Tensor2> assemble_tensor(std::span<const double> a, const Tensor2& a0);

/// Scalar reconstruction on a size x size grid over [-1, 1]^2 (the unit
/// disk) together with the deformed-domain intermediate.
struct ReconstructedField {
  int size = 0;
  std::vector<double> x;         // grid coordinates, shared by both axes
  std::vector<unsigned char> mask;  // 1 inside the unit disk
  std::vector<double> a;         // row-major, NaN outside the mask
  std::vector<Point2> mapped;    // Phi(x) per grid point (zero outside the mask)
  std::vector<double> atilde_x;  // deformed-domain grid
  std::vector<unsigned char> atilde_mask;
  std::vector<double> atilde;    // NaN outside Phi(Omega)
  double imag_residual = 0.0;
  Tensor2 a0 = Tensor2::Identity();

  double at(int iy, int ix) const { return a[static_cast<size_t>(iy) * size + ix]; }
  /// Row through the origin: pairs (x, a(x, 0)).
  std::vector<std::pair<double, double>> cross_section() const;
};

ReconstructedField reconstruct_field(const FhatGrid& fhat, const QcMap& map, const Tensor2& a0,
                                     int size = 101);

}  // namespace qcal
