#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "qcal/geometry.hpp"
#include "qcal/grid_transforms.hpp"
#include "qcal/tensor.hpp"

namespace qcal {

/// mu_A = (A22 - A11 - 2i A12) / (A11 + A22 + 2 sqrt(det A)); |mu_A| < 1.
cplx beltrami_coefficient(const Tensor2& a);

struct QcGridParams {
  int n = 512;
  double s = 4.0;       // grid covers [-s, s]^2
  double r = 2.0;       // mu vanishes for |x| >= r
  double blend = 0.5;   // C^1 ramp width inside r
};

struct MuGrid {
  ComplexGrid mu;
  cplx mu0;             // value inside |x| <= r - blend
  Tensor2 a0;
  double support_radius = 0.0;
  double blend = 0.0;

  double sup_abs() const { return mu.sup_norm(); }
};

/// Smoothstep ramp 3t^2 - 2t^3 with t = (r - |x|)/blend clamped to [0, 1].
double support_ramp(double rho, double r, double blend);

/// Constant mu_{A0} on the disk of radius r - blend, blended to zero at r.
/// `domain_radius` is the radius of the disk the map must cover.
MuGrid extend_mu(const Tensor2& a0, const QcGridParams& params, double domain_radius = 1.0);

enum class InitialGuess { TransformOfMu, Mu };

struct BeltramiOptions {
  double tol = 1e-10;
  int max_iter = 200;
  InitialGuess initial = InitialGuess::TransformOfMu;
  int fft_padding = 2;
};

/// Grid-sampled quasi-conformal map with bilinear point evaluation.
class QcMap {
 public:
  QcMap() = default;
  /// Wraps precomputed samples of the map (e.g. loaded from disk).
  explicit QcMap(ComplexGrid phi);

  const ComplexGrid& phi() const { return phi_; }
  int n() const { return phi_.n; }
  double s() const { return phi_.s; }
  /// Points must satisfy |x|, |y| <= window().
  double window() const { return 0.5 * phi_.s; }

  Point2 evaluate(const Point2& x) const;
  /// Real Jacobian of the bilinear interpolant at x.
  Eigen::Matrix2d interpolant_jacobian(const Point2& x) const;
  /// Centered finite-difference Jacobian of the grid samples, interpolated.
  Eigen::Matrix2d jacobian(const Point2& x) const;
  Point2 invert(const Point2& y) const;

  // Solver metadata; zero for maps that were not produced by solve_beltrami.
  ComplexGrid h_star;
  double support_radius = 0.0;
  double residual = 0.0;          // sup |dbar Phi - mu d Phi| on the inner half-grid
  int iterations = 0;
  std::vector<double> increments;  // sup-norm increment per iteration
  double contraction = 0.0;        // measured increment decay ratio
  double far_field = 0.0;          // max |Phi(z) - z| on the outer grid ring
  double min_jacobian = 0.0;       // min det of the FD Jacobian on the inner half-grid
  cplx mu0 = 0.0;

 private:
  void build_derivatives();
  bool in_window(const Point2& x) const;
  ComplexGrid phi_;
  ComplexGrid dphi_dx_;
  ComplexGrid dphi_dy_;
};

/// Scheme 1 fixed-point iteration h <- T[mu h] + T[mu], followed by
/// Phi(z) = P[mu (h + 1)](z) + z.
QcMap solve_beltrami(const MuGrid& mu, const BeltramiOptions& options = {});

/// sup |dbar Phi - mu d Phi| over |x|, |y| <= s/2 using fourth-order
/// centered differences.
double beltrami_residual(const ComplexGrid& phi, const ComplexGrid& mu);

std::vector<Point2> evaluate_map(const QcMap& map, std::span<const Point2> points);
std::vector<Point2> invert_map(const QcMap& map, std::span<const Point2> points);

/// Phi_* A at Phi(x) for each x: J A J^T / det J, J the FD Jacobian.
std::vector<Tensor2> pushforward_tensor(const ConductivityTensorField& a, const QcMap& map,
                                        std::span<const Point2> points);

}  // namespace qcal
