#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace qcal {

using cplx = std::complex<double>;

/// Complex samples on the n x n lattice x_j = -s + j*(2s/n), j = 0..n-1,
/// stored row-major with rows along y. n is even, so the origin is node
/// (n/2, n/2).
struct ComplexGrid {
  int n = 0;
  double s = 0.0;
  std::vector<cplx> values;

  ComplexGrid() = default;
  ComplexGrid(int n_, double s_);

  double spacing() const { return 2.0 * s / n; }
  double coord(int j) const { return -s + j * spacing(); }
  cplx point(int iy, int ix) const { return {coord(ix), coord(iy)}; }
  cplx& at(int iy, int ix) { return values[static_cast<size_t>(iy) * n + ix]; }
  const cplx& at(int iy, int ix) const { return values[static_cast<size_t>(iy) * n + ix]; }
  int origin() const { return n / 2; }

  double sup_norm() const;
  double l2_norm() const;  // discrete: sqrt(sum |g|^2 h^2)
};

/// In-place 2D complex FFT on an aligned N x N buffer (FFTW backed).
class Fft2d {
 public:
  explicit Fft2d(int size);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  int size() const { return size_; }
  cplx* data();
  void forward();
  void backward();  // unnormalized

 private:
  struct Impl;
  int size_;
  std::unique_ptr<Impl> impl_;
};

/// Beurling transform T as the Fourier multiplier conj(xi)/xi (0 at xi = 0).
/// With padding > 1 the input is embedded in a (padding*n)^2 zero field
/// before transforming, which pushes periodic images further away.
class BeurlingOperator {
 public:
  BeurlingOperator(int n, int padding = 1);
  ComplexGrid apply(const ComplexGrid& g) const;

 private:
  int n_;
  int big_;
  std::vector<cplx> symbol_;
  mutable Fft2d fft_;
};

/// Solid Cauchy transform P[g](z) = (1/pi) int g(w) (1/(z-w) + 1/w) dA(w),
/// so that dbar P[g] = g and P[g](0) = 0. Discretized as a zero-padded
/// 2n x 2n FFT convolution with the 1/(pi z) kernel.
class CauchyOperator {
 public:
  CauchyOperator(int n, double s);
  ComplexGrid apply(const ComplexGrid& g) const;

 private:
  int n_;
  double s_;
  std::vector<cplx> kernel_hat_;
  mutable Fft2d fft_;
};

ComplexGrid hilbert_transform(const ComplexGrid& g, int padding = 1);
ComplexGrid cauchy_transform(const ComplexGrid& g);

}  // namespace qcal
