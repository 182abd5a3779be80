#include "qcal/grid_transforms.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "qcal/errors.hpp"

namespace qcal {
namespace {

// The FFTW planner is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Antiderivatives (in x and y) of Re(1/w) = x/r^2 and -Im(1/w) = y/r^2.
double prim_re(double x, double y) {
  return 0.5 * y * std::log(x * x + y * y) + x * std::atan(y / x) - y;
}
double prim_im(double x, double y) {
  return 0.5 * x * std::log(x * x + y * y) + y * std::atan(x / y) - x;
}

// Exact integral of 1/w over the unit pixel centered at (dx, dy), dx, dy
// integers. Far pixels use the midpoint value: 1/w is harmonic, so the
// second-order midpoint error vanishes.
cplx pixel_integral(int dx, int dy) {
  if (dx == 0 && dy == 0) return 0.0;
  if (std::max(std::abs(dx), std::abs(dy)) > 32) return 1.0 / cplx(dx, dy);
  const double x1 = dx - 0.5, x2 = dx + 0.5, y1 = dy - 0.5, y2 = dy + 0.5;
  auto box = [&](double (*f)(double, double)) {
    return f(x2, y2) - f(x1, y2) - f(x2, y1) + f(x1, y1);
  };
  return {box(prim_re), -box(prim_im)};
}

void require_finite(const ComplexGrid& g, const char* who) {
  for (const auto& v : g.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw ConfigError(std::string(who) + ": input grid contains NaN or Inf");
}

}  // namespace

ComplexGrid::ComplexGrid(int n_, double s_) : n(n_), s(s_), values(static_cast<size_t>(n_) * n_) {
  if (n < 4 || n % 2 != 0) throw ConfigError("grid size must be even and >= 4");
  if (!(s > 0.0)) throw ConfigError("grid half-width must be positive");
}

double ComplexGrid::sup_norm() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

double ComplexGrid::l2_norm() const {
  double acc = 0.0;
  for (const auto& v : values) acc += std::norm(v);
  return std::sqrt(acc) * spacing();
}

struct Fft2d::Impl {
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

Fft2d::Fft2d(int size) : size_(size), impl_(std::make_unique<Impl>()) {
  const size_t count = static_cast<size_t>(size) * size;
  impl_->buf = fftw_alloc_complex(count);
  if (!impl_->buf) throw std::bad_alloc();
  std::lock_guard<std::mutex> lock(planner_mutex());
  impl_->fwd = fftw_plan_dft_2d(size, size, impl_->buf, impl_->buf, FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft_2d(size, size, impl_->buf, impl_->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  std::memset(static_cast<void*>(impl_->buf), 0, count * sizeof(fftw_complex));
}

Fft2d::~Fft2d() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
  if (impl_->bwd) fftw_destroy_plan(impl_->bwd);
  fftw_free(impl_->buf);
}

cplx* Fft2d::data() { return reinterpret_cast<cplx*>(impl_->buf); }
void Fft2d::forward() { fftw_execute(impl_->fwd); }
void Fft2d::backward() { fftw_execute(impl_->bwd); }

BeurlingOperator::BeurlingOperator(int n, int padding)
    : n_(n), big_(n * padding), symbol_(static_cast<size_t>(big_) * big_), fft_(big_) {
  if (padding < 1) throw ConfigError("BeurlingOperator: padding must be >= 1");
  for (int iy = 0; iy < big_; ++iy) {
    const int ky = iy < big_ / 2 ? iy : iy - big_;
    for (int ix = 0; ix < big_; ++ix) {
      const int kx = ix < big_ / 2 ? ix : ix - big_;
      const cplx xi(kx, ky);
      symbol_[static_cast<size_t>(iy) * big_ + ix] = (kx == 0 && ky == 0) ? cplx(0.0) : std::conj(xi) / xi;
    }
  }
}

ComplexGrid BeurlingOperator::apply(const ComplexGrid& g) const {
  if (g.n != n_) throw ConfigError("BeurlingOperator: grid size mismatch");
  require_finite(g, "hilbert_transform");
  cplx* buf = fft_.data();
  std::fill(buf, buf + static_cast<size_t>(big_) * big_, cplx(0.0));
  for (int iy = 0; iy < n_; ++iy)
    std::copy_n(&g.at(iy, 0), n_, buf + static_cast<size_t>(iy) * big_);
  fft_.forward();
  const double scale = 1.0 / (static_cast<double>(big_) * big_);
  for (size_t k = 0; k < symbol_.size(); ++k) buf[k] *= symbol_[k] * scale;
  fft_.backward();
  ComplexGrid out(n_, g.s);
  for (int iy = 0; iy < n_; ++iy)
    std::copy_n(buf + static_cast<size_t>(iy) * big_, n_, &out.at(iy, 0));
  return out;
}

CauchyOperator::CauchyOperator(int n, double s)
    : n_(n), s_(s), kernel_hat_(static_cast<size_t>(4) * n * n), fft_(2 * n) {
  const int big = 2 * n;
  const double h = 2.0 * s / n;
  cplx* buf = fft_.data();
  for (int iy = 0; iy < big; ++iy) {
    const int dy = iy < n ? iy : iy - big;
    for (int ix = 0; ix < big; ++ix) {
      const int dx = ix < n ? ix : ix - big;
      // (h / pi) * pixel average of 1/w in grid units; the singular self
      // pixel integrates to 0 by symmetry.
      cplx w = pixel_integral(dx, dy);
      // The pixel-averaged rule leaves an error of (h^2/3) * dg/dz; the
      // antisymmetric nearest-neighbour weights below cancel it.
      if (std::abs(dx) + std::abs(dy) == 1) w += std::numbers::pi / 12.0 / cplx(dx, dy);
      buf[static_cast<size_t>(iy) * big + ix] = h / std::numbers::pi * w;
    }
  }
  fft_.forward();
  std::copy_n(buf, kernel_hat_.size(), kernel_hat_.begin());
}

ComplexGrid CauchyOperator::apply(const ComplexGrid& g) const {
  if (g.n != n_ || g.s != s_) throw ConfigError("CauchyOperator: grid mismatch");
  require_finite(g, "cauchy_transform");
  const int big = 2 * n_;
  cplx* buf = fft_.data();
  std::fill(buf, buf + kernel_hat_.size(), cplx(0.0));
  for (int iy = 0; iy < n_; ++iy)
    std::copy_n(&g.at(iy, 0), n_, buf + static_cast<size_t>(iy) * big);
  fft_.forward();
  const double scale = 1.0 / (static_cast<double>(big) * big);
  for (size_t k = 0; k < kernel_hat_.size(); ++k) buf[k] *= kernel_hat_[k] * scale;
  fft_.backward();
  ComplexGrid out(n_, s_);
  for (int iy = 0; iy < n_; ++iy)
    std::copy_n(buf + static_cast<size_t>(iy) * big, n_, &out.at(iy, 0));
  const cplx at_origin = out.at(out.origin(), out.origin());
  for (auto& v : out.values) v -= at_origin;
  return out;
}

ComplexGrid hilbert_transform(const ComplexGrid& g, int padding) {
  return BeurlingOperator(g.n, padding).apply(g);
}

ComplexGrid cauchy_transform(const ComplexGrid& g) { return CauchyOperator(g.n, g.s).apply(g); }

}  // namespace qcal
