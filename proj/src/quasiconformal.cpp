#include "qcal/quasiconformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "qcal/errors.hpp"

namespace qcal {
namespace {

constexpr cplx kI(0.0, 1.0);

// Fourth-order centered first differences along x and y at an interior node.
cplx diff_x(const ComplexGrid& g, int iy, int ix) {
  const double h = g.spacing();
  return (-g.at(iy, ix + 2) + 8.0 * g.at(iy, ix + 1) - 8.0 * g.at(iy, ix - 1) + g.at(iy, ix - 2)) /
         (12.0 * h);
}
cplx diff_y(const ComplexGrid& g, int iy, int ix) {
  const double h = g.spacing();
  return (-g.at(iy + 2, ix) + 8.0 * g.at(iy + 1, ix) - 8.0 * g.at(iy - 1, ix) + g.at(iy - 2, ix)) /
         (12.0 * h);
}

bool inner_half(const ComplexGrid& g, int iy, int ix) {
  const double lim = 0.5 * g.s + 1e-12;
  return std::abs(g.coord(ix)) <= lim && std::abs(g.coord(iy)) <= lim;
}

struct Cell {
  int ix, iy;
  double tx, ty;
};

Cell locate(const ComplexGrid& g, const Point2& x) {
  const double h = g.spacing();
  auto split = [&](double v, int& i, double& t) {
    double f = (v + g.s) / h;
    double r = std::round(f);
    if (std::abs(f - r) < 1e-9) f = r;
    i = std::clamp(static_cast<int>(std::floor(f)), 0, g.n - 2);
    t = f - i;
  };
  Cell c{};
  split(x.x(), c.ix, c.tx);
  split(x.y(), c.iy, c.ty);
  return c;
}

cplx bilinear(const ComplexGrid& g, const Cell& c) {
  return (1.0 - c.ty) * ((1.0 - c.tx) * g.at(c.iy, c.ix) + c.tx * g.at(c.iy, c.ix + 1)) +
         c.ty * ((1.0 - c.tx) * g.at(c.iy + 1, c.ix) + c.tx * g.at(c.iy + 1, c.ix + 1));
}

std::string fmt_point(const Point2& p) {
  std::ostringstream os;
  os.precision(10);
  os << "(" << p.x() << ", " << p.y() << ")";
  return os.str();
}

}  // namespace

cplx beltrami_coefficient(const Tensor2& a) {
  require_spd(a, "beltrami_coefficient input");
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return cplx(a(1, 1) - a(0, 0), -2.0 * a(0, 1)) / (a(0, 0) + a(1, 1) + 2.0 * std::sqrt(det));
}

double support_ramp(double rho, double r, double blend) {
  const double t = std::clamp((r - rho) / blend, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

MuGrid extend_mu(const Tensor2& a0, const QcGridParams& params, double domain_radius) {
  if (!(params.blend > 0.0) || !(params.blend < params.r))
    throw ConfigError("extend_mu: blend width must lie in (0, r)");
  if (!(domain_radius > 0.0) || domain_radius > params.r - params.blend)
    throw ConfigError("extend_mu: the domain must fit inside the constant region |x| <= r - blend");
  if (!(params.s >= 2.0 * params.r)) throw ConfigError("extend_mu: grid half-width s must be >= 2r");
  MuGrid out{ComplexGrid(params.n, params.s), beltrami_coefficient(a0), a0, params.r, params.blend};
  for (int iy = 0; iy < params.n; ++iy)
    for (int ix = 0; ix < params.n; ++ix) {
      const double rho = std::abs(out.mu.point(iy, ix));
      out.mu.at(iy, ix) = out.mu0 * support_ramp(rho, params.r, params.blend);
    }
  return out;
}

QcMap::QcMap(ComplexGrid phi) : phi_(std::move(phi)) { build_derivatives(); }

void QcMap::build_derivatives() {
  const int n = phi_.n;
  const double h = phi_.spacing();
  dphi_dx_ = ComplexGrid(n, phi_.s);
  dphi_dy_ = ComplexGrid(n, phi_.s);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int xm = std::max(ix - 1, 0), xp = std::min(ix + 1, n - 1);
      const int ym = std::max(iy - 1, 0), yp = std::min(iy + 1, n - 1);
      dphi_dx_.at(iy, ix) = (phi_.at(iy, xp) - phi_.at(iy, xm)) / (h * (xp - xm));
      dphi_dy_.at(iy, ix) = (phi_.at(yp, ix) - phi_.at(ym, ix)) / (h * (yp - ym));
    }
}

bool QcMap::in_window(const Point2& x) const {
  const double lim = window() * (1.0 + 1e-12);
  return std::abs(x.x()) <= lim && std::abs(x.y()) <= lim && x.allFinite();
}

Point2 QcMap::evaluate(const Point2& x) const {
  if (!in_window(x))
    throw ConfigError("evaluate_map: point " + fmt_point(x) + " lies outside the map window [-" +
                      std::to_string(window()) + ", " + std::to_string(window()) + "]^2");
  const cplx v = bilinear(phi_, locate(phi_, x));
  return {v.real(), v.imag()};
}

Eigen::Matrix2d QcMap::interpolant_jacobian(const Point2& x) const {
  const Cell c = locate(phi_, x);
  const double h = phi_.spacing();
  const cplx v00 = phi_.at(c.iy, c.ix), v10 = phi_.at(c.iy, c.ix + 1);
  const cplx v01 = phi_.at(c.iy + 1, c.ix), v11 = phi_.at(c.iy + 1, c.ix + 1);
  const cplx dx = ((1.0 - c.ty) * (v10 - v00) + c.ty * (v11 - v01)) / h;
  const cplx dy = ((1.0 - c.tx) * (v01 - v00) + c.tx * (v11 - v10)) / h;
  Eigen::Matrix2d j;
  j << dx.real(), dy.real(), dx.imag(), dy.imag();
  return j;
}

Eigen::Matrix2d QcMap::jacobian(const Point2& x) const {
  if (!in_window(x)) throw ConfigError("jacobian: point " + fmt_point(x) + " outside the map window");
  const Cell c = locate(phi_, x);
  const cplx dx = bilinear(dphi_dx_, c);
  const cplx dy = bilinear(dphi_dy_, c);
  Eigen::Matrix2d j;
  j << dx.real(), dy.real(), dx.imag(), dy.imag();
  return j;
}

Point2 QcMap::invert(const Point2& y) const {
  if (!y.allFinite()) throw ConfigError("invert_map: non-finite target point");
  // Seed with the nearest grid image inside the window.
  const int n = phi_.n;
  const cplx target(y.x(), y.y());
  double best = std::numeric_limits<double>::infinity();
  Point2 x(0.0, 0.0);
  for (int iy = 0; iy < n; ++iy) {
    if (std::abs(phi_.coord(iy)) > window()) continue;
    for (int ix = 0; ix < n; ++ix) {
      if (std::abs(phi_.coord(ix)) > window()) continue;
      const double d = std::norm(phi_.at(iy, ix) - target);
      if (d < best) {
        best = d;
        x = {phi_.coord(ix), phi_.coord(iy)};
      }
    }
  }
  const double lim = window();
  for (int it = 0; it < 50; ++it) {
    const Point2 r = evaluate(x) - y;
    if (r.norm() <= 1e-8 * std::max(1.0, y.norm()) * 1e-2 || r.norm() <= 1e-10) return x;
    Point2 step = interpolant_jacobian(x).partialPivLu().solve(r);
    // Backtrack so iterates stay in the window and the residual decreases.
    double t = 1.0;
    for (int b = 0; b < 30; ++b, t *= 0.5) {
      Point2 cand = x - t * step;
      cand = cand.cwiseMax(-lim).cwiseMin(lim);
      if ((evaluate(cand) - y).norm() < r.norm()) {
        x = cand;
        break;
      }
    }
  }
  const double res = (evaluate(x) - y).norm();
  if (res <= 1e-8) return x;
  throw NumericalError("invert_map: Newton iteration failed for point " + fmt_point(y) +
                       " (residual " + std::to_string(res) + " after 50 steps)");
}

double beltrami_residual(const ComplexGrid& phi, const ComplexGrid& mu) {
  if (phi.n != mu.n) throw ConfigError("beltrami_residual: grid mismatch");
  double worst = 0.0;
  for (int iy = 2; iy < phi.n - 2; ++iy)
    for (int ix = 2; ix < phi.n - 2; ++ix) {
      if (!inner_half(phi, iy, ix)) continue;
      const cplx fx = diff_x(phi, iy, ix), fy = diff_y(phi, iy, ix);
      const cplx dbar = 0.5 * (fx + kI * fy);
      const cplx d = 0.5 * (fx - kI * fy);
      worst = std::max(worst, std::abs(dbar - mu.at(iy, ix) * d));
    }
  return worst;
}

QcMap solve_beltrami(const MuGrid& mug, const BeltramiOptions& opt) {
  const ComplexGrid& mu = mug.mu;
  if (!(mug.sup_abs() < 1.0)) throw ConfigError("solve_beltrami: sup|mu| must be < 1");
  if (!(opt.tol > 0.0) || opt.max_iter < 1) throw ConfigError("solve_beltrami: invalid tolerance or iteration cap");
  const BeurlingOperator beurling(mu.n, opt.fft_padding);

  const ComplexGrid t_mu = beurling.apply(mu);
  ComplexGrid h = opt.initial == InitialGuess::TransformOfMu ? t_mu : mu;
  ComplexGrid prod(mu.n, mu.s);
  std::vector<double> increments;
  bool converged = false;
  for (int it = 1; it <= opt.max_iter; ++it) {
    for (size_t k = 0; k < prod.values.size(); ++k) prod.values[k] = mu.values[k] * h.values[k];
    ComplexGrid next = beurling.apply(prod);
    double inc = 0.0;
    for (size_t k = 0; k < next.values.size(); ++k) {
      next.values[k] += t_mu.values[k];
      inc = std::max(inc, std::abs(next.values[k] - h.values[k]));
    }
    h = std::move(next);
    increments.push_back(inc);
    if (inc <= opt.tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NumericalError("solve_beltrami: no convergence in " + std::to_string(opt.max_iter) +
                         " iterations (last increment " + std::to_string(increments.back()) + ")");

  ComplexGrid src(mu.n, mu.s);
  for (size_t k = 0; k < src.values.size(); ++k) src.values[k] = mu.values[k] * (h.values[k] + 1.0);
  ComplexGrid phi = CauchyOperator(mu.n, mu.s).apply(src);
  for (int iy = 0; iy < mu.n; ++iy)
    for (int ix = 0; ix < mu.n; ++ix) phi.at(iy, ix) += phi.point(iy, ix);

  QcMap map(std::move(phi));
  map.h_star = std::move(h);
  map.support_radius = mug.support_radius;
  map.iterations = static_cast<int>(increments.size());
  map.mu0 = mug.mu0;
  map.residual = beltrami_residual(map.phi(), mu);

  // Decay ratio over increments still well above round-off.
  double ratio = 0.0;
  for (size_t k = 1; k < increments.size(); ++k)
    if (increments[k - 1] > 1e-12 && increments[k] > 1e-13)
      ratio = std::max(ratio, increments[k] / increments[k - 1]);
  map.contraction = ratio;
  map.increments = std::move(increments);

  const auto& p = map.phi();
  double far = 0.0;
  for (int k = 0; k < p.n; ++k)
    for (auto [iy, ix] : {std::pair{0, k}, std::pair{p.n - 1, k}, std::pair{k, 0}, std::pair{k, p.n - 1}})
      far = std::max(far, std::abs(p.at(iy, ix) - p.point(iy, ix)));
  map.far_field = far;

  double min_det = std::numeric_limits<double>::infinity();
  for (int iy = 2; iy < p.n - 2; ++iy)
    for (int ix = 2; ix < p.n - 2; ++ix) {
      if (!inner_half(p, iy, ix)) continue;
      const cplx fx = diff_x(p, iy, ix), fy = diff_y(p, iy, ix);
      min_det = std::min(min_det, fx.real() * fy.imag() - fy.real() * fx.imag());
    }
  map.min_jacobian = min_det;
  return map;
}

std::vector<Point2> evaluate_map(const QcMap& map, std::span<const Point2> points) {
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(map.evaluate(p));
  return out;
}

std::vector<Point2> invert_map(const QcMap& map, std::span<const Point2> points) {
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(map.invert(p));
  return out;
}

std::vector<Tensor2> pushforward_tensor(const ConductivityTensorField& a, const QcMap& map,
                                        std::span<const Point2> points) {
  std::vector<Tensor2> out;
  out.reserve(points.size());
  for (const auto& x : points) {
    const Eigen::Matrix2d j = map.jacobian(x);
    const double det = j.determinant();
    if (!(det > 0.0))
      throw NumericalError("pushforward_tensor: det(grad Phi) = " + std::to_string(det) +
                           " <= 0 at " + fmt_point(x));
    out.push_back(j * a(x) * j.transpose() / det);
  }
  return out;
}

}  // namespace qcal
