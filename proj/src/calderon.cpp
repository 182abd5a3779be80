#include "qcal/calderon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qcal/errors.hpp"

namespace qcal {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI(0.0, 1.0);

FhatGrid empty_lattice(double truncation, int lattice) {
  if (!(truncation > 0.0)) throw ConfigError("truncation radius R must be positive");
  if (lattice < 5 || lattice % 2 == 0) throw ConfigError("frequency lattice size must be odd and >= 5");
  FhatGrid g;
  g.truncation = truncation;
  g.lattice = lattice;
  g.spacing = 2.0 * truncation / (lattice - 1);
  g.values.assign(static_cast<size_t>(lattice) * lattice, cplx(0.0));
  g.mask.assign(g.values.size(), 0);
  for (int i2 = 0; i2 < lattice; ++i2)
    for (int i1 = 0; i1 < lattice; ++i1)
      g.mask[static_cast<size_t>(i2) * lattice + i1] = g.z(i2, i1).norm() <= truncation * (1.0 + 1e-12);
  return g;
}

double hermitian_error(const FhatGrid& g) {
  const int m = g.lattice;
  double worst = 0.0, scale = 0.0;
  for (int i2 = 0; i2 < m; ++i2)
    for (int i1 = 0; i1 < m; ++i1) {
      if (!g.inside(i2, i1)) continue;
      scale = std::max(scale, std::abs(g.at(i2, i1)));
      worst = std::max(worst, std::abs(g.at(m - 1 - i2, m - 1 - i1) - std::conj(g.at(i2, i1))));
    }
  return scale > 0.0 ? worst / scale : 0.0;
}

// Trace samples pulled back through Phi; mapped[l] holds the quadrature
// nodes of electrode l (one node for center sampling).
cplx fhat_at(const DnMatrix& dn, const Eigen::MatrixXd& basis,
             const std::vector<std::vector<Point2>>& mapped, const Point2& z, double scale) {
  const CgoTracePair pair = make_cgo_pair(z);
  Eigen::VectorXcd p1 = Eigen::VectorXcd::Zero(mapped.size()), p2 = Eigen::VectorXcd::Zero(mapped.size());
  for (size_t l = 0; l < mapped.size(); ++l) {
    for (const auto& y : mapped[l]) {
      p1(l) += pair.phi1(y);
      p2(l) += pair.phi2(y);
    }
    p1(l) /= static_cast<double>(mapped[l].size());
    p2(l) /= static_cast<double>(mapped[l].size());
  }
  const Eigen::VectorXcd c1 = basis.transpose().cast<cplx>() * p1;
  const Eigen::VectorXcd c2 = basis.transpose().cast<cplx>() * p2;
  const cplx b = (c1.transpose() * (dn.lambda.cast<cplx>() * c2))(0) * scale;
  return -b / (2.0 * kPi * kPi * z.squaredNorm());
}

bool inside_polygon(const std::vector<Point2>& poly, const Point2& p) {
  bool in = false;
  for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point2 &a = poly[i], &b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      in = !in;
  }
  return in;
}

}  // namespace

cplx CgoTracePair::phi1(const Point2& y) const {
  return std::exp(kI * kPi * z.dot(y) + kPi * b.dot(y));
}

cplx CgoTracePair::phi2(const Point2& y) const {
  return std::exp(kI * kPi * z.dot(y) - kPi * b.dot(y));
}

CgoTracePair make_cgo_pair(const Point2& z) {
  if (!z.allFinite() || z.norm() == 0.0) throw ConfigError("make_cgo_pair: frequency z must be nonzero");
  return {z, Point2(-z.y(), z.x())};
}

cplx bilinear_form(const DnMatrix& dn, const Eigen::VectorXcd& phi1, const Eigen::VectorXcd& phi2) {
  if (phi1.size() != dn.electrodes || phi2.size() != dn.electrodes)
    throw ConfigError("bilinear_form: trace samples must have one entry per electrode (" +
                      std::to_string(dn.electrodes) + ")");
  const Eigen::MatrixXcd e = dn.basis().cast<cplx>();
  const Eigen::VectorXcd c1 = e.transpose() * phi1;
  const Eigen::VectorXcd c2 = e.transpose() * phi2;
  return (c1.transpose() * (dn.lambda.cast<cplx>() * c2))(0);
}

int FhatGrid::point_count() const {
  return static_cast<int>(std::count(mask.begin(), mask.end(), 1));
}

FhatGrid fhat_grid(const DnMatrix& dn, const QcMap& map, const FhatOptions& opt) {
  if (!(opt.det_a0 > 0.0)) throw ConfigError("fhat_grid: det A0 must be positive");
  if (opt.reference) {
    const DnMatrix& ref = *opt.reference;
    if (ref.electrodes != dn.electrodes || ref.electrode_angles != dn.electrode_angles)
      throw ConfigError("fhat_grid: reference DN data uses a different electrode layout");
  }
  FhatGrid g = empty_lattice(opt.truncation, opt.lattice);
  g.det_a0 = opt.det_a0;
  g.difference = opt.reference != nullptr;
  g.baseline = g.difference ? 1.0 : 0.0;
  g.normalization = dn.normalization;

  if (dn.radius > map.window())
    throw ConfigError("fhat_grid: the map window does not cover the domain boundary");
  // Midpoint nodes across each electrode arc for averaged sampling.
  const int nodes = opt.sampling == TraceSampling::Average ? 16 : 1;
  const double half = kPi * dn.coverage / dn.electrodes;
  std::vector<std::vector<Point2>> mapped;
  for (double th : dn.electrode_angles) {
    std::vector<Point2> pts;
    for (int q = 0; q < nodes; ++q) {
      const double t = nodes == 1 ? th : th - half + 2.0 * half * (q + 0.5) / nodes;
      pts.push_back(map.evaluate(Point2(dn.radius * std::cos(t), dn.radius * std::sin(t))));
    }
    mapped.push_back(std::move(pts));
  }
  const Eigen::MatrixXd basis = dn.basis();
  const double scale = 1.0 / std::sqrt(opt.det_a0);

  const int m = g.lattice, c = g.center();
  for (int i2 = 0; i2 < m; ++i2)
    for (int i1 = 0; i1 < m; ++i1) {
      if (!g.inside(i2, i1) || (i1 == c && i2 == c)) continue;
      const Point2 z = g.z(i2, i1);
      cplx f = fhat_at(dn, basis, mapped, z, scale);
      if (opt.reference) f -= fhat_at(*opt.reference, basis, mapped, z, scale);
      g.at(i2, i1) = f;
    }
  if (opt.zero_mode == ZeroMode::Extrapolate) {
    const cplx f1 = 0.25 * (g.at(c, c + 1) + g.at(c, c - 1) + g.at(c + 1, c) + g.at(c - 1, c));
    const cplx f2 = 0.25 * (g.at(c, c + 2) + g.at(c, c - 2) + g.at(c + 2, c) + g.at(c - 2, c));
    g.at(c, c) = (4.0 * f1 - f2) / 3.0;
  }
  g.hermitian_error = hermitian_error(g);
  return g;
}

FhatGrid fhat_from_function(const std::function<cplx(const Point2&)>& f, double truncation, int lattice) {
  FhatGrid g = empty_lattice(truncation, lattice);
  g.normalization = "analytic";
  for (int i2 = 0; i2 < lattice; ++i2)
    for (int i1 = 0; i1 < lattice; ++i1)
      if (g.inside(i2, i1)) g.at(i2, i1) = f(g.z(i2, i1));
  g.hermitian_error = hermitian_error(g);
  return g;
}

double disk_indicator_transform(const Point2& z) {
  const double r = z.norm();
  if (r < 1e-8) return kPi * (1.0 - 0.5 * kPi * kPi * r * r);
  return std::cyl_bessel_j(1.0, 2.0 * kPi * r) / r;
}

InverseResult inverse_fourier(const FhatGrid& fhat, std::span<const Point2> points) {
  struct Term {
    Point2 z;
    cplx f;
  };
  std::vector<Term> terms;
  for (int i2 = 0; i2 < fhat.lattice; ++i2)
    for (int i1 = 0; i1 < fhat.lattice; ++i1)
      if (fhat.inside(i2, i1) && fhat.at(i2, i1) != cplx(0.0)) terms.push_back({fhat.z(i2, i1), fhat.at(i2, i1)});
  if (fhat.point_count() == 0) throw ConfigError("inverse_fourier: empty frequency lattice");

  const double w = fhat.spacing * fhat.spacing;
  InverseResult out;
  out.values.reserve(points.size());
  double max_re = 0.0, max_im = 0.0;
  for (const auto& y : points) {
    cplx sum = 0.0;
    for (const auto& t : terms) sum += t.f * std::exp(-2.0 * kPi * kI * t.z.dot(y));
    sum *= w;
    max_re = std::max(max_re, std::abs(sum.real()));
    max_im = std::max(max_im, std::abs(sum.imag()));
    out.values.push_back(fhat.baseline + sum.real());
  }
  out.imag_residual = max_re > 0.0 ? max_im / max_re : max_im;
  return out;
}

InverseResult reconstruct_scalar(const FhatGrid& fhat, const QcMap& map, std::span<const Point2> points) {
  const std::vector<Point2> mapped = evaluate_map(map, points);
  return inverse_fourier(fhat, mapped);
}

std::vector<Tensor2> assemble_tensor(std::span<const double> a, const Tensor2& a0) {
  std::vector<Tensor2> out;
  out.reserve(a.size());
  for (double v : a) {
    if (!std::isfinite(v)) throw ConfigError("assemble_tensor: non-finite scalar sample");
    out.push_back(v * a0);
  }
  return out;
}

std::vector<std::pair<double, double>> ReconstructedField::cross_section() const {
  std::vector<std::pair<double, double>> out;
  const int mid = size / 2;
  for (int ix = 0; ix < size; ++ix)
    if (mask[static_cast<size_t>(mid) * size + ix]) out.emplace_back(x[ix], at(mid, ix));
  return out;
}

ReconstructedField reconstruct_field(const FhatGrid& fhat, const QcMap& map, const Tensor2& a0, int size) {
  if (size < 3 || size % 2 == 0) throw ConfigError("reconstruct_field: output grid size must be odd and >= 3");
  ReconstructedField rf;
  rf.size = size;
  rf.a0 = a0;
  const size_t count = static_cast<size_t>(size) * size;
  for (int i = 0; i < size; ++i) rf.x.push_back(-1.0 + 2.0 * i / (size - 1));
  rf.mask.assign(count, 0);
  rf.a.assign(count, std::numeric_limits<double>::quiet_NaN());
  rf.mapped.assign(count, Point2::Zero());

  std::vector<Point2> pts;
  std::vector<size_t> where;
  for (int iy = 0; iy < size; ++iy)
    for (int ix = 0; ix < size; ++ix) {
      const Point2 p(rf.x[ix], rf.x[iy]);
      if (p.norm() > 1.0 + 1e-12) continue;
      const size_t k = static_cast<size_t>(iy) * size + ix;
      rf.mask[k] = 1;
      pts.push_back(p);
      where.push_back(k);
    }
  const std::vector<Point2> mapped = evaluate_map(map, pts);
  const InverseResult inv = inverse_fourier(fhat, mapped);
  for (size_t j = 0; j < where.size(); ++j) {
    rf.a[where[j]] = inv.values[j];
    rf.mapped[where[j]] = mapped[j];
  }
  rf.imag_residual = inv.imag_residual;

  // The deformed domain on a square grid enclosing Phi(boundary).
  std::vector<Point2> boundary;
  double extent = 0.0;
  for (int k = 0; k < 720; ++k) {
    const double th = 2.0 * kPi * k / 720;
    boundary.push_back(map.evaluate(Point2(std::cos(th), std::sin(th))));
    extent = std::max(extent, boundary.back().cwiseAbs().maxCoeff());
  }
  extent *= 1.02;
  for (int i = 0; i < size; ++i) rf.atilde_x.push_back(-extent + 2.0 * extent * i / (size - 1));
  rf.atilde_mask.assign(count, 0);
  rf.atilde.assign(count, std::numeric_limits<double>::quiet_NaN());
  std::vector<Point2> ypts;
  where.clear();
  for (int iy = 0; iy < size; ++iy)
    for (int ix = 0; ix < size; ++ix) {
      const Point2 y(rf.atilde_x[ix], rf.atilde_x[iy]);
      if (!inside_polygon(boundary, y)) continue;
      const size_t k = static_cast<size_t>(iy) * size + ix;
      rf.atilde_mask[k] = 1;
      ypts.push_back(y);
      where.push_back(k);
    }
  const InverseResult invy = inverse_fourier(fhat, ypts);
  for (size_t j = 0; j < where.size(); ++j) rf.atilde[where[j]] = invy.values[j];
  rf.imag_residual = std::max(rf.imag_residual, invy.imag_residual);
  return rf;
}

}  // namespace qcal
