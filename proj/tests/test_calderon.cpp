#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "qcal/calderon.hpp"
#include "qcal/errors.hpp"
#include "qcal/phantoms.hpp"

using namespace qcal;

namespace {

constexpr double pi = std::numbers::pi;

const QcMap& identity_map() {
  static const QcMap m = solve_beltrami(extend_mu(Tensor2::Identity(), {128, 4.0, 2.0, 0.5}));
  return m;
}

struct IsoData {
  DnMatrix one;
  DnMatrix scaled;  // sigma = 1.3 everywhere
};

const IsoData& iso_data() {
  static const IsoData d = [] {
    const auto lay = place_electrodes(16, 0.5, 0.01);
    const Mesh mesh = build_disk_mesh(1.0, 0.05, lay);
    const auto pat = trig_current_patterns(lay.center_angles());
    IsoData r;
    r.one = dn_matrix(simulate_voltages(mesh, ConductivityTensorField::constant(Tensor2::Identity()), lay, pat));
    r.scaled =
        dn_matrix(simulate_voltages(mesh, ConductivityTensorField::constant(1.3 * Tensor2::Identity()), lay, pat));
    return r;
  }();
  return d;
}

}  // namespace

TEST_SUITE("calderon-recon") {
  TEST_CASE("CGO traces are harmonic and multiply to a plane wave") {
    for (const Point2 z : {Point2(0.7, -0.2), Point2(0.0, 1.5), Point2(-1.1, 0.4)}) {
      const auto pair = make_cgo_pair(z);
      CHECK(pair.b.dot(z) == doctest::Approx(0.0));
      CHECK(pair.b.norm() == doctest::Approx(z.norm()));
      const double h = 1e-3;
      for (const Point2 y : {Point2(0.3, 0.1), Point2(-0.5, 0.6)}) {
        for (auto phi : {&CgoTracePair::phi1, &CgoTracePair::phi2}) {
          const cplx c = (pair.*phi)(y);
          const cplx lap = ((pair.*phi)(y + Point2(h, 0)) + (pair.*phi)(y - Point2(h, 0)) +
                            (pair.*phi)(y + Point2(0, h)) + (pair.*phi)(y - Point2(0, h)) - 4.0 * c) /
                           (h * h);
          // Five-point stencil truncation (h^2/6) max|zeta_j|^4 |phi| plus roundoff.
          const double bound = h * h / 6.0 * std::pow(2.0 * pi * z.norm(), 4) + 1e-8;
          CHECK(std::abs(lap) <= bound * std::abs(c));
        }
        const cplx wave = std::exp(cplx(0.0, 2.0 * pi * z.dot(y)));
        CHECK(std::abs(pair.phi1(y) * pair.phi2(y) - wave) < 1e-12 * std::abs(pair.phi1(y) * pair.phi2(y)) + 1e-12);
      }
    }
    CHECK_THROWS_AS(make_cgo_pair(Point2(0, 0)), ConfigError);
  }

  TEST_CASE("bilinear form reproduces int cos(k t) Lambda cos(k t) = pi k") {
    const auto lay = place_electrodes(16, 0.5, 0.01);
    const auto angles = lay.center_angles();
    const auto dn = analytic_dn_matrix(1.0, trig_current_patterns(angles), angles);
    for (int k = 1; k <= 4; ++k) {
      Eigen::VectorXcd c(16);
      for (int l = 0; l < 16; ++l) c(l) = std::cos(k * angles[l]);
      CHECK(bilinear_form(dn, c, c).real() == doctest::Approx(pi * k).epsilon(1e-12));
    }
    CHECK_THROWS_AS(bilinear_form(dn, Eigen::VectorXcd::Zero(8), Eigen::VectorXcd::Zero(8)), ConfigError);
  }

  TEST_CASE("disk indicator transform against polar quadrature") {
    // Independent oracle: midpoint rule for int_{|x|<=1} cos(2 pi z.x) dx.
    for (const Point2 z : {Point2(0.3, 0.0), Point2(0.5, 0.5), Point2(-1.2, 0.7)}) {
      const int nr = 400, nt = 400;
      double sum = 0.0;
      for (int i = 0; i < nr; ++i) {
        const double r = (i + 0.5) / nr;
        for (int j = 0; j < nt; ++j) {
          const double t = 2.0 * pi * (j + 0.5) / nt;
          sum += std::cos(2.0 * pi * r * (z.x() * std::cos(t) + z.y() * std::sin(t))) * r;
        }
      }
      sum *= (1.0 / nr) * (2.0 * pi / nt);
      CHECK(disk_indicator_transform(z) == doctest::Approx(sum).epsilon(1e-4));
    }
    CHECK(disk_indicator_transform(Point2(0, 0)) == doctest::Approx(pi));
  }

  TEST_CASE("inverse transform of a Gaussian") {
    // exp(-pi|x|^2) is its own Fourier transform.
    const FhatGrid f = fhat_from_function([](const Point2& z) { return cplx(std::exp(-pi * z.squaredNorm())); }, 3.0, 61);
    std::vector<Point2> pts = {Point2(0, 0), Point2(0.4, 0.1), Point2(-0.7, 0.5)};
    const auto inv = inverse_fourier(f, pts);
    for (size_t k = 0; k < pts.size(); ++k)
      CHECK(inv.values[k] == doctest::Approx(std::exp(-pi * pts[k].squaredNorm())).epsilon(1e-6));
    CHECK(inv.imag_residual < 1e-12);
  }

  TEST_CASE("F-hat of the homogeneous disk: Hermitian and close to the indicator transform") {
    FhatOptions opt;
    opt.truncation = 1.0;
    opt.lattice = 21;
    const FhatGrid f = fhat_grid(iso_data().one, identity_map(), opt);
    CHECK(f.hermitian_error < 1e-12);
    double worst = 0.0;
    for (int a = 0; a < f.lattice; ++a)
      for (int b = 0; b < f.lattice; ++b)
        if (f.inside(a, b)) worst = std::max(worst, std::abs(f.at(a, b) - disk_indicator_transform(f.z(a, b))));
    CHECK(worst / pi < 0.05);
    CHECK_FALSE(f.difference);
    CHECK(f.baseline == 0.0);
  }

  TEST_CASE("difference mode: identical data gives the background exactly") {
    FhatOptions opt;
    opt.reference = &iso_data().one;
    const FhatGrid f = fhat_grid(iso_data().one, identity_map(), opt);
    for (const auto& v : f.values) CHECK(std::abs(v) == 0.0);
    const auto field = reconstruct_field(f, identity_map(), Tensor2::Identity(), 21);
    for (double a : field.a)
      if (!std::isnan(a)) CHECK(a == 1.0);
  }

  TEST_CASE("difference mode detects a uniform increase") {
    FhatOptions opt;
    opt.truncation = 1.8;
    opt.reference = &iso_data().one;
    const FhatGrid f = fhat_grid(iso_data().scaled, identity_map(), opt);
    const auto field = reconstruct_field(f, identity_map(), Tensor2::Identity(), 21);
    const double center = field.at(10, 10);
    CHECK(center > 1.15);
    CHECK(center < 1.45);
    CHECK(field.imag_residual < 1e-6);
  }

  TEST_CASE("det A0 scaling: Lambda / sqrt(det) equals data of the unit background") {
    // Continuum sigma = 1.3 data with det A0 = 1.69 is exactly sigma = 1 data.
    const auto lay = place_electrodes(16, 0.5, 0.01);
    const auto angles = lay.center_angles();
    const auto pat = trig_current_patterns(angles);
    FhatOptions a, b;
    a.det_a0 = 1.69;
    const FhatGrid f1 = fhat_grid(analytic_dn_matrix(1.3, pat, angles), identity_map(), a);
    const FhatGrid f2 = fhat_grid(analytic_dn_matrix(1.0, pat, angles), identity_map(), b);
    for (size_t k = 0; k < f1.values.size(); ++k)
      CHECK(std::abs(f1.values[k] - f2.values[k]) <= 1e-12 * std::abs(f2.values[k]) + 1e-12);
  }

  TEST_CASE("tensor assembly is a(x) A0") {
    Tensor2 a0;
    a0 << 1.0, 0.0, 0.0, 4.0;
    const std::vector<double> a = {1.0, 2.5};
    const auto t = assemble_tensor(a, a0);
    CHECK((t[1] - 2.5 * a0).norm() == 0.0);
    const std::vector<double> bad = {std::nan("")};
    CHECK_THROWS_AS(assemble_tensor(bad, a0), ConfigError);
  }

  TEST_CASE("lattice parameters are validated") {
    FhatOptions opt;
    opt.lattice = 32;
    CHECK_THROWS_AS(fhat_grid(iso_data().one, identity_map(), opt), ConfigError);
    opt.lattice = 33;
    opt.truncation = -1.0;
    CHECK_THROWS_AS(fhat_grid(iso_data().one, identity_map(), opt), ConfigError);
  }
}

TEST_SUITE("calderon-recon") {
  TEST_CASE("CGO pair for z = (1, 0)") {
    const auto p = make_cgo_pair(Point2(1.0, 0.0));
    CHECK((p.b - Point2(0.0, 1.0)).norm() == 0.0);
    const Point2 y(0.3, -0.2);
    CHECK(std::abs(p.phi1(y) - std::exp(cplx(pi * y.y(), pi * y.x()))) < 1e-14);
  }

  TEST_CASE("bilinear form: orthogonality and symmetry") {
    const auto lay = place_electrodes(16, 0.5, 0.01);
    const auto angles = lay.center_angles();
    const auto dn = analytic_dn_matrix(1.0, trig_current_patterns(angles), angles);
    for (int k = 1; k <= 4; ++k)
      for (int m = 1; m <= 4; ++m) {
        Eigen::VectorXcd c(16), s(16);
        for (int l = 0; l < 16; ++l) c(l) = std::cos(k * angles[l]), s(l) = std::sin(m * angles[l]);
        CHECK(std::abs(bilinear_form(dn, c, s)) < 1e-10);
      }
    Eigen::VectorXcd a = Eigen::VectorXcd::Random(16), b = Eigen::VectorXcd::Random(16);
    CHECK(std::abs(bilinear_form(iso_data().one, a, b) - bilinear_form(iso_data().one, b, a)) < 1e-10);
  }

  TEST_CASE("lattice bookkeeping and Hermitian symmetry of CEM F-hat") {
    FhatOptions opt;
    opt.truncation = 2.0;
    opt.lattice = 33;
    const FhatGrid f = fhat_grid(iso_data().one, identity_map(), opt);
    CHECK(f.truncation == 2.0);
    CHECK(f.lattice == 33);
    CHECK(f.spacing == doctest::Approx(0.125));
    int inside = 0;
    for (int a = 0; a < 33; ++a)
      for (int b = 0; b < 33; ++b) {
        inside += f.inside(a, b);
        CHECK(f.inside(a, b) == (f.z(a, b).norm() <= 2.0 + 1e-12));
        if (f.inside(a, b)) {
          CHECK(std::isfinite(std::abs(f.at(a, b))));
          const cplx mirror = f.at(32 - a, 32 - b);
          CHECK(std::abs(mirror - std::conj(f.at(a, b))) <= 1e-6 * std::abs(f.at(a, b)) + 1e-12);
        }
      }
    CHECK(f.point_count() == inside);
  }

  TEST_CASE("truncated inverse transform of the exact indicator transform at R = 2") {
    const auto indicator = [](const Point2& z) { return cplx(disk_indicator_transform(z)); };
    const Point2 origin(0.0, 0.0);
    const auto at0 = [&](int m) {
      return inverse_fourier(fhat_from_function(indicator, 2.0, m), std::span<const Point2>(&origin, 1)).values[0];
    };
    const double a33 = at0(33), a65 = at0(65);
    CHECK(a33 >= 0.85);
    CHECK(a33 <= 1.15);
    CHECK(std::abs(a65 - a33) <= 0.01 * std::abs(a33));
    const FhatGrid zero = fhat_from_function([](const Point2&) { return cplx(0.0); }, 2.0, 33);
    std::vector<Point2> pts = {origin, Point2(0.5, 0.2)};
    for (double v : inverse_fourier(zero, pts).values) CHECK(v == 0.0);
  }

  TEST_CASE("reconstructed field: shape, mask, identity map gives a = atilde") {
    const FhatGrid f = fhat_from_function([](const Point2& z) { return cplx(disk_indicator_transform(z)); }, 1.8, 33);
    const auto field = reconstruct_field(f, identity_map(), Tensor2::Identity(), 101);
    CHECK(field.size == 101);
    CHECK(field.a.size() == 101u * 101u);
    CHECK(field.x.front() == -1.0);
    CHECK(field.x.back() == 1.0);
    std::vector<Point2> inside;
    std::vector<size_t> index;
    for (int iy = 0; iy < 101; ++iy)
      for (int ix = 0; ix < 101; ++ix) {
        const Point2 p(field.x[ix], field.x[iy]);
        const size_t k = static_cast<size_t>(iy) * 101 + ix;
        CHECK(std::isnan(field.a[k]) == (p.norm() > 1.0));
        if (p.norm() <= 1.0 && (iy * 101 + ix) % 37 == 0) inside.push_back(p), index.push_back(k);
      }
    const auto direct = inverse_fourier(f, inside);
    for (size_t j = 0; j < inside.size(); ++j) CHECK(field.a[index[j]] == doctest::Approx(direct.values[j]).epsilon(1e-12));
  }

  TEST_CASE("catalog maps: cross-section of a radial target is even in x") {
    const FhatGrid f = fhat_from_function([](const Point2& z) { return cplx(disk_indicator_transform(z)); }, 1.8, 33);
    Tensor2 a0;
    a0 << 1.0, 0.0, 0.0, 4.0;
    const QcMap m = solve_beltrami(extend_mu(a0, {128, 4.0, 2.0, 0.5}));
    const auto field = reconstruct_field(f, m, a0, 51);
    const auto cs = field.cross_section();
    for (size_t k = 0; k < cs.size(); ++k) {
      const double a = cs[k].second, b = cs[cs.size() - 1 - k].second;
      CHECK(std::abs(a - b) <= 0.05 * std::max(std::abs(a), std::abs(b)) + 1e-12);
    }
    const auto t = assemble_tensor(std::vector<double>{1.0}, a0);
    CHECK(t[0] == a0);
  }
}
