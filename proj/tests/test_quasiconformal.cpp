#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "qcal/errors.hpp"
#include "qcal/grid_transforms.hpp"
#include "qcal/phantoms.hpp"
#include "qcal/quasiconformal.hpp"

using namespace qcal;

namespace {

Tensor2 diag(double a, double b) {
  Tensor2 t;
  t << a, 0.0, 0.0, b;
  return t;
}

Tensor2 random_spd(std::mt19937& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::Matrix2d m;
  m << u(gen), u(gen), u(gen), u(gen);
  return m * m.transpose() + 0.05 * Tensor2::Identity();
}

// Maps are cheap enough at n = 256 for unit tests.
const QcMap& map_a03() {
  static const QcMap m = solve_beltrami(extend_mu(diag(1.0, 4.0), {256, 4.0, 2.0, 0.5}));
  return m;
}

}  // namespace

TEST_SUITE("quasiconformal") {
  TEST_CASE("catalog Beltrami coefficients") {
    const double expected[4] = {0.0655, -0.0655, 0.3333, -0.3333};
    const auto cat = a0_catalog();
    for (int k = 0; k < 4; ++k) {
      const cplx mu = beltrami_coefficient(cat[k].tensor);
      CHECK(std::abs(mu - cplx(expected[k])) <= 5e-5);
    }
    CHECK(std::abs(beltrami_coefficient(diag(1.0, 4.0)) - cplx(1.0 / 3.0)) < 1e-15);
    CHECK(std::abs(beltrami_coefficient(Tensor2::Identity())) == 0.0);
  }

  TEST_CASE("property: |mu| < 1, scale invariance, rotation keeps |mu|") {
    std::mt19937 gen(20240611);
    for (int trial = 0; trial < 200; ++trial) {
      const Tensor2 a = random_spd(gen);
      const cplx mu = beltrami_coefficient(a);
      CHECK(std::abs(mu) < 1.0);
      CHECK(std::abs(beltrami_coefficient(3.7 * a) - mu) < 1e-14);
      const double t = 0.3 * trial;
      Eigen::Matrix2d r;
      r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
      CHECK(std::abs(beltrami_coefficient(r * a * r.transpose())) == doctest::Approx(std::abs(mu)).epsilon(1e-12));
      // |mu| = (sqrt(l1) - sqrt(l2)) / (sqrt(l1) + sqrt(l2)) from the eigenvalues.
      Eigen::SelfAdjointEigenSolver<Tensor2> es(a);
      const double s1 = std::sqrt(es.eigenvalues()(1)), s0 = std::sqrt(es.eigenvalues()(0));
      CHECK(std::abs(mu) == doctest::Approx((s1 - s0) / (s1 + s0)).epsilon(1e-10));
    }
  }

  TEST_CASE("support ramp is C1 and has the right plateaus") {
    const double r = 2.0, w = 0.5;
    CHECK(support_ramp(0.0, r, w) == 1.0);
    CHECK(support_ramp(1.5, r, w) == 1.0);
    CHECK(support_ramp(2.0, r, w) == 0.0);
    CHECK(support_ramp(3.0, r, w) == 0.0);
    const double eps = 1e-6;
    for (double rho : {1.5, 2.0}) {
      const double left = (support_ramp(rho, r, w) - support_ramp(rho - eps, r, w)) / eps;
      const double right = (support_ramp(rho + eps, r, w) - support_ramp(rho, r, w)) / eps;
      CHECK(std::abs(left) < 1e-4);
      CHECK(std::abs(right) < 1e-4);
    }
    for (double rho = 1.5; rho < 2.0; rho += 0.01) CHECK(support_ramp(rho + 0.01, r, w) <= support_ramp(rho, r, w));
  }

  TEST_CASE("extended mu: constant inside, zero outside r") {
    const MuGrid m = extend_mu(diag(1.0, 4.0), {128, 4.0, 2.0, 0.5});
    const ComplexGrid& g = m.mu;
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix) {
        const double rho = std::abs(g.point(iy, ix));
        if (rho >= 2.0) CHECK(g.at(iy, ix) == cplx(0.0));
        if (rho <= 1.5) CHECK(std::abs(g.at(iy, ix) - m.mu0) < 1e-15);
      }
    CHECK(m.sup_abs() == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(extend_mu(diag(1.0, 4.0), {128, 4.0, 1.2, 0.5}), ConfigError);
    CHECK_THROWS_AS(extend_mu(diag(1.0, 4.0), {128, 3.0, 2.0, 0.5}), ConfigError);
  }

  TEST_CASE("Beurling transform maps dbar f to d f") {
    // f = exp(-a|z|^2): dbar f = -a z f, d f = -a conj(z) f.
    const double a = 2.0;
    ComplexGrid dbar(256, 4.0), d(256, 4.0);
    for (int iy = 0; iy < 256; ++iy)
      for (int ix = 0; ix < 256; ++ix) {
        const cplx z = dbar.point(iy, ix);
        const double f = std::exp(-a * std::norm(z));
        dbar.at(iy, ix) = -a * z * f;
        d.at(iy, ix) = -a * std::conj(z) * f;
      }
    const ComplexGrid t = hilbert_transform(dbar, 2);
    double err = 0.0;
    for (size_t k = 0; k < t.values.size(); ++k) err = std::max(err, std::abs(t.values[k] - d.values[k]));
    CHECK(err < 1e-6);
  }

  TEST_CASE("Cauchy transform of a Gaussian matches the closed form") {
    // u = (1 - exp(-a|z|^2)) / (a z) has dbar u = exp(-a|z|^2), u(0) = 0
    // and decays at infinity.
    const double a = 3.0;
    ComplexGrid g(256, 4.0);
    for (int iy = 0; iy < 256; ++iy)
      for (int ix = 0; ix < 256; ++ix) g.at(iy, ix) = std::exp(-a * std::norm(g.point(iy, ix)));
    const ComplexGrid p = cauchy_transform(g);
    double err = 0.0;
    for (int iy = 64; iy < 192; ++iy)
      for (int ix = 64; ix < 192; ++ix) {
        const cplx z = g.point(iy, ix);
        const cplx u = std::abs(z) < 1e-12 ? cplx(0.0) : (1.0 - std::exp(-a * std::norm(z))) / (a * z);
        err = std::max(err, std::abs(p.at(iy, ix) - u));
      }
    CHECK(err < 2e-3);
  }

  TEST_CASE("A0 = I gives the identity map") {
    const QcMap m = solve_beltrami(extend_mu(Tensor2::Identity(), {128, 4.0, 2.0, 0.5}));
    double err = 0.0;
    for (int iy = 0; iy < 128; ++iy)
      for (int ix = 0; ix < 128; ++ix) err = std::max(err, std::abs(m.phi().at(iy, ix) - m.phi().point(iy, ix)));
    CHECK(err <= 1e-10);
  }

  TEST_CASE("Scheme 1 on A0^3: residual, contraction, affine interior") {
    const QcMap& m = map_a03();
    CHECK(m.residual <= 1e-3);
    CHECK(m.contraction <= 1.0 / 3.0 + 0.05);
    CHECK(m.min_jacobian > 0.0);
    for (size_t k = 1; k < m.increments.size(); ++k) CHECK(m.increments[k] < m.increments[k - 1]);
    // Inside the constant region the map is z + mu conj(z) up to the
    // ramp's small holomorphic correction.
    for (const Point2 x : {Point2(1.0, 0.0), Point2(0.0, 1.0), Point2(0.6, -0.6)}) {
      const cplx z(x.x(), x.y());
      const cplx expect = z + (1.0 / 3.0) * std::conj(z);
      const Point2 y = m.evaluate(x);
      CHECK(std::abs(cplx(y.x(), y.y()) - expect) < 2e-3);
    }
  }

  TEST_CASE("far field decays like c1 / z") {
    // Outside supp mu the map is holomorphic, Phi(z) = z + c1/z + O(z^-3)
    // by the odd symmetry, with c1 = (1/pi) int mu (h* + 1) dA.
    const QcMap& m = map_a03();
    const MuGrid mu = extend_mu(diag(1.0, 4.0), {256, 4.0, 2.0, 0.5});
    const double h = mu.mu.spacing();
    cplx c1 = 0.0;
    for (size_t k = 0; k < mu.mu.values.size(); ++k) c1 += mu.mu.values[k] * (m.h_star.values[k] + 1.0);
    c1 *= h * h / std::numbers::pi;
    CHECK(std::abs(c1) > 0.5);
    const ComplexGrid& phi = m.phi();
    for (int iy = 0; iy < phi.n; ++iy)
      for (int ix = 0; ix < phi.n; ++ix) {
        const cplx z = phi.point(iy, ix);
        if (std::abs(z) < 3.0 || std::abs(z) > 3.5) continue;
        CHECK(std::abs((phi.at(iy, ix) - z) * z - c1) < 0.05 * std::abs(c1));
      }
  }

  TEST_CASE("map inversion round trip") {
    const QcMap& m = map_a03();
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    for (int k = 0; k < 50; ++k) {
      const Point2 x(u(gen), u(gen));
      CHECK((m.invert(m.evaluate(x)) - x).norm() < 1e-8);
    }
    CHECK_THROWS_AS(m.evaluate(Point2(3.5, 0.0)), ConfigError);
  }

  TEST_CASE("pushforward of A0 is isotropic with value sqrt(det A0)") {
    const QcMap& m = map_a03();
    std::vector<Point2> pts;
    for (double r : {0.0, 0.3, 0.6, 0.9})
      for (int k = 0; k < 8; ++k) pts.emplace_back(r * std::cos(k * 0.785), r * std::sin(k * 0.785));
    for (const auto& t : pushforward_tensor(ConductivityTensorField::constant(diag(1.0, 4.0)), m, pts)) {
      CHECK(std::abs(t(0, 1)) < 1e-2);
      CHECK(t(0, 0) == doctest::Approx(2.0).epsilon(1e-2));
      CHECK(t(1, 1) == doctest::Approx(2.0).epsilon(1e-2));
    }
  }

  TEST_CASE("sup|mu| >= 1 is rejected") {
    MuGrid bad = extend_mu(diag(1.0, 4.0), {64, 4.0, 2.0, 0.5});
    bad.mu.at(32, 32) = 1.0;
    CHECK_THROWS_AS(solve_beltrami(bad), ConfigError);
  }
}

namespace {

// dbar = (d/dx + i d/dy) / 2 with fourth-order centered differences.
cplx dbar4(const ComplexGrid& g, int iy, int ix) {
  const double h = g.spacing();
  const auto d = [&](int dy, int dx) {
    return (8.0 * (g.at(iy + dy, ix + dx) - g.at(iy - dy, ix - dx)) -
            (g.at(iy + 2 * dy, ix + 2 * dx) - g.at(iy - 2 * dy, ix - 2 * dx))) /
           (12.0 * h);
  };
  return 0.5 * (d(0, 1) + cplx(0.0, 1.0) * d(1, 0));
}

}  // namespace

TEST_SUITE("quasiconformal") {
  TEST_CASE("Beltrami coefficient of a tensor with off-diagonal entries") {
    Tensor2 a;
    a << 2.0, 0.5, 0.5, 1.0;
    const cplx mu = beltrami_coefficient(a);
    const double d = 3.0 + 2.0 * std::sqrt(1.75);
    CHECK(std::abs(mu - cplx(-1.0, -1.0) / d) < 1e-15);
    CHECK(mu.real() == doctest::Approx(-0.177116).epsilon(1e-5));
  }

  TEST_CASE("ramp midpoint gives half of mu0") {
    const MuGrid m = extend_mu(diag(1.0, 4.0), {256, 4.0, 2.0, 0.5});
    CHECK(support_ramp(1.75, 2.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(m.mu.at(128, 128) - cplx(1.0 / 3.0)) < 1e-12);
    const MuGrid zero = extend_mu(Tensor2::Identity(), {64, 4.0, 2.0, 0.5});
    CHECK(zero.sup_abs() == 0.0);
  }

  TEST_CASE("Beurling transform: zero in, zero out; Plancherel") {
    ComplexGrid g(128, 4.0);
    const ComplexGrid z = hilbert_transform(g);
    CHECK(z.sup_norm() == 0.0);
    std::mt19937 gen(11);
    std::normal_distribution<double> n(0.0, 1.0);
    for (auto& v : g.values) v = {n(gen), n(gen)};
    // The zero-frequency coefficient is dropped, so remove the mean first.
    cplx mean = 0.0;
    for (const auto& v : g.values) mean += v;
    mean /= static_cast<double>(g.values.size());
    for (auto& v : g.values) v -= mean;
    const ComplexGrid t = hilbert_transform(g);
    CHECK(t.l2_norm() == doctest::Approx(g.l2_norm()).epsilon(1e-10));
  }

  TEST_CASE("Cauchy transform: dbar P[g] = g, P[g](0) = 0, P[0] = 0") {
    // n = 512: at n = 256 the bump's steep flank leaves ~2e-4 of quadrature error.
    ComplexGrid g(512, 4.0);
    CHECK(cauchy_transform(g).sup_norm() == 0.0);
    // Smooth compactly supported bump.
    for (int iy = 0; iy < 512; ++iy)
      for (int ix = 0; ix < 512; ++ix) {
        const double r2 = std::norm(g.point(iy, ix));
        g.at(iy, ix) = r2 < 1.0 ? cplx(std::exp(-1.0 / (1.0 - r2))) : 0.0;
      }
    const ComplexGrid p = cauchy_transform(g);
    CHECK(std::abs(p.at(256, 256)) <= 1e-12);
    double err = 0.0;
    for (int iy = 128; iy < 384; ++iy)
      for (int ix = 128; ix < 384; ++ix) err = std::max(err, std::abs(dbar4(p, iy, ix) - g.at(iy, ix)));
    CAPTURE(err);
    CHECK(err <= 1e-4 * g.sup_norm());
  }

  TEST_CASE("mu = 0: one iteration, exact identity, grid interpolation consistency") {
    const QcMap m = solve_beltrami(extend_mu(Tensor2::Identity(), {64, 4.0, 2.0, 0.5}));
    CHECK(m.iterations <= 1);
    for (int iy = 0; iy < 64; iy += 7)
      for (int ix = 0; ix < 64; ix += 5) {
        const cplx z = m.phi().point(iy, ix);
        if (std::abs(z.real()) > 2.0 || std::abs(z.imag()) > 2.0) continue;
        const Point2 y = m.evaluate(Point2(z.real(), z.imag()));
        CHECK(std::abs(cplx(y.x(), y.y()) - z) <= 1e-12);
      }
    const auto t = pushforward_tensor(ConductivityTensorField::constant(Tensor2::Identity()), m,
                                      std::vector<Point2>{Point2(0.2, 0.3), Point2(-0.7, 0.1)});
    for (const auto& a : t) CHECK((a - Tensor2::Identity()).norm() < 1e-12);
  }

  TEST_CASE("grid nodes evaluate to the stored samples") {
    const QcMap& m = map_a03();
    for (int iy = 70; iy < 190; iy += 13)
      for (int ix = 70; ix < 190; ix += 11) {
        const cplx z = m.phi().point(iy, ix);
        const Point2 y = m.evaluate(Point2(z.real(), z.imag()));
        CHECK(std::abs(cplx(y.x(), y.y()) - m.phi().at(iy, ix)) == 0.0);
      }
  }

  TEST_CASE("round trip on random interior points and on the boundary circle") {
    const QcMap& m = map_a03();
    std::mt19937 gen(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int done = 0;
    while (done < 1000) {
      const Point2 x(u(gen), u(gen));
      if (x.norm() >= 1.0) continue;
      ++done;
      REQUIRE((m.invert(m.evaluate(x)) - x).norm() < 1e-7);
    }
    for (int k = 0; k < 360; ++k) {
      const Point2 x(std::cos(k * std::numbers::pi / 180), std::sin(k * std::numbers::pi / 180));
      CHECK(std::abs(m.invert(m.evaluate(x)).norm() - 1.0) < 1e-6);
    }
  }

  TEST_CASE("orientation and injectivity on the grid") {
    const QcMap& m = map_a03();
    CHECK(m.min_jacobian > 0.0);
    // No two grid images within half a pixel: bucket the images by pixel.
    const ComplexGrid& phi = m.phi();
    const double h = phi.spacing();
    std::map<std::pair<long, long>, std::vector<cplx>> buckets;
    for (const auto& v : phi.values)
      buckets[{std::lround(std::floor(v.real() / h)), std::lround(std::floor(v.imag() / h))}].push_back(v);
    double closest = 1e9;
    for (const auto& [key, pts] : buckets)
      for (long dy = -1; dy <= 1; ++dy)
        for (long dx = -1; dx <= 1; ++dx) {
          const auto it = buckets.find({key.first + dx, key.second + dy});
          if (it == buckets.end()) continue;
          for (const auto& a : pts)
            for (const auto& b : it->second)
              if (&a != &b) closest = std::min(closest, std::abs(a - b));
        }
    CHECK(closest > 0.5 * h);
  }
}
