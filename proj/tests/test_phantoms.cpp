#include <doctest.h>

#include "qcal/errors.hpp"
#include "qcal/phantoms.hpp"

using namespace qcal;

TEST_SUITE("phantoms") {
  TEST_CASE("sigma_M profile") {
    const auto s13 = sigma_profile(1.3);
    CHECK(s13(Point2(0.25, 0.0)) == 1.3);
    CHECK(s13(Point2(0.0, 0.49)) == 1.3);
    CHECK(s13(Point2(0.5, 0.0)) == 1.0);
    const auto s4 = sigma_profile(4.0);
    CHECK(s4(Point2(0.75, 0.0)) == 1.0);
    CHECK(s4(Point2(0.0, 0.0)) == 4.0);
    CHECK_THROWS_AS(sigma_profile(0.0), ConfigError);
  }

  TEST_CASE("A0 catalog") {
    const auto cat = a0_catalog();
    CHECK(cat[0].name == "A0_1");
    CHECK(cat[0].tensor(1, 1) == 1.3);
    CHECK(cat[1].tensor(0, 0) == 1.3);
    CHECK(cat[2].tensor(1, 1) == 4.0);
    CHECK(cat[3].tensor(0, 0) == 4.0);
    for (const auto& e : cat) CHECK(e.tensor(0, 1) == 0.0);
  }

  TEST_CASE("phantom tensors") {
    const auto a1 = phantom_by_name("A1").field();
    Tensor2 expect;
    expect << 1.3, 0.0, 0.0, 1.69;
    CHECK((a1(Point2(0, 0)) - expect).norm() < 1e-15);
    const auto a4 = phantom_by_name("A4");
    expect << 4.0, 0.0, 0.0, 1.0;
    CHECK((a4.field()(Point2(0.75, 0.0)) - expect).norm() == 0.0);
    CHECK((a4.background_field()(Point2(0.0, 0.0)) - expect).norm() == 0.0);
    CHECK(a4.field().factored());
    CHECK(a4.field().ellipticity() == doctest::Approx(1.0));
    CHECK_THROWS_AS(phantom_by_name("A5"), ConfigError);
  }

  TEST_CASE("analytic disk DN") {
    CHECK(analytic_disk_dn(2.0, 3) == 6.0);
    CHECK(analytic_disk_dn(1.0, -2) == 2.0);
    CHECK_THROWS_AS(analytic_disk_dn(1.0, 0), ConfigError);
  }
}
