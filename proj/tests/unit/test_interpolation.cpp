#include <doctest.h>

#include <cmath>
#include <numbers>

#include "floqspec/errors.hpp"
#include "floqspec/interpolation.hpp"

using namespace floqspec;

TEST_CASE("periodic spline passes through the samples and converges at fourth order") {
  const double period = 2.0;
  const double w = 2.0 * std::numbers::pi / period;
  auto f = [w](double t) { return Complex(std::cos(w * t), 0.5 * std::sin(2.0 * w * t)); };
  double previous = 0.0;
  for (int m : {32, 64, 128}) {
    CMatrix samples(m, 1);
    for (int j = 0; j < m; ++j) samples(j, 0) = f(period * j / m);
    const PeriodicSpline spline(samples, period);
    CHECK(std::abs(spline(period * 5 / m)(0) - f(period * 5 / m)) < 1e-14);
    double worst = 0.0;
    for (double t = 0.0; t < period; t += 0.01) worst = std::max(worst, std::abs(spline(t)(0) - f(t)));
    // Periodic extension.
    CHECK(std::abs(spline(0.37 + 3.0 * period)(0) - spline(0.37)(0)) < 1e-13);
    if (previous > 0.0) CHECK(previous / worst > 12.0);
    previous = worst;
  }
  CHECK(previous < 1e-5);
}

TEST_CASE("periodic spline knots and validation") {
  CMatrix samples = CMatrix::Ones(8, 2);
  const PeriodicSpline spline(samples, 4.0);
  const auto knots = spline.knots();
  REQUIRE(knots.size() == 7);
  CHECK(knots.front() == doctest::Approx(0.5));
  CHECK(spline(1.234)(1) == Complex(1.0));
  CHECK_THROWS(PeriodicSpline(CMatrix::Ones(3, 1), 1.0));
}
