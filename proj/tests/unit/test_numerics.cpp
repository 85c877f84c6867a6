#include <doctest.h>

#include <cmath>
#include <numbers>

#include "floqspec/errors.hpp"
#include "floqspec/numerics.hpp"

using namespace floqspec;

TEST_CASE("expm1 matches exp - 1 and keeps small-argument accuracy") {
  const Complex z{0.3, -1.2};
  CHECK(std::abs(floqspec::expm1(z) - (std::exp(z) - 1.0)) < 1e-15);
  const Complex tiny{1e-12, 2e-12};
  // e^z - 1 = z + z^2/2 + ...
  CHECK(std::abs(floqspec::expm1(tiny) - (tiny + 0.5 * tiny * tiny)) < 1e-27);
}

TEST_CASE("reduce_to_period maps onto [0, T)") {
  CHECK(reduce_to_period(0.0, 2.0) == 0.0);
  CHECK(reduce_to_period(2.0, 2.0) == 0.0);
  CHECK(reduce_to_period(5.5, 2.0) == doctest::Approx(1.5));
  CHECK(reduce_to_period(-0.5, 2.0) == doctest::Approx(1.5));
  // A few ulps below a period boundary lands on the next period's start.
  CHECK(reduce_to_period(std::nextafter(6.0, 0.0), 2.0) == 0.0);
}

TEST_CASE("upsilon equals the geometric series and flags resonances") {
  const double period = 0.8;
  const Complex x{-0.7, 2.1};
  Complex sum = 0.0;
  for (int n = 1; n < 400; ++n) sum += std::exp(static_cast<double>(n) * x * period);
  CHECK(std::abs(upsilon(x, period) - sum) < 1e-13);
  CHECK_THROWS_AS(upsilon(Complex(0.0, 2.0 * std::numbers::pi / period), period),
                  ResonantDenominatorError);
}

TEST_CASE("chessboard sums match direct summation") {
  const double period = 1.1;
  for (Complex y : {Complex(-0.4, 0.9), Complex(-2.0, -3.0), Complex(-1e-10, 0.0)}) {
    for (int k : {1, 2, 5, 13}) {
      const Complex z = std::exp(y * period);
      Complex boundary = 0.0;
      Complex board = 0.0;
      for (int j = 1; j <= k; ++j) boundary += std::pow(z, j);
      for (int j = 1; j < k; ++j) board += static_cast<double>(k - j) * std::pow(z, j);
      CHECK(std::abs(boundary_weight(y, period, k) - boundary) < 1e-12 * (1.0 + std::abs(boundary)));
      CHECK(std::abs(chessboard_weight(y, period, k) - board) < 1e-12 * (1.0 + std::abs(board)));
      if (std::abs(1.0 - z) > 1e-6) {
        // k eps Upsilon = board.
        CHECK(std::abs(static_cast<double>(k) * chessboard_epsilon(y, period, k) * upsilon(y, period) -
                       board) < 1e-10 * (1.0 + std::abs(board)));
      }
    }
  }
  // Near z = 1: eps ~ (k - 1)(1 - z) / 2 -> 0.
  const Complex y(1e-9, 0.0);
  CHECK(std::abs(chessboard_epsilon(y, period, 7) + 3.0 * y * period) < 1e-15);
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (std::size_t n : {2u, 8u, 16u, 24u}) {
    const auto& rule = gauss_legendre(n);
    REQUIRE(rule.nodes.size() == n);
    double weights = 0.0;
    double moment = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      weights += rule.weights[i];
      moment += rule.weights[i] * std::pow(rule.nodes[i], static_cast<double>(2 * n - 2));
    }
    CHECK(weights == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(moment == doctest::Approx(2.0 / static_cast<double>(2 * n - 1)).epsilon(1e-13));
  }
}

TEST_CASE("condition number of a diagonal matrix") {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 4.0;
  m(1, 1) = Complex(0.0, 0.5);
  CHECK(condition_number(m) == doctest::Approx(8.0));
}

TEST_CASE("tolerances are validated") {
  CHECK_NOTHROW(IntegrationTolerances{}.validate());
  CHECK_THROWS_AS((IntegrationTolerances{0.0, 1e-12}.validate()), ConfigError);
  CHECK_THROWS_AS((IntegrationTolerances{1e-10, -1.0}.validate()), ConfigError);
}
