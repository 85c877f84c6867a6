#include <doctest.h>

#include <cmath>

#include "floqspec/dpo.hpp"
#include "floqspec/errors.hpp"
#include "floqspec/oracle.hpp"
#include "support.hpp"

using namespace floqspec;
using floqspec::test::relative_error;

TEST_CASE("Lyapunov fixed point of a constant system") {
  // L = -I, B = sqrt(2) I, G = I: 2X = B G B^T gives X = I.
  const PeriodicLinearSystem system(
      2, 2, 1.0, [](double) { return CMatrix(-CMatrix::Identity(2, 2)); },
      [](double) { return CMatrix(std::sqrt(2.0) * CMatrix::Identity(2, 2)); }, CMatrix::Identity(2, 2));
  CHECK(relative_error(oracle_equal_time_covariance(system, 0.37), CMatrix::Identity(2, 2)) < 1e-10);
  // Two-time law X(t, t') = e^{-(t - t')} X for a constant system.
  CHECK(relative_error(oracle_two_time(system, 2.0, 0.5), std::exp(-1.5) * CMatrix::Identity(2, 2)) < 1e-10);
  CHECK(relative_error(oracle_two_time(system, 0.5, 2.0), std::exp(-1.5) * CMatrix::Identity(2, 2)) < 1e-10);
}

TEST_CASE("DPO vacuum covariance from the oracle") {
  const CovarianceOracle oracle(build_dpo_system({3.0, 0.0}, DpoMode::Full));
  CMatrix expected(2, 2);
  expected << 1.0, kI, -kI, 1.0;
  CHECK(relative_error(oracle.equal_time(0.2), expected) < 1e-10);
  // Symmetrized part is the identity.
  const CMatrix x = oracle.equal_time(0.9);
  CHECK(relative_error(CMatrix(0.5 * (x + x.transpose())), CMatrix::Identity(2, 2)) < 1e-10);
}

TEST_CASE("settled covariance is periodic") {
  const auto system = build_dpo_system({3.0, 0.5}, DpoMode::Full);
  const CovarianceOracle oracle(system);
  CHECK(oracle.periods_used() > 1);
  const double t = 0.3 * system.period();
  CHECK(relative_error(oracle.equal_time(t + system.period()), oracle.equal_time(t)) < 1e-8);
  CHECK(relative_error(oracle.equal_time(t + 4.0 * system.period()), oracle.equal_time(t)) < 1e-8);
  CHECK(relative_error(oracle.two_time(t, t), oracle.equal_time(t)) < 1e-14);
}

TEST_CASE("unstable systems do not settle") {
  OracleConfig config;
  config.settle_periods = 500;
  CHECK_THROWS_AS(CovarianceOracle(build_dpo_system({3.0, 1.3}, DpoMode::Full), config), UnstableSystemError);
}

TEST_CASE("oracle configuration is validated") {
  OracleConfig config;
  config.quadrature_order = 1;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = {};
  config.settle_periods = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("quadrature non-convergence reports the achieved estimate") {
  const auto system = build_dpo_system({3.0, 0.5}, DpoMode::Full);
  const CovarianceOracle oracle(system);
  OracleConfig crude;
  crude.quadrature_order = 2;
  crude.panels_per_period = 1;
  crude.quadrature_tolerance = 1e-12;
  try {
    oracle_fluctuation_spectrum(oracle, 6.0, FiniteDetection{2, 0.0}, crude);
    FAIL("expected a quadrature error");
  } catch (const QuadratureError& e) {
    CHECK(e.estimate() > 0.0);
  }
}

TEST_CASE("finite-window Lorentzian from the covariance-ODE quadrature") {
  const double g = 0.7;
  const double period = 1.3;
  const CovarianceOracle oracle(test::ornstein_uhlenbeck(g, period));
  const FiniteDetection window{2, 0.5};
  const double td = 2 * period + 0.5;
  const double omega = 1.5;
  const Complex a{g, -omega};
  const double expected = (td / a - (1.0 - std::exp(-a * td)) / (a * a)).real() / (g * td);
  const auto result = oracle_fluctuation_spectrum(oracle, omega, window);
  CHECK(std::abs(result.value(0, 0) - expected) < 1e-10);
  CHECK(result.error_estimate < 1e-10);
}
