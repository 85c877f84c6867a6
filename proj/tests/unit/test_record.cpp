#include <doctest.h>

#include <cmath>
#include <numbers>

#include "floqspec/errors.hpp"
#include "floqspec/record.hpp"

using namespace floqspec;

TEST_CASE("integrate_recorded reproduces a rotating exponential in both directions") {
  const Complex rate{-0.3, 4.0};
  OdeRhs rhs = [rate](double, std::span<const Complex> y, std::span<Complex> dy) {
    dy[0] = rate * y[0];
    dy[1] = -y[1];
  };
  CVector start(2);
  start << 1.0, 2.0;
  const IntegrationTolerances tol{1e-11, 1e-13};
  const auto forward = integrate_recorded(rhs, start, 0.0, 2.5, {}, tol);
  for (double t : {0.0, 0.37, 1.2, 2.5}) {
    const CVector v = forward.record(t);
    CHECK(std::abs(v(0) - std::exp(rate * t)) < 1e-9);
    CHECK(std::abs(v(1) - 2.0 * std::exp(-t)) < 1e-9);
  }
  CHECK(std::abs(forward.final_state(0) - std::exp(rate * 2.5)) < 1e-9);

  const auto backward = integrate_recorded(rhs, start, 2.5, 0.0, {}, tol);
  CHECK(std::abs(backward.record(0.0)(0) - std::exp(-rate * 2.5)) < 1e-9);
  CHECK(std::abs(backward.final_state(1) - 2.0 * std::exp(2.5)) < 1e-8);
}

TEST_CASE("records honour breakpoints") {
  // Right-hand side with a kink at t = 0.4.
  OdeRhs rhs = [](double t, std::span<const Complex>, std::span<Complex> dy) {
    dy[0] = std::abs(t - 0.4);
  };
  const double breaks[] = {0.4};
  const auto solution = integrate_recorded(rhs, CVector::Zero(1), 0.0, 1.0, breaks, {});
  auto exact = [](double t) {
    return t <= 0.4 ? 0.4 * t - 0.5 * t * t : 0.08 + 0.5 * (t - 0.4) * (t - 0.4);
  };
  for (double t : {0.1, 0.4, 0.77, 1.0}) CHECK(std::abs(solution.record(t)(0) - exact(t)) < 1e-11);
  CHECK(std::find(solution.record.breaks().begin(), solution.record.breaks().end(), 0.4) !=
        solution.record.breaks().end());
}

TEST_CASE("sample_recorded interpolates smooth functions to tolerance") {
  SampledFunction f = [](double t, std::span<Complex> out) {
    out[0] = std::sin(5.0 * t);
    out[1] = Complex(std::cos(t), std::exp(-t));
  };
  const auto record = sample_recorded(f, 2, 0.0, 3.0, {}, {1e-12, 1e-14});
  for (double t = 0.0; t <= 3.0; t += 0.0731) {
    const CVector v = record(t);
    CHECK(std::abs(v(0) - std::sin(5.0 * t)) < 1e-11);
    CHECK(std::abs(v(1) - Complex(std::cos(t), std::exp(-t))) < 1e-11);
  }
  CHECK(record.interpolation_error_estimate() < 1e-12);
}

TEST_CASE("integrate_to_times returns the state at each requested time") {
  OdeRhs rhs = [](double, std::span<const Complex> y, std::span<Complex> dy) { dy[0] = kI * y[0]; };
  const double times[] = {0.0, 0.5, 1.0, std::numbers::pi};
  const auto states = integrate_to_times(rhs, CVector::Ones(1), times, {});
  REQUIRE(states.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(states[i](0) - std::exp(kI * times[i])) < 1e-9);
}

TEST_CASE("blow-up is reported as an integration error") {
  OdeRhs rhs = [](double, std::span<const Complex> y, std::span<Complex> dy) { dy[0] = y[0] * y[0]; };
  CHECK_THROWS_AS(integrate(rhs, CVector::Ones(1), 0.0, 2.0, {}), IntegrationError);
}
