#include <doctest.h>

#include <cmath>
#include <numbers>

#include "floqspec/dpo.hpp"
#include "floqspec/errors.hpp"
#include "floqspec/floquet.hpp"
#include "support.hpp"

using namespace floqspec;
using floqspec::test::relative_error;

namespace {

PeriodicLinearSystem constant_system(CMatrix l, double period) {
  const auto d = static_cast<std::size_t>(l.rows());
  return PeriodicLinearSystem(
      d, d, period, [l](double) { return l; },
      [d](double) { return CMatrix(CMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))); },
      CMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
}

// Classical fixed-step RK4 for F' = L F, used as an independent reference.
CMatrix rk4_fundamental(const PeriodicLinearSystem& system, double t_end, int steps) {
  const auto d = static_cast<Eigen::Index>(system.dimension());
  CMatrix f = CMatrix::Identity(d, d);
  const double h = t_end / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const CMatrix k1 = system.drift(t) * f;
    const CMatrix k2 = system.drift(t + 0.5 * h) * (f + 0.5 * h * k1);
    const CMatrix k3 = system.drift(t + 0.5 * h) * (f + 0.5 * h * k2);
    const CMatrix k4 = system.drift(t + h) * (f + h * k3);
    f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return f;
}

}  // namespace

TEST_CASE("constant damping: F(t) = e^{-t} I") {
  const auto system = constant_system(-CMatrix::Identity(2, 2), 1.0);
  const auto fundamental = integrate_fundamental(system);
  CHECK(relative_error(fundamental.monodromy(), std::exp(-1.0) * CMatrix::Identity(2, 2)) < 1e-10);
  CHECK(std::abs(fundamental.monodromy()(0, 0) - 0.3678794) < 1e-7);
  CHECK(relative_error(fundamental.at(0.4), std::exp(-0.4) * CMatrix::Identity(2, 2)) < 1e-10);
  CHECK(relative_error(fundamental.at(0.0), CMatrix::Identity(2, 2)) < 1e-14);
}

TEST_CASE("DPO at sigma = 0 has F(T) = e^{-T} I in both modes") {
  for (auto mode : {DpoMode::Full, DpoMode::Rwa}) {
    const DpoParameters params{4.0, 0.0};
    const auto fundamental = integrate_fundamental(build_dpo_system(params, mode));
    CHECK(relative_error(fundamental.monodromy(),
                         std::exp(-params.period()) * CMatrix::Identity(2, 2)) < 1e-10);
  }
}

TEST_CASE("DPO monodromy agrees with a fine fixed-step RK4 integration") {
  const auto system = build_dpo_system({3.0, 0.5}, DpoMode::Full);
  const auto fundamental = integrate_fundamental(system);
  const CMatrix reference = rk4_fundamental(system, system.period(), 20000);
  CHECK(relative_error(fundamental.monodromy(), reference) < 1e-10);
  const CMatrix half = rk4_fundamental(system, 0.5 * system.period(), 10000);
  CHECK(relative_error(fundamental.at(0.5 * system.period()), half) < 1e-10);
}

TEST_CASE("decompose: principal logarithms and ordering") {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 0.25;
  m(1, 1) = 0.5;
  const auto modes = decompose(m, 1.0);
  CHECK(std::abs(modes.exponents(0) - std::log(0.5)) < 1e-14);
  CHECK(std::abs(modes.exponents(1) - std::log(0.25)) < 1e-14);
  CHECK(std::abs(modes.exponents(0).real() - (-0.6931472)) < 1e-7);
  CHECK(std::abs(modes.exponents(1).real() - (-1.3862944)) < 1e-7);
  for (Eigen::Index a = 0; a < 2; ++a) CHECK(std::abs(modes.modes.col(a).norm() - 1.0) < 1e-14);

  // Negative real multiplier sits on the +pi side of the branch cut.
  CMatrix flip = CMatrix::Zero(1, 1);
  flip(0, 0) = -0.5;
  CHECK(std::abs(decompose(flip, 2.0).exponents(0) - Complex(std::log(0.5), std::numbers::pi) / 2.0) <
        1e-14);

  // Ties in Re mu are ordered by ascending Im mu.
  CMatrix rotation(2, 2);
  const double r = std::exp(-0.3);
  rotation << r * std::cos(0.7), -r * std::sin(0.7), r * std::sin(0.7), r * std::cos(0.7);
  const auto pair = decompose(rotation, 1.0);
  CHECK(pair.exponents(0).imag() == doctest::Approx(-0.7));
  CHECK(pair.exponents(1).imag() == doctest::Approx(0.7));
  CHECK(std::abs(pair.exponents(0) - std::conj(pair.exponents(1))) < 1e-13);
}

TEST_CASE("decompose: degenerate but diagonalizable and defective monodromies") {
  const CMatrix scaled = std::exp(-1.0) * CMatrix::Identity(2, 2);
  const auto modes = decompose(scaled, 1.0);
  CHECK(std::abs(modes.exponents(0) + 1.0) < 1e-14);
  CHECK(std::abs(modes.exponents(1) + 1.0) < 1e-14);
  const CMatrix diagonal = modes.modes_inverse * scaled * modes.modes;
  CHECK(std::abs(diagonal(0, 1)) < 1e-14);
  CHECK(std::abs(diagonal(1, 0)) < 1e-14);

  CMatrix jordan(2, 2);
  jordan << 0.5, 1.0, 0.0, 0.5;
  CHECK_THROWS_AS(decompose(jordan, 1.0), NonDiagonalizableError);
}

TEST_CASE("frame: K(0) = K(T) = S and K K^{-1} = I") {
  const auto decomposition = FloquetDecomposition::build(build_dpo_system({3.0, 0.5}, DpoMode::Full));
  const double period = decomposition.period();
  CHECK(relative_error(decomposition.frame(0.0).frame, decomposition.modes()) < 1e-13);
  CHECK(relative_error(decomposition.frame(period).frame, decomposition.modes()) < 1e-9);
  for (double t : {0.1, 0.5, 0.77, 1.9, 7.3}) {
    const auto k = decomposition.frame(t);
    CHECK(relative_error(k.frame * k.inverse, CMatrix::Identity(2, 2)) < 1e-12);
  }
  // Frame periodicity for t outside [0, T].
  CHECK(relative_error(decomposition.frame(0.3 + 2.0 * period).frame, decomposition.frame(0.3).frame) <
        1e-12);

  // Constant system: P(t) = I, so K(t) = S.
  CMatrix l(2, 2);
  l << -1.0, 0.5, 0.0, -2.0;
  const auto constant = FloquetDecomposition::build(constant_system(l, 0.9));
  CHECK(relative_error(constant.frame(0.45).frame, constant.modes()) < 1e-9);
}

TEST_CASE("monodromy property F(t + T) = F(t) F(T) and Abel's identity") {
  const auto system = floqspec::test::synthetic_three_mode();
  const IntegrationTolerances tol{1e-11, 1e-13};
  const auto fundamental = integrate_fundamental(system, tol);
  const double period = system.period();
  // Abel: det F(t) = exp(int_0^t tr L).
  OdeRhs trace = [&system](double t, std::span<const Complex>, std::span<Complex> dy) {
    dy[0] = system.drift(t).trace();
  };
  for (int i = 1; i <= 8; ++i) {
    const double t = period * i / 8.5;
    const CMatrix later = rk4_fundamental(system, t + period, 40000);
    CHECK(relative_error(fundamental.at(t) * fundamental.monodromy(), later) < 1e-9);
    const Complex log_det = integrate(trace, CVector::Zero(1), 0.0, t, tol)(0);
    const Complex det = fundamental.at(t).determinant();
    CHECK(std::abs(det - std::exp(log_det)) / std::abs(det) < 100.0 * tol.relative);
  }
}

TEST_CASE("real systems have conjugate-paired exponents") {
  const auto decomposition = FloquetDecomposition::build(floqspec::test::synthetic_three_mode());
  const CVector& mu = decomposition.exponents();
  for (Eigen::Index a = 0; a < mu.size(); ++a) {
    double best = INFINITY;
    for (Eigen::Index b = 0; b < mu.size(); ++b) best = std::min(best, std::abs(mu(a) - std::conj(mu(b))));
    CHECK(best < 1e-9);
  }
}

TEST_CASE("stability check") {
  const auto rwa = FloquetDecomposition::build(build_dpo_system({3.0, 0.5}, DpoMode::Rwa));
  CHECK(std::abs(rwa.exponents()(0) + 0.5) < 1e-10);
  CHECK(std::abs(rwa.exponents()(1) + 1.5) < 1e-10);
  const auto report = stability_check(rwa);
  CHECK(report.stable);
  CHECK(report.max_growth_rate == doctest::Approx(-0.5));

  CMatrix l = CMatrix::Zero(2, 2);
  l(0, 0) = 0.01;
  l(1, 1) = -2.0;
  CHECK_FALSE(stability_check(FloquetDecomposition::build(constant_system(l, 1.0))).stable);
  // Just beyond the full-mode instability threshold at Q = 3.
  CHECK_FALSE(stability_check(FloquetDecomposition::build(build_dpo_system({3.0, 1.06}, DpoMode::Full))).stable);
}

TEST_CASE("branch shift moves one exponent by 2 pi i / T") {
  const auto decomposition = FloquetDecomposition::build(build_dpo_system({3.0, 0.5}, DpoMode::Full));
  const auto shifted = decomposition.with_branch_shift(1, 1);
  CHECK(std::abs(shifted.exponents()(1) - decomposition.exponents()(1) -
                 Complex(0.0, 2.0 * std::numbers::pi / decomposition.period())) < 1e-14);
  CHECK_THROWS_AS(decomposition.with_branch_shift(2, 1), ConfigError);
}
