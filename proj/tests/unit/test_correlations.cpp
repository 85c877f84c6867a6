#include <doctest.h>

#include <cmath>
#include <random>

#include "floqspec/correlations.hpp"
#include "floqspec/dpo.hpp"
#include "floqspec/errors.hpp"
#include "floqspec/oracle.hpp"
#include "support.hpp"

using namespace floqspec;
using floqspec::test::relative_error;

namespace {

PeriodicLinearSystem damped_pair() {
  // L = -I, B = sqrt(2) I, G = I, T = 1.
  return PeriodicLinearSystem(
      2, 2, 1.0, [](double) { return CMatrix(-CMatrix::Identity(2, 2)); },
      [](double) { return CMatrix(std::sqrt(2.0) * CMatrix::Identity(2, 2)); },
      CMatrix::Identity(2, 2));
}

}  // namespace

TEST_CASE("constant system: nu, Gamma and the stationary correlator") {
  const auto kernel = NoiseKernel::build(FloquetDecomposition::build(damped_pair()));
  const CMatrix s = kernel.decomposition().modes();
  const CMatrix s_inv = kernel.decomposition().modes_inverse();
  // nu(tau) = S^{-1} 2 S^{-T} (e^{2 tau} - 1) / 2 for mu = -1.
  const CMatrix projected = s_inv * (2.0 * CMatrix::Identity(2, 2)) * s_inv.transpose();
  for (double tau : {0.0, 0.3, 1.0}) {
    const CMatrix expected = projected * (std::exp(2.0 * tau) - 1.0) / 2.0;
    CHECK((kernel.nu(tau) - expected).norm() < 1e-9 * (1.0 + expected.norm()));
  }
  CHECK(relative_error(kernel.gamma(0.0), kernel.nu_period()) < 1e-14);
  // C = -N / (mu_a + mu_b) e^{mu (t - t')}; in physical coordinates X = e^{-(t - t')} I.
  for (auto [t, tp] : {std::pair{2.5, 0.7}, std::pair{0.2, 0.2}, std::pair{0.1, 3.4}}) {
    const CMatrix c = elementary_correlation(kernel, t, tp);
    const CMatrix stationary = projected / 2.0 * std::exp(-std::abs(t - tp));
    CHECK(relative_error(c, stationary) < 1e-8);
    CHECK(relative_error(fluctuation_correlation(kernel, t, tp),
                         std::exp(-std::abs(t - tp)) * CMatrix::Identity(2, 2)) < 1e-8);
  }
}

TEST_CASE("Ornstein-Uhlenbeck collapse for a scalar constant system") {
  const double g = 0.7;
  const auto kernel = NoiseKernel::build(FloquetDecomposition::build(test::ornstein_uhlenbeck(g, 1.3)));
  CHECK(std::abs(fluctuation_correlation(kernel, 0.3, 0.3)(0, 0) - 1.0 / (2.0 * g)) < 1e-10);
  CHECK(std::abs(fluctuation_correlation(kernel, 2.1, 0.3)(0, 0) - std::exp(-g * 1.8) / (2.0 * g)) < 1e-10);
  CHECK(std::abs(fluctuation_correlation(kernel, 0.3, 2.1)(0, 0) - std::exp(-g * 1.8) / (2.0 * g)) < 1e-10);
}

TEST_CASE("Gamma is periodic and the correlator is continuous across the diagonal") {
  const auto kernel =
      NoiseKernel::build(FloquetDecomposition::build(build_dpo_system({3.0, 0.5}, DpoMode::Full)));
  const double period = kernel.period();
  CHECK(relative_error(kernel.gamma(period), kernel.gamma(0.0)) < 1e-8);
  for (int i = 0; i < 8; ++i) {
    const double t = 0.37 + 0.61 * i;
    const double h = 1e-9;
    const CMatrix below = elementary_correlation(kernel, t, t - h);
    const CMatrix above = elementary_correlation(kernel, t, t + h);
    CHECK(relative_error(above, below) < 1e-8);
    CHECK(relative_error(elementary_correlation(kernel, t, t), below) < 1e-8);
  }
}

TEST_CASE("exchange symmetry C_ab(t, t') = C_ba(t', t) for symmetric G") {
  const auto kernel = NoiseKernel::build(FloquetDecomposition::build(test::synthetic_three_mode()));
  for (auto [t, tp] : {std::pair{1.1, 0.4}, std::pair{0.2, 3.9}, std::pair{5.0, 5.0}}) {
    const CMatrix forward = elementary_correlation(kernel, t, tp);
    const CMatrix backward = elementary_correlation(kernel, tp, t);
    CHECK(relative_error(forward, backward.transpose()) < 1e-9);
  }
}

TEST_CASE("DPO two-time correlation matches covariance-ODE propagation") {
  const auto system = build_dpo_system({3.0, 0.5}, DpoMode::Full);
  const auto kernel = NoiseKernel::build(FloquetDecomposition::build(system));
  const CovarianceOracle oracle(system);
  const double period = system.period();
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> uniform(0.0, 5.0 * period);
  for (int i = 0; i < 20; ++i) {
    const double t = uniform(rng);
    const double tp = uniform(rng);
    CHECK(relative_error(fluctuation_correlation(kernel, t, tp), oracle.two_time(t, tp)) < 1e-6);
  }
  // Equal times at t = 5T and the frozen golden pair.
  CHECK(relative_error(fluctuation_correlation(kernel, 5.0 * period, 5.0 * period),
                       oracle.equal_time(5.0 * period)) < 1e-8);
  CHECK(relative_error(fluctuation_correlation(kernel, 2.3 * period, 0.7 * period),
                       oracle.two_time(2.3 * period, 0.7 * period)) < 1e-8);
}

TEST_CASE("DPO vacuum: equal-time quadrature covariance is the identity plus the commutator") {
  const auto kernel =
      NoiseKernel::build(FloquetDecomposition::build(build_dpo_system({3.0, 0.0}, DpoMode::Full)));
  CMatrix expected(2, 2);
  expected << 1.0, kI, -kI, 1.0;
  CHECK(relative_error(fluctuation_correlation(kernel, 0.4, 0.4), expected) < 1e-9);
}

TEST_CASE("cross correlations are causal and match the propagator") {
  const auto system = build_dpo_system({3.0, 0.5}, DpoMode::Full);
  const auto kernel = NoiseKernel::build(FloquetDecomposition::build(system));
  const double period = system.period();
  CHECK(cross_correlation_c_xi(kernel, 0.2, 0.9).norm() == 0.0);
  CHECK(cross_correlation_xi_c(kernel, 0.9, 0.2).norm() == 0.0);

  // <c(t) xi^T(t')> = K^{-1}(t) Phi(t, t') B(t') G with Phi from the oracle.
  const CovarianceOracle oracle(system);
  const double t = 1.2 * period;
  const double tp = 0.4 * period;
  const double times[] = {tp, t};
  const auto path = oracle.trajectory(times);
  const CMatrix propagator = path.fundamental[1] * path.fundamental[0].inverse();
  const CMatrix expected = kernel.decomposition().frame(t).inverse * propagator *
                           system.noise_matrix(tp) * system.noise_correlation();
  CHECK(relative_error(cross_correlation_c_xi(kernel, t, tp), expected) < 1e-9);
  // <xi(t') c^T(t)> mirrors it.
  const CMatrix mirrored = system.noise_correlation() * system.noise_matrix(tp).transpose() *
                           propagator.transpose() * kernel.decomposition().frame(t).inverse.transpose();
  CHECK(relative_error(cross_correlation_xi_c(kernel, tp, t), mirrored) < 1e-9);

  // Constant system: chi = S^{-1} B G, so <c(t) xi(t')> = e^{mu (t - t')} S^{-1} B G.
  const auto constant = NoiseKernel::build(FloquetDecomposition::build(damped_pair()));
  const CMatrix chi = constant.decomposition().modes_inverse() * std::sqrt(2.0);
  CHECK(relative_error(cross_correlation_c_xi(constant, 1.5, 0.5), std::exp(-1.0) * chi) < 1e-9);
}

TEST_CASE("unstable systems are refused") {
  CHECK_THROWS_AS(
      NoiseKernel::build(FloquetDecomposition::build(build_dpo_system({3.0, 1.2}, DpoMode::Full))),
      UnstableSystemError);
}

TEST_CASE("log-branch shifts leave physical correlations unchanged") {
  const auto decomposition = FloquetDecomposition::build(build_dpo_system({3.0, 0.5}, DpoMode::Full));
  const auto kernel = NoiseKernel::build(decomposition);
  const auto shifted = NoiseKernel::build(decomposition.with_branch_shift(0, 1).with_branch_shift(1, -2));
  const double period = decomposition.period();
  for (auto [t, tp] : {std::pair{0.3, 0.1}, std::pair{2.2 * period, 0.9 * period}, std::pair{0.5, 3.0}}) {
    CHECK(relative_error(fluctuation_correlation(shifted, t, tp), fluctuation_correlation(kernel, t, tp)) <
          1e-9);
  }
}
