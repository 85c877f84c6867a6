#include "floqspec/correlations.hpp"

#include <cmath>

#include "floqspec/errors.hpp"

namespace floqspec {

NoiseKernel::NoiseKernel(FloquetDecomposition decomposition, ChebyshevRecord nu_record,
                         CMatrix nu_period)
    : decomposition_(std::move(decomposition)),
      nu_record_(std::move(nu_record)),
      nu_period_(std::move(nu_period)) {
  const auto d = static_cast<Eigen::Index>(decomposition_.dimension());
  const CVector& mu = decomposition_.exponents();
  pair_sums_.resize(d, d);
  pair_upsilon_.resize(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      pair_sums_(a, b) = mu(a) + mu(b);
      pair_upsilon_(a, b) = upsilon(pair_sums_(a, b), decomposition_.period());
    }
  }
}

NoiseKernel NoiseKernel::build(const FloquetDecomposition& decomposition,
                               const IntegrationTolerances& tolerances) {
  const auto stability = stability_check(decomposition);
  if (!stability.stable) {
    throw UnstableSystemError(stability.max_growth_rate,
                              "noise kernel requires all Re(mu) < 0; max Re(mu) = " +
                                  std::to_string(stability.max_growth_rate));
  }
  const auto& system = decomposition.system();
  const auto d = static_cast<Eigen::Index>(system.dimension());
  const CMatrix& g = system.noise_correlation();
  const CMatrix& s_inv = decomposition.modes_inverse();

  // State: [F (D x D), nu (D x D)]. F is co-integrated so that N(t) is built
  // from the integrated fundamental matrix rather than its interpolant.
  // e^{-(mu_a + mu_b) t} N_ab(t) = [S^-1 F^-1 B G B^T F^-T S^-T]_ab, so the
  // exponentials cancel analytically.
  OdeRhs rhs = [&system, &g, &s_inv, d](double t, std::span<const Complex> y, std::span<Complex> dy) {
    Eigen::Map<const CMatrix> f(y.data(), d, d);
    Eigen::Map<CMatrix> df(dy.data(), d, d);
    Eigen::Map<CMatrix> dnu(dy.data() + d * d, d, d);
    df.noalias() = system.drift(t) * f;
    const CMatrix b = system.noise_matrix(t);
    const CMatrix projector = s_inv * f.partialPivLu().inverse() * b;
    dnu.noalias() = projector * g * projector.transpose();
  };
  CVector initial = CVector::Zero(2 * d * d);
  initial.head(d * d) = CMatrix::Identity(d, d).reshaped();
  auto solution = integrate_recorded(rhs, initial, 0.0, system.period(), system.breakpoints(),
                                     tolerances);

  CMatrix nu_period = solution.final_state.tail(d * d).reshaped(d, d);
  return NoiseKernel(decomposition, std::move(solution.record), std::move(nu_period));
}

CMatrix NoiseKernel::projected_noise(double t) const {
  const auto frame = decomposition_.frame(t);
  const CMatrix b = decomposition_.system().noise_matrix(t);
  const CMatrix projector = frame.inverse * b;
  return projector * decomposition_.system().noise_correlation() * projector.transpose();
}

CMatrix NoiseKernel::nu(double t) const {
  const auto d = static_cast<Eigen::Index>(dimension());
  CVector all = nu_record_(t);
  return all.tail(d * d).reshaped(d, d);
}

CMatrix NoiseKernel::gamma(double tau) const {
  const CMatrix nu_tau = nu(tau);
  const double period = this->period();
  const auto d = static_cast<Eigen::Index>(dimension());
  CMatrix out(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      const Complex x = pair_sums_(a, b);
      // 1 / Upsilon(x) = e^{-xT} - 1.
      out(a, b) = std::exp(x * tau) * (nu_period_(a, b) + expm1(-x * period) * nu_tau(a, b));
    }
  }
  return out;
}

CMatrix NoiseKernel::chi_c_xi(double t) const {
  const auto frame = decomposition_.frame(t);
  return frame.inverse * decomposition_.system().noise_matrix(t) *
         decomposition_.system().noise_correlation();
}

CMatrix NoiseKernel::chi_xi_c(double t) const {
  const auto frame = decomposition_.frame(t);
  return decomposition_.system().noise_correlation() *
         decomposition_.system().noise_matrix(t).transpose() * frame.inverse.transpose();
}

CMatrix elementary_correlation(const NoiseKernel& kernel, double t, double tp) {
  const double period = kernel.period();
  const CVector& mu = kernel.decomposition().exponents();
  const auto d = static_cast<Eigen::Index>(kernel.dimension());
  // Equal times use the t' <= t branch.
  const bool lower = tp <= t;
  const CMatrix g = kernel.gamma(reduce_to_period(lower ? tp : t, period));
  const double lag = lower ? t - tp : tp - t;
  CMatrix out(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      const Complex rate = lower ? mu(a) : mu(b);
      out(a, b) = kernel.pair_upsilon()(a, b) * g(a, b) * std::exp(rate * lag);
    }
  }
  return out;
}

CMatrix fluctuation_correlation(const NoiseKernel& kernel, double t, double tp) {
  const auto& decomposition = kernel.decomposition();
  const double period = kernel.period();
  const CMatrix k_t = decomposition.frame(reduce_to_period(t, period)).frame;
  const CMatrix k_tp = decomposition.frame(reduce_to_period(tp, period)).frame;
  return k_t * elementary_correlation(kernel, t, tp) * k_tp.transpose();
}

CMatrix cross_correlation_c_xi(const NoiseKernel& kernel, double t, double tp) {
  const auto d = static_cast<Eigen::Index>(kernel.dimension());
  const auto n = static_cast<Eigen::Index>(kernel.noise_count());
  if (t < tp) return CMatrix::Zero(d, n);
  CMatrix chi = kernel.chi_c_xi(reduce_to_period(tp, kernel.period()));
  const CVector& mu = kernel.decomposition().exponents();
  for (Eigen::Index a = 0; a < d; ++a) chi.row(a) *= std::exp(mu(a) * (t - tp));
  return chi;
}

CMatrix cross_correlation_xi_c(const NoiseKernel& kernel, double t, double tp) {
  const auto d = static_cast<Eigen::Index>(kernel.dimension());
  const auto n = static_cast<Eigen::Index>(kernel.noise_count());
  if (tp < t) return CMatrix::Zero(n, d);
  CMatrix chi = kernel.chi_xi_c(reduce_to_period(t, kernel.period()));
  const CVector& mu = kernel.decomposition().exponents();
  for (Eigen::Index b = 0; b < d; ++b) chi.col(b) *= std::exp(mu(b) * (tp - t));
  return chi;
}

}  // namespace floqspec
