#pragma once

#include "floqspec/floquet.hpp"
#include "floqspec/numerics.hpp"
#include "floqspec/record.hpp"

namespace floqspec {

/// One-period noise data in the Floquet eigenbasis: the projected noise
/// N(t) = K^{-1} B G B^T K^{-T}, its weighted primitive nu(t), the
/// accumulation kernel Gamma(tau) and the variable-noise kernels chi.
class NoiseKernel {
 public:
  /// Requires a stable decomposition; throws UnstableSystemError otherwise.
  static NoiseKernel build(const FloquetDecomposition& decomposition,
                           const IntegrationTolerances& tolerances = {});

  const FloquetDecomposition& decomposition() const { return decomposition_; }
  std::size_t dimension() const { return decomposition_.dimension(); }
  std::size_t noise_count() const { return decomposition_.system().noise_count(); }
  double period() const { return decomposition_.period(); }

  CMatrix projected_noise(double t) const;
  /// nu(t) for t in [0, T]; nu(0) = 0.
  CMatrix nu(double t) const;
  const CMatrix& nu_period() const { return nu_period_; }
  /// Gamma(tau) for tau in [0, T].
  CMatrix gamma(double tau) const;
  /// Upsilon(mu_a + mu_b) for every mode pair.
  const CMatrix& pair_upsilon() const { return pair_upsilon_; }

  /// chi^(c xi)(t) = K^{-1} B G (D x N).
  CMatrix chi_c_xi(double t) const;
  /// chi^(xi c)(t) = G B^T K^{-T} (N x D).
  CMatrix chi_xi_c(double t) const;

  const ChebyshevRecord& nu_record() const { return nu_record_; }

 private:
  NoiseKernel(FloquetDecomposition decomposition, ChebyshevRecord nu_record, CMatrix nu_period);

  FloquetDecomposition decomposition_;
  ChebyshevRecord nu_record_;
  CMatrix nu_period_;
  CMatrix pair_sums_;  // mu_a + mu_b
  CMatrix pair_upsilon_;
};

/// C(t, t') = <c(t) c^T(t')> for arbitrary non-negative times.
CMatrix elementary_correlation(const NoiseKernel& kernel, double t, double tp);

/// X(t, t') = <x(t) x^T(t')> = K(t) C(t, t') K^T(t').
CMatrix fluctuation_correlation(const NoiseKernel& kernel, double t, double tp);

/// <c_a(t) xi_n(t')> (D x N); zero for t < t'.
CMatrix cross_correlation_c_xi(const NoiseKernel& kernel, double t, double tp);

/// <xi_n(t) c_a(t')> (N x D); zero for t' < t.
CMatrix cross_correlation_xi_c(const NoiseKernel& kernel, double t, double tp);

}  // namespace floqspec
