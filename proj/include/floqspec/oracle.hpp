#pragma once

#include <vector>

#include "floqspec/correlations.hpp"
#include "floqspec/periodic_system.hpp"
#include "floqspec/spectra.hpp"

namespace floqspec {

/// Brute-force references that integrate L(t) directly and never touch the
/// Floquet decomposition. Used for validation only.
struct OracleConfig {
  IntegrationTolerances tolerances{1e-12, 1e-14};
  /// Upper bound on the number of period maps applied while settling.
  int settle_periods = 100000;
  /// Settling stops once the propagated initial condition has shrunk below this.
  double settle_threshold = 1e-12;
  /// Gauss-Legendre order of the lower quadrature rule; the error estimate
  /// comes from rerunning with order + 8.
  std::size_t quadrature_order = 16;
  /// Composite panels are at most period / panels_per_period wide.
  std::size_t panels_per_period = 2;
  /// Relative error estimate above which a QuadratureError is raised.
  double quadrature_tolerance = 1e-8;

  void validate() const;
};

/// Periodic steady state of the covariance, obtained from the one-period
/// map X -> Phi X Phi^T + W iterated until the memory of the initial
/// condition has decayed.
class CovarianceOracle {
 public:
  explicit CovarianceOracle(PeriodicLinearSystem system, OracleConfig config = {});

  /// <x(0) x^T(0)> in the periodic steady state.
  const CMatrix& settled() const { return settled_; }
  int periods_used() const { return periods_used_; }
  const PeriodicLinearSystem& system() const { return system_; }

  /// <x(t) x^T(t)>, t >= 0, integrated forward from the settled state.
  CMatrix equal_time(double t) const;
  /// <x(t) x^T(t')> for t, t' >= 0.
  CMatrix two_time(double t, double tp) const;

  /// Equal-time covariances and principal fundamental matrices F(t) at the
  /// given non-decreasing times (t >= 0), from one combined integration.
  struct Trajectory {
    std::vector<CMatrix> covariance;
    std::vector<CMatrix> fundamental;
  };
  Trajectory trajectory(std::span<const double> times) const;

 private:
  PeriodicLinearSystem system_;
  OracleConfig config_;
  CMatrix settled_;
  int periods_used_ = 0;
};

CMatrix oracle_equal_time_covariance(const PeriodicLinearSystem& system, double t,
                                     const OracleConfig& config = {});
CMatrix oracle_two_time(const PeriodicLinearSystem& system, double t, double tp,
                        const OracleConfig& config = {});

struct QuadratureResult {
  Complex value;
  double error_estimate = 0.0;
};

/// (1/T_d) int_0^{T_d} int_0^{T_d} P_a(t) P_b(t') C_ab(t, t') e^{i w (t - t')}
/// by composite Gauss-Legendre quadrature split along t = t', with the
/// elementary correlator evaluated pointwise.
QuadratureResult oracle_spectral_density(const NoiseKernel& kernel, std::size_t alpha,
                                         std::size_t beta, const WeightFunction& weight_alpha,
                                         const WeightFunction& weight_beta, double omega,
                                         const FiniteDetection& detection,
                                         const OracleConfig& config = {});

struct MatrixQuadratureResult {
  CMatrix value;
  double error_estimate = 0.0;
};

/// (1/T_d) int int X(t, t') e^{i w (t - t')} over [0, T_d]^2 with X from the
/// covariance ODE. Equals the fluctuation spectrum sum_ab S_ab(w; K_ma, K_nb).
MatrixQuadratureResult oracle_fluctuation_spectrum(const CovarianceOracle& oracle, double omega,
                                                   const FiniteDetection& detection,
                                                   const OracleConfig& config = {});

struct CrossQuadratureResult {
  CMatrix c_xi;  // (1/T_d) int int <x(t) xi^T(t')> e^{i w (t - t')}, D x N
  CMatrix xi_c;  // (1/T_d) int int <xi(t) x^T(t')> e^{i w (t - t')}, N x D
  double error_estimate = 0.0;
};

/// Windowed spectra of the causal state-noise correlators, built from the
/// propagator F(t) F(t')^{-1} of the direct integration.
CrossQuadratureResult oracle_cross_spectra(const CovarianceOracle& oracle, double omega,
                                           const FiniteDetection& detection,
                                           const OracleConfig& config = {});

}  // namespace floqspec
