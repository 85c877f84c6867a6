#pragma once

#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "floqspec/correlations.hpp"
#include "floqspec/interpolation.hpp"

namespace floqspec {

/// T-periodic scalar weight P(t) multiplying one time argument of a
/// spectral density.
class WeightFunction {
 public:
  enum class Kind { ConstantOne, FrameComponent, Sampled };

  static WeightFunction constant_one();
  /// P(t) = K_{row, mode}(t).
  static WeightFunction frame_component(std::size_t row, std::size_t mode);
  /// Periodic cubic spline through uniform samples over one period.
  static WeightFunction sampled(std::vector<Complex> samples, double period);

  WeightFunction scaled(Complex factor) const;

  Kind kind() const { return kind_; }
  std::size_t row() const { return row_; }
  std::size_t mode() const { return mode_; }
  Complex scale() const { return scale_; }
  bool needs_frame() const { return kind_ == Kind::FrameComponent; }

  /// `frame` is K(t); only read for frame components.
  Complex evaluate(double t, const CMatrix& frame) const;
  std::vector<double> breakpoints() const;

 private:
  Kind kind_ = Kind::ConstantOne;
  std::size_t row_ = 0;
  std::size_t mode_ = 0;
  Complex scale_ = 1.0;
  std::shared_ptr<const PeriodicSpline> spline_;
};

struct InfiniteDetection {};

/// Detection window T_d = periods * T + remainder, 0 <= remainder < T.
struct FiniteDetection {
  int periods = 1;
  double remainder = 0.0;
};

using DetectionMode = std::variant<InfiniteDetection, FiniteDetection>;

struct SpectralDensityRequest {
  std::size_t alpha = 0;
  std::size_t beta = 0;
  WeightFunction weight_alpha = WeightFunction::constant_one();
  WeightFunction weight_beta = WeightFunction::constant_one();
  std::vector<double> omegas;
  DetectionMode detection = InfiniteDetection{};
};

/// The four one-period integrals of a chessboard-reduced spectral density:
/// off-diagonal blocks below (lower_block) and above (upper_block) the
/// diagonal, and the two triangles of the diagonal cell.
struct OnePeriodIntegrals {
  Complex lower_block;   // I^{se}
  Complex upper_block;   // I^{nw}
  Complex lower_corner;  // lower-right triangle of the diagonal cell
  Complex upper_corner;  // upper-left triangle of the diagonal cell
};

enum class CorrelationKind {
  ModeMode,   // <c_a(t) c_b(t')>
  ModeNoise,  // <c_a(t) xi_n(t')>
  NoiseMode,  // <xi_n(t) c_a(t')>
};

/// One spectral density (1/T_d) int int P_1(t) P_2(t') O(t, t') e^{i w (t - t')}.
struct SpectralTerm {
  CorrelationKind kind = CorrelationKind::ModeMode;
  std::size_t first = 0;
  std::size_t second = 0;
  WeightFunction weight_first = WeightFunction::constant_one();
  WeightFunction weight_second = WeightFunction::constant_one();
};

/// Evaluates batches of spectral densities that share one noise kernel. The
/// weights and kernels of a batch are recorded once; each frequency then
/// costs one backward and one forward scalar ODE pass per detection window.
class SpectralEngine {
 public:
  explicit SpectralEngine(NoiseKernel kernel, IntegrationTolerances tolerances = {});

  class Batch {
   public:
    std::size_t size() const { return terms_.size(); }

   private:
    friend class SpectralEngine;
    std::vector<SpectralTerm> terms_;
    ChebyshevRecord profile_;  // per term: P1, P2, P2 * lower kernel, P1 * upper kernel
    std::vector<Complex> lower_rate_;
    std::vector<Complex> upper_rate_;
    std::vector<Complex> lower_coefficient_;
    std::vector<Complex> upper_coefficient_;
  };

  Batch prepare(std::span<const SpectralTerm> terms) const;

  std::vector<OnePeriodIntegrals> one_period_integrals(const Batch& batch, double omega) const;
  std::vector<Complex> evaluate(const Batch& batch, double omega, const DetectionMode& mode) const;

  const NoiseKernel& kernel() const { return kernel_; }
  const IntegrationTolerances& tolerances() const { return tolerances_; }

 private:
  struct WindowIntegrals;
  WindowIntegrals window(const Batch& batch, double omega, double upper, double observe) const;

  NoiseKernel kernel_;
  IntegrationTolerances tolerances_;
};

OnePeriodIntegrals one_period_integrals(const NoiseKernel& kernel, std::size_t alpha,
                                        std::size_t beta, const WeightFunction& weight_alpha,
                                        const WeightFunction& weight_beta, double omega,
                                        const IntegrationTolerances& tolerances = {});

/// S_ab(w) in the long-detection limit.
std::vector<Complex> spectral_density_infinite(const NoiseKernel& kernel,
                                               const SpectralDensityRequest& request,
                                               const IntegrationTolerances& tolerances = {});

/// Exact S_ab(w) for T_d = k T + T_r, including the boundary remainder.
std::vector<Complex> spectral_density_finite(const NoiseKernel& kernel,
                                             const SpectralDensityRequest& request,
                                             const IntegrationTolerances& tolerances = {});

/// Dispatches on request.detection.
std::vector<Complex> spectral_density(const NoiseKernel& kernel, const SpectralDensityRequest& request,
                                      const IntegrationTolerances& tolerances = {});

struct CrossSpectralDensities {
  std::vector<Complex> c_xi;  // S^(c xi)_{alpha beta}: alpha a mode, beta a noise
  std::vector<Complex> xi_c;  // S^(xi c)_{alpha beta}: alpha a noise, beta a mode
};

/// Both cross-spectra for the same (alpha, beta) and weights; requires
/// alpha, beta < min(D, N).
CrossSpectralDensities cross_spectral_densities(const NoiseKernel& kernel,
                                                const SpectralDensityRequest& request,
                                                const IntegrationTolerances& tolerances = {});

std::vector<Complex> cross_spectral_density_c_xi(const NoiseKernel& kernel,
                                                 const SpectralDensityRequest& request,
                                                 const IntegrationTolerances& tolerances = {});
std::vector<Complex> cross_spectral_density_xi_c(const NoiseKernel& kernel,
                                                 const SpectralDensityRequest& request,
                                                 const IntegrationTolerances& tolerances = {});

/// Spectral matrix of the fluctuations x: sum_ab S_ab(w; K_ma, K_nb).
std::vector<CMatrix> fluctuation_spectrum(const NoiseKernel& kernel, std::span<const double> omegas,
                                          const DetectionMode& mode = InfiniteDetection{},
                                          const IntegrationTolerances& tolerances = {});

}  // namespace floqspec
