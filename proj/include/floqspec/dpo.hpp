#pragma once

#include <span>
#include <string>

#include <Eigen/Dense>
#include <vector>

#include "floqspec/periodic_system.hpp"
#include "floqspec/spectra.hpp"

namespace floqspec {

/// Degenerate parametric oscillator in units of the damping rate.
struct DpoParameters {
  double quality = 3.0;  // Q = Omega / gamma
  double sigma = 0.0;    // normalized modulation amplitude

  double period() const;            // pi / Q
  double modulation_depth() const;  // 4 sigma / Q
  void validate() const;
};

enum class DpoMode { Full, Rwa };

const char* to_string(DpoMode mode);
DpoMode parse_dpo_mode(const std::string& text);

/// Quadrature-basis Langevin system with B = sqrt(2) I and
/// G = [[1, i], [-i, 1]]. Rwa mode keeps only the static part of L.
PeriodicLinearSystem build_dpo_system(const DpoParameters& params, DpoMode mode);

struct SpectralCovariancePoint {
  double omega = 0.0;
  Eigen::Matrix2d covariance;  // V(omega)
  double v1 = 0.0;             // larger eigenvalue
  double v2 = 0.0;             // smaller eigenvalue
  double determinant = 0.0;
  double v2_db = 0.0;          // -10 log10 V2
  double imaginary_residue = 0.0;  // max |Im V| before it is discarded
};

using SpectralCovarianceTable = std::vector<SpectralCovariancePoint>;

/// Output-field spectral covariance of one DPO configuration. Construction
/// performs the Floquet decomposition and records the weights once.
class DpoSpectrum {
 public:
  DpoSpectrum(const DpoParameters& params, DpoMode mode, const IntegrationTolerances& tolerances = {},
              DetectionMode detection = InfiniteDetection{});

  /// A(omega) = <x_out x_out^T> spectral matrix before symmetrization.
  CMatrix output_spectrum(double omega) const;
  SpectralCovariancePoint at(double omega) const;
  /// Evaluates each distinct |omega| once; threads = 0 uses all cores.
  SpectralCovarianceTable table(std::span<const double> omegas, unsigned threads = 1) const;

  const SpectralEngine& engine() const { return engine_; }
  const DpoParameters& parameters() const { return params_; }

 private:
  SpectralCovariancePoint assemble(double omega, const CMatrix& plus, const CMatrix& minus) const;

  DpoParameters params_;
  DpoMode mode_;
  DetectionMode detection_;
  SpectralEngine engine_;
  SpectralEngine::Batch batch_;
};

SpectralCovarianceTable spectral_covariance(const DpoParameters& params, DpoMode mode,
                                            std::span<const double> omegas,
                                            const IntegrationTolerances& tolerances = {},
                                            unsigned threads = 1,
                                            DetectionMode detection = InfiniteDetection{});

struct RwaCovariance {
  double v1;
  double v2;
};

/// Closed-form spectral covariance eigenvalues under the rotating-wave
/// approximation; requires 0 <= sigma < 1.
RwaCovariance rwa_closed_form(double sigma, double omega);

/// max_a Re mu_a of the DPO system.
double max_growth_rate(const DpoParameters& params, DpoMode mode,
                       const IntegrationTolerances& tolerances = {});

struct SigmaBracket {
  double lower = 0.0;
  double upper = 0.0;  // 0 means: scan upwards from `lower` for a sign change
};

/// Smallest sigma where max Re mu crosses zero, to |d sigma| < 1e-6.
double find_instability(double quality, DpoMode mode, SigmaBracket bracket = {},
                        const IntegrationTolerances& tolerances = {});

struct OptimalSqueezing {
  double sigma = 0.0;
  double v2 = 0.0;  // V2(omega = 0) at the optimum
  double v2_db = 0.0;
  double sigma_instability = 0.0;
};

/// Minimizes V2(omega = 0; sigma) over (0, 0.999 sigma_ins) to |d sigma| < 1e-4.
OptimalSqueezing find_optimal_squeezing(double quality, DpoMode mode,
                                        const IntegrationTolerances& tolerances = {});

}  // namespace floqspec
