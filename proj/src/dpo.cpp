#include "floqspec/dpo.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "floqspec/errors.hpp"
#include "floqspec/parallel.hpp"

namespace floqspec {

double DpoParameters::period() const { return std::numbers::pi / quality; }

double DpoParameters::modulation_depth() const { return 4.0 * sigma / quality; }

void DpoParameters::validate() const {
  if (!(quality > 0.0) || !std::isfinite(quality)) throw ConfigError("Q", "must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma", "must be non-negative");
}

const char* to_string(DpoMode mode) { return mode == DpoMode::Full ? "full" : "rwa"; }

DpoMode parse_dpo_mode(const std::string& text) {
  if (text == "full") return DpoMode::Full;
  if (text == "rwa") return DpoMode::Rwa;
  throw ConfigError("mode", "expected 'full' or 'rwa', got '" + text + "'");
}

PeriodicLinearSystem build_dpo_system(const DpoParameters& params, DpoMode mode) {
  params.validate();
  const double q = params.quality;
  const double s = params.sigma;
  PeriodicLinearSystem::MatrixFunction drift;
  if (mode == DpoMode::Rwa) {
    drift = [s](double) {
      CMatrix l = CMatrix::Zero(2, 2);
      l(0, 0) = -1.0 + s;
      l(1, 1) = -1.0 - s;
      return l;
    };
  } else {
    drift = [q, s](double t) {
      const double c = std::cos(q * t);
      const double n = std::sin(q * t);
      const double c4 = std::cos(4.0 * q * t);
      CMatrix l(2, 2);
      l(0, 0) = -1.0 + s - s * c4;
      l(0, 1) = 8.0 * s * c * n * n * n;
      l(1, 0) = -8.0 * s * c * c * c * n;
      l(1, 1) = -1.0 - s + s * c4;
      return l;
    };
  }
  CMatrix g(2, 2);
  g << 1.0, kI, -kI, 1.0;
  PeriodicLinearSystem system(
      2, 2, params.period(), std::move(drift),
      [](double) { return CMatrix(std::numbers::sqrt2 * CMatrix::Identity(2, 2)); }, g);
  system.set_description(std::string("dpo mode=") + to_string(mode));
  return system;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kModeModeTerms = 16;

std::vector<SpectralTerm> output_terms() {
  std::vector<SpectralTerm> terms;
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t n = 0; n < 2; ++n) {
      for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
          terms.push_back({CorrelationKind::ModeMode, a, b, WeightFunction::frame_component(m, a),
                           WeightFunction::frame_component(n, b)});
        }
      }
    }
  }
  // <x(t) xi^T(t')> and <xi(t) x^T(t')> pieces, in (m, n, a) order.
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t n = 0; n < 2; ++n) {
      for (std::size_t a = 0; a < 2; ++a) {
        terms.push_back({CorrelationKind::ModeNoise, a, n, WeightFunction::frame_component(m, a),
                         WeightFunction::constant_one()});
      }
    }
  }
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t n = 0; n < 2; ++n) {
      for (std::size_t a = 0; a < 2; ++a) {
        terms.push_back({CorrelationKind::NoiseMode, m, a, WeightFunction::constant_one(),
                         WeightFunction::frame_component(n, a)});
      }
    }
  }
  return terms;
}

NoiseKernel dpo_kernel(const DpoParameters& params, DpoMode mode,
                       const IntegrationTolerances& tolerances) {
  const auto decomposition = FloquetDecomposition::build(build_dpo_system(params, mode), tolerances);
  const auto report = stability_check(decomposition);
  if (!report.stable) {
    throw UnstableSystemError(
        report.max_growth_rate,
        "sigma = " + std::to_string(params.sigma) + " is at or beyond the instability threshold " +
            "sigma_ins(Q = " + std::to_string(params.quality) +
            "): max Re mu = " + std::to_string(report.max_growth_rate));
  }
  return NoiseKernel::build(decomposition, tolerances);
}

}  // namespace

DpoSpectrum::DpoSpectrum(const DpoParameters& params, DpoMode mode,
                         const IntegrationTolerances& tolerances, DetectionMode detection)
    : params_(params),
      mode_(mode),
      detection_(detection),
      engine_(dpo_kernel(params, mode, tolerances), tolerances) {
  const auto terms = output_terms();
  batch_ = engine_.prepare(terms);
}

CMatrix DpoSpectrum::output_spectrum(double omega) const {
  const auto values = engine_.evaluate(batch_, omega, detection_);
  CMatrix a = engine_.kernel().decomposition().system().noise_correlation();
  std::size_t index = 0;
  for (Eigen::Index m = 0; m < 2; ++m) {
    for (Eigen::Index n = 0; n < 2; ++n) {
      for (std::size_t ab = 0; ab < 4; ++ab) a(m, n) += 2.0 * values[index++];
    }
  }
  for (Eigen::Index m = 0; m < 2; ++m) {
    for (Eigen::Index n = 0; n < 2; ++n) {
      for (std::size_t k = 0; k < 2; ++k) a(m, n) -= std::numbers::sqrt2 * values[index++];
    }
  }
  for (Eigen::Index m = 0; m < 2; ++m) {
    for (Eigen::Index n = 0; n < 2; ++n) {
      for (std::size_t k = 0; k < 2; ++k) a(m, n) -= std::numbers::sqrt2 * values[index++];
    }
  }
  return a;
}

SpectralCovariancePoint DpoSpectrum::assemble(double omega, const CMatrix& plus,
                                              const CMatrix& minus) const {
  const CMatrix v = 0.25 * (plus + minus + plus.transpose() + minus.transpose());
  SpectralCovariancePoint point;
  point.omega = omega;
  point.covariance = v.real();
  point.imaginary_residue = v.imag().cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(point.covariance);
  point.v1 = solver.eigenvalues()(1);
  point.v2 = solver.eigenvalues()(0);
  point.determinant = point.covariance.determinant();
  point.v2_db = -10.0 * std::log10(point.v2);
  return point;
}

SpectralCovariancePoint DpoSpectrum::at(double omega) const {
  if (!std::isfinite(omega)) throw ConfigError("omega", "must be finite");
  const CMatrix plus = output_spectrum(omega);
  const CMatrix minus = omega == 0.0 ? plus : output_spectrum(-omega);
  return assemble(omega, plus, minus);
}

SpectralCovarianceTable DpoSpectrum::table(std::span<const double> omegas, unsigned threads) const {
  std::vector<double> unique;
  for (double w : omegas) {
    if (!std::isfinite(w)) throw ConfigError("omega", "must be finite");
    unique.push_back(w);
    unique.push_back(-w);
  }
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  std::vector<CMatrix> spectra(unique.size());
  parallel_for(unique.size(), threads, [&](std::size_t i) { spectra[i] = output_spectrum(unique[i]); });
  auto lookup = [&](double w) -> const CMatrix& {
    return spectra[static_cast<std::size_t>(std::lower_bound(unique.begin(), unique.end(), w) -
                                            unique.begin())];
  };
  SpectralCovarianceTable out;
  out.reserve(omegas.size());
  for (double w : omegas) out.push_back(assemble(w, lookup(w), lookup(-w)));
  return out;
}

SpectralCovarianceTable spectral_covariance(const DpoParameters& params, DpoMode mode,
                                            std::span<const double> omegas,
                                            const IntegrationTolerances& tolerances,
                                            unsigned threads, DetectionMode detection) {
  return DpoSpectrum(params, mode, tolerances, detection).table(omegas, threads);
}

RwaCovariance rwa_closed_form(double sigma, double omega) {
  if (!(sigma >= 0.0)) throw ConfigError("sigma", "must be non-negative");
  if (sigma >= 1.0) {
    throw ConfigError("sigma", "beyond RWA threshold: the linear model requires sigma < 1");
  }
  const double w2 = omega * omega;
  return {1.0 + 4.0 * sigma / ((1.0 - sigma) * (1.0 - sigma) + w2),
          1.0 - 4.0 * sigma / ((1.0 + sigma) * (1.0 + sigma) + w2)};
}

double max_growth_rate(const DpoParameters& params, DpoMode mode,
                       const IntegrationTolerances& tolerances) {
  const auto fundamental = integrate_fundamental(build_dpo_system(params, mode), tolerances);
  const auto modes = decompose(fundamental.monodromy(), params.period(),
                               std::numeric_limits<double>::infinity());
  return modes.exponents(0).real();
}

double find_instability(double quality, DpoMode mode, SigmaBracket bracket,
                        const IntegrationTolerances& tolerances) {
  auto growth = [&](double sigma) {
    return max_growth_rate(DpoParameters{quality, sigma}, mode, tolerances);
  };
  double lower = bracket.lower;
  double upper = bracket.upper;
  if (!(lower >= 0.0)) throw ConfigError("bracket", "lower end must be non-negative");
  double f_lower = growth(lower);
  double f_upper = 0.0;
  if (upper > lower) {
    f_upper = growth(upper);
  } else {
    constexpr double kStep = 0.02;
    constexpr double kLimit = 10.0;
    upper = lower;
    f_upper = f_lower;
    while (f_upper < 0.0 && upper < kLimit) {
      lower = upper;
      f_lower = f_upper;
      upper = lower + kStep;
      f_upper = growth(upper);
    }
  }
  if (!(f_lower < 0.0 && f_upper >= 0.0)) {
    throw ConfigError("bracket", "max Re mu has no sign change in [" + std::to_string(lower) +
                                     ", " + std::to_string(upper) + "]");
  }
  if (f_upper == 0.0) return upper;
  std::uintmax_t iterations = 200;
  const auto root = boost::math::tools::toms748_solve(
      growth, lower, upper, f_lower, f_upper,
      [](double a, double b) { return std::abs(b - a) < 2e-7; }, iterations);
  return 0.5 * (root.first + root.second);
}

OptimalSqueezing find_optimal_squeezing(double quality, DpoMode mode,
                                        const IntegrationTolerances& tolerances) {
  if (!(quality > 0.0)) throw ConfigError("Q", "must be positive");
  OptimalSqueezing out;
  out.sigma_instability = find_instability(quality, mode, {}, tolerances);
  const double upper = 0.999 * out.sigma_instability;
  auto v2 = [&](double sigma) {
    return DpoSpectrum(DpoParameters{quality, sigma}, mode, tolerances).at(0.0).v2;
  };

  // Coarse scan to isolate the basin, then Brent within the neighbouring cells.
  constexpr int kScan = 24;
  std::vector<double> sigmas;
  std::vector<double> values;
  for (int i = 1; i <= kScan; ++i) {
    sigmas.push_back(upper * i / kScan);
    values.push_back(v2(sigmas.back()));
  }
  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  if (best + 1 == sigmas.size()) {
    // Monotone towards the stability edge: the optimum sits at the boundary.
    const double left = sigmas[best - 1];
    std::uintmax_t iterations = 100;
    const auto result = boost::math::tools::brent_find_minima(v2, left, upper, 24, iterations);
    out.sigma = result.first;
    out.v2 = result.second;
  } else {
    const double left = best == 0 ? 0.0 : sigmas[best - 1];
    const double right = sigmas[best + 1];
    std::uintmax_t iterations = 100;
    const auto result = boost::math::tools::brent_find_minima(v2, left, right, 24, iterations);
    out.sigma = result.first;
    out.v2 = result.second;
  }
  out.v2_db = -10.0 * std::log10(out.v2);
  return out;
}

}  // namespace floqspec
