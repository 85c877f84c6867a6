#include "floqspec/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "floqspec/errors.hpp"
#include "floqspec/numerics.hpp"

namespace floqspec {

// ---------------------------------------------------------------------------
// WeightFunction

WeightFunction WeightFunction::constant_one() { return {}; }

WeightFunction WeightFunction::frame_component(std::size_t row, std::size_t mode) {
  WeightFunction w;
  w.kind_ = Kind::FrameComponent;
  w.row_ = row;
  w.mode_ = mode;
  return w;
}

WeightFunction WeightFunction::sampled(std::vector<Complex> samples, double period) {
  CMatrix column(static_cast<Eigen::Index>(samples.size()), 1);
  for (std::size_t i = 0; i < samples.size(); ++i) column(static_cast<Eigen::Index>(i), 0) = samples[i];
  WeightFunction w;
  w.kind_ = Kind::Sampled;
  w.spline_ = std::make_shared<const PeriodicSpline>(std::move(column), period);
  return w;
}

WeightFunction WeightFunction::scaled(Complex factor) const {
  WeightFunction w = *this;
  w.scale_ *= factor;
  return w;
}

Complex WeightFunction::evaluate(double t, const CMatrix& frame) const {
  switch (kind_) {
    case Kind::ConstantOne:
      return scale_;
    case Kind::FrameComponent:
      return scale_ * frame(static_cast<Eigen::Index>(row_), static_cast<Eigen::Index>(mode_));
    case Kind::Sampled: {
      Complex value;
      spline_->evaluate(t, std::span<Complex>(&value, 1));
      return scale_ * value;
    }
  }
  return 0.0;
}

std::vector<double> WeightFunction::breakpoints() const {
  if (kind_ == Kind::Sampled) return spline_->knots();
  return {};
}

// ---------------------------------------------------------------------------
// SpectralEngine

namespace {

constexpr std::size_t kProfileWidth = 4;

void check_weight(const WeightFunction& w, std::size_t dimension, const char* field) {
  if (w.kind() == WeightFunction::Kind::FrameComponent &&
      (w.row() >= dimension || w.mode() >= dimension)) {
    throw ConfigError(field, "frame component index out of range");
  }
}

void check_term(const SpectralTerm& term, std::size_t dimension, std::size_t noises) {
  const std::size_t first_limit = term.kind == CorrelationKind::NoiseMode ? noises : dimension;
  const std::size_t second_limit = term.kind == CorrelationKind::ModeNoise ? noises : dimension;
  if (term.first >= first_limit) throw ConfigError("alpha", "index out of range");
  if (term.second >= second_limit) throw ConfigError("beta", "index out of range");
  check_weight(term.weight_first, dimension, "weight_alpha");
  check_weight(term.weight_second, dimension, "weight_beta");
}

std::vector<double> merged_breaks(std::initializer_list<std::span<const double>> lists) {
  std::vector<double> out;
  for (auto list : lists) out.insert(out.end(), list.begin(), list.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

struct SpectralEngine::WindowIntegrals {
  // Per term, over the window [0, U].
  std::vector<Complex> first_forward;    // int P1 e^{y t}
  std::vector<Complex> second_forward;   // int P2 e^{y' t'}
  std::vector<Complex> lower_kernel;     // int P2 l e^{-y t'}
  std::vector<Complex> upper_kernel;     // int P1 u e^{-y' t}
  std::vector<Complex> lower_corner;     // int dt' P2 l e^{-y t'} int_{t'}^U P1 e^{y t}
  std::vector<Complex> upper_corner;     // int dt P1 u e^{-y' t} int_t^U P2 e^{y' t'}
  std::vector<Complex> first_observed;   // int_0^observe P1 e^{y t}
  std::vector<Complex> second_observed;  // int_0^observe P2 e^{y' t'}
};

SpectralEngine::SpectralEngine(NoiseKernel kernel, IntegrationTolerances tolerances)
    : kernel_(std::move(kernel)), tolerances_(tolerances) {
  tolerances_.validate();
}

SpectralEngine::Batch SpectralEngine::prepare(std::span<const SpectralTerm> terms) const {
  const std::size_t d = kernel_.dimension();
  const std::size_t noises = kernel_.noise_count();
  for (const auto& term : terms) check_term(term, d, noises);

  Batch batch;
  batch.terms_.assign(terms.begin(), terms.end());
  const CVector& mu = kernel_.decomposition().exponents();
  bool needs_gamma = false;
  bool needs_chi = false;
  std::vector<double> weight_breaks;
  for (const auto& term : terms) {
    const auto f = static_cast<Eigen::Index>(term.first);
    const auto s = static_cast<Eigen::Index>(term.second);
    switch (term.kind) {
      case CorrelationKind::ModeMode:
        batch.lower_rate_.push_back(mu(f));
        batch.upper_rate_.push_back(mu(s));
        batch.lower_coefficient_.push_back(kernel_.pair_upsilon()(f, s));
        batch.upper_coefficient_.push_back(kernel_.pair_upsilon()(f, s));
        needs_gamma = true;
        break;
      case CorrelationKind::ModeNoise:
        batch.lower_rate_.push_back(mu(f));
        batch.upper_rate_.push_back(0.0);
        batch.lower_coefficient_.push_back(1.0);
        batch.upper_coefficient_.push_back(0.0);
        needs_chi = true;
        break;
      case CorrelationKind::NoiseMode:
        batch.lower_rate_.push_back(0.0);
        batch.upper_rate_.push_back(mu(s));
        batch.lower_coefficient_.push_back(0.0);
        batch.upper_coefficient_.push_back(1.0);
        needs_chi = true;
        break;
    }
    for (const auto* w : {&term.weight_first, &term.weight_second}) {
      auto b = w->breakpoints();
      weight_breaks.insert(weight_breaks.end(), b.begin(), b.end());
    }
  }

  const auto& decomposition = kernel_.decomposition();
  const auto& system = decomposition.system();
  const std::size_t width = kProfileWidth * terms.size();
  SampledFunction profile = [&](double t, std::span<Complex> out) {
    const auto frame = decomposition.frame(t);
    CMatrix gamma;
    CMatrix chi_c_xi;
    CMatrix chi_xi_c;
    if (needs_gamma) gamma = kernel_.gamma(t);
    if (needs_chi) {
      const CMatrix b = system.noise_matrix(t);
      chi_c_xi = frame.inverse * b * system.noise_correlation();
      chi_xi_c = system.noise_correlation() * b.transpose() * frame.inverse.transpose();
    }
    for (std::size_t j = 0; j < batch.terms_.size(); ++j) {
      const auto& term = batch.terms_[j];
      const auto f = static_cast<Eigen::Index>(term.first);
      const auto s = static_cast<Eigen::Index>(term.second);
      const Complex p1 = term.weight_first.evaluate(t, frame.frame);
      const Complex p2 = term.weight_second.evaluate(t, frame.frame);
      Complex lower = 0.0;
      Complex upper = 0.0;
      switch (term.kind) {
        case CorrelationKind::ModeMode:
          lower = upper = gamma(f, s);
          break;
        case CorrelationKind::ModeNoise:
          lower = chi_c_xi(f, s);
          break;
        case CorrelationKind::NoiseMode:
          upper = chi_xi_c(f, s);
          break;
      }
      out[kProfileWidth * j + 0] = p1;
      out[kProfileWidth * j + 1] = p2;
      out[kProfileWidth * j + 2] = p2 * lower;
      out[kProfileWidth * j + 3] = p1 * upper;
    }
  };
  const auto breaks =
      merged_breaks({system.breakpoints(), weight_breaks,
                     decomposition.fundamental().record().breaks(), kernel_.nu_record().breaks()});
  if (!terms.empty()) {
    batch.profile_ = sample_recorded(profile, width, 0.0, kernel_.period(), breaks, tolerances_);
  }
  return batch;
}

SpectralEngine::WindowIntegrals SpectralEngine::window(const Batch& batch, double omega,
                                                       double upper, double observe) const {
  const std::size_t n = batch.terms_.size();
  const std::vector<double>& profile_breaks = batch.profile_.breaks();
  std::vector<Complex> y_lower(n);
  std::vector<Complex> y_upper(n);
  for (std::size_t j = 0; j < n; ++j) {
    y_lower[j] = batch.lower_rate_[j] + kI * omega;
    y_upper[j] = batch.upper_rate_[j] - kI * omega;
  }

  // Backward pass: H_L(t) = int_t^U P1 e^{y s} ds, H_U(t) = int_t^U P2 e^{y' s} ds.
  OdeRhs backward = [&](double t, std::span<const Complex>, std::span<Complex> dy) {
    std::vector<Complex> p(kProfileWidth * n);
    batch.profile_.evaluate(t, p);
    for (std::size_t j = 0; j < n; ++j) {
      dy[2 * j] = -p[kProfileWidth * j] * std::exp(y_lower[j] * t);
      dy[2 * j + 1] = -p[kProfileWidth * j + 1] * std::exp(y_upper[j] * t);
    }
  };
  const auto tails = integrate_recorded(backward, CVector::Zero(static_cast<Eigen::Index>(2 * n)),
                                        upper, 0.0, profile_breaks, tolerances_, 2);

  // Forward pass over the product and nested integrands.
  OdeRhs forward = [&](double t, std::span<const Complex>, std::span<Complex> dy) {
    std::vector<Complex> p(kProfileWidth * n);
    std::vector<Complex> h(2 * n);
    batch.profile_.evaluate(t, p);
    tails.record.evaluate(t, h);
    for (std::size_t j = 0; j < n; ++j) {
      const Complex up = std::exp(y_lower[j] * t);
      const Complex vp = std::exp(y_upper[j] * t);
      const Complex lower_term = p[kProfileWidth * j + 2] / up;
      const Complex upper_term = p[kProfileWidth * j + 3] / vp;
      dy[6 * j + 0] = p[kProfileWidth * j] * up;
      dy[6 * j + 1] = p[kProfileWidth * j + 1] * vp;
      dy[6 * j + 2] = lower_term;
      dy[6 * j + 3] = upper_term;
      dy[6 * j + 4] = lower_term * h[2 * j];
      dy[6 * j + 5] = upper_term * h[2 * j + 1];
    }
  };
  std::vector<double> times{0.0};
  for (double b : merged_breaks({profile_breaks, tails.record.breaks()})) {
    if (b > 0.0 && b < upper) times.push_back(b);
  }
  const bool observing = observe > 0.0 && observe < upper;
  if (observing) times.push_back(observe);
  times.push_back(upper);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  const auto states =
      integrate_to_times(forward, CVector::Zero(static_cast<Eigen::Index>(6 * n)), times, tolerances_);
  const CVector& last = states.back();
  CVector at_observe = CVector::Zero(static_cast<Eigen::Index>(6 * n));
  if (observing) {
    const auto it = std::find(times.begin(), times.end(), observe);
    at_observe = states[static_cast<std::size_t>(std::distance(times.begin(), it))];
  }

  WindowIntegrals out;
  for (std::size_t j = 0; j < n; ++j) {
    const auto k = static_cast<Eigen::Index>(6 * j);
    out.first_forward.push_back(last(k));
    out.second_forward.push_back(last(k + 1));
    out.lower_kernel.push_back(last(k + 2));
    out.upper_kernel.push_back(last(k + 3));
    out.lower_corner.push_back(last(k + 4));
    out.upper_corner.push_back(last(k + 5));
    out.first_observed.push_back(at_observe(k));
    out.second_observed.push_back(at_observe(k + 1));
  }
  return out;
}

std::vector<OnePeriodIntegrals> SpectralEngine::one_period_integrals(const Batch& batch,
                                                                     double omega) const {
  if (batch.size() == 0) return {};
  const auto w = window(batch, omega, kernel_.period(), -1.0);
  std::vector<OnePeriodIntegrals> out(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    out[j].lower_block = w.first_forward[j] * w.lower_kernel[j];
    out[j].upper_block = w.second_forward[j] * w.upper_kernel[j];
    out[j].lower_corner = w.lower_corner[j];
    out[j].upper_corner = w.upper_corner[j];
  }
  return out;
}

std::vector<Complex> SpectralEngine::evaluate(const Batch& batch, double omega,
                                              const DetectionMode& mode) const {
  const std::size_t n = batch.size();
  if (n == 0) return {};
  if (!std::isfinite(omega)) throw ConfigError("omega", "must be finite");
  const double period = kernel_.period();
  std::vector<Complex> out(n);

  if (std::holds_alternative<InfiniteDetection>(mode)) {
    const auto w = window(batch, omega, period, -1.0);
    for (std::size_t j = 0; j < n; ++j) {
      Complex total = 0.0;
      if (batch.lower_coefficient_[j] != 0.0) {
        const Complex y = batch.lower_rate_[j] + kI * omega;
        total += batch.lower_coefficient_[j] *
                 (w.lower_corner[j] + upsilon(y, period) * w.first_forward[j] * w.lower_kernel[j]);
      }
      if (batch.upper_coefficient_[j] != 0.0) {
        const Complex y = batch.upper_rate_[j] - kI * omega;
        total += batch.upper_coefficient_[j] *
                 (w.upper_corner[j] + upsilon(y, period) * w.second_forward[j] * w.upper_kernel[j]);
      }
      out[j] = total / period;
    }
    return out;
  }

  const auto finite = std::get<FiniteDetection>(mode);
  if (finite.periods < 1) throw ConfigError("kd", "must be a positive integer");
  if (!(finite.remainder >= 0.0 && finite.remainder < period)) {
    throw ConfigError("tr", "must lie in [0, T)");
  }
  const int k = finite.periods;
  const double remainder = finite.remainder;
  const double detection_time = k * period + remainder;
  const auto w = window(batch, omega, period, remainder);
  WindowIntegrals partial;
  if (remainder > 0.0) partial = window(batch, omega, remainder, -1.0);

  for (std::size_t j = 0; j < n; ++j) {
    Complex total = 0.0;
    if (batch.lower_coefficient_[j] != 0.0) {
      const Complex y = batch.lower_rate_[j] + kI * omega;
      Complex lower = static_cast<double>(k) * w.lower_corner[j] +
                      chessboard_weight(y, period, k) * w.first_forward[j] * w.lower_kernel[j];
      if (remainder > 0.0) {
        lower += partial.lower_corner[j] +
                 boundary_weight(y, period, k) * w.first_observed[j] * w.lower_kernel[j];
      }
      total += batch.lower_coefficient_[j] * lower;
    }
    if (batch.upper_coefficient_[j] != 0.0) {
      const Complex y = batch.upper_rate_[j] - kI * omega;
      Complex upper = static_cast<double>(k) * w.upper_corner[j] +
                      chessboard_weight(y, period, k) * w.second_forward[j] * w.upper_kernel[j];
      if (remainder > 0.0) {
        upper += partial.upper_corner[j] +
                 boundary_weight(y, period, k) * w.second_observed[j] * w.upper_kernel[j];
      }
      total += batch.upper_coefficient_[j] * upper;
    }
    out[j] = total / detection_time;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Free functions

namespace {

void validate_request(const NoiseKernel& kernel, const SpectralDensityRequest& request) {
  for (std::size_t i = 0; i < request.omegas.size(); ++i) {
    if (!std::isfinite(request.omegas[i])) throw ConfigError("omega", "must be finite");
    if (i > 0 && request.omegas[i] < request.omegas[i - 1]) {
      throw ConfigError("omega", "grid must be sorted");
    }
  }
  if (const auto* finite = std::get_if<FiniteDetection>(&request.detection)) {
    if (finite->periods < 1) throw ConfigError("kd", "must be a positive integer");
    if (!(finite->remainder >= 0.0 && finite->remainder < kernel.period())) {
      throw ConfigError("tr", "must lie in [0, T)");
    }
  }
}

std::vector<Complex> run_single(const NoiseKernel& kernel, const SpectralDensityRequest& request,
                                CorrelationKind kind, const DetectionMode& mode,
                                const IntegrationTolerances& tolerances) {
  validate_request(kernel, request);
  SpectralEngine engine(kernel, tolerances);
  const SpectralTerm term{kind, request.alpha, request.beta, request.weight_alpha,
                          request.weight_beta};
  const auto batch = engine.prepare(std::span<const SpectralTerm>(&term, 1));
  std::vector<Complex> out;
  out.reserve(request.omegas.size());
  for (double omega : request.omegas) out.push_back(engine.evaluate(batch, omega, mode).front());
  return out;
}

}  // namespace

OnePeriodIntegrals one_period_integrals(const NoiseKernel& kernel, std::size_t alpha,
                                        std::size_t beta, const WeightFunction& weight_alpha,
                                        const WeightFunction& weight_beta, double omega,
                                        const IntegrationTolerances& tolerances) {
  SpectralEngine engine(kernel, tolerances);
  const SpectralTerm term{CorrelationKind::ModeMode, alpha, beta, weight_alpha, weight_beta};
  const auto batch = engine.prepare(std::span<const SpectralTerm>(&term, 1));
  return engine.one_period_integrals(batch, omega).front();
}

std::vector<Complex> spectral_density_infinite(const NoiseKernel& kernel,
                                               const SpectralDensityRequest& request,
                                               const IntegrationTolerances& tolerances) {
  return run_single(kernel, request, CorrelationKind::ModeMode, InfiniteDetection{}, tolerances);
}

std::vector<Complex> spectral_density_finite(const NoiseKernel& kernel,
                                             const SpectralDensityRequest& request,
                                             const IntegrationTolerances& tolerances) {
  const auto* finite = std::get_if<FiniteDetection>(&request.detection);
  if (finite == nullptr) throw ConfigError("kd", "finite detection requires k_d and T_r");
  return run_single(kernel, request, CorrelationKind::ModeMode, *finite, tolerances);
}

std::vector<Complex> spectral_density(const NoiseKernel& kernel, const SpectralDensityRequest& request,
                                      const IntegrationTolerances& tolerances) {
  return run_single(kernel, request, CorrelationKind::ModeMode, request.detection, tolerances);
}

std::vector<Complex> cross_spectral_density_c_xi(const NoiseKernel& kernel,
                                                 const SpectralDensityRequest& request,
                                                 const IntegrationTolerances& tolerances) {
  return run_single(kernel, request, CorrelationKind::ModeNoise, request.detection, tolerances);
}

std::vector<Complex> cross_spectral_density_xi_c(const NoiseKernel& kernel,
                                                 const SpectralDensityRequest& request,
                                                 const IntegrationTolerances& tolerances) {
  return run_single(kernel, request, CorrelationKind::NoiseMode, request.detection, tolerances);
}

CrossSpectralDensities cross_spectral_densities(const NoiseKernel& kernel,
                                                const SpectralDensityRequest& request,
                                                const IntegrationTolerances& tolerances) {
  const std::size_t limit = std::min(kernel.dimension(), kernel.noise_count());
  if (request.alpha >= limit || request.beta >= limit) {
    throw ConfigError("alpha", "cross spectra need alpha, beta < min(D, N)");
  }
  return {cross_spectral_density_c_xi(kernel, request, tolerances),
          cross_spectral_density_xi_c(kernel, request, tolerances)};
}

std::vector<CMatrix> fluctuation_spectrum(const NoiseKernel& kernel, std::span<const double> omegas,
                                          const DetectionMode& mode,
                                          const IntegrationTolerances& tolerances) {
  const std::size_t d = kernel.dimension();
  std::vector<SpectralTerm> terms;
  for (std::size_t m = 0; m < d; ++m) {
    for (std::size_t n = 0; n < d; ++n) {
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
          terms.push_back({CorrelationKind::ModeMode, a, b, WeightFunction::frame_component(m, a),
                           WeightFunction::frame_component(n, b)});
        }
      }
    }
  }
  SpectralEngine engine(kernel, tolerances);
  const auto batch = engine.prepare(terms);
  std::vector<CMatrix> out;
  for (double omega : omegas) {
    const auto values = engine.evaluate(batch, omega, mode);
    CMatrix s = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    std::size_t index = 0;
    for (std::size_t m = 0; m < d; ++m) {
      for (std::size_t n = 0; n < d; ++n) {
        for (std::size_t ab = 0; ab < d * d; ++ab) {
          s(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) += values[index++];
        }
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace floqspec
