#include "floqspec/periodic_system.hpp"

#include <cmath>

#include "floqspec/errors.hpp"

namespace floqspec {

PeriodicLinearSystem::PeriodicLinearSystem(std::size_t dimension, std::size_t noise_count,
                                           double period, MatrixFunction drift,
                                           MatrixFunction noise_matrix, CMatrix noise_correlation,
                                           std::vector<double> breakpoints)
    : dimension_(dimension),
      noise_count_(noise_count),
      period_(period),
      drift_(std::move(drift)),
      noise_matrix_(std::move(noise_matrix)),
      noise_correlation_(std::move(noise_correlation)),
      breakpoints_(std::move(breakpoints)) {
  if (dimension_ == 0) throw ConfigError("dimension", "must be at least 1");
  if (noise_count_ == 0) throw ConfigError("noise_count", "must be at least 1");
  if (!(period_ > 0.0) || !std::isfinite(period_)) throw ConfigError("period", "must be positive");
  if (!drift_) throw ConfigError("drift", "missing evaluator");
  if (!noise_matrix_) throw ConfigError("noise_matrix", "missing evaluator");
  if (noise_correlation_.rows() != static_cast<Eigen::Index>(noise_count_) ||
      noise_correlation_.cols() != static_cast<Eigen::Index>(noise_count_)) {
    throw ConfigError("noise_correlation", "must be noise_count x noise_count");
  }
  std::erase_if(breakpoints_, [this](double b) { return !(b > 0.0 && b < period_); });
}

void PeriodicLinearSystem::validate(std::size_t samples, double tolerance) const {
  const auto d = static_cast<Eigen::Index>(dimension_);
  const auto n = static_cast<Eigen::Index>(noise_count_);
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = period_ * (static_cast<double>(i) + 0.37) / static_cast<double>(samples);
    const CMatrix l0 = drift(t);
    const CMatrix b0 = noise_matrix(t);
    if (l0.rows() != d || l0.cols() != d) throw ConfigError("drift", "must be D x D");
    if (b0.rows() != d || b0.cols() != n) throw ConfigError("noise_matrix", "must be D x N");
    if (!l0.allFinite() || !b0.allFinite()) throw ConfigError("drift", "non-finite entries");
    const CMatrix l1 = drift(t + period_);
    const CMatrix b1 = noise_matrix(t + period_);
    if ((l1 - l0).norm() > tolerance * (1.0 + l0.norm())) {
      throw ConfigError("drift", "not periodic with the declared period");
    }
    if ((b1 - b0).norm() > tolerance * (1.0 + b0.norm())) {
      throw ConfigError("noise_matrix", "not periodic with the declared period");
    }
  }
}

}  // namespace floqspec
