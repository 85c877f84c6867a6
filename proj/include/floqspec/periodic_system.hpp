#pragma once

#include <functional>
#include <string>
#include <vector>

#include "floqspec/types.hpp"

namespace floqspec {

/// Linearised fluctuation dynamics dx/dt = L(t) x + B(t) xi(t) with
/// T-periodic L and B and white noise <xi(t) xi^T(t')> = G delta(t - t').
class PeriodicLinearSystem {
 public:
  using MatrixFunction = std::function<CMatrix(double)>;

  PeriodicLinearSystem(std::size_t dimension, std::size_t noise_count, double period,
                       MatrixFunction drift, MatrixFunction noise_matrix, CMatrix noise_correlation,
                       std::vector<double> breakpoints = {});

  std::size_t dimension() const { return dimension_; }
  std::size_t noise_count() const { return noise_count_; }
  double period() const { return period_; }

  CMatrix drift(double t) const { return drift_(t); }
  CMatrix noise_matrix(double t) const { return noise_matrix_(t); }
  const CMatrix& noise_correlation() const { return noise_correlation_; }

  /// Times in (0, T) where L or B lose smoothness (e.g. spline knots).
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  /// Free-form description carried into output metadata.
  const std::string& description() const { return description_; }
  void set_description(std::string description) { description_ = std::move(description); }

  /// Samples L and B at `samples` points and checks shapes and
  /// L(t + T) = L(t), B(t + T) = B(t) to the given relative tolerance.
  void validate(std::size_t samples = 16, double tolerance = 1e-9) const;

 private:
  std::size_t dimension_;
  std::size_t noise_count_;
  double period_;
  MatrixFunction drift_;
  MatrixFunction noise_matrix_;
  CMatrix noise_correlation_;
  std::vector<double> breakpoints_;
  std::string description_;
};

}  // namespace floqspec
