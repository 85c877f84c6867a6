#pragma once

#include <span>
#include <vector>

#include "floqspec/types.hpp"

namespace floqspec {

/// C2 periodic cubic spline through uniform samples y_j = y(j T / M),
/// j = 0..M-1, of a vector-valued function. Each sample is a row.
class PeriodicSpline {
 public:
  static constexpr int kOrder = 3;

  PeriodicSpline() = default;
  PeriodicSpline(CMatrix samples, double period);

  std::size_t sample_count() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t width() const { return static_cast<std::size_t>(values_.cols()); }
  double period() const { return period_; }

  void evaluate(double t, std::span<Complex> out) const;
  CVector operator()(double t) const;

  /// Knot times in (0, T).
  std::vector<double> knots() const;

 private:
  CMatrix values_;
  CMatrix second_;  // second derivatives at the knots
  double period_ = 1.0;
  double step_ = 1.0;
};

}  // namespace floqspec
