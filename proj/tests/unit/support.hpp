#pragma once

#include <cmath>
#include <numbers>

#include "floqspec/periodic_system.hpp"

namespace floqspec::test {

inline double relative_error(const CMatrix& value, const CMatrix& reference) {
  return (value - reference).norm() / std::max(reference.norm(), 1e-300);
}

inline double relative_error(Complex value, Complex reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

inline CMatrix scalar(Complex v) {
  CMatrix m(1, 1);
  m(0, 0) = v;
  return m;
}

/// dx/dt = -g x + xi with <xi xi> = delta: the Ornstein-Uhlenbeck process.
inline PeriodicLinearSystem ornstein_uhlenbeck(double g, double period) {
  return PeriodicLinearSystem(
      1, 1, period, [g](double) { return scalar(-g); }, [](double) { return scalar(1.0); },
      scalar(1.0));
}

/// Scalar system with periodic damping g(t) = g0 + a cos(2 pi t / T).
inline PeriodicLinearSystem modulated_scalar(double g0, double a, double period) {
  const double w = 2.0 * std::numbers::pi / period;
  return PeriodicLinearSystem(
      1, 1, period, [=](double t) { return scalar(-(g0 + a * std::cos(w * t))); },
      [=](double t) { return scalar(1.0 + 0.3 * std::sin(w * t)); }, scalar(1.0));
}

/// Three-mode driven system with real symmetric G and time-dependent B.
inline PeriodicLinearSystem synthetic_three_mode() {
  const double period = 1.7;
  const double w = 2.0 * std::numbers::pi / period;
  CMatrix g(2, 2);
  g << 1.0, 0.3, 0.3, 0.8;
  return PeriodicLinearSystem(
      3, 2, period,
      [w](double t) {
        CMatrix l(3, 3);
        l << -0.9 + 0.3 * std::cos(w * t), 0.7, 0.2 * std::sin(w * t),  //
            -0.6, -1.1, 0.4 * std::cos(2.0 * w * t),                    //
            0.1, -0.3 * std::sin(w * t), -0.7;
        return l;
      },
      [w](double t) {
        CMatrix b(3, 2);
        b << 1.0, 0.2 * std::cos(w * t),  //
            0.0, 0.9,                     //
            0.3 * std::sin(w * t), 0.5;
        return b;
      },
      g);
}

}  // namespace floqspec::test
