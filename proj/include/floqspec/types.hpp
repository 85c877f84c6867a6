#pragma once

#include <complex>

#include <Eigen/Dense>

namespace floqspec {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Error control for every adaptive integration in the library.
struct IntegrationTolerances {
  double relative = 1e-10;
  double absolute = 1e-12;

  void validate() const;
};

}  // namespace floqspec
