#pragma once

#include <span>
#include <vector>

#include "floqspec/types.hpp"

namespace floqspec {

/// e^z - 1 without cancellation for small |z|.
Complex expm1(Complex z);

/// Maps t onto [0, T). Results within a few ulps below T snap to 0 so that
/// period boundaries always land on the start of the next period.
double reduce_to_period(double t, double period);

/// Geometric-series factor e^{xT} / (1 - e^{xT}) = sum_{n>=0} e^{(n+1)xT}.
/// Throws ResonantDenominatorError when |1 - e^{xT}| falls below 1e-13.
Complex upsilon(Complex x, double period);

/// sum_{j=1}^{k} z^j with z = e^{yT}; equals upsilon(y) (1 - z^k).
Complex boundary_weight(Complex y, double period, int periods);

/// sum_{j=1}^{k-1} (k - j) z^j with z = e^{yT}: the off-diagonal chessboard sum.
/// Equals k * epsilon(y) * upsilon(y).
Complex chessboard_weight(Complex y, double period, int periods);

/// epsilon(y) = 1 - (1/k) (1 - z^k) / (1 - z), with a direct-sum fallback
/// near z = 1.
Complex chessboard_epsilon(Complex y, double period, int periods);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1].
const GaussRule& gauss_legendre(std::size_t order);

/// 2-norm condition number.
double condition_number(const CMatrix& m);

}  // namespace floqspec
