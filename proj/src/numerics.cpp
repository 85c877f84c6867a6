#include "floqspec/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "floqspec/errors.hpp"

namespace floqspec {

void IntegrationTolerances::validate() const {
  if (!(relative > 0.0) || !std::isfinite(relative)) {
    throw ConfigError("tol-rel", "must be positive and finite");
  }
  if (!(absolute > 0.0) || !std::isfinite(absolute)) {
    throw ConfigError("tol-abs", "must be positive and finite");
  }
}

Complex expm1(Complex z) {
  const double a = z.real();
  const double b = z.imag();
  const double half_sin = std::sin(0.5 * b);
  const double cos_m1 = -2.0 * half_sin * half_sin;
  const double em1 = std::expm1(a);
  return {em1 * std::cos(b) + cos_m1, std::exp(a) * std::sin(b)};
}

double reduce_to_period(double t, double period) {
  double r = t - std::floor(t / period) * period;
  if (r < 0.0) r = 0.0;
  const double guard = 4.0 * std::numeric_limits<double>::epsilon() * std::max(period, std::abs(t));
  if (r >= period - guard) r = 0.0;
  return r;
}

Complex upsilon(Complex x, double period) {
  const Complex denominator = -expm1(x * period);
  if (std::abs(denominator) < 1e-13) {
    throw ResonantDenominatorError("resonant denominator: |1 - exp(xT)| = " +
                                   std::to_string(std::abs(denominator)));
  }
  return std::exp(x * period) / denominator;
}

namespace {

constexpr double kSeriesThreshold = 1e-8;

Complex direct_boundary_sum(Complex z, int k) {
  Complex sum = 0.0;
  Complex power = 1.0;
  for (int j = 1; j <= k; ++j) {
    power *= z;
    sum += power;
  }
  return sum;
}

Complex direct_chessboard_sum(Complex z, int k) {
  Complex sum = 0.0;
  Complex power = 1.0;
  for (int j = 1; j < k; ++j) {
    power *= z;
    sum += static_cast<double>(k - j) * power;
  }
  return sum;
}

}  // namespace

Complex boundary_weight(Complex y, double period, int periods) {
  const Complex z = std::exp(y * period);
  const Complex one_minus_z = -expm1(y * period);
  if (std::abs(one_minus_z) < kSeriesThreshold) return direct_boundary_sum(z, periods);
  const Complex one_minus_zk = -expm1(y * period * static_cast<double>(periods));
  return z * one_minus_zk / one_minus_z;
}

Complex chessboard_weight(Complex y, double period, int periods) {
  const Complex z = std::exp(y * period);
  const Complex one_minus_z = -expm1(y * period);
  if (std::abs(one_minus_z) < kSeriesThreshold) return direct_chessboard_sum(z, periods);
  const double k = periods;
  const Complex one_minus_zk = -expm1(y * period * k);
  return k * z / one_minus_z - z * one_minus_zk / (one_minus_z * one_minus_z);
}

Complex chessboard_epsilon(Complex y, double period, int periods) {
  const Complex one_minus_z = -expm1(y * period);
  const double k = periods;
  if (std::abs(one_minus_z) < kSeriesThreshold) {
    // (1/k) sum_{j<k} z^j, the closed form's ratio evaluated termwise.
    const Complex z = std::exp(y * period);
    Complex sum = 0.0;
    Complex power = 1.0;
    for (int j = 0; j < periods; ++j) {
      sum += power;
      power *= z;
    }
    return 1.0 - sum / k;
  }
  const Complex one_minus_zk = -expm1(y * period * k);
  return 1.0 - one_minus_zk / (k * one_minus_z);
}

const GaussRule& gauss_legendre(std::size_t order) {
  static std::mutex mutex;
  static std::map<std::size_t, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double n = static_cast<double>(order);
  for (std::size_t i = 0; i < order; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      derivative = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / derivative;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * derivative * derivative);
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

double condition_number(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  const double smallest = s(s.size() - 1);
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smallest;
}

}  // namespace floqspec
