#include "floqspec/interpolation.hpp"

#include <cmath>

#include "floqspec/errors.hpp"
#include "floqspec/numerics.hpp"

namespace floqspec {

namespace {

// Solves the cyclic system m_{j-1} + 4 m_j + m_{j+1} = r_j (Sherman-Morrison).
CVector solve_cyclic(const CVector& rhs) {
  const Eigen::Index n = rhs.size();
  const double alpha = 1.0;  // bottom-left corner
  const double beta = 1.0;   // top-right corner
  const double gamma = -4.0;
  std::vector<double> diag(static_cast<std::size_t>(n), 4.0);
  diag.front() = 4.0 - gamma;
  diag.back() = 4.0 - alpha * beta / gamma;

  auto tridiagonal = [&diag, n](const CVector& r) {
    CVector x(n);
    std::vector<double> c_prime(static_cast<std::size_t>(n));
    double denom = diag[0];
    x(0) = r(0) / denom;
    for (Eigen::Index i = 1; i < n; ++i) {
      c_prime[static_cast<std::size_t>(i - 1)] = 1.0 / denom;
      denom = diag[static_cast<std::size_t>(i)] - c_prime[static_cast<std::size_t>(i - 1)];
      x(i) = (r(i) - x(i - 1)) / denom;
    }
    for (Eigen::Index i = n - 2; i >= 0; --i) x(i) -= c_prime[static_cast<std::size_t>(i)] * x(i + 1);
    return x;
  };

  CVector x = tridiagonal(rhs);
  CVector u = CVector::Zero(n);
  u(0) = gamma;
  u(n - 1) = alpha;
  CVector z = tridiagonal(u);
  const Complex factor = (x(0) + beta * x(n - 1) / gamma) / (1.0 + z(0) + beta * z(n - 1) / gamma);
  return x - factor * z;
}

}  // namespace

PeriodicSpline::PeriodicSpline(CMatrix samples, double period)
    : values_(std::move(samples)), period_(period) {
  const Eigen::Index m = values_.rows();
  if (m < 4) throw ConfigError("samples", "a periodic spline needs at least 4 samples per period");
  if (!(period_ > 0.0)) throw ConfigError("period", "must be positive");
  step_ = period_ / static_cast<double>(m);
  second_.resize(m, values_.cols());
  const double scale = 6.0 / (step_ * step_);
  for (Eigen::Index c = 0; c < values_.cols(); ++c) {
    CVector rhs(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const Complex prev = values_((j + m - 1) % m, c);
      const Complex next = values_((j + 1) % m, c);
      rhs(j) = scale * (next - 2.0 * values_(j, c) + prev);
    }
    second_.col(c) = solve_cyclic(rhs);
  }
}

void PeriodicSpline::evaluate(double t, std::span<Complex> out) const {
  const Eigen::Index m = values_.rows();
  const double s = reduce_to_period(t, period_);
  auto j = static_cast<Eigen::Index>(std::floor(s / step_));
  j = std::clamp<Eigen::Index>(j, 0, m - 1);
  const Eigen::Index next = (j + 1) % m;
  const double u = s - static_cast<double>(j) * step_;
  const double v = step_ - u;
  const double h = step_;
  for (Eigen::Index c = 0; c < values_.cols(); ++c) {
    const Complex mj = second_(j, c);
    const Complex mk = second_(next, c);
    out[static_cast<std::size_t>(c)] = mj * (v * v * v) / (6.0 * h) + mk * (u * u * u) / (6.0 * h) +
                                       (values_(j, c) / h - mj * h / 6.0) * v +
                                       (values_(next, c) / h - mk * h / 6.0) * u;
  }
}

CVector PeriodicSpline::operator()(double t) const {
  CVector out(values_.cols());
  evaluate(t, std::span<Complex>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

std::vector<double> PeriodicSpline::knots() const {
  std::vector<double> out;
  for (Eigen::Index j = 1; j < values_.rows(); ++j) out.push_back(static_cast<double>(j) * step_);
  return out;
}

}  // namespace floqspec
