#include "floqspec/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "floqspec/errors.hpp"
#include "floqspec/numerics.hpp"

namespace floqspec {

FundamentalRecord::FundamentalRecord(ChebyshevRecord record, CMatrix monodromy, double period)
    : record_(std::move(record)),
      monodromy_(std::move(monodromy)),
      period_(period),
      dimension_(monodromy_.rows()) {}

CMatrix FundamentalRecord::at(double t) const {
  CMatrix f(dimension_, dimension_);
  record_.evaluate(t, std::span<Complex>(f.data(), static_cast<std::size_t>(f.size())));
  return f;
}

FundamentalRecord integrate_fundamental(const PeriodicLinearSystem& system,
                                        const IntegrationTolerances& tolerances) {
  tolerances.validate();
  const auto d = static_cast<Eigen::Index>(system.dimension());
  OdeRhs rhs = [&system, d](double t, std::span<const Complex> y, std::span<Complex> dy) {
    Eigen::Map<const CMatrix> f(y.data(), d, d);
    Eigen::Map<CMatrix> df(dy.data(), d, d);
    df.noalias() = system.drift(t) * f;
  };
  const CMatrix identity = CMatrix::Identity(d, d);
  const CVector initial = identity.reshaped();
  auto solution = integrate_recorded(rhs, initial, 0.0, system.period(), system.breakpoints(),
                                     tolerances);
  CMatrix monodromy = solution.final_state.reshaped(d, d);
  return {std::move(solution.record), std::move(monodromy), system.period()};
}

ModalDecomposition decompose(const CMatrix& monodromy, double period, double max_condition) {
  if (monodromy.rows() != monodromy.cols() || monodromy.rows() == 0) {
    throw ConfigError("monodromy", "must be a non-empty square matrix");
  }
  if (!(period > 0.0)) throw ConfigError("period", "must be positive");

  Eigen::ComplexEigenSolver<CMatrix> solver(monodromy);
  if (solver.info() != Eigen::Success) throw NonDiagonalizableError(std::numeric_limits<double>::infinity());
  const CVector& phi = solver.eigenvalues();
  const Eigen::Index d = phi.size();

  CVector mu(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (phi(i) == 0.0) throw NonDiagonalizableError(std::numeric_limits<double>::infinity());
    // std::arg returns values in [-pi, pi]; map -pi onto +pi.
    double angle = std::arg(phi(i));
    if (angle <= -std::numbers::pi) angle = std::numbers::pi;
    mu(i) = Complex(std::log(std::abs(phi(i))), angle) / period;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&mu](Eigen::Index a, Eigen::Index b) {
    const double ra = mu(a).real();
    const double rb = mu(b).real();
    const double tie = 1e-12 * (1.0 + std::max(std::abs(ra), std::abs(rb)));
    if (std::abs(ra - rb) > tie) return ra > rb;
    return mu(a).imag() < mu(b).imag();
  });

  ModalDecomposition out;
  out.exponents.resize(d);
  out.multipliers.resize(d);
  out.modes.resize(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.exponents(k) = mu(src);
    out.multipliers(k) = phi(src);
    out.modes.col(k) = solver.eigenvectors().col(src).normalized();
  }
  out.condition = condition_number(out.modes);
  if (!(out.condition <= max_condition)) throw NonDiagonalizableError(out.condition);
  out.modes_inverse = out.modes.partialPivLu().inverse();
  return out;
}

FloquetDecomposition::FloquetDecomposition(PeriodicLinearSystem system,
                                           FundamentalRecord fundamental,
                                           ModalDecomposition modes)
    : system_(std::move(system)), fundamental_(std::move(fundamental)), modes_(std::move(modes)) {}

FloquetDecomposition FloquetDecomposition::build(const PeriodicLinearSystem& system,
                                                 const IntegrationTolerances& tolerances) {
  auto fundamental = integrate_fundamental(system, tolerances);
  auto modes = decompose(fundamental.monodromy(), system.period());
  return {system, std::move(fundamental), std::move(modes)};
}

double FloquetDecomposition::max_growth_rate() const {
  return modes_.exponents.real().maxCoeff();
}

FramePair FloquetDecomposition::frame(double t) const {
  const double period = system_.period();
  if (t < 0.0 || t > period) t = reduce_to_period(t, period);
  const CMatrix f = fundamental_.at(t);
  const Eigen::Index d = modes_.exponents.size();
  CVector decay(d);
  CVector growth(d);
  for (Eigen::Index a = 0; a < d; ++a) {
    decay(a) = std::exp(-modes_.exponents(a) * t);
    growth(a) = 1.0 / decay(a);
  }
  FramePair out;
  out.frame = f * modes_.modes * decay.asDiagonal();
  out.inverse = growth.asDiagonal() * modes_.modes_inverse * f.partialPivLu().inverse();
  return out;
}

FloquetDecomposition FloquetDecomposition::with_branch_shift(std::size_t mode, int k) const {
  if (mode >= dimension()) throw ConfigError("mode", "out of range");
  FloquetDecomposition shifted = *this;
  shifted.modes_.exponents(static_cast<Eigen::Index>(mode)) +=
      Complex(0.0, 2.0 * std::numbers::pi * k / period());
  return shifted;
}

StabilityReport stability_check(const FloquetDecomposition& decomposition) {
  const double rate = decomposition.max_growth_rate();
  return {rate, rate < 0.0};
}

}  // namespace floqspec
