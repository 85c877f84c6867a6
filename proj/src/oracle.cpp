#include "floqspec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "floqspec/errors.hpp"
#include "floqspec/numerics.hpp"
#include "floqspec/record.hpp"

namespace floqspec {

void OracleConfig::validate() const {
  tolerances.validate();
  if (settle_periods < 1) throw ConfigError("settle_periods", "must be positive");
  if (!(settle_threshold > 0.0 && settle_threshold < 1.0)) {
    throw ConfigError("settle_threshold", "must lie in (0, 1)");
  }
  if (quadrature_order < 2) throw ConfigError("quadrature_order", "must be at least 2");
  if (panels_per_period < 1) throw ConfigError("panels_per_period", "must be positive");
  if (!(quadrature_tolerance > 0.0)) throw ConfigError("quadrature_tolerance", "must be positive");
}

namespace {

using Eigen::Index;

CMatrix unpack(std::span<const Complex> data, Index d) {
  return Eigen::Map<const CMatrix>(data.data(), d, d);
}

void pack(const CMatrix& m, std::span<Complex> out) {
  Eigen::Map<CMatrix>(out.data(), m.rows(), m.cols()) = m;
}

// State layout: covariance X then fundamental F, both column-major D x D.
OdeRhs moment_rhs(const PeriodicLinearSystem& system) {
  const Index d = static_cast<Index>(system.dimension());
  return [&system, d](double t, std::span<const Complex> y, std::span<Complex> dy) {
    const CMatrix l = system.drift(t);
    const CMatrix b = system.noise_matrix(t);
    const CMatrix x = unpack(y.subspan(0, d * d), d);
    const CMatrix f = unpack(y.subspan(d * d, d * d), d);
    pack(l * x + x * l.transpose() + b * system.noise_correlation() * b.transpose(),
         dy.subspan(0, d * d));
    pack(l * f, dy.subspan(d * d, d * d));
  };
}

CVector pack_state(const CMatrix& x, const CMatrix& f) {
  const Index n = x.size();
  CVector state(2 * n);
  state.head(n) = Eigen::Map<const CVector>(x.data(), n);
  state.tail(n) = Eigen::Map<const CVector>(f.data(), n);
  return state;
}

struct Node {
  double t;
  double w;
};

std::vector<Node> composite_rule(double a, double b, double max_width, std::size_t order) {
  std::vector<Node> nodes;
  if (!(b > a)) return nodes;
  // Panel edges sit on the global grid m * max_width so that every rule shares
  // the same breaks (weights with knots on that grid stay panel-wise smooth).
  std::vector<double> edges{a};
  const double slack = 1e-12 * max_width;
  for (auto m = static_cast<long long>(std::floor(a / max_width)) + 1;; ++m) {
    const double edge = static_cast<double>(m) * max_width;
    if (edge >= b - slack) break;
    if (edge > a + slack) edges.push_back(edge);
  }
  edges.push_back(b);
  const GaussRule& rule = gauss_legendre(order);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double left = edges[p];
    const double h = edges[p + 1] - left;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      nodes.push_back({left + 0.5 * h * (rule.nodes[i] + 1.0), 0.5 * h * rule.weights[i]});
    }
  }
  return nodes;
}

// Outer nodes over t' and, per outer node, inner nodes over t split at t'.
struct SquareRule {
  std::vector<Node> outer;
  std::vector<std::vector<Node>> inner;
};

SquareRule square_rule(double extent, double max_width, std::size_t order) {
  SquareRule rule;
  rule.outer = composite_rule(0.0, extent, max_width, order);
  for (const auto& node : rule.outer) {
    auto below = composite_rule(0.0, node.t, max_width, order);
    const auto above = composite_rule(node.t, extent, max_width, order);
    below.insert(below.end(), above.begin(), above.end());
    rule.inner.push_back(std::move(below));
  }
  return rule;
}

double detection_time(const FiniteDetection& detection, double period) {
  if (detection.periods < 0) throw ConfigError("kd", "must be non-negative");
  if (!(detection.remainder >= 0.0 && detection.remainder < period)) {
    throw ConfigError("tr", "must lie in [0, T)");
  }
  const double extent = detection.periods * period + detection.remainder;
  if (!(extent > 0.0)) throw ConfigError("kd", "detection time must be positive");
  return extent;
}

}  // namespace

// ---------------------------------------------------------------------------
// Covariance oracle

CovarianceOracle::CovarianceOracle(PeriodicLinearSystem system, OracleConfig config)
    : system_(std::move(system)), config_(config) {
  config_.validate();
  const Index d = static_cast<Index>(system_.dimension());
  const double period = system_.period();

  // One-period map of (X, F) started from (0, I).
  const CVector start = pack_state(CMatrix::Zero(d, d), CMatrix::Identity(d, d));
  std::vector<double> times{0.0};
  for (double b : system_.breakpoints()) times.push_back(b);
  times.push_back(period);
  const CVector end = integrate_to_times(moment_rhs(system_), start, times, config_.tolerances).back();
  const CMatrix forcing = Eigen::Map<const CMatrix>(end.data(), d, d);
  const CMatrix map = Eigen::Map<const CMatrix>(end.data() + d * d, d, d);

  CMatrix x = CMatrix::Zero(d, d);
  CMatrix power = CMatrix::Identity(d, d);
  for (int n = 1; n <= config_.settle_periods; ++n) {
    x = map * x * map.transpose() + forcing;
    power = map * power;
    const double norm = power.norm();
    if (!std::isfinite(norm) || norm > 1e100) break;
    if (norm < config_.settle_threshold) {
      settled_ = x;
      periods_used_ = n;
      return;
    }
  }
  const double growth = std::log(std::max(map.eigenvalues().cwiseAbs().maxCoeff(), 1e-300)) / period;
  throw UnstableSystemError(growth, "covariance did not settle within " +
                                        std::to_string(config_.settle_periods) + " periods");
}

CovarianceOracle::Trajectory CovarianceOracle::trajectory(std::span<const double> times) const {
  const Index d = static_cast<Index>(system_.dimension());
  std::vector<double> grid{0.0};
  for (double t : times) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("t", "times must be finite and >= 0");
    if (t < grid.back()) throw ConfigError("t", "times must be non-decreasing");
    if (t > grid.back()) grid.push_back(t);
  }
  std::vector<CVector> states;
  if (grid.size() > 1) {
    states = integrate_to_times(moment_rhs(system_), pack_state(settled_, CMatrix::Identity(d, d)),
                                grid, config_.tolerances);
  } else {
    states.push_back(pack_state(settled_, CMatrix::Identity(d, d)));
  }
  Trajectory out;
  std::size_t g = 0;
  for (double t : times) {
    while (grid[g] < t) ++g;
    out.covariance.push_back(Eigen::Map<const CMatrix>(states[g].data(), d, d));
    out.fundamental.push_back(Eigen::Map<const CMatrix>(states[g].data() + d * d, d, d));
  }
  return out;
}

CMatrix CovarianceOracle::equal_time(double t) const {
  const double times[] = {t};
  return trajectory(times).covariance.front();
}

CMatrix CovarianceOracle::two_time(double t, double tp) const {
  const double times[] = {std::min(t, tp), std::max(t, tp)};
  const auto path = trajectory(times);
  // Phi(late, early) = F(late) F(early)^{-1}.
  const CMatrix propagator = path.fundamental[1] * path.fundamental[0].inverse();
  if (t >= tp) return propagator * path.covariance[0];
  return path.covariance[0] * propagator.transpose();
}

CMatrix oracle_equal_time_covariance(const PeriodicLinearSystem& system, double t,
                                     const OracleConfig& config) {
  return CovarianceOracle(system, config).equal_time(t);
}

CMatrix oracle_two_time(const PeriodicLinearSystem& system, double t, double tp,
                        const OracleConfig& config) {
  return CovarianceOracle(system, config).two_time(t, tp);
}

// ---------------------------------------------------------------------------
// Spectral quadrature

QuadratureResult oracle_spectral_density(const NoiseKernel& kernel, std::size_t alpha,
                                         std::size_t beta, const WeightFunction& weight_alpha,
                                         const WeightFunction& weight_beta, double omega,
                                         const FiniteDetection& detection,
                                         const OracleConfig& config) {
  config.validate();
  const std::size_t d = kernel.dimension();
  if (alpha >= d) throw ConfigError("alpha", "index out of range");
  if (beta >= d) throw ConfigError("beta", "index out of range");
  const double period = kernel.period();
  const double extent = detection_time(detection, period);
  const double width = period / static_cast<double>(config.panels_per_period);
  const auto& decomposition = kernel.decomposition();

  std::map<double, Complex> weight_cache_a;
  std::map<double, Complex> weight_cache_b;
  auto weight = [&](std::map<double, Complex>& cache, const WeightFunction& w, double t) {
    auto it = cache.find(t);
    if (it != cache.end()) return it->second;
    const Complex value =
        w.needs_frame() ? w.evaluate(t, decomposition.frame(t).frame) : w.evaluate(t, CMatrix());
    cache.emplace(t, value);
    return value;
  };

  auto run = [&](std::size_t order) {
    const SquareRule rule = square_rule(extent, width, order);
    Complex total = 0.0;
    for (std::size_t i = 0; i < rule.outer.size(); ++i) {
      const double tp = rule.outer[i].t;
      const Complex pb = weight(weight_cache_b, weight_beta, tp);
      if (pb == 0.0) continue;
      Complex inner = 0.0;
      for (const auto& node : rule.inner[i]) {
        const Complex pa = weight(weight_cache_a, weight_alpha, node.t);
        if (pa == 0.0) continue;
        const Complex c = elementary_correlation(kernel, node.t, tp)(
            static_cast<Index>(alpha), static_cast<Index>(beta));
        inner += node.w * pa * c * std::exp(kI * omega * (node.t - tp));
      }
      total += rule.outer[i].w * pb * inner;
    }
    return total / extent;
  };

  const Complex coarse = run(config.quadrature_order);
  const Complex fine = run(config.quadrature_order + 8);
  QuadratureResult result{fine, std::abs(fine - coarse)};
  const double scale = std::max(std::abs(fine), config.tolerances.absolute);
  if (result.error_estimate > config.quadrature_tolerance * scale) {
    throw QuadratureError(result.error_estimate, "spectral quadrature did not converge");
  }
  return result;
}

MatrixQuadratureResult oracle_fluctuation_spectrum(const CovarianceOracle& oracle, double omega,
                                                   const FiniteDetection& detection,
                                                   const OracleConfig& config) {
  config.validate();
  if (!std::isfinite(omega)) throw ConfigError("omega", "must be finite");
  const double period = oracle.system().period();
  const double extent = detection_time(detection, period);
  const double width = period / static_cast<double>(config.panels_per_period);
  const Index d = static_cast<Index>(oracle.system().dimension());

  const SquareRule coarse_rule = square_rule(extent, width, config.quadrature_order);
  const SquareRule fine_rule = square_rule(extent, width, config.quadrature_order + 8);
  std::vector<double> times;
  for (const SquareRule* rule : {&coarse_rule, &fine_rule}) {
    for (std::size_t i = 0; i < rule->outer.size(); ++i) {
      times.push_back(rule->outer[i].t);
      for (const auto& node : rule->inner[i]) times.push_back(node.t);
    }
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  const auto path = oracle.trajectory(times);
  std::vector<CMatrix> inverse_fundamental;
  inverse_fundamental.reserve(times.size());
  for (const auto& f : path.fundamental) inverse_fundamental.push_back(f.inverse());
  auto index_of = [&](double t) {
    return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin());
  };

  auto run = [&](const SquareRule& rule) {
    CMatrix total = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < rule.outer.size(); ++i) {
      const std::size_t jp = index_of(rule.outer[i].t);
      CMatrix inner = CMatrix::Zero(d, d);
      for (const auto& node : rule.inner[i]) {
        const std::size_t j = index_of(node.t);
        const Complex phase = node.w * std::exp(kI * omega * (node.t - rule.outer[i].t));
        if (node.t >= rule.outer[i].t) {
          inner += phase * (path.fundamental[j] * (inverse_fundamental[jp] * path.covariance[jp]));
        } else {
          inner += phase * (path.covariance[j] *
                            (path.fundamental[jp] * inverse_fundamental[j]).transpose());
        }
      }
      total += rule.outer[i].w * inner;
    }
    return CMatrix(total / extent);
  };

  const CMatrix coarse = run(coarse_rule);
  const CMatrix fine = run(fine_rule);
  MatrixQuadratureResult result{fine, (fine - coarse).cwiseAbs().maxCoeff()};
  const double scale = std::max(fine.cwiseAbs().maxCoeff(), config.tolerances.absolute);
  if (result.error_estimate > config.quadrature_tolerance * scale) {
    throw QuadratureError(result.error_estimate, "spectral quadrature did not converge");
  }
  return result;
}

CrossQuadratureResult oracle_cross_spectra(const CovarianceOracle& oracle, double omega,
                                           const FiniteDetection& detection,
                                           const OracleConfig& config) {
  config.validate();
  if (!std::isfinite(omega)) throw ConfigError("omega", "must be finite");
  const auto& system = oracle.system();
  const double period = system.period();
  const double extent = detection_time(detection, period);
  const double width = period / static_cast<double>(config.panels_per_period);
  const Index d = static_cast<Index>(system.dimension());
  const Index n = static_cast<Index>(system.noise_count());

  const SquareRule coarse_rule = square_rule(extent, width, config.quadrature_order);
  const SquareRule fine_rule = square_rule(extent, width, config.quadrature_order + 8);
  std::vector<double> times;
  for (const SquareRule* rule : {&coarse_rule, &fine_rule}) {
    for (std::size_t i = 0; i < rule->outer.size(); ++i) {
      times.push_back(rule->outer[i].t);
      for (const auto& node : rule->inner[i]) times.push_back(node.t);
    }
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  const auto path = oracle.trajectory(times);
  std::vector<CMatrix> inverse_fundamental;
  inverse_fundamental.reserve(times.size());
  for (const auto& f : path.fundamental) inverse_fundamental.push_back(f.inverse());
  auto index_of = [&](double t) {
    return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin());
  };
  const CMatrix& g = system.noise_correlation();

  auto run = [&](const SquareRule& rule) {
    CMatrix c_xi = CMatrix::Zero(d, n);
    CMatrix xi_c = CMatrix::Zero(n, d);
    for (std::size_t i = 0; i < rule.outer.size(); ++i) {
      const double tp = rule.outer[i].t;
      const std::size_t jp = index_of(tp);
      const CMatrix b_late = system.noise_matrix(tp);
      CMatrix inner_c_xi = CMatrix::Zero(d, n);
      CMatrix inner_xi_c = CMatrix::Zero(n, d);
      for (const auto& node : rule.inner[i]) {
        const std::size_t j = index_of(node.t);
        const Complex phase = node.w * std::exp(kI * omega * (node.t - tp));
        if (node.t > tp) {
          // <x(t) xi^T(t')> = Phi(t, t') B(t') G
          inner_c_xi += phase * (path.fundamental[j] * (inverse_fundamental[jp] * (b_late * g)));
        } else {
          // <xi(t) x^T(t')> = G B^T(t) Phi(t', t)^T
          const CMatrix propagator = path.fundamental[jp] * inverse_fundamental[j];
          inner_xi_c += phase * (g * system.noise_matrix(node.t).transpose() * propagator.transpose());
        }
      }
      c_xi += rule.outer[i].w * inner_c_xi;
      xi_c += rule.outer[i].w * inner_xi_c;
    }
    return std::pair<CMatrix, CMatrix>(c_xi / extent, xi_c / extent);
  };

  const auto coarse = run(coarse_rule);
  const auto fine = run(fine_rule);
  CrossQuadratureResult result{fine.first, fine.second,
                               std::max((fine.first - coarse.first).cwiseAbs().maxCoeff(),
                                        (fine.second - coarse.second).cwiseAbs().maxCoeff())};
  const double scale = std::max({fine.first.cwiseAbs().maxCoeff(), fine.second.cwiseAbs().maxCoeff(),
                                 config.tolerances.absolute});
  if (result.error_estimate > config.quadrature_tolerance * scale) {
    throw QuadratureError(result.error_estimate, "cross-spectrum quadrature did not converge");
  }
  return result;
}

}  // namespace floqspec
