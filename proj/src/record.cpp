#include "floqspec/record.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "floqspec/errors.hpp"

namespace floqspec {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<Complex>;

constexpr std::size_t kMaxDepth = 12;

void check_finite(const State& y, double t) {
  for (const auto& v : y) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw IntegrationError(t, "non-finite state");
    }
  }
}

}  // namespace

std::array<double, ChebyshevRecord::kNodes> ChebyshevRecord::nodes(double a, double b) {
  std::array<double, kNodes> out{};
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  constexpr double n1 = static_cast<double>(kNodes - 1);
  for (std::size_t i = 0; i < kNodes; ++i) {
    // i = 0 at a, i = kNodes-1 at b.
    const std::size_t j = kNodes - 1 - i;
    out[i] = mid + half * std::cos(std::numbers::pi * static_cast<double>(j) / n1);
  }
  out.front() = a;
  out.back() = b;
  return out;
}

void ChebyshevRecord::evaluate(double t, std::span<Complex> out) const {
  t = std::clamp(t, breaks_.front(), breaks_.back());
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  std::size_t panel = static_cast<std::size_t>(std::distance(breaks_.begin(), it));
  panel = panel == 0 ? 0 : std::min(panel - 1, panels_.size() - 1);
  const double a = breaks_[panel];
  const double b = breaks_[panel + 1];
  const double x = (2.0 * t - a - b) / (b - a);
  const CMatrix& values = panels_[panel];
  constexpr double n1 = static_cast<double>(kNodes - 1);

  std::array<double, kNodes> coefficients{};
  double denominator = 0.0;
  for (std::size_t j = 0; j < kNodes; ++j) {
    const double xj = std::cos(std::numbers::pi * static_cast<double>(j) / n1);
    const double diff = x - xj;
    if (diff == 0.0) {
      for (std::size_t c = 0; c < width_; ++c) out[c] = values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c));
      return;
    }
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == kNodes - 1) w *= 0.5;
    coefficients[j] = w / diff;
    denominator += coefficients[j];
  }
  for (std::size_t c = 0; c < width_; ++c) {
    Complex numerator = 0.0;
    for (std::size_t j = 0; j < kNodes; ++j) {
      numerator += coefficients[j] * values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c));
    }
    out[c] = numerator / denominator;
  }
}

CVector ChebyshevRecord::operator()(double t) const {
  CVector out(static_cast<Eigen::Index>(width_));
  evaluate(t, std::span<Complex>(out.data(), width_));
  return out;
}

ChebyshevRecord ChebyshevRecord::from_panels(std::size_t width, std::vector<double> breaks,
                                             std::vector<CMatrix> panels, double tail) {
  ChebyshevRecord record;
  record.width_ = width;
  record.breaks_ = std::move(breaks);
  record.panels_ = std::move(panels);
  record.tail_ = tail;
  return record;
}

double ChebyshevRecord::tail_estimate(const CMatrix& panel, double absolute_floor) {
  constexpr std::size_t n = kNodes;
  constexpr double n1 = static_cast<double>(n - 1);
  double worst = 0.0;
  for (Eigen::Index c = 0; c < panel.cols(); ++c) {
    const double scale = panel.col(c).cwiseAbs().maxCoeff();
    double tail = 0.0;
    for (std::size_t k = n - 2; k < n; ++k) {
      Complex coefficient = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        coefficient += w * panel(static_cast<Eigen::Index>(j), c) *
                       std::cos(std::numbers::pi * static_cast<double>(j * k) / n1);
      }
      coefficient *= 2.0 / n1;
      if (k == n - 1) coefficient *= 0.5;
      tail += std::abs(coefficient);
    }
    worst = std::max(worst, tail / (scale + absolute_floor));
  }
  return worst;
}

std::vector<CVector> integrate_to_times(const OdeRhs& rhs, const CVector& initial,
                                        std::span<const double> times,
                                        const IntegrationTolerances& tolerances) {
  std::vector<CVector> out;
  out.reserve(times.size());
  if (times.empty()) return out;

  State y(initial.data(), initial.data() + initial.size());
  auto system = [&rhs](const State& x, State& dx, double t) {
    rhs(t, std::span<const Complex>(x), std::span<Complex>(dx));
  };
  auto observer = [&out](const State& x, double) {
    out.emplace_back(Eigen::Map<const CVector>(x.data(), static_cast<Eigen::Index>(x.size())));
  };
  const double span = times.back() - times.front();
  if (span == 0.0) {
    for (std::size_t i = 0; i < times.size(); ++i) out.push_back(initial);
    return out;
  }
  auto stepper = odeint::make_controlled(tolerances.absolute, tolerances.relative,
                                         odeint::runge_kutta_dopri5<State>());
  double dt = span / 64.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double gap = times[i] - times[i - 1];
    if (gap != 0.0 && std::abs(gap) < std::abs(dt)) dt = gap;
  }
  try {
    odeint::integrate_times(stepper, system, y, times.begin(), times.end(), dt, observer,
                            odeint::max_step_checker(100000));
  } catch (const IntegrationError&) {
    throw;
  } catch (const std::exception& e) {
    const double failed_at = out.empty() ? times.front() : times[out.size() - 1];
    throw IntegrationError(failed_at, e.what());
  }
  check_finite(y, times.back());
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (Eigen::Index k = 0; k < out[i].size(); ++k) {
      if (!std::isfinite(out[i](k).real()) || !std::isfinite(out[i](k).imag())) {
        throw IntegrationError(times[i], "non-finite state");
      }
    }
  }
  return out;
}

CVector integrate(const OdeRhs& rhs, const CVector& initial, double t0, double t1,
                  const IntegrationTolerances& tolerances) {
  const std::array<double, 2> times{t0, t1};
  return integrate_to_times(rhs, initial, times, tolerances).back();
}

class RecordBuilder {
 public:
  RecordBuilder(const OdeRhs& rhs, const IntegrationTolerances& tolerances, std::size_t width)
      : rhs_(rhs), tolerances_(tolerances), width_(width) {}

  // Integrates the panel [from, to] starting at `state` (located at `from`),
  // bisecting while the interpolant is under-resolved. Returns the state at `to`.
  CVector process(double from, double to, const CVector& state, std::size_t depth) {
    const double a = std::min(from, to);
    const double b = std::max(from, to);
    auto nodes = ChebyshevRecord::nodes(a, b);
    if (from > to) std::reverse(nodes.begin(), nodes.end());
    auto values = integrate_to_times(rhs_, state, nodes, tolerances_);

    CMatrix panel(static_cast<Eigen::Index>(ChebyshevRecord::kNodes), static_cast<Eigen::Index>(width_));
    for (std::size_t i = 0; i < ChebyshevRecord::kNodes; ++i) {
      // Row j holds the node at cos(j pi/(n-1)), i.e. row 0 is at b.
      const std::size_t j = (from < to) ? ChebyshevRecord::kNodes - 1 - i : i;
      panel.row(static_cast<Eigen::Index>(j)) = values[i].transpose();
    }
    const double tail = ChebyshevRecord::tail_estimate(panel, tolerances_.absolute / tolerances_.relative);
    if (tail > tolerances_.relative && depth < kMaxDepth) {
      const double mid = 0.5 * (from + to);
      const CVector at_mid = process(from, mid, state, depth + 1);
      return process(mid, to, at_mid, depth + 1);
    }
    pieces_.push_back({a, b, std::move(panel)});
    worst_tail_ = std::max(worst_tail_, tail);
    return values.back();
  }

  ChebyshevRecord finish() {
    std::sort(pieces_.begin(), pieces_.end(),
              [](const Piece& l, const Piece& r) { return l.a < r.a; });
    std::vector<double> breaks{pieces_.front().a};
    std::vector<CMatrix> panels;
    for (auto& piece : pieces_) {
      breaks.push_back(piece.b);
      panels.push_back(std::move(piece.values));
    }
    return ChebyshevRecord::from_panels(width_, std::move(breaks), std::move(panels), worst_tail_);
  }

 private:
  struct Piece {
    double a;
    double b;
    CMatrix values;
  };

  const OdeRhs& rhs_;
  IntegrationTolerances tolerances_;
  std::size_t width_;
  std::vector<Piece> pieces_;
  double worst_tail_ = 0.0;
};

namespace {

std::vector<double> initial_grid(double a, double b, std::span<const double> breakpoints,
                                 std::size_t initial_panels) {
  std::vector<double> grid;
  const std::size_t panels = std::max<std::size_t>(initial_panels, 1);
  for (std::size_t i = 0; i <= panels; ++i) {
    grid.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(panels));
  }
  for (double p : breakpoints) {
    if (p > a && p < b) grid.push_back(p);
  }
  std::sort(grid.begin(), grid.end());
  const double merge = 1e-12 * (b - a);
  std::vector<double> cleaned;
  for (double g : grid) {
    if (cleaned.empty() || g - cleaned.back() > merge) cleaned.push_back(g);
  }
  cleaned.front() = a;
  cleaned.back() = b;
  if (cleaned.size() == 1) cleaned.push_back(b);
  return cleaned;
}

void sample_panel(const SampledFunction& function, std::size_t width, double a, double b,
                  const IntegrationTolerances& tolerances, std::size_t depth,
                  std::vector<double>& breaks, std::vector<CMatrix>& panels, double& worst) {
  const auto nodes = ChebyshevRecord::nodes(a, b);
  CMatrix panel(static_cast<Eigen::Index>(ChebyshevRecord::kNodes), static_cast<Eigen::Index>(width));
  CVector row(static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < ChebyshevRecord::kNodes; ++i) {
    function(nodes[i], std::span<Complex>(row.data(), width));
    panel.row(static_cast<Eigen::Index>(ChebyshevRecord::kNodes - 1 - i)) = row.transpose();
  }
  const double tail =
      ChebyshevRecord::tail_estimate(panel, tolerances.absolute / tolerances.relative);
  if (tail > tolerances.relative && depth < kMaxDepth) {
    const double mid = 0.5 * (a + b);
    sample_panel(function, width, a, mid, tolerances, depth + 1, breaks, panels, worst);
    sample_panel(function, width, mid, b, tolerances, depth + 1, breaks, panels, worst);
    return;
  }
  worst = std::max(worst, tail);
  breaks.push_back(b);
  panels.push_back(std::move(panel));
}

}  // namespace

ChebyshevRecord sample_recorded(const SampledFunction& function, std::size_t width, double a,
                                double b, std::span<const double> breakpoints,
                                const IntegrationTolerances& tolerances,
                                std::size_t initial_panels) {
  tolerances.validate();
  if (!(b > a)) throw ConfigError("interval", "sample_recorded needs a < b");
  const auto grid = initial_grid(a, b, breakpoints, initial_panels);
  std::vector<double> breaks{a};
  std::vector<CMatrix> panels;
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    sample_panel(function, width, grid[i], grid[i + 1], tolerances, 0, breaks, panels, worst);
  }
  return ChebyshevRecord::from_panels(width, std::move(breaks), std::move(panels), worst);
}

RecordedSolution integrate_recorded(const OdeRhs& rhs, const CVector& initial, double t0, double t1,
                                    std::span<const double> breakpoints,
                                    const IntegrationTolerances& tolerances,
                                    std::size_t initial_panels) {
  tolerances.validate();
  if (t0 == t1) throw IntegrationError(t0, "empty integration interval");
  const double a = std::min(t0, t1);
  const double b = std::max(t0, t1);
  auto cleaned = initial_grid(a, b, breakpoints, initial_panels);
  if (t0 > t1) std::reverse(cleaned.begin(), cleaned.end());

  RecordBuilder builder(rhs, tolerances, static_cast<std::size_t>(initial.size()));
  CVector state = initial;
  for (std::size_t i = 0; i + 1 < cleaned.size(); ++i) {
    state = builder.process(cleaned[i], cleaned[i + 1], state, 0);
  }
  return {builder.finish(), state};
}

}  // namespace floqspec
