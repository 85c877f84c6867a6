#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "floqspec/types.hpp"

namespace floqspec {

/// Right-hand side of a complex first-order system y' = f(t, y).
using OdeRhs = std::function<void(double t, std::span<const Complex> y, std::span<Complex> dy)>;

/// Continuous output of an integration: a piecewise Chebyshev-Lobatto
/// interpolant of a vector-valued function over [begin, end].
class ChebyshevRecord {
 public:
  static constexpr std::size_t kNodes = 17;

  ChebyshevRecord() = default;

  double begin() const { return breaks_.front(); }
  double end() const { return breaks_.back(); }
  std::size_t width() const { return width_; }
  std::size_t panel_count() const { return panels_.size(); }
  const std::vector<double>& breaks() const { return breaks_; }

  /// Largest trailing Chebyshev coefficient relative to the panel scale.
  double interpolation_error_estimate() const { return tail_; }

  /// Evaluates every component at t (clamped to [begin, end]).
  void evaluate(double t, std::span<Complex> out) const;
  CVector operator()(double t) const;

  /// Lobatto nodes of [a, b], ordered from a to b.
  static std::array<double, kNodes> nodes(double a, double b);

  /// Assembles a record from per-panel node values (row j at cos(j pi/(n-1))).
  static ChebyshevRecord from_panels(std::size_t width, std::vector<double> breaks,
                                     std::vector<CMatrix> panels, double tail);

  /// Trailing-coefficient size of one panel relative to its scale.
  static double tail_estimate(const CMatrix& panel, double absolute_floor);

 private:
  friend class RecordBuilder;

  std::size_t width_ = 0;
  std::vector<double> breaks_;
  // Per panel: kNodes x width node values, node j at cos(j pi / (n-1)) mapped to
  // the panel, i.e. ordered from right end to left end.
  std::vector<CMatrix> panels_;
  double tail_ = 0.0;
};

struct RecordedSolution {
  ChebyshevRecord record;
  CVector final_state;
};

/// Integrates y' = f from t0 to t1 (either direction) and records the
/// solution. Panels start at the supplied breakpoints plus a uniform split
/// and are bisected until the Chebyshev tail drops below the tolerance.
RecordedSolution integrate_recorded(const OdeRhs& rhs, const CVector& initial, double t0, double t1,
                                    std::span<const double> breakpoints,
                                    const IntegrationTolerances& tolerances,
                                    std::size_t initial_panels = 8);

/// Records a known function by sampling it at Lobatto nodes, bisecting
/// panels until the Chebyshev tail drops below the relative tolerance.
using SampledFunction = std::function<void(double t, std::span<Complex> out)>;
ChebyshevRecord sample_recorded(const SampledFunction& function, std::size_t width, double a,
                                double b, std::span<const double> breakpoints,
                                const IntegrationTolerances& tolerances,
                                std::size_t initial_panels = 4);

/// Integrates through the monotone list of output times and returns the state
/// at each of them. times.front() is the initial time.
std::vector<CVector> integrate_to_times(const OdeRhs& rhs, const CVector& initial,
                                        std::span<const double> times,
                                        const IntegrationTolerances& tolerances);

/// Final state only.
CVector integrate(const OdeRhs& rhs, const CVector& initial, double t0, double t1,
                  const IntegrationTolerances& tolerances);

}  // namespace floqspec
