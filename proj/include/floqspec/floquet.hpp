#pragma once

#include "floqspec/periodic_system.hpp"
#include "floqspec/record.hpp"
#include "floqspec/types.hpp"

namespace floqspec {

/// Principal fundamental matrix F(t), F(0) = I, recorded over one period.
class FundamentalRecord {
 public:
  FundamentalRecord(ChebyshevRecord record, CMatrix monodromy, double period);

  /// F(t) for t in [0, T].
  CMatrix at(double t) const;
  const CMatrix& monodromy() const { return monodromy_; }
  double period() const { return period_; }
  const ChebyshevRecord& record() const { return record_; }

 private:
  ChebyshevRecord record_;
  CMatrix monodromy_;
  double period_;
  Eigen::Index dimension_;
};

FundamentalRecord integrate_fundamental(const PeriodicLinearSystem& system,
                                        const IntegrationTolerances& tolerances = {});

/// Eigensystem of the monodromy: F(T) S = S diag(e^{mu T}).
struct ModalDecomposition {
  CVector exponents;    // principal-branch Floquet exponents, sorted
  CVector multipliers;  // eigenvalues of F(T), same order
  CMatrix modes;        // unit-norm right eigenvectors as columns
  CMatrix modes_inverse;
  double condition = 1.0;
};

inline constexpr double kMaxModeCondition = 1e8;

/// Floquet exponents mu = ln(phi) / T on the principal branch, sorted by
/// descending real part (ties by ascending imaginary part).
/// Throws NonDiagonalizableError when cond(S) exceeds `max_condition`.
ModalDecomposition decompose(const CMatrix& monodromy, double period,
                             double max_condition = kMaxModeCondition);

/// K(t) and its inverse.
struct FramePair {
  CMatrix frame;
  CMatrix inverse;
};

struct StabilityReport {
  double max_growth_rate;
  bool stable;
};

class FloquetDecomposition {
 public:
  FloquetDecomposition(PeriodicLinearSystem system, FundamentalRecord fundamental,
                       ModalDecomposition modes);

  static FloquetDecomposition build(const PeriodicLinearSystem& system,
                                    const IntegrationTolerances& tolerances = {});

  const PeriodicLinearSystem& system() const { return system_; }
  std::size_t dimension() const { return system_.dimension(); }
  double period() const { return system_.period(); }

  const CMatrix& monodromy() const { return fundamental_.monodromy(); }
  const CVector& exponents() const { return modes_.exponents; }
  const CVector& multipliers() const { return modes_.multipliers; }
  const CMatrix& modes() const { return modes_.modes; }
  const CMatrix& modes_inverse() const { return modes_.modes_inverse; }
  double mode_condition() const { return modes_.condition; }
  double max_growth_rate() const;
  const FundamentalRecord& fundamental() const { return fundamental_; }

  /// K(t) = F(t) S e^{-D t} and K^{-1}(t). Times in [0, T] are used as given,
  /// anything else is reduced modulo T first.
  FramePair frame(double t) const;

  /// Same decomposition with mu_mode shifted by 2 pi i k / T.
  FloquetDecomposition with_branch_shift(std::size_t mode, int k) const;

 private:
  PeriodicLinearSystem system_;
  FundamentalRecord fundamental_;
  ModalDecomposition modes_;
};

StabilityReport stability_check(const FloquetDecomposition& decomposition);

}  // namespace floqspec
