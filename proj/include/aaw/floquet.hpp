#pragma once

#include <optional>

#include "aaw/model.hpp"
#include "aaw/odeint.hpp"
#include "aaw/types.hpp"

namespace aaw {

enum class Verdict { ConvergesToPeriodic, Unstable, Inconclusive };

const char* to_string(Verdict v);

/// Tolerances for the spectral stability test.
struct SpectralTolerances {
  /// |lambda - 1| <= tol_unit marks the structurally forced unit multiplier.
  double tol_unit = 1e-6;
  /// slack around the unit circle before a modulus counts as decisive.
  double tol_margin = 1e-9;
};

/// Eigenpairs sorted by descending modulus (ties: descending real part, then
/// descending imaginary part). Eigenvectors have unit 2-norm and are rotated
/// so that the first component of largest modulus is real and nonnegative,
/// which makes golden-value comparisons deterministic.
struct EigenDecomposition {
  ComplexVector values;
  ComplexMatrix vectors;  ///< one eigenvector per column
};

/// Dense nonsymmetric eigendecomposition (Schur/QR). Throws NumericalError
/// on iteration failure; requires finite entries and dim <= 64.
EigenDecomposition eigendecompose(const Matrix& m);

struct UnitEigenAnalysis {
  int multiplicity = 0;   ///< count of eigenvalues within tol_unit of 1
  bool semisimple = false;
};

/// Multiplicity of the eigenvalue cluster at 1 and its semisimplicity,
/// decided by the singular-value rank of (Lambda - I) at threshold
/// tol_unit * |Lambda|: semisimple iff dim - rank equals the multiplicity.
UnitEigenAnalysis unit_eigen_analysis(const Matrix& lambda, double tol_unit);

/// Spectral summary of a cycle map and the convergence verdict:
/// ConvergesToPeriodic iff the unit eigenvalue is present and semisimple and
/// every other eigenvalue lies strictly inside the unit circle.
struct MonodromyReport {
  Matrix lambda;
  double cycle_time = 0;
  ComplexVector eigenvalues;
  ComplexMatrix eigenvectors;
  int unit_multiplicity = 0;
  bool unit_semisimple = false;
  double spectral_radius_excl_unit = 0;
  Verdict verdict = Verdict::Inconclusive;
};

MonodromyReport stability_verdict(const Matrix& lambda, double cycle_time,
                                  const SpectralTolerances& tol = {});

/// Cycle map over 2T for the base schedule (wait 1, act 1, delay 1), built
/// from the closed-form decomposition
///   Lambda = Y(T,0) Phi(T,0) + int_0^T Y(T,s) B(s) F Phi(s,0) ds,
/// where Phi is the open-loop and Y the delay-free closed-loop transition
/// matrix. The integral is composite Simpson on the shared grid; Y(T, s_j)
/// comes from one backward accumulation pass (never from inverses, which
/// would be fragile for ill-conditioned partial transitions).
Matrix monodromy_integral(const LinearPeriodicSystem& sys, const Matrix& gain,
                          const IntegratorConfig& cfg);

/// Cycle map over P*T for any schedule, assembled column by column from
/// closed-loop simulations of the canonical basis vectors. This is the
/// direct-propagation route; it is the reference the integral form is
/// checked against, and the only route for non-base schedules.
Matrix monodromy_propagate(const LinearPeriodicSystem& sys,
                           const FeedbackLaw& law,
                           const IntegratorConfig& cfg);

/// Full spectral analysis of a closed loop. On the base schedule the report
/// carries the integral-form Lambda and `route_agreement` holds the max
/// elementwise gap between the two construction routes; otherwise the
/// propagated Lambda stands alone.
struct MonodromyAnalysis {
  MonodromyReport report;
  std::optional<double> route_agreement;
};

MonodromyAnalysis analyze_monodromy(const LinearPeriodicSystem& sys,
                                    const FeedbackLaw& law,
                                    const IntegratorConfig& cfg,
                                    const SpectralTolerances& tol = {});

}  // namespace aaw
