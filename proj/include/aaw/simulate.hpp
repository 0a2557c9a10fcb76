#pragma once

#include <optional>
#include <vector>

#include "aaw/floquet.hpp"
#include "aaw/model.hpp"
#include "aaw/odeint.hpp"
#include "aaw/types.hpp"

namespace aaw {

/// Closed-loop run sampled on the coarse grid (step T / steps_per_period).
/// inputs[j] is the control in effect on the step leaving node j; it is zero
/// at every node inside a wait block. States are continuous across switching
/// instants; only the inputs jump there.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> inputs;
  SwitchingSchedule schedule;
  Matrix gain;
  double period = 0;
};

struct DivergenceInfo {
  double time = 0;  ///< first grid time with a non-finite or overflowing state
  double norm = 0;
};

/// Outcome of a closed-loop run. On divergence the trajectory holds every
/// node up to the last completed period and `divergence` is set; callers that
/// cannot use partial data should go through simulate_closed_loop instead,
/// which throws.
struct SimulationResult {
  Trajectory trajectory;
  Vector final_state;
  std::optional<DivergenceInfo> divergence;
};

SimulationResult run_closed_loop(const LinearPeriodicSystem& sys,
                                 const FeedbackLaw& law, const Vector& x0,
                                 int horizon_cycles,
                                 const IntegratorConfig& cfg,
                                 bool record_trajectory = true);

SimulationResult run_closed_loop(const NonlinearAutonomousSystem& sys,
                                 const FeedbackLaw& law, const Vector& x0,
                                 int horizon_cycles,
                                 const IntegratorConfig& cfg,
                                 bool record_trajectory = true);

/// As run_closed_loop, but throws DivergenceError instead of returning a
/// partial trajectory.
Trajectory simulate_closed_loop(const LinearPeriodicSystem& sys,
                                const FeedbackLaw& law, const Vector& x0,
                                int horizon_cycles,
                                const IntegratorConfig& cfg);

Trajectory simulate_closed_loop(const NonlinearAutonomousSystem& sys,
                                const FeedbackLaw& law, const Vector& x0,
                                int horizon_cycles,
                                const IntegratorConfig& cfg);

/// Coefficients of x0 in the eigenvector basis of the cycle map and the
/// implied limit of x(k * cycle_time): the real part of the component inside
/// the unit-eigenvalue eigenspace. Requires a ConvergesToPeriodic spectrum;
/// throws PreconditionError otherwise. `ill_conditioned` is set when the
/// eigenbasis condition number exceeds 1e10 (coefficients are then suspect).
struct LimitPrediction {
  ComplexVector alphas;
  Vector limit_point;
  int kappa = 0;
  bool ill_conditioned = false;
};

LimitPrediction predict_limit(const Matrix& lambda, const Vector& x0,
                              const SpectralTolerances& tol = {});

/// Distance from the predicted limit at every cycle boundary, plus a flag
/// that the last few distances are non-increasing (10% slack; values below
/// 1e-8 count as converged noise floor). Needs at least 3 simulated cycles.
struct ConvergenceDiagnostics {
  std::vector<double> cycle_distances;
  bool monotone_tail = false;
};

ConvergenceDiagnostics convergence_diagnostics(const Trajectory& trajectory,
                                               const LimitPrediction& prediction,
                                               double cycle_time);

}  // namespace aaw
